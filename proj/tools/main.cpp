#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsa/errors.hpp"
#include "hsa/experiment.hpp"
#include "hsa/oracle.hpp"

namespace {

struct Cli {
  std::string config_path;
  std::string data;
  std::string reference;
  std::string out_dir;
  double dx = 0.0;
  std::vector<double> dx_list;
  double T = 0.0;
  double beta = -1.0;
  std::vector<double> query_times;
  bool minimal = true;
  bool have_minimal_flag = false;
};

hsa::ExperimentConfig resolve(const Cli& cli) {
  hsa::ExperimentConfig cfg;
  if (!cli.config_path.empty()) cfg = hsa::load_config(cli.config_path);
  if (!cli.data.empty()) cfg.initial_data = cli.data;
  if (!cli.reference.empty())
    cfg.reference = hsa::ReferenceSpec::parse(cli.reference);
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (!cli.dx_list.empty()) cfg.dx_list = cli.dx_list;
  if (cli.dx > 0.0) cfg.dx_list = {cli.dx};
  if (cli.T > 0.0) cfg.T = cli.T;
  if (cli.beta >= 0.0) cfg.beta = cli.beta;
  if (!cli.query_times.empty()) cfg.query_times = cli.query_times;
  if (cli.have_minimal_flag) cfg.minimal_steps = cli.minimal;
  return cfg;
}

void print_report(const hsa::ErrorReport& report) {
  std::printf("%-12s %-13s %-13s %6s %6s %12s %12s\n", "dx", "sup_u_err",
              "F_inf_err", "N", "iters", "t_minimal_s", "t_full_s");
  for (const auto& r : report.rows)
    std::printf("%-12g %-13.6g %-13.6g %6ld %6ld %12.4f %12.4f\n", r.dx,
                r.sup_u_err, r.F_inf_err, r.N, r.iterations, r.time_minimal_s,
                r.time_full_s);
}

int cmd_project(const hsa::ExperimentConfig& cfg) {
  cfg.check();
  for (double dx : cfg.dx_list) {
    hsa::InitialData init = hsa::make_initial(cfg, dx);
    hsa::EulerianState p = hsa::project(init.state, dx);
    auto violations = hsa::validate(p, /*require_equal_measures=*/true);
    if (!violations.empty())
      throw hsa::numeric_error("projected data invalid: " + violations.front());
    if (!cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      char tag[32];
      std::snprintf(tag, sizeof tag, "%g", dx);
      std::ofstream os(std::filesystem::path(cfg.out_dir) /
                       (std::string("projected_dx") + tag + ".csv"));
      os << "x,u,F,F_right\n";
      for (double x : p.u.nodes())
        os << x << "," << p.u(x) << "," << p.F(x) << "," << p.F_right(x)
           << "\n";
    }
    std::printf("dx=%g: projected onto %zu nodes, F_inf=%.12g\n", dx,
                p.u.size(), p.F_inf);
  }
  return 0;
}

int cmd_solve(hsa::ExperimentConfig cfg) {
  if (cfg.dx_list.size() != 1)
    throw hsa::config_error("solve: exactly one dx required (use --dx)");
  if (cfg.query_times.empty()) cfg.query_times = {cfg.T};
  hsa::ErrorReport report = hsa::run(cfg);
  print_report(report);
  return 0;
}

int cmd_ladder(const hsa::ExperimentConfig& cfg) {
  hsa::ErrorReport report = hsa::run(cfg);
  print_report(report);
  return 0;
}

int cmd_bench(const hsa::ExperimentConfig& cfg) {
  hsa::ErrorReport report = hsa::run(cfg, /*time_both_modes=*/true);
  print_report(report);
  if (!cfg.out_dir.empty())
    hsa::emit_csv(report,
                  (std::filesystem::path(cfg.out_dir) / "bench.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Characteristic-based solver for dissipative wave-breaking dynamics "
      "with a spatially varying energy-removal profile"};
  app.require_subcommand(1);

  Cli cli;
  app.add_option("--config", cli.config_path, "JSON config file");
  app.add_option("--data", cli.data, "builtin dataset: multipeakon | cusp");
  app.add_option("--dx", cli.dx, "grid spacing (single run)");
  app.add_option("--dx-list", cli.dx_list, "grid spacings for ladders")
      ->delimiter(',');
  app.add_option("--T", cli.T, "final time");
  app.add_option("--beta", cli.beta, "cusp dissipation strength in [0, 1)");
  app.add_option("--query-times", cli.query_times, "extra output times")
      ->delimiter(',');
  app.add_option("--reference", cli.reference,
                 "error reference: exact | fine:<dx> | none");
  app.add_option("--out", cli.out_dir, "output directory");
  auto* min_flag =
      app.add_flag("--minimal,!--no-minimal", cli.minimal,
                   "evolve with minimal time steps (default on)");

  auto* c_project = app.add_subcommand("project", "emit projected initial data");
  auto* c_solve = app.add_subcommand("solve", "single run with node dumps");
  auto* c_ladder = app.add_subcommand("ladder", "error report across dx_list");
  auto* c_bench =
      app.add_subcommand("bench", "timings with and without minimal steps");
  for (CLI::App* sc : {c_project, c_solve, c_ladder, c_bench})
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);
  cli.have_minimal_flag = min_flag->count() > 0;

  try {
    hsa::ExperimentConfig cfg = resolve(cli);
    if (c_project->parsed()) return cmd_project(cfg);
    if (c_solve->parsed()) return cmd_solve(cfg);
    if (c_ladder->parsed()) return cmd_ladder(cfg);
    if (c_bench->parsed()) return cmd_bench(cfg);
    throw hsa::config_error("no subcommand given");
  } catch (const hsa::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hsa::numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
