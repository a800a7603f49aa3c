#include "hsa/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsa/errors.hpp"
#include "hsa/oracle.hpp"

namespace hsa {

EulerianState multipeakon_initial() {
  const std::vector<double> xs{0.0,           1.0,          400.0 / 361.0,
                               800.0 / 361.0, 200.0 / 81.0, 100.0 / 27.0};
  const std::vector<double> uv{3.0,         2.0,         2.0,
                               18.0 / 19.0, 18.0 / 19.0, -28.0 / 171.0};
  const std::vector<double> fv{0.0, 1.0, 1.0, 2.0, 2.0, 3.0};
  MonotoneStep F = MonotoneStep::absolutely_continuous(xs, fv);
  MonotoneStep G = F;
  return EulerianState{PiecewiseLinear(xs, uv), std::move(F),
                       MonotoneStep::zero(), std::move(G), 3.0, 3.0};
}

AlphaProfile multipeakon_alpha() {
  return AlphaProfile(PiecewiseLinear(
      {1434.0 / 361.0, 6879.0 / 1444.0, 5.0}, {0.0, 3.0 / 4.0, 4.0 / 5.0}));
}

EulerianState cusp_initial(double dx) {
  if (!(dx > 0.0)) throw config_error("cusp_initial: dx must be positive");
  std::vector<double> xs;
  const long K = static_cast<long>(std::floor(1.0 / dx + 1e-9));
  xs.push_back(-1.0);
  for (long j = -K; j <= K; ++j) {
    const double x = static_cast<double>(j) * dx;
    if (x > -1.0 && x < 1.0 && (xs.empty() || x > xs.back())) xs.push_back(x);
  }
  xs.push_back(1.0);

  std::vector<double> uv(xs.size()), fv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double r = std::cbrt(std::abs(x));
    uv[i] = r * r;
    fv[i] = 4.0 / 3.0 * (1.0 + (x < 0.0 ? -r : r));
  }
  MonotoneStep F = MonotoneStep::absolutely_continuous(xs, fv);
  MonotoneStep G = F;
  const double total = F.total();
  return EulerianState{PiecewiseLinear(xs, uv), std::move(F),
                       MonotoneStep::zero(), std::move(G), total, total};
}

AlphaProfile cusp_alpha(double beta) {
  if (beta == 0.0) return AlphaProfile::zero();
  return AlphaProfile(PiecewiseLinear({-1.0, 0.0}, {beta, 0.0}));
}

ReferenceSpec ReferenceSpec::parse(const std::string& text) {
  ReferenceSpec r;
  if (text == "none") {
    r.kind = Kind::none;
  } else if (text == "exact") {
    r.kind = Kind::exact;
  } else if (text.rfind("fine:", 0) == 0) {
    r.kind = Kind::fine;
    char* end = nullptr;
    r.fine_dx = std::strtod(text.c_str() + 5, &end);
    if (end == text.c_str() + 5 || *end != '\0' || !(r.fine_dx > 0.0))
      throw config_error("reference: malformed fine:<dx> value");
  } else {
    throw config_error("reference: expected exact, fine:<dx> or none");
  }
  return r;
}

std::string ReferenceSpec::to_string() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::exact:
      return "exact";
    case Kind::fine: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "fine:%g", fine_dx);
      return buf;
    }
  }
  return "none";
}

void ExperimentConfig::check() const {
  if (initial_data != "multipeakon" && initial_data != "cusp" &&
      initial_data != "custom")
    throw config_error("initial_data: unknown builtin '" + initial_data + "'");
  if (initial_data == "custom" && (!custom_state || !custom_alpha))
    throw config_error("custom initial data requires node arrays");
  if (initial_data == "cusp" && (beta < 0.0 || beta >= 1.0))
    throw config_error("beta must lie in [0, 1)");
  if (dx_list.empty()) throw config_error("dx_list must not be empty");
  for (double dx : dx_list)
    if (!(dx > 0.0)) throw config_error("dx_list entries must be positive");
  if (!(T > 0.0)) throw config_error("T must be positive");
  for (double t : query_times)
    if (t < 0.0 || t > T) throw config_error("query_times must lie in [0, T]");
  if (reference.kind == ReferenceSpec::Kind::exact &&
      initial_data != "multipeakon")
    throw config_error("reference 'exact' is only available for multipeakon");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: parse failure: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");

  static const std::vector<std::string> known{
      "version",     "initial_data",  "beta",          "dx_list",
      "T",           "query_times",   "minimal_steps", "reference",
      "out_dir",     "cache_dir",     "max_error_times"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw config_error("config: unknown key '" + it.key() + "'");

  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != 1)
    throw config_error("config: missing or unsupported version (expected 1)");

  ExperimentConfig c;
  try {
    if (j.contains("initial_data")) {
      if (j["initial_data"].is_string()) {
        c.initial_data = j["initial_data"].get<std::string>();
      } else if (j["initial_data"].is_object()) {
        const auto& d = j["initial_data"];
        static const std::vector<std::string> dkeys{
            "u_nodes", "u_values", "F_nodes", "F_values", "alpha_nodes",
            "alpha_values"};
        for (auto it = d.begin(); it != d.end(); ++it)
          if (std::find(dkeys.begin(), dkeys.end(), it.key()) == dkeys.end())
            throw config_error("config: unknown initial_data key '" +
                               it.key() + "'");
        c.initial_data = "custom";
        auto vec = [&](const char* k) {
          return d.at(k).get<std::vector<double>>();
        };
        MonotoneStep F =
            MonotoneStep::absolutely_continuous(vec("F_nodes"), vec("F_values"));
        MonotoneStep G = F;
        const double total = F.total();
        c.custom_state = EulerianState{
            PiecewiseLinear(vec("u_nodes"), vec("u_values")), std::move(F),
            MonotoneStep::zero(), std::move(G), total, total};
        c.custom_alpha = PiecewiseLinear(vec("alpha_nodes"), vec("alpha_values"));
      } else {
        throw config_error("config: initial_data must be a name or an object");
      }
    }
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("dx_list")) c.dx_list = j["dx_list"].get<std::vector<double>>();
    if (j.contains("T")) c.T = j["T"].get<double>();
    if (j.contains("query_times"))
      c.query_times = j["query_times"].get<std::vector<double>>();
    if (j.contains("minimal_steps")) c.minimal_steps = j["minimal_steps"].get<bool>();
    if (j.contains("max_error_times"))
      c.max_error_times = j["max_error_times"].get<std::size_t>();
    if (j.contains("reference"))
      c.reference = ReferenceSpec::parse(j["reference"].get<std::string>());
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  } catch (const numeric_error& e) {
    throw config_error(std::string("config: invalid data: ") + e.what());
  }
  return c;
}

InitialData make_initial(const ExperimentConfig& c, double dx) {
  if (c.initial_data == "multipeakon")
    return {multipeakon_initial(), multipeakon_alpha()};
  if (c.initial_data == "cusp") return {cusp_initial(dx), cusp_alpha(c.beta)};
  return {*c.custom_state, AlphaProfile(*c.custom_alpha)};
}

namespace {

std::string format_g(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dx_tag(double dx) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", dx);
  std::string s = buf;
  for (char& ch : s)
    if (ch == '.' || ch == '+') ch = '_';
  return s;
}

void write_energy_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<double, double>>& trace) {
  std::ofstream os(path);
  os << "t,F_inf\n";
  for (const auto& [t, e] : trace)
    os << format_g(t) << "," << format_g(e) << "\n";
}

void write_solution_csv(const std::filesystem::path& path,
                        const EulerianState& s) {
  std::ofstream os(path);
  os << "x,u,F,F_right,G,G_right\n";
  for (double x : s.u.nodes()) {
    os << format_g(x) << "," << format_g(s.u(x)) << "," << format_g(s.F(x))
       << "," << format_g(s.F_right(x)) << "," << format_g(s.G(x)) << ","
       << format_g(s.G.eval_right(x)) << "\n";
  }
}

std::vector<double> error_times(const TimePartition& partition,
                                const std::vector<double>& extras,
                                std::size_t cap) {
  std::vector<double> ts = partition.taus;
  if (cap > 1 && ts.size() > cap) {
    std::vector<double> picked;
    picked.reserve(cap);
    const std::size_t n = ts.size();
    for (std::size_t i = 0; i < cap; ++i)
      picked.push_back(ts[i * (n - 1) / (cap - 1)]);
    ts = std::move(picked);
  }
  ts.insert(ts.end(), extras.begin(), extras.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

ErrorReport run(const ExperimentConfig& config, bool time_both_modes) {
  config.check();

  const bool have_out = !config.out_dir.empty();
  const std::filesystem::path out(config.out_dir);
  if (have_out) std::filesystem::create_directories(out);
  const std::string cache =
      config.cache_dir.empty() ? config.out_dir : config.cache_dir;

  // plan the error-sampling times per dx, then fetch the reference once
  EvolutionConfig ecfg;
  ecfg.minimal_steps = config.minimal_steps;
  std::vector<std::vector<double>> times_per_dx;
  std::vector<double> union_times;
  for (double dx : config.dx_list) {
    InitialData init = make_initial(config, dx);
    const TimePartition plan =
        plan_partition(init.state, init.alpha, dx, config.T, ecfg);
    times_per_dx.push_back(
        error_times(plan, config.query_times, config.max_error_times));
    union_times.insert(union_times.end(), times_per_dx.back().begin(),
                       times_per_dx.back().end());
  }
  std::sort(union_times.begin(), union_times.end());
  union_times.erase(std::unique(union_times.begin(), union_times.end()),
                    union_times.end());

  std::optional<FineReference> fine;
  if (config.reference.kind == ReferenceSpec::Kind::fine) {
    InitialData init = make_initial(config, config.reference.fine_dx);
    fine = fine_reference(init.state, init.alpha, config.reference.fine_dx,
                          config.T, union_times, cache);
  }
  auto fine_at = [&](double t) -> const EulerianState& {
    const auto it =
        std::lower_bound(fine->times.begin(), fine->times.end(), t - 1e-15);
    if (it == fine->times.end() || std::abs(*it - t) > 1e-12)
      throw numeric_error("run: reference not evaluated at a query time");
    return fine->states[static_cast<std::size_t>(it - fine->times.begin())];
  };

  ErrorReport report;
  for (std::size_t i = 0; i < config.dx_list.size(); ++i) {
    const double dx = config.dx_list[i];
    InitialData init = make_initial(config, dx);

    SolveResult res =
        solve(init.state, init.alpha, dx, config.T, ecfg, times_per_dx[i]);

    ErrorRow row;
    row.dx = dx;
    row.N = static_cast<long>(res.stats.partition.n_intervals());
    row.iterations = res.stats.total_iterations;

    if (config.reference.kind != ReferenceSpec::Kind::none) {
      double sup_u = 0.0;
      for (const auto& snap : res.snapshots) {
        if (config.reference.kind == ReferenceSpec::Kind::exact) {
          auto [u_ref, F_ref] = exact_multipeakon_state(snap.t);
          sup_u = std::max(sup_u, sup_norm_diff(snap.eulerian.u, u_ref));
        } else {
          sup_u = std::max(
              sup_u, sup_norm_diff(snap.eulerian.u, fine_at(snap.t).u));
        }
      }
      row.sup_u_err = sup_u;
      const double F_T = res.stats.energy_trace.back().second;
      if (config.reference.kind == ReferenceSpec::Kind::exact)
        row.F_inf_err = std::abs(F_T - exact_multipeakon_F_inf(config.T));
      else
        row.F_inf_err = std::abs(F_T - fine_at(config.T).F_inf);
    }

    if (time_both_modes) {
      // identical workloads (single query at T, no bookkeeping) so the
      // two wall times compare the stepping strategies alone
      for (bool minimal : {true, false}) {
        EvolutionConfig tcfg;
        tcfg.minimal_steps = minimal;
        tcfg.collect_checks = false;
        const auto t1 = std::chrono::steady_clock::now();
        SolveResult timed =
            solve(init.state, init.alpha, dx, config.T, tcfg, {config.T});
        const double e = seconds_since(t1);
        (void)timed;
        (minimal ? row.time_minimal_s : row.time_full_s) = e;
      }
    }

    if (have_out) {
      write_energy_csv(out / ("energy_dx" + dx_tag(dx) + ".csv"),
                       res.stats.energy_trace);
      for (const auto& snap : res.snapshots) {
        char tb[32];
        std::snprintf(tb, sizeof tb, "%.6g", snap.t);
        std::string ts = tb;
        for (char& ch : ts)
          if (ch == '.' || ch == '+') ch = '_';
        write_solution_csv(
            out / ("solution_dx" + dx_tag(dx) + "_t" + ts + ".csv"),
            snap.eulerian);
      }
    }
    report.rows.push_back(row);
  }

  if (have_out) {
    emit_csv(report, (out / "errors.csv").string());
    std::ofstream os(out / "summary.txt");
    os << "initial_data: " << config.initial_data << "\n"
       << "T: " << config.T << "\n"
       << "minimal_steps: " << (config.minimal_steps ? "on" : "off") << "\n"
       << "reference: " << config.reference.to_string() << "\n";
    for (const auto& r : report.rows)
      os << "dx=" << r.dx << " sup_u_err=" << r.sup_u_err
         << " F_inf_err=" << r.F_inf_err << " N=" << r.N
         << " iterations=" << r.iterations << "\n";
  }
  return report;
}

void emit_csv(const ErrorReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw config_error("emit_csv: cannot open " + path);
  os << "dx,sup_u_err,F_inf_err,N,iterations,time_minimal_s,time_full_s\n";
  for (const auto& r : report.rows) {
    os << format_g(r.dx) << "," << format_g(r.sup_u_err) << ","
       << format_g(r.F_inf_err) << "," << r.N << "," << r.iterations << ","
       << format_g(r.time_minimal_s) << "," << format_g(r.time_full_s) << "\n";
  }
}

}  // namespace hsa
