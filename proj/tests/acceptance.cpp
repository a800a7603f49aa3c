// Acceptance suite: one line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hsa/errors.hpp"
#include "hsa/evolution.hpp"
#include "hsa/experiment.hpp"
#include "hsa/lagrangian.hpp"
#include "hsa/metrics.hpp"
#include "hsa/oracle.hpp"
#include "helpers.hpp"

using namespace hsa;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

struct RegisteredRun {
  std::string label;
  double dx;
  SolveStats stats;
};

std::vector<RegisteredRun> g_runs;
bool g_H_conserved = true;
bool g_grids_valid = true;

SolveResult run_and_register(const std::string& label,
                             const EulerianState& s0, const AlphaProfile& a,
                             double dx, double T, const EvolutionConfig& cfg,
                             std::vector<double> queries) {
  SolveResult r = solve(s0, a, dx, T, cfg, std::move(queries));
  // node H values must never move; every snapshot must satisfy the
  // Lagrangian membership conditions
  const LagrangianGrid g0 = to_lagrangian(project(s0, dx));
  for (const auto& snap : r.snapshots) {
    if (snap.grid.H.size() != g0.H.size()) {
      g_H_conserved = false;
    } else {
      for (std::size_t j = 0; j < g0.H.size(); ++j)
        if (snap.grid.H[j] != g0.H[j]) g_H_conserved = false;
    }
    if (!validate(snap.grid).empty()) g_grids_valid = false;
  }
  g_runs.push_back({label, dx, r.stats});
  return r;
}

std::vector<double> partition_queries(const EulerianState& s0,
                                      const AlphaProfile& a, double dx,
                                      double T, const EvolutionConfig& cfg) {
  return plan_partition(s0, a, dx, T, cfg).taus;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  const auto wall0 = std::chrono::steady_clock::now();
  std::vector<Criterion> cs;
  const double T = 3.0;
  const std::vector<double> ladder{1e-1, 1e-2, 1e-3, 1e-4};

  // ---- shared multipeakon ladder against the closed-form solution ----
  const EulerianState mp = multipeakon_initial();
  const AlphaProfile mpa = multipeakon_alpha();
  std::vector<double> F_err, u_err, dts;
  std::vector<std::vector<double>> cluster_times;
  for (double dx : ladder) {
    EvolutionConfig cfg;
    std::vector<double> qs = partition_queries(mp, mpa, dx, T, cfg);
    SolveResult r = run_and_register("multipeakon", mp, mpa, dx, T, cfg, qs);
    double sup_u = 0.0;
    for (const auto& snap : r.snapshots) {
      auto [u_ex, F_ex] = exact_multipeakon_state(snap.t);
      sup_u = std::max(sup_u, sup_norm_diff(snap.eulerian.u, u_ex));
    }
    u_err.push_back(sup_u);
    F_err.push_back(
        std::abs(r.stats.energy_trace.back().second - 19.0 / 20.0));
    dts.push_back(r.stats.dt);

    // distinct times attained by more than one cell form the clusters
    LagrangianGrid g0 = to_lagrangian(project(mp, dx));
    BreakingTimes bt = breaking_times(g0);
    std::vector<double> clusters;
    for (std::size_t i = 1; i < bt.distinct.size(); ++i)
      if (bt.cells[i].size() >= 2 && bt.distinct[i] <= T)
        clusters.push_back(bt.distinct[i]);
    cluster_times.push_back(std::move(clusters));
  }

  // 1. total-energy error against the exact value 19/20
  {
    Criterion c{1, "exact-oracle energy"};
    for (double e : F_err) c.require(std::isfinite(e), "finite error");
    // one documented jump is allowed between dx = 5e-2 and 1e-2
    for (std::size_t i = 2; i < F_err.size(); ++i) {
      std::ostringstream what;
      what << "nonincreasing at dx=" << ladder[i];
      c.require(F_err[i] <= F_err[i - 1], what.str());
    }
    c.require(F_err.back() <= 1e-2, "error at dx=1e-4 below 1e-2");
    c.detail << " |F_inf(3) - 19/20| =";
    for (double e : F_err) c.detail << " " << e;
    cs.push_back(std::move(c));
  }

  // 2. wave-profile error decay and the location of the clusters
  {
    Criterion c{2, "exact-oracle wave profile"};
    c.require(u_err[2] < u_err[1], "decrease 1e-2 -> 1e-3");
    c.require(u_err[3] < u_err[2], "decrease 1e-3 -> 1e-4");
    c.require(u_err[3] < u_err[0], "overall decrease");
    const double targets[3] = {2.0, 40.0 / 19.0, 20.0 / 9.0};
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      for (double tc : cluster_times[i]) {
        double dist = 1e300;
        for (double tt : targets) dist = std::min(dist, std::abs(tc - tt));
        std::ostringstream what;
        what << "cluster " << tc << " within 5*dt at dx=" << ladder[i];
        c.require(dist <= 5.0 * dts[i], what.str());
      }
    }
    c.detail << " sup_t ||u - u_dx||_inf =";
    for (double e : u_err) c.detail << " " << e;
    cs.push_back(std::move(c));
  }

  // 3. projection bounds on builtins and randomized data
  {
    Criterion c{3, "projection bounds"};
    const double cu = 1.0 + std::sqrt(2.0);
    const double slack = 1e-10;
    auto check_state = [&](const EulerianState& s, double dx,
                           const char* label) {
      EulerianState p = project(s, dx);
      const double fac = s.F_ac.total();
      std::ostringstream what;
      what << label << " dx=" << dx;
      c.require(sup_norm_diff(p.u, s.u) <=
                    cu * std::sqrt(fac) * std::sqrt(dx) + slack,
                "u bound " + what.str());
      c.require(l1_norm_diff(p.F_total(), s.F_total()) <=
                    2.0 * s.F_inf * dx + slack,
                "F L1 bound " + what.str());
      c.require(l2_norm_diff(p.F_total(), s.F_total()) <=
                    2.0 * s.F_inf * std::sqrt(dx) + slack,
                "F L2 bound " + what.str());
    };
    for (double dx : {1e-1, 1e-2, 1e-3}) {
      check_state(mp, dx, "multipeakon");
      check_state(cusp_initial(dx), dx, "cusp");
    }
    std::mt19937 rng(2024);
    for (int i = 0; i < 20; ++i) {
      auto d = testutil::random_initial_data(rng, i % 2 == 0);
      for (double dx : {1e-1, 1e-2, 1e-3}) check_state(d.state, dx, "random");
    }
    c.detail << " 22 datasets x {1e-1,1e-2,1e-3}, slack 1e-10";
    cs.push_back(std::move(c));
  }

  // runs needed by 7 and 9 (registered so 4/5/6 sweep them too)
  EvolutionConfig cfg_min, cfg_full;
  cfg_full.minimal_steps = false;
  const AlphaProfile cuspa = cusp_alpha(19.0 / 20.0);
  SolveResult cusp3_min = run_and_register(
      "cusp-1e-3-min", cusp_initial(1e-3), cuspa, 1e-3, T, cfg_min, {T});
  SolveResult cusp3_full = run_and_register(
      "cusp-1e-3-full", cusp_initial(1e-3), cuspa, 1e-3, T, cfg_full, {T});
  SolveResult cusp4_min = run_and_register(
      "cusp-1e-4-min", cusp_initial(1e-4), cuspa, 1e-4, T, cfg_min, {T});

  // conservative run for 8
  SolveResult conserv =
      run_and_register("multipeakon-alpha0", mp, AlphaProfile::zero(), 1e-2, T,
                       cfg_min, {0.7, 1.9, 2.6, T});

  // 4. structural invariants at every partition point of every run
  {
    Criterion c{4, "structural invariants"};
    double worst = 0.0;
    for (const auto& run : g_runs) {
      std::ostringstream what;
      what << run.label << " dx=" << run.dx;
      c.require(run.stats.max_defect_energy_relation <= 1e-9,
                "dy dV = dU^2 " + what.str());
      c.require(run.stats.min_dV >= 0.0, "dV >= 0 " + what.str());
      c.require(run.stats.max_dV_minus_dH <= 0.0, "dV <= dH " + what.str());
      c.require(run.stats.energy_monotone, "V_inf monotone " + what.str());
      worst = std::max(worst, run.stats.max_defect_energy_relation);
    }
    c.require(g_H_conserved, "H nodes constant in time");
    c.require(g_grids_valid, "snapshots satisfy membership conditions");
    c.detail << " max rel defect " << worst << " over " << g_runs.size()
             << " runs";
    cs.push_back(std::move(c));
  }

  // 5. partition combinatorics
  {
    Criterion c{5, "partition combinatorics"};
    for (const auto& run : g_runs) {
      const auto& p = run.stats.partition;
      if (p.dt <= 0.0) continue;
      const bool minimal_run = run.label.find("full") == std::string::npos;
      if (!minimal_run) continue;
      const double N = static_cast<double>(p.n_intervals());
      std::ostringstream what;
      what << run.label << " dx=" << run.dx;
      c.require(N < 2.0 * (p.T / p.dt + 1.0), "N bound " + what.str());
      for (std::size_t k = 0; k + 3 <= p.n_intervals(); ++k)
        c.require(p.taus[k + 2] - p.taus[k] > p.dt, "pair gap " + what.str());
    }
    const double len =
        static_cast<double>(cusp4_min.stats.partition.taus.size());
    c.require(std::abs(len - 169.0) <= 0.15 * 169.0,
              "cusp partition length near 169");
    c.require(std::abs(cusp4_min.stats.dt - 1.78e-2) <= 0.02 * 1.78e-2,
              "dt near 1.78e-2");
    c.detail << " cusp dx=1e-4: length " << len << ", dt "
             << cusp4_min.stats.dt;
    cs.push_back(std::move(c));
  }

  // 6. iteration contract
  {
    Criterion c{6, "iteration contract"};
    long iterated_intervals = 0;
    for (const auto& run : g_runs) {
      const double dt = run.stats.dt;
      const double bound2 = 0.25 * run.stats.G_inf * dt * dt;  // 2x slack
      const double bound3 = bound2 * run.dx;
      for (std::size_t k = 0; k < run.stats.interval_iterations.size(); ++k) {
        std::ostringstream what;
        what << run.label << " dx=" << run.dx << " k=" << k;
        c.require(run.stats.interval_iterations[k] <= 3,
                  "<= 3 iterations " + what.str());
        const double d2 = run.stats.sup_diff_iter2[k];
        if (!std::isnan(d2)) {
          ++iterated_intervals;
          c.require(d2 <= bound2, "first contraction " + what.str());
        }
        const double d3 = run.stats.sup_diff_iter3[k];
        if (!std::isnan(d3))
          c.require(d3 <= bound3, "second contraction " + what.str());
      }
    }
    c.require(iterated_intervals > 0, "iteration exercised");
    c.detail << " " << iterated_intervals << " iterated intervals";
    cs.push_back(std::move(c));
  }

  // 7. minimal steps against per-event stepping on the cusp
  {
    Criterion c{7, "minimal-step consistency"};
    const auto& ga = cusp3_min.snapshots.back().grid;
    const auto& gb = cusp3_full.snapshots.back().grid;
    double sup = 0.0;
    for (std::size_t j = 0; j < ga.n_nodes(); ++j)
      sup = std::max(sup, std::abs(ga.y[j] - gb.y[j]));
    const double dt = cusp3_min.stats.dt;
    const double bound = 10.0 * dt * dt * cusp3_min.stats.G_inf;
    c.require(sup <= bound, "y difference at T");
    c.detail << " sup |y_min - y_full| = " << sup << " <= " << bound;
    cs.push_back(std::move(c));
  }

  // 8. conservative degeneration
  {
    Criterion c{8, "conservative degeneration"};
    const double e0 = conserv.stats.energy_trace.front().second;
    double worst = 0.0;
    for (const auto& [t, e] : conserv.stats.energy_trace)
      worst = std::max(worst, std::abs(e - e0));
    for (const auto& snap : conserv.snapshots)
      worst = std::max(worst, std::abs(snap.grid.V_inf - e0));
    c.require(worst <= 1e-12 * e0, "F_inf constant");
    c.detail << " max |F_inf(t) - F_inf(0)| = " << worst;
    cs.push_back(std::move(c));
  }

  // 9. minimal time steps give at least a threefold speedup
  {
    Criterion c{9, "timing"};
    const double ref_times[2][2] = {{0.2655, 3.5321}, {8.4128, 367.49}};
    const double dxs[2] = {1e-3, 1e-4};
    for (int i = 0; i < 2; ++i) {
      EulerianState s0 = cusp_initial(dxs[i]);
      EvolutionConfig tcfg;
      tcfg.collect_checks = false;
      const auto t1 = std::chrono::steady_clock::now();
      solve(s0, cuspa, dxs[i], T, tcfg, {T});
      const double tm = seconds_since(t1);
      tcfg.minimal_steps = false;
      const auto t2 = std::chrono::steady_clock::now();
      solve(s0, cuspa, dxs[i], T, tcfg, {T});
      const double tf = seconds_since(t2);
      std::ostringstream what;
      what << "speedup >= 3 at dx=" << dxs[i];
      c.require(tf >= 3.0 * tm, what.str());
      c.detail << " dx=" << dxs[i] << ": " << tm << "s/" << tf << "s (ref "
               << ref_times[i][0] << "/" << ref_times[i][1] << ")";
    }
    cs.push_back(std::move(c));
  }

  // 10. round trips and metric comparisons
  {
    Criterion c{10, "round trip and metric sanity"};
    auto round_trip = [&](const EulerianState& s, double dx,
                          const char* label) {
      EulerianState p = project(s, dx);
      EulerianState back = to_eulerian(to_lagrangian(p));
      const double scale = std::max(1.0, p.F_inf);
      std::ostringstream what;
      what << label << " dx=" << dx;
      c.require(sup_norm_diff(back.u, p.u) <= 1e-12 * scale,
                "u round trip " + what.str());
      c.require(sup_norm_diff(back.F_total(), p.F_total()) <= 1e-12 * scale,
                "F round trip " + what.str());
      c.require(sup_norm_diff(back.G, p.G) <= 1e-12 * scale,
                "G round trip " + what.str());
    };
    round_trip(mp, 1e-2, "multipeakon");
    round_trip(cusp_initial(1e-2), 1e-2, "cusp");
    std::mt19937 rng(7);
    for (int i = 0; i < 5; ++i)
      round_trip(testutil::random_initial_data(rng, i % 2 == 0).state, 0.05,
                 "random");

    // the metric between exact and projected data decays along the ladder
    LagrangianGrid X = to_lagrangian(mp);
    double prev = 1e300;
    c.detail << " d(X, X_dx) =";
    for (double dx : {1e-1, 1e-2, 1e-3}) {
      LagrangianGrid Xd = to_lagrangian(project(mp, dx));
      const double d = metric_d(X, Xd, mpa).total;
      c.detail << " " << d;
      std::ostringstream what;
      what << "d decays at dx=" << dx;
      c.require(d < prev, what.str());
      prev = d;
    }

    // metric dominated by C_s times the simplified distance along the
    // first ladder runs (re-solved with and without minimal steps)
    const double Cs = cs_constant(3.0, 3.0, T, mpa.lipschitz());
    for (double dx : {1e-1, 1e-2}) {
      std::vector<double> qs = partition_queries(mp, mpa, dx, T, cfg_min);
      SolveResult a =
          run_and_register("multipeakon-min", mp, mpa, dx, T, cfg_min, qs);
      SolveResult b =
          run_and_register("multipeakon-full", mp, mpa, dx, T, cfg_full, qs);
      for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        const double d =
            metric_d(a.snapshots[i].grid, b.snapshots[i].grid, mpa).total;
        const double ds =
            metric_ds(a.snapshots[i].grid, b.snapshots[i].grid, mpa).total;
        std::ostringstream what;
        what << "d <= C_s d_s at t=" << a.snapshots[i].t << " dx=" << dx;
        c.require(d <= Cs * ds + 1e-12, what.str());
      }
    }
    c.detail << "; C_s = " << Cs;
    cs.push_back(std::move(c));
  }

  // ---- report ----
  int failed = 0;
  for (auto& c : cs) {
    std::printf("CRITERION %2d %-28s %s --%s\n", c.id, c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.detail.str().c_str());
    if (!c.pass) ++failed;
  }
  std::printf("SUMMARY: %zu/%zu criteria passed (%.1f s)\n",
              cs.size() - static_cast<std::size_t>(failed), cs.size(),
              seconds_since(wall0));
  return failed == 0 ? 0 : 1;
}
