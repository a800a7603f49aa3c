#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hsa/eulerian.hpp"
#include "hsa/lagrangian.hpp"

namespace hsa {

/// Nonuniform temporal discretization of [0, T] extracted from the
/// distinct breaking times: a composite step never exceeds dt when it
/// skips over clustered times, and consecutive-pair gaps exceed dt
/// (tau[k+2] - tau[k] > dt), which bounds the number of steps by
/// 2(T/dt + 1).
struct TimePartition {
  std::vector<double> taus;  // tau*_0 = 0, ..., tau*_N = T
  double dt = 0.0;
  double T = 0.0;
  /// Cells whose breaking time lies in (taus[k], taus[k+1]], per interval.
  std::vector<std::vector<std::size_t>> breaking_cells;

  std::size_t n_intervals() const { return taus.size() - 1; }
};

struct EvolutionConfig {
  /// Overrides the computed time-step parameter; must respect the
  /// contraction bound dt <= sqrt(8 dx / (lip(alpha) G_inf)).
  std::optional<double> dt_cap;
  /// On: extract the partition with minimal time steps. Off: one step
  /// per distinct breaking time (exact evolution everywhere).
  bool minimal_steps = true;
  int max_iterations = 3;
  /// Accumulate structural-invariant measurements at partition points.
  bool collect_checks = true;
};

/// Largest admissible time-step parameter: sqrt(8 dx / (lip * G_inf)),
/// or T when the contraction constraint is vacuous (constant alpha or
/// zero energy).
double compute_dt(double dx, const AlphaProfile& alpha, double G_inf, double T);

/// Minimal-time-step extraction of the partition from the distinct
/// breaking times (always finishing at T).
TimePartition extract_partition(const BreakingTimes& times, double dt, double T);

/// One partition point per distinct breaking time in (0, T), plus T.
TimePartition full_partition(const BreakingTimes& times, double dt, double T);

/// Differentiated Lagrangian state of one cell: (zeta_xi, U_xi, V_xi)
/// where zeta = y - id; H_xi never changes.
struct CellDeriv {
  double zeta;
  double U;
  double V;
};

/// Closed-form evolution over a window of length h with no breaking:
/// zeta_xi gains U_xi h + V_xi h^2/4, U_xi gains V_xi h / 2, V_xi is
/// unchanged.
CellDeriv evolve_cell(const CellDeriv& c, double h);

/// Closed-form evolution across the cell's breaking time t_break in
/// (0, h]: the state restarts from (-1, 0, (1-removal) V_xi) at t_break.
CellDeriv evolve_cell_breaking(const CellDeriv& c, double h, double t_break,
                               double removal);

/// Batch form over all cells, carrying y_xi (not its shift by -1, which
/// would lose the low bits exactly where cells break). `broken` lists
/// cells whose breaking time offset tb (relative to the interval start)
/// and removal fraction beta apply; cells with tb > h have not broken
/// yet and follow the plain closed form.
void evolve_cells(const std::vector<double>& dy0,
                  const std::vector<double>& u0, const std::vector<double>& v0,
                  double h, std::span<const std::size_t> broken,
                  std::span<const double> beta, std::span<const double> tb,
                  std::vector<double>& dy, std::vector<double>& u,
                  std::vector<double>& v);

/// Node recovery by prefix sums. The left asymptotes evolve by the
/// total-energy drift plus one correction term per broken cell; node
/// values then accumulate cell derivatives left to right in a fixed
/// order (deterministic).
struct ReconstructInput {
  const std::vector<double>* xi = nullptr;      // node labels
  const std::vector<double>* cell_dy = nullptr; // derivatives at time t
  const std::vector<double>* cell_U = nullptr;
  const std::vector<double>* cell_V = nullptr;
  const std::vector<double>* v0 = nullptr;      // V_xi at interval start
  double h = 0.0;                               // t - interval start
  double V_inf_prev = 0.0;
  double U_minf_prev = 0.0;
  double zeta_minf_prev = 0.0;
  std::span<const std::size_t> broken_cells;
  std::span<const double> broken_beta;
  std::span<const double> broken_tb;
};

struct NodeArrays {
  std::vector<double> zeta, U, V, y;
  double zeta_minf = 0.0, U_minf = 0.0, V_inf = 0.0;
};

NodeArrays reconstruct_nodes(const ReconstructInput& in);

/// Run diagnostics collected along a solve.
struct SolveStats {
  TimePartition partition;
  double dt = 0.0;
  double epsilon = 0.0;  // iteration stopping threshold (G_inf dt^2 dx / 8)
  double G_inf = 0.0;
  std::vector<std::pair<double, double>> energy_trace;  // (t, V_inf)
  /// y-computations per interval (1 exact, 2..3 when iterating).
  std::vector<int> interval_iterations;
  std::vector<double> sup_diff_iter2;  // |y^2 - y^1| per interval (NaN if n/a)
  std::vector<double> sup_diff_iter3;  // |y^3 - y^2| per interval (NaN if n/a)
  long total_iterations = 0;
  long reconstruction_passes = 0;
  // structural-invariant measurements at partition points
  double max_defect_energy_relation = 0.0;  // |dy dV - dU^2| relative
  double min_dV = 0.0;
  double max_dV_minus_dH = -std::numeric_limits<double>::infinity();
  bool energy_monotone = true;
};

struct Snapshot {
  double t = 0.0;
  LagrangianGrid grid;
  EulerianState eulerian;
};

struct SolveResult {
  std::vector<Snapshot> snapshots;  // ascending query times
  SolveStats stats;
};

/// The numerical solution operator: project -> Lagrangian initial data
/// -> breaking times -> partition -> interval loop, reporting the state
/// at every requested query time in [0, T].
SolveResult solve(const EulerianState& state0, const AlphaProfile& alpha,
                  double dx, double T, const EvolutionConfig& config,
                  std::vector<double> query_times);

/// Partition planning only (no interval loop): useful for choosing
/// query times before paying for a run.
TimePartition plan_partition(const EulerianState& state0,
                             const AlphaProfile& alpha, double dx, double T,
                             const EvolutionConfig& config);

}  // namespace hsa
