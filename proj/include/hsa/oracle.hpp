#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hsa/eulerian.hpp"
#include "hsa/evolution.hpp"

namespace hsa {

/// Closed-form reference solution for the three-peakon data with the
/// piecewise-linear dissipation profile of the verification suite. The
/// solution lives in four time regimes separated by the breaking times
/// 2, 40/19 and 20/9; the total energy drops from 3 to 5/2, 7/4 and
/// finally 19/20 across them.
struct ExactPoint {
  double u;
  double F;
};

/// Pointwise wave profile and cumulative energy. Regime boundaries
/// use the later regime (energy already removed at the instant of
/// breaking).
ExactPoint exact_multipeakon(double t, double x);

/// The same solution as data: u as a piecewise-linear function and F as
/// a left-continuous primitive (with a point mass at the breaking
/// location when t is exactly a breaking time).
std::pair<PiecewiseLinear, MonotoneStep> exact_multipeakon_state(double t);

double exact_multipeakon_F_inf(double t);

/// Closed-form Lagrangian regime formulas.
struct ExactLagrangianPoint {
  double y, U, V, H;
};
ExactLagrangianPoint exact_multipeakon_lagrangian(double t, double xi);

struct BreakingEvent {
  double time;
  double location;
  double fraction;  // removed share of the concentrated energy
};
std::vector<BreakingEvent> exact_breaking_locations();

/// Fine-grid reference solution: runs the solver at dx_ref and caches
/// the per-time states on disk keyed by a hash of all inputs.
/// The cache directory may be empty to disable caching.
struct FineReference {
  double dx_ref = 0.0;
  double T = 0.0;
  std::vector<double> times;
  std::vector<EulerianState> states;
};

FineReference fine_reference(const EulerianState& state0,
                             const AlphaProfile& alpha, double dx_ref,
                             double T, std::vector<double> query_times,
                             const std::string& cache_dir);

}  // namespace hsa
