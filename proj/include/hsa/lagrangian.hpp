#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsa/eulerian.hpp"
#include "hsa/piecewise.hpp"

namespace hsa {

/// Characteristic-coordinate state (y, U, V, H) sampled on a nonuniform
/// grid of labels xi. Node arrays carry the values at the grid nodes;
/// per-cell arrays carry the (constant) derivatives on each cell. Cells
/// of zero width are permitted and carry zero derivatives.
///
/// tau holds the per-cell collision times: 0 on plateau cells,
/// -2*dy/dU where dU < 0, +infinity otherwise.
struct LagrangianGrid {
  std::vector<double> xi;             // nondecreasing node labels
  std::vector<double> y, U, V, H;     // node values
  std::vector<double> dy, dU, dV, dH; // per-cell derivatives (size n-1)
  std::vector<double> tau;            // per-cell breaking times
  double V_inf = 0.0;
  double H_inf = 0.0;

  std::size_t n_nodes() const { return xi.size(); }
  std::size_t n_cells() const { return xi.empty() ? 0 : xi.size() - 1; }
  double width(std::size_t j) const { return xi[j + 1] - xi[j]; }

  // evaluation with the natural extensions (y has unit slope outside,
  // the rest are constant)
  double eval_y(double x) const;
  double eval_U(double x) const;
  double eval_V(double x) const;
  double eval_H(double x) const;
  // derivative lookup by containing cell (tails: dy = 1, rest 0)
  std::size_t cell_of(double x) const;  // n_cells() when outside
  double deriv_y(double x) const;
  double deriv_U(double x) const;
  double deriv_V(double x) const;
  double deriv_H(double x) const;
};

/// Structural checks for a grid: nonnegative dy/dH, dy*dV = dU^2,
/// 0 <= dV <= dH, prefix consistency of node values, and (when asked)
/// y + H = id as required of fresh initial data.
std::vector<std::string> validate(const LagrangianGrid& grid,
                                  bool require_y_plus_H_identity = false,
                                  double rel_tol = 1e-9);

/// Per-cell breaking times together with the deduplicated increasing
/// list of distinct times (always starting at 0) and, for each distinct
/// time, the cells attaining it. Cells that never break (tau = inf) are
/// listed in no bucket. The per-cell array is snapped onto the distinct
/// representatives so that interval bookkeeping and cell evolution agree
/// bit for bit.
struct BreakingTimes {
  std::vector<double> tau;                 // per cell, snapped
  std::vector<double> distinct;            // sorted, distinct, starts at 0
  std::vector<std::vector<std::size_t>> cells;  // per distinct time

  static constexpr double kDedupTol = 1e-12;
};

BreakingTimes breaking_times(const LagrangianGrid& grid);

/// Transformation from Eulerian to Lagrangian coordinates for initial
/// data with equal measures (F = G). Every breakpoint x of (u, G) turns
/// into the label(s) x + G(x), x + G(x+); jumps of G open plateau cells
/// on which y is constant.
LagrangianGrid to_lagrangian(const EulerianState& state);

/// Transformation back: u(x) = U along y = x, F and G are pushforwards
/// of the cell energies under y. Plateau cells (dy = 0, dV > 0) map to
/// jumps of F.
EulerianState to_eulerian(const LagrangianGrid& grid);

}  // namespace hsa
