#pragma once

#include <array>
#include <vector>

#include "hsa/eulerian.hpp"
#include "hsa/lagrangian.hpp"

namespace hsa {

/// The stability metric: ten nonnegative summands and their sum.
/// Term order: |y-yh|_inf, |U-Uh|_inf, |Hxi-Hxih|_1, lip*|UHxi-UhHxih|_2,
/// |yxi-yxih|_2, |Uxi-Uxih|_2, |g1+yxi - g1h-yxih|_2, |Hxi-Hxih|_2,
/// |g2-g2h|_2, |g3-g3h|_2.
struct MetricBreakdown {
  std::array<double, 10> terms{};
  double total = 0.0;
};

/// The simplified distance for pairs sharing a breaking function:
/// |y-yh|_inf, |U-Uh|_inf, |yxi-yxih|_2, |Uxi-Uxih|_2, |g|_2.
struct MetricSimplified {
  std::array<double, 5> terms{};
  double total = 0.0;
};

/// Relaxed energy density: (1-alpha(y))V_xi where the cell will break,
/// V_xi where it will not. Per-cell values (alpha taken at the cell
/// midpoint position).
std::vector<double> g1_cells(const LagrangianGrid& g, const AlphaProfile& alpha);
/// lip * H_inf * U_xi on breaking cells, 0 elsewhere.
std::vector<double> g2_cells(const LagrangianGrid& g, const AlphaProfile& alpha);
/// lip * U * U_xi on breaking cells, 0 elsewhere.
std::vector<double> g3_cells(const LagrangianGrid& g, const AlphaProfile& alpha);

/// The metric, evaluated exactly on the union refinement of the two
/// grids (all integrands are piecewise polynomial of degree <= 2 after
/// subdividing at the alpha-node preimages).
MetricBreakdown metric_d(const LagrangianGrid& A, const LagrangianGrid& B,
                         const AlphaProfile& alpha);

/// The simplified distance. Requires tau == tau_hat cell for cell
/// (numeric_error otherwise).
MetricSimplified metric_ds(const LagrangianGrid& A, const LagrangianGrid& B,
                           const AlphaProfile& alpha);

/// Lipschitz-stability coefficients C(t), D(t) for the growth bound
/// C(t) e^{D(t) t} with M bounding the total H mass.
struct StabilityConstants {
  double C;
  double D;
};
StabilityConstants stability_constants(double t, double M, double alpha_lip);

/// Comparison constant between the metric and the simplified distance.
double cs_constant(double u_inf, double G_inf, double T, double alpha_lip);
/// Growth rate of the simplified distance over one interval.
double lambda_constant(double G_inf, double T, double alpha_lip);
/// Leading coefficient of the per-interval local error.
double cs_tilde_constant(double u_inf, double G_inf, double T, double alpha_lip);

}  // namespace hsa
