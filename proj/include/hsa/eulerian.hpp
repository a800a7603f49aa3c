#pragma once

#include <string>
#include <vector>

#include "hsa/piecewise.hpp"

namespace hsa {

/// Spatially varying dissipation coefficient: piecewise linear with
/// range [0, 1) and a recorded Lipschitz bound (max absolute slope).
class AlphaProfile {
 public:
  explicit AlphaProfile(PiecewiseLinear profile);

  static AlphaProfile zero();
  static AlphaProfile constant(double a);

  double operator()(double x) const { return profile_(x); }
  double lipschitz() const { return lipschitz_; }
  const PiecewiseLinear& profile() const { return profile_; }

 private:
  PiecewiseLinear profile_;
  double lipschitz_;
};

/// Wave profile plus energy bookkeeping (u, F, G) with F split into its
/// absolutely continuous and singular parts. F = F_ac + F_sing and G are
/// the primitives of the energy measure and of the auxiliary measure.
struct EulerianState {
  PiecewiseLinear u;
  MonotoneStep F_ac;    // no jumps
  MonotoneStep F_sing;  // no density
  MonotoneStep G;
  double F_inf = 0.0;
  double G_inf = 0.0;

  double F(double x) const { return F_ac(x) + F_sing(x); }
  double F_right(double x) const {
    return F_ac.eval_right(x) + F_sing.eval_right(x);
  }
  MonotoneStep F_total() const { return F_ac + F_sing; }
};

/// Checks the defining conditions of the data set: F_ac carries exactly
/// the density u_x^2, F <= G, both nondecreasing from 0, and (when
/// `require_equal_measures`) F = G as required of initial data. Returns
/// human-readable violations; empty means valid. Tolerance is relative,
/// 1e-12 by default.
std::vector<std::string> validate(const EulerianState& state,
                                  bool require_equal_measures = false,
                                  double rel_tol = 1e-12);

/// Sign choice for the first subcell of a pair cell: the slope used on
/// (x_2j, x_2j+1] is Du + s*q with s the returned sign, and Du - s*q on
/// the second subcell. Chooses s to best reproduce the midpoint value;
/// q = 0 returns +1, exact ties pick the lower branch (s = -1).
int select_sign(double Du2j, double Dplus_u2j, double q2j);

/// Piecewise-linear projection onto the uniform grid x_j = j*dx. Each
/// pair cell [x_2j, x_2j+2] gets two slopes Du -+ q with
/// q = sqrt(DF_ac - Du^2), so the cell energy is preserved exactly; the
/// singular part is collapsed onto the even gridpoints. The output has
/// G = F and validates as initial data.
///
/// Radicands below -1e-12 * DF_ac are a data inconsistency (error);
/// smaller negatives are rounding and clamp to zero.
EulerianState project(const EulerianState& state, double dx);

}  // namespace hsa
