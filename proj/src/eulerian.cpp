#include "hsa/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "hsa/errors.hpp"

namespace hsa {

AlphaProfile::AlphaProfile(PiecewiseLinear profile)
    : profile_(std::move(profile)), lipschitz_(profile_.max_abs_slope()) {
  for (double v : profile_.values())
    if (v < 0.0 || v >= 1.0)
      throw numeric_error("AlphaProfile: values must lie in [0, 1)");
}

AlphaProfile AlphaProfile::zero() { return constant(0.0); }

AlphaProfile AlphaProfile::constant(double a) {
  return AlphaProfile(PiecewiseLinear::constant(a));
}

namespace {

std::vector<double> union_nodes(const std::vector<double>& a,
                                const std::vector<double>& b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::string fmt(const char* what, double x) {
  std::ostringstream os;
  os << what << " (at/being " << x << ")";
  return os.str();
}

}  // namespace

std::vector<std::string> validate(const EulerianState& state,
                                  bool require_equal_measures,
                                  double rel_tol) {
  std::vector<std::string> out;
  const double scale = std::max(1.0, std::max(state.F_inf, state.G_inf));
  const double tol = rel_tol * scale;

  for (std::size_t i = 0; i < state.F_ac.size(); ++i)
    if (state.F_ac.jump(i) > tol) {
      out.push_back(fmt("F_ac carries a jump", state.F_ac.nodes()[i]));
      break;
    }
  if (state.F_sing.has_slopes(rel_tol))
    out.push_back("F_sing carries a density");

  if (std::abs(state.F_ac.limit_at_minus_inf()) > tol ||
      std::abs(state.F_sing.limit_at_minus_inf()) > tol)
    out.push_back("F does not vanish at -infinity");
  if (std::abs(state.G.limit_at_minus_inf()) > tol)
    out.push_back("G does not vanish at -infinity");

  if (std::abs(state.F_ac.total() + state.F_sing.total() - state.F_inf) > tol)
    out.push_back("F_inf does not match F_ac + F_sing at +infinity");
  if (std::abs(state.G.total() - state.G_inf) > tol)
    out.push_back("G_inf does not match G at +infinity");

  // density identity: F_ac' = u_x^2 segment by segment. The slopes are
  // differences of stored values, so allow for the cancellation noise
  // eps * magnitude / width on top of the relative tolerance.
  {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto xs = union_nodes(state.u.nodes(), state.F_ac.nodes());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      double w = xs[i + 1] - xs[i];
      double u0 = state.u(xs[i]), u1 = state.u(xs[i + 1]);
      double su = (u1 - u0) / w;
      double sf =
          (state.F_ac(xs[i + 1]) - state.F_ac.eval_right(xs[i])) / w;
      double seg_scale = std::max(1.0, std::max(su * su, std::abs(sf)));
      double noise = 32.0 * eps *
                     (state.F_ac(xs[i + 1]) +
                      std::max(std::abs(u0), std::abs(u1)) *
                          std::max(std::abs(u0), std::abs(u1))) /
                     w;
      if (std::abs(sf - su * su) > rel_tol * seg_scale + noise) {
        out.push_back(fmt("F_ac density differs from u_x^2", xs[i]));
        break;
      }
    }
  }

  // F <= G everywhere (piecewise affine: endpoints and right limits suffice)
  {
    auto xs = union_nodes(union_nodes(state.F_ac.nodes(), state.F_sing.nodes()),
                          state.G.nodes());
    for (double x : xs) {
      if (state.F(x) > state.G(x) + tol ||
          state.F_right(x) > state.G.eval_right(x) + tol) {
        out.push_back(fmt("F exceeds G", x));
        break;
      }
      if (require_equal_measures &&
          (std::abs(state.F(x) - state.G(x)) > tol ||
           std::abs(state.F_right(x) - state.G.eval_right(x)) > tol)) {
        out.push_back(fmt("initial data requires F = G", x));
        break;
      }
    }
  }
  return out;
}

int select_sign(double Du2j, double Dplus_u2j, double q2j) {
  if (q2j == 0.0) return +1;
  const double d = Dplus_u2j - Du2j;
  const double r_plus = std::abs(d - q2j);
  const double r_minus = std::abs(d + q2j);
  if (r_plus < r_minus) return +1;
  return -1;  // strict winner, or tie resolved to the lower branch
}

EulerianState project(const EulerianState& state, double dx) {
  if (!(dx > 0.0)) throw config_error("project: dx must be positive");

  double lo = state.u.nodes().front();
  double hi = state.u.nodes().back();
  for (const MonotoneStep* m : {&state.F_ac, &state.F_sing, &state.G}) {
    lo = std::min(lo, m->nodes().front());
    hi = std::max(hi, m->nodes().back());
  }
  // smallest pair-cell range covering all nodes, padded by one pair cell
  const long pair_lo = static_cast<long>(std::floor(lo / (2.0 * dx))) - 1;
  const long pair_hi = static_cast<long>(std::ceil(hi / (2.0 * dx))) + 1;
  const std::size_t n_pairs = static_cast<std::size_t>(pair_hi - pair_lo);
  const std::size_t n_grid = 2 * n_pairs + 1;

  auto grid_x = [&](std::size_t k) {
    return static_cast<double>(2 * pair_lo + static_cast<long>(k)) * dx;
  };

  std::vector<double> xs(n_grid), u_s(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) {
    xs[k] = grid_x(k);
    u_s[k] = state.u(xs[k]);
  }
  std::vector<double> fac(n_pairs + 1), fsing(n_pairs + 1);
  for (std::size_t j = 0; j <= n_pairs; ++j) {
    fac[j] = state.F_ac(xs[2 * j]);
    fsing[j] = state.F_sing(xs[2 * j]);
  }

  std::vector<double> u_out(n_grid), fac_out(n_grid);
  for (std::size_t j = 0; j < n_pairs; ++j) {
    const std::size_t k = 2 * j;
    const double Du = (u_s[k + 2] - u_s[k]) / (2.0 * dx);
    const double DFac = (fac[j + 1] - fac[j]) / (2.0 * dx);
    double rad = DFac - Du * Du;
    if (rad < 0.0) {
      // sampling the carriers costs eps * magnitude per value, which the
      // divided differences amplify by 1/dx; stay below that and it is
      // rounding, beyond it the data genuinely violates Cauchy-Schwarz
      constexpr double eps = std::numeric_limits<double>::epsilon();
      const double u_scale =
          std::max({1.0, std::abs(u_s[k]), std::abs(u_s[k + 2])});
      const double noise =
          16.0 * eps *
          (std::max(1.0, fac[j + 1]) + 2.0 * std::abs(Du) * u_scale) /
          (2.0 * dx);
      if (rad < -std::max(1e-12 * DFac, noise))
        throw numeric_error("project: cell energy below (Du)^2, data inconsistent");
      rad = 0.0;
    }
    const double q = std::sqrt(rad);
    const double Dplus = (u_s[k + 1] - u_s[k]) / dx;
    const int s = select_sign(Du, Dplus, q);
    const double slope1 = Du + s * q;
    const double slope2 = Du - s * q;

    u_out[k] = u_s[k];
    u_out[k + 1] = u_s[k] + slope1 * dx;
    u_out[k + 2] = u_s[k + 2];
    fac_out[k] = fac[j];
    fac_out[k + 1] = fac[j] + slope1 * slope1 * dx;
    fac_out[k + 2] = fac[j + 1];
    (void)slope2;  // second subcell is pinned by the endpoint values
  }

  PiecewiseLinear u_dx(xs, u_out);
  MonotoneStep F_ac_dx = MonotoneStep::absolutely_continuous(xs, fac_out);

  // singular part rounds up to the next even gridpoint of each pair cell
  {
    std::vector<double> sn(n_pairs + 1), sl(n_pairs + 1), sr(n_pairs + 1);
    for (std::size_t j = 0; j <= n_pairs; ++j) {
      sn[j] = xs[2 * j];
      sl[j] = fsing[j];
      sr[j] = (j + 1 <= n_pairs) ? fsing[j + 1] : fsing[j];
    }
    MonotoneStep F_sing_dx(std::move(sn), std::move(sl), std::move(sr));
    MonotoneStep G_dx = F_ac_dx + F_sing_dx;
    const double total = G_dx.total();
    return EulerianState{std::move(u_dx), std::move(F_ac_dx),
                         std::move(F_sing_dx), std::move(G_dx), total, total};
  }
}

}  // namespace hsa
