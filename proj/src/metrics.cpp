#include "hsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hsa/errors.hpp"

namespace hsa {

std::vector<double> g1_cells(const LagrangianGrid& g, const AlphaProfile& alpha) {
  std::vector<double> out(g.n_cells());
  for (std::size_t j = 0; j < g.n_cells(); ++j) {
    if (g.dU[j] < 0.0) {
      const double ymid = 0.5 * (g.y[j] + g.y[j + 1]);
      out[j] = (1.0 - alpha(ymid)) * g.dV[j];
    } else {
      out[j] = g.dV[j];
    }
  }
  return out;
}

std::vector<double> g2_cells(const LagrangianGrid& g, const AlphaProfile& alpha) {
  std::vector<double> out(g.n_cells(), 0.0);
  for (std::size_t j = 0; j < g.n_cells(); ++j)
    if (g.dU[j] < 0.0) out[j] = alpha.lipschitz() * g.H_inf * g.dU[j];
  return out;
}

std::vector<double> g3_cells(const LagrangianGrid& g, const AlphaProfile& alpha) {
  std::vector<double> out(g.n_cells(), 0.0);
  for (std::size_t j = 0; j < g.n_cells(); ++j)
    if (g.dU[j] < 0.0) {
      const double Umid = 0.5 * (g.U[j] + g.U[j + 1]);
      out[j] = alpha.lipschitz() * Umid * g.dU[j];
    }
  return out;
}

namespace {

// Union refinement of two grids, subdivided so that y, U and the
// composed dissipation profile are affine on every piece.
std::vector<double> refinement(const LagrangianGrid& A, const LagrangianGrid& B,
                               const AlphaProfile& alpha, bool split_signs) {
  std::vector<double> xs;
  xs.reserve(A.xi.size() + B.xi.size());
  std::merge(A.xi.begin(), A.xi.end(), B.xi.begin(), B.xi.end(),
             std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> extra;
  auto pull_back = [&](const LagrangianGrid& G, double lo, double hi) {
    // preimages of the alpha nodes under the (monotone) position map
    const double ylo = G.eval_y(lo), yhi = G.eval_y(hi);
    if (!(yhi > ylo)) return;
    for (double a : alpha.profile().nodes())
      if (a > ylo && a < yhi)
        extra.push_back(lo + (hi - lo) * (a - ylo) / (yhi - ylo));
  };
  auto root_of = [&](double flo, double fhi, double lo, double hi) {
    if ((flo < 0.0 && fhi > 0.0) || (flo > 0.0 && fhi < 0.0))
      extra.push_back(lo + (hi - lo) * flo / (flo - fhi));
  };
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i], hi = xs[i + 1];
    if (!(hi > lo)) continue;
    pull_back(A, lo, hi);
    pull_back(B, lo, hi);
    if (split_signs) {
      root_of(A.eval_y(lo) - B.eval_y(lo), A.eval_y(hi) - B.eval_y(hi), lo, hi);
      root_of(A.eval_U(lo) - B.eval_U(lo), A.eval_U(hi) - B.eval_U(hi), lo, hi);
    }
  }
  xs.insert(xs.end(), extra.begin(), extra.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// Exact integral of a piecewise-quadratic integrand via the two-point
// Gauss rule on every piece. The sample points are strictly interior:
// segment endpoints are grid nodes where the cell data jumps, and an
// endpoint evaluation would read the neighbouring cell.
double integrate(const std::vector<double>& xs,
                 const std::function<double(double)>& f) {
  constexpr double kGauss = 0.28867513459481287;  // 1 / (2 sqrt 3)
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    if (!(w > 0.0)) continue;
    const double m = 0.5 * (xs[i] + xs[i + 1]);
    s += 0.5 * w * (f(m - kGauss * w) + f(m + kGauss * w));
  }
  return s;
}

double sup_at(const std::vector<double>& xs,
              const std::function<double(double)>& f) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(f(x)));
  return m;
}

double midpoint(const std::vector<double>& xs, std::size_t i) {
  return 0.5 * (xs[i] + xs[i + 1]);
}

}  // namespace

MetricBreakdown metric_d(const LagrangianGrid& A, const LagrangianGrid& B,
                         const AlphaProfile& alpha) {
  const double lip = alpha.lipschitz();
  const auto xs = refinement(A, B, alpha, /*split_signs=*/false);

  auto y_diff = [&](double x) { return A.eval_y(x) - B.eval_y(x); };
  auto U_diff = [&](double x) { return A.eval_U(x) - B.eval_U(x); };
  auto UH_diff = [&](double x) {
    return A.eval_U(x) * A.deriv_H(x) - B.eval_U(x) * B.deriv_H(x);
  };
  auto g1_of = [&](const LagrangianGrid& G, double x) {
    const double du = G.deriv_U(x);
    const double dv = G.deriv_V(x);
    return du < 0.0 ? (1.0 - alpha(G.eval_y(x))) * dv : dv;
  };
  auto g2_of = [&](const LagrangianGrid& G, double x) {
    const double du = G.deriv_U(x);
    return du < 0.0 ? lip * G.H_inf * du : 0.0;
  };
  auto g3_of = [&](const LagrangianGrid& G, double x) {
    const double du = G.deriv_U(x);
    return du < 0.0 ? lip * G.eval_U(x) * du : 0.0;
  };

  MetricBreakdown out;
  out.terms[0] = sup_at(xs, y_diff);
  out.terms[1] = sup_at(xs, U_diff);

  double l1H = 0.0, l2H = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    if (!(w > 0.0)) continue;
    const double d = A.deriv_H(midpoint(xs, i)) - B.deriv_H(midpoint(xs, i));
    l1H += std::abs(d) * w;
    l2H += d * d * w;
  }
  out.terms[2] = l1H;
  out.terms[3] =
      lip * std::sqrt(integrate(xs, [&](double x) {
        const double d = UH_diff(x);
        return d * d;
      }));

  double l2y = 0.0, l2U = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    if (!(w > 0.0)) continue;
    const double m = midpoint(xs, i);
    const double ddy = A.deriv_y(m) - B.deriv_y(m);
    const double ddU = A.deriv_U(m) - B.deriv_U(m);
    l2y += ddy * ddy * w;
    l2U += ddU * ddU * w;
  }
  out.terms[4] = std::sqrt(l2y);
  out.terms[5] = std::sqrt(l2U);

  out.terms[6] = std::sqrt(integrate(xs, [&](double x) {
    const double d =
        g1_of(A, x) + A.deriv_y(x) - g1_of(B, x) - B.deriv_y(x);
    return d * d;
  }));
  out.terms[7] = std::sqrt(l2H);
  out.terms[8] = std::sqrt(integrate(xs, [&](double x) {
    const double d = g2_of(A, x) - g2_of(B, x);
    return d * d;
  }));
  out.terms[9] = std::sqrt(integrate(xs, [&](double x) {
    const double d = g3_of(A, x) - g3_of(B, x);
    return d * d;
  }));

  out.total = 0.0;
  for (double t : out.terms) out.total += t;
  return out;
}

MetricSimplified metric_ds(const LagrangianGrid& A, const LagrangianGrid& B,
                           const AlphaProfile& alpha) {
  const double lip = alpha.lipschitz();
  const auto xs = refinement(A, B, alpha, /*split_signs=*/true);

  // shared breaking function: compare tau on every common piece
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double m = midpoint(xs, i);
    if (!(xs[i + 1] > xs[i])) continue;
    const std::size_t ca = A.cell_of(m), cb = B.cell_of(m);
    const double ta = ca == A.n_cells() ? std::numeric_limits<double>::infinity()
                                        : A.tau[ca];
    const double tb = cb == B.n_cells() ? std::numeric_limits<double>::infinity()
                                        : B.tau[cb];
    const bool fa = std::isfinite(ta), fb = std::isfinite(tb);
    if (fa != fb ||
        (fa && std::abs(ta - tb) > 1e-12 * std::max(1.0, std::abs(ta))))
      throw numeric_error("metric_ds: grids do not share a breaking function");
  }

  auto y_diff = [&](double x) { return A.eval_y(x) - B.eval_y(x); };
  auto U_diff = [&](double x) { return A.eval_U(x) - B.eval_U(x); };

  MetricSimplified out;
  out.terms[0] = sup_at(xs, y_diff);
  out.terms[1] = sup_at(xs, U_diff);

  double l2y = 0.0, l2U = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    if (!(w > 0.0)) continue;
    const double m = midpoint(xs, i);
    const double ddy = A.deriv_y(m) - B.deriv_y(m);
    const double ddU = A.deriv_U(m) - B.deriv_U(m);
    l2y += ddy * ddy * w;
    l2U += ddU * ddU * w;
  }
  out.terms[2] = std::sqrt(l2y);
  out.terms[3] = std::sqrt(l2U);

  out.terms[4] = std::sqrt(integrate(xs, [&](double x) {
    const double dV = A.deriv_V(x) - B.deriv_V(x);
    double g = std::abs(dV);
    if (A.deriv_U(x) < 0.0) {
      const double mn = std::min(A.deriv_V(x), B.deriv_V(x));
      g += lip * mn * (std::abs(y_diff(x)) + std::abs(U_diff(x)));
    }
    return g * g;
  }));

  out.total = 0.0;
  for (double t : out.terms) out.total += t;
  return out;
}

StabilityConstants stability_constants(double t, double M, double alpha_lip) {
  const double rM = std::sqrt(M);
  const double t2 = t * t, t3 = t * t * t;
  const double C = 3.0 + 1.5 * t + 0.5 * t2 + (3.0 / 16.0) * t3 +
                   rM * (1.0 + 0.25 * t + 0.25 * t2 + t3 / 16.0) +
                   alpha_lip * rM * (5.0 + 2.0 * t + t2 + (3.0 / 8.0) * t3) +
                   alpha_lip * M * (3.0 + 1.25 * t + 0.5 * t2 + 0.125 * t3);
  const double D = 2.0 + alpha_lip * rM +
                   rM * (0.5 + t / 8.0 + t2 / 16.0) +
                   alpha_lip * M * (1.0 + 0.25 * t + 0.125 * t2);
  return {C, D};
}

double cs_constant(double u_inf, double G_inf, double T, double alpha_lip) {
  return 2.0 +
         alpha_lip * (u_inf +
                      (2.0 + std::sqrt(2.0) + std::exp(0.25 * T)) *
                          std::sqrt(G_inf) +
                      (1.0 + 0.25 * T) * G_inf);
}

double lambda_constant(double G_inf, double T, double alpha_lip) {
  return 1.0 + (1.0 + alpha_lip + 0.5 * T) * std::sqrt(G_inf) +
         alpha_lip * (1.0 + 0.5 * T) * G_inf;
}

double cs_tilde_constant(double u_inf, double G_inf, double T,
                         double alpha_lip) {
  return alpha_lip *
         (u_inf + (1.0 + std::sqrt(2.0)) * std::sqrt(G_inf) +
          0.25 * G_inf * T);
}

}  // namespace hsa
