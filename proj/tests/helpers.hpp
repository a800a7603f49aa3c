#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hsa/eulerian.hpp"
#include "hsa/piecewise.hpp"

namespace testutil {

// Random initial data with equal measures: piecewise-linear wave with a
// compactly supported derivative, energy primitive accumulated as the
// squared slopes, optionally a few point masses shared by F and G.
struct RandomData {
  hsa::EulerianState state;
  hsa::PiecewiseLinear alpha;
};

inline RandomData random_initial_data(std::mt19937& rng,
                                      bool with_singular = false) {
  std::uniform_int_distribution<int> nseg(2, 7);
  std::uniform_real_distribution<double> gap(0.2, 1.5);
  std::uniform_real_distribution<double> slope(-2.0, 2.0);
  std::uniform_real_distribution<double> level(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int n = nseg(rng);
  std::vector<double> xs{level(rng)};
  for (int i = 0; i < n; ++i) xs.push_back(xs.back() + gap(rng));

  std::vector<double> uv{level(rng)}, fv{0.0};
  for (int i = 0; i < n; ++i) {
    double s = slope(rng);
    if (unit(rng) < 0.2) s = 0.0;
    const double w = xs[static_cast<std::size_t>(i) + 1] -
                     xs[static_cast<std::size_t>(i)];
    uv.push_back(uv.back() + s * w);
    fv.push_back(fv.back() + s * s * w);
  }

  hsa::MonotoneStep F_ac = hsa::MonotoneStep::absolutely_continuous(xs, fv);
  hsa::MonotoneStep F_sing = hsa::MonotoneStep::zero();
  if (with_singular) {
    std::vector<double> sn, sl, sr;
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      if (unit(rng) < 0.4) {
        sn.push_back(xs[i]);
        sl.push_back(acc);
        acc += 0.1 + 0.4 * unit(rng);
        sr.push_back(acc);
      }
    }
    if (!sn.empty()) F_sing = hsa::MonotoneStep(sn, sl, sr);
  }
  hsa::MonotoneStep G = F_ac + F_sing;
  const double total = G.total();

  // dissipation ramp somewhere inside the support
  const double a0 = xs.front() - 1.0, a1 = xs.back() + 1.0;
  const double v0 = 0.9 * unit(rng), v1 = 0.9 * unit(rng);
  hsa::PiecewiseLinear alpha({a0, a1}, {v0, v1});

  return RandomData{
      hsa::EulerianState{hsa::PiecewiseLinear(xs, uv), std::move(F_ac),
                         std::move(F_sing), std::move(G), total, total},
      alpha};
}

// Plain adaptive Simpson quadrature; the independent cross-check for the
// closed-form norms.
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol, int depth = 24) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  std::function<double(double, double, double, double, double, double, int)>
      rec = [&](double lo, double hi, double flo, double fmid, double fhi,
                double whole, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, d - 1) +
           rec(mid, hi, fmid, frm, fhi, right, d - 1);
  };
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, depth);
}

}  // namespace testutil
