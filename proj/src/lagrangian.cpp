#include "hsa/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsa/errors.hpp"

namespace hsa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> union_nodes(const std::vector<double>& a,
                                const std::vector<double>& b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

double cell_tau(double dy, double dU) {
  if (dy == 0.0 && dU == 0.0) return 0.0;
  if (dU < 0.0) return -2.0 * dy / dU;
  return kInf;
}

}  // namespace

std::size_t LagrangianGrid::cell_of(double x) const {
  if (x < xi.front() || x > xi.back()) return n_cells();
  auto it = std::upper_bound(xi.begin(), xi.end(), x);
  std::size_t i =
      (it == xi.begin()) ? 0 : static_cast<std::size_t>(it - xi.begin()) - 1;
  if (i >= n_cells()) i = n_cells() - 1;
  return i;
}

namespace {
double eval_nodes(const std::vector<double>& xi, const std::vector<double>& v,
                  double x, double tail_slope) {
  if (x <= xi.front()) return v.front() + tail_slope * (x - xi.front());
  if (x >= xi.back()) return v.back() + tail_slope * (x - xi.back());
  auto it = std::upper_bound(xi.begin(), xi.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xi.begin()) - 1;
  double w = xi[i + 1] - xi[i];
  if (w == 0.0) return v[i];
  double t = (x - xi[i]) / w;
  return v[i] + t * (v[i + 1] - v[i]);
}
}  // namespace

double LagrangianGrid::eval_y(double x) const { return eval_nodes(xi, y, x, 1.0); }
double LagrangianGrid::eval_U(double x) const { return eval_nodes(xi, U, x, 0.0); }
double LagrangianGrid::eval_V(double x) const { return eval_nodes(xi, V, x, 0.0); }
double LagrangianGrid::eval_H(double x) const { return eval_nodes(xi, H, x, 0.0); }

double LagrangianGrid::deriv_y(double x) const {
  std::size_t c = cell_of(x);
  return c == n_cells() ? 1.0 : dy[c];
}
double LagrangianGrid::deriv_U(double x) const {
  std::size_t c = cell_of(x);
  return c == n_cells() ? 0.0 : dU[c];
}
double LagrangianGrid::deriv_V(double x) const {
  std::size_t c = cell_of(x);
  return c == n_cells() ? 0.0 : dV[c];
}
double LagrangianGrid::deriv_H(double x) const {
  std::size_t c = cell_of(x);
  return c == n_cells() ? 0.0 : dH[c];
}

std::vector<std::string> validate(const LagrangianGrid& g,
                                  bool require_y_plus_H_identity,
                                  double rel_tol) {
  std::vector<std::string> out;
  auto report = [&](const char* what, std::size_t j) {
    std::ostringstream os;
    os << what << " (cell " << j << ")";
    out.push_back(os.str());
  };

  const std::size_t nc = g.n_cells();
  // cell derivatives are divided differences of cumulative node values,
  // so each carries cancellation noise of order eps * magnitude / width
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double y_mag = 1.0, U_mag = 1.0, V_mag = 1.0;
  for (std::size_t j = 0; j < g.n_nodes(); ++j) {
    y_mag = std::max(y_mag, std::abs(g.y[j]));
    U_mag = std::max(U_mag, std::abs(g.U[j]));
    V_mag = std::max(V_mag, std::abs(g.V[j]));
  }
  bool bad_sign = false, bad_rel = false, bad_range = false, bad_prefix = false;
  for (std::size_t j = 0; j < nc; ++j) {
    const double w = g.width(j);
    if (w < 0.0) {
      report("labels decrease", j);
      break;
    }
    if (!bad_sign && (g.dy[j] < -rel_tol || g.dH[j] < -rel_tol)) {
      report("negative dy or dH", j);
      bad_sign = true;
    }
    if (w > 0.0 && g.dy[j] + g.dH[j] <= 0.0 && !bad_sign) {
      report("dy + dH vanishes on a cell of positive width", j);
      bad_sign = true;
    }
    // the products vanish together at breaking; compare against the
    // cell's characteristic scale dV^2 plus the cancellation noise so
    // that eps-level setup defects do not register as violations
    const double lhs = g.dy[j] * g.dV[j];
    const double rhs = g.dU[j] * g.dU[j];
    const double scale = std::max({lhs, rhs, g.dV[j] * g.dV[j]});
    const double noise =
        w > 0.0 ? 32.0 * eps / w *
                      (V_mag * g.dy[j] + y_mag * g.dV[j] +
                       2.0 * std::abs(g.dU[j]) * U_mag)
                : 0.0;
    if (!bad_rel && std::abs(lhs - rhs) > rel_tol * scale + noise &&
        scale > 0.0) {
      report("dy*dV differs from dU^2", j);
      bad_rel = true;
    }
    if (!bad_range &&
        (g.dV[j] < -rel_tol || g.dV[j] > g.dH[j] + rel_tol * std::max(1.0, g.dH[j]))) {
      report("dV outside [0, dH]", j);
      bad_range = true;
    }
    if (!bad_prefix && w > 0.0) {
      auto consistent = [&](const std::vector<double>& v,
                            const std::vector<double>& d) {
        const double diff = v[j + 1] - v[j];
        return std::abs(diff - d[j] * w) <=
               rel_tol * std::max({1.0, std::abs(diff), std::abs(d[j] * w)});
      };
      if (!consistent(g.y, g.dy) || !consistent(g.U, g.dU) ||
          !consistent(g.V, g.dV) || !consistent(g.H, g.dH)) {
        report("node values not prefix-consistent with derivatives", j);
        bad_prefix = true;
      }
    }
  }
  if (require_y_plus_H_identity) {
    for (std::size_t j = 0; j < g.n_nodes(); ++j) {
      if (std::abs(g.y[j] + g.H[j] - g.xi[j]) >
          rel_tol * std::max(1.0, std::abs(g.xi[j]))) {
        out.push_back("y + H differs from the identity");
        break;
      }
    }
  }
  return out;
}

LagrangianGrid to_lagrangian(const EulerianState& state) {
  const auto xs = union_nodes(state.u.nodes(), state.G.nodes());

  LagrangianGrid g;
  g.xi.reserve(2 * xs.size());
  g.y.reserve(2 * xs.size());
  for (double x : xs) {
    const double hl = state.G(x);
    const double hr = state.G.eval_right(x);
    g.xi.push_back(x + hl);
    g.y.push_back(x);
    g.H.push_back(hl);
    if (hr > hl) {  // jump of G opens a plateau cell
      g.xi.push_back(x + hr);
      g.y.push_back(x);
      g.H.push_back(hr);
    }
  }
  const std::size_t n = g.xi.size();
  g.U.resize(n);
  for (std::size_t j = 0; j < n; ++j) g.U[j] = state.u(g.y[j]);
  g.V = g.H;  // equal measures: the energy weight is one
  g.H_inf = state.G.total();
  g.V_inf = g.H_inf;

  const std::size_t nc = n - 1;
  g.dy.resize(nc);
  g.dU.resize(nc);
  g.dV.resize(nc);
  g.dH.resize(nc);
  g.tau.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const double w = g.xi[j + 1] - g.xi[j];
    if (w > 0.0) {
      g.dy[j] = (g.y[j + 1] - g.y[j]) / w;
      g.dU[j] = (g.U[j + 1] - g.U[j]) / w;
      g.dV[j] = (g.V[j + 1] - g.V[j]) / w;
      g.dH[j] = (g.H[j + 1] - g.H[j]) / w;
    } else {
      g.dy[j] = g.dU[j] = g.dV[j] = g.dH[j] = 0.0;
    }
    g.tau[j] = cell_tau(g.dy[j], g.dU[j]);
  }
  return g;
}

BreakingTimes breaking_times(const LagrangianGrid& grid) {
  BreakingTimes bt;
  bt.tau = grid.tau;

  std::vector<std::pair<double, std::size_t>> finite;
  finite.reserve(grid.n_cells());
  for (std::size_t j = 0; j < grid.n_cells(); ++j)
    if (std::isfinite(grid.tau[j])) finite.push_back({grid.tau[j], j});
  std::sort(finite.begin(), finite.end());

  bt.distinct.push_back(0.0);
  bt.cells.emplace_back();
  for (std::size_t i = 0; i < finite.size();) {
    double rep = finite[i].first;
    const double tol = BreakingTimes::kDedupTol * std::max(1.0, rep);
    if (rep <= tol) rep = 0.0;
    std::size_t bucket;
    if (rep == 0.0) {
      bucket = 0;
    } else {
      bt.distinct.push_back(rep);
      bt.cells.emplace_back();
      bucket = bt.distinct.size() - 1;
    }
    while (i < finite.size() && finite[i].first - rep <= tol) {
      bt.cells[bucket].push_back(finite[i].second);
      bt.tau[finite[i].second] = rep;
      ++i;
    }
  }
  return bt;
}

EulerianState to_eulerian(const LagrangianGrid& g) {
  if (g.n_nodes() < 2) throw numeric_error("to_eulerian: degenerate grid");

  std::vector<double> ux{g.y.front()}, uv{g.U.front()};
  MonotoneStepBuilder fac(0.0), fsing(0.0), gb(0.0);

  double x_cur = g.y.front();
  for (std::size_t j = 0; j < g.n_cells(); ++j) {
    const double w = g.width(j);
    if (w == 0.0) continue;
    const double x_next = g.y[j + 1];
    const double mass_f = g.dV[j] * w;
    const double mass_g = g.dH[j] * w;
    if (x_next > x_cur) {
      ux.push_back(x_next);
      uv.push_back(g.U[j + 1]);
      fac.add_segment(x_cur, x_next, mass_f);
      gb.add_segment(x_cur, x_next, mass_g);
      x_cur = x_next;
    } else {  // plateau: the cell collapses to a point in x
      if (mass_f > 0.0) fsing.add_point_mass(x_cur, mass_f);
      if (mass_g > 0.0) gb.add_point_mass(x_cur, mass_g);
    }
  }

  EulerianState s{PiecewiseLinear(std::move(ux), std::move(uv)),
                  std::move(fac).build(), std::move(fsing).build(),
                  std::move(gb).build(), 0.0, 0.0};
  s.F_inf = s.F_ac.total() + s.F_sing.total();
  s.G_inf = s.G.total();
  return s;
}

}  // namespace hsa
