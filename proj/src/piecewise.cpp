#include "hsa/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "hsa/errors.hpp"

namespace hsa {

PiecewiseLinear::PiecewiseLinear(std::vector<double> nodes,
                                 std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.empty() || nodes_.size() != values_.size())
    throw numeric_error("PiecewiseLinear: node/value arrays empty or mismatched");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i] < nodes_[i + 1]))
      throw numeric_error("PiecewiseLinear: nodes not strictly increasing");
  for (double v : values_)
    if (!std::isfinite(v)) throw numeric_error("PiecewiseLinear: non-finite value");
}

PiecewiseLinear PiecewiseLinear::constant(double c) {
  return PiecewiseLinear({0.0}, {c});
}

double PiecewiseLinear::eval(double x) const {
  if (x <= nodes_.front()) return values_.front();
  if (x >= nodes_.back()) return values_.back();
  // first node strictly greater than x
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  double w = nodes_[i + 1] - nodes_[i];
  double t = (x - nodes_[i]) / w;
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

double PiecewiseLinear::slope(std::size_t i) const {
  return (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]);
}

double PiecewiseLinear::max_abs_slope() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    m = std::max(m, std::abs(slope(i)));
  return m;
}

MonotoneStep::MonotoneStep(std::vector<double> nodes,
                           std::vector<double> left_values,
                           std::vector<double> right_values)
    : nodes_(std::move(nodes)),
      left_(std::move(left_values)),
      right_(std::move(right_values)) {
  if (nodes_.empty() || nodes_.size() != left_.size() ||
      nodes_.size() != right_.size())
    throw numeric_error("MonotoneStep: array sizes mismatched");
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i] < nodes_[i + 1]))
      throw numeric_error("MonotoneStep: nodes not strictly increasing");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(left_[i] <= right_[i]))
      throw numeric_error("MonotoneStep: negative jump");
    if (i + 1 < nodes_.size() && !(right_[i] <= left_[i + 1]))
      throw numeric_error("MonotoneStep: decreasing between nodes");
  }
}

MonotoneStep MonotoneStep::zero() { return MonotoneStep({0.0}, {0.0}, {0.0}); }

MonotoneStep MonotoneStep::absolutely_continuous(std::vector<double> nodes,
                                                 std::vector<double> values) {
  std::vector<double> right = values;
  return MonotoneStep(std::move(nodes), std::move(values), std::move(right));
}

double MonotoneStep::eval(double x) const {
  if (x <= nodes_.front()) return left_.front();
  if (x > nodes_.back()) return right_.back();
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  if (it != nodes_.end() && *it == x)
    return left_[static_cast<std::size_t>(it - nodes_.begin())];
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  double w = nodes_[i + 1] - nodes_[i];
  double t = (x - nodes_[i]) / w;
  return right_[i] + t * (left_[i + 1] - right_[i]);
}

double MonotoneStep::eval_right(double x) const {
  if (x < nodes_.front()) return left_.front();
  if (x >= nodes_.back()) return right_.back();
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  if (it != nodes_.end() && *it == x)
    return right_[static_cast<std::size_t>(it - nodes_.begin())];
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  double w = nodes_[i + 1] - nodes_[i];
  double t = (x - nodes_[i]) / w;
  return right_[i] + t * (left_[i + 1] - right_[i]);
}

double MonotoneStep::slope(std::size_t i) const {
  return (left_[i + 1] - right_[i]) / (nodes_[i + 1] - nodes_[i]);
}

bool MonotoneStep::has_jumps(double tol) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (jump(i) > tol) return true;
  return false;
}

bool MonotoneStep::has_slopes(double tol) const {
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (left_[i + 1] - right_[i] > tol * (nodes_[i + 1] - nodes_[i]))
      return true;
  return false;
}

MonotoneStep operator+(const MonotoneStep& a, const MonotoneStep& b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  std::merge(a.nodes().begin(), a.nodes().end(), b.nodes().begin(),
             b.nodes().end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> left(xs.size()), right(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    left[i] = a.eval(xs[i]) + b.eval(xs[i]);
    right[i] = a.eval_right(xs[i]) + b.eval_right(xs[i]);
  }
  return MonotoneStep(std::move(xs), std::move(left), std::move(right));
}

MonotoneStepBuilder::MonotoneStepBuilder(double start_value)
    : start_(start_value) {}

void MonotoneStepBuilder::open_node(double x) {
  if (!xs_.empty() && x < xs_.back())
    throw numeric_error("MonotoneStepBuilder: positions not sorted");
  if (xs_.empty() || x > xs_.back()) {
    double v = xs_.empty() ? start_ : right_.back();
    xs_.push_back(x);
    left_.push_back(v);
    right_.push_back(v);
  }
}

void MonotoneStepBuilder::add_segment(double x_from, double x_to, double mass) {
  open_node(x_from);
  if (x_to > x_from) {
    double v = right_.back() + mass;
    xs_.push_back(x_to);
    left_.push_back(v);
    right_.push_back(v);
  } else {
    // zero-width piece: the mass concentrates
    right_.back() += mass;
  }
}

void MonotoneStepBuilder::add_point_mass(double x, double mass) {
  open_node(x);
  right_.back() += mass;
}

MonotoneStep MonotoneStepBuilder::build() && {
  if (xs_.empty()) return MonotoneStep({0.0}, {start_}, {start_});
  return MonotoneStep(std::move(xs_), std::move(left_), std::move(right_));
}

PiecewiseLinear generalized_inverse(const MonotoneStep& g, bool shift) {
  std::vector<double> xi, y;
  const auto& n = g.nodes();
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!shift && i + 1 < n.size() &&
        !(g.left_values()[i + 1] > g.right_values()[i]))
      throw numeric_error(
          "generalized_inverse: unshifted inverse needs strictly positive slopes");
    double base = shift ? n[i] : 0.0;
    double a = base + g.left_values()[i];
    double b = base + g.right_values()[i];
    if (xi.empty() || a > xi.back()) {
      xi.push_back(a);
      y.push_back(n[i]);
    }
    if (b > xi.back()) {
      xi.push_back(b);
      y.push_back(n[i]);
    }
  }
  if (shift) {
    // the inverse continues with unit slope beyond the data; pad so the
    // constant-tail carrier is exact over a generous margin
    const double margin = std::max(1.0, xi.back() - xi.front()) + 1.0;
    xi.insert(xi.begin(), xi.front() - margin);
    y.insert(y.begin(), y.front() - margin);
    xi.push_back(xi.back() + margin);
    y.push_back(y.back() + margin);
  }
  return PiecewiseLinear(std::move(xi), std::move(y));
}

namespace detail {

double integral_abs_affine(double va, double vb, double w) {
  if (w <= 0.0) return 0.0;
  if (va * vb >= 0.0) return w * (std::abs(va) + std::abs(vb)) / 2.0;
  // sign change: split at the root
  double r = va / (va - vb);  // in (0,1)
  return w * (std::abs(va) * r + std::abs(vb) * (1.0 - r)) / 2.0;
}

namespace {

// Merged breakpoints of two piecewise-affine functions.
std::vector<double> merged_nodes(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

void require_matching_tails(double fl, double gl, double fr, double gr,
                            const char* what) {
  if (fl != gl || fr != gr)
    throw numeric_error(std::string(what) +
                        ": tails differ, integral norm is infinite");
}

}  // namespace
}  // namespace detail

double sup_norm_diff(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  double m = 0.0;
  for (double x : detail::merged_nodes(f.nodes(), g.nodes()))
    m = std::max(m, std::abs(f(x) - g(x)));
  // constant tails are attained at the extreme nodes already
  return m;
}

double l1_norm_diff(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  detail::require_matching_tails(f.left_tail(), g.left_tail(), f.right_tail(),
                                 g.right_tail(), "l1_norm_diff");
  auto xs = detail::merged_nodes(f.nodes(), g.nodes());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    s += detail::integral_abs_affine(f(xs[i]) - g(xs[i]),
                                     f(xs[i + 1]) - g(xs[i + 1]),
                                     xs[i + 1] - xs[i]);
  return s;
}

double l2_norm_diff(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  detail::require_matching_tails(f.left_tail(), g.left_tail(), f.right_tail(),
                                 g.right_tail(), "l2_norm_diff");
  auto xs = detail::merged_nodes(f.nodes(), g.nodes());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    s += detail::integral_sq_affine(f(xs[i]) - g(xs[i]),
                                    f(xs[i + 1]) - g(xs[i + 1]),
                                    xs[i + 1] - xs[i]);
  return std::sqrt(s);
}

double sup_norm_diff(const MonotoneStep& f, const MonotoneStep& g) {
  double m = 0.0;
  for (double x : detail::merged_nodes(f.nodes(), g.nodes())) {
    m = std::max(m, std::abs(f(x) - g(x)));
    m = std::max(m, std::abs(f.eval_right(x) - g.eval_right(x)));
  }
  return m;
}

double l1_norm_diff(const MonotoneStep& f, const MonotoneStep& g) {
  detail::require_matching_tails(f.limit_at_minus_inf(), g.limit_at_minus_inf(),
                                 f.total(), g.total(), "l1_norm_diff");
  auto xs = detail::merged_nodes(f.nodes(), g.nodes());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    s += detail::integral_abs_affine(f.eval_right(xs[i]) - g.eval_right(xs[i]),
                                     f(xs[i + 1]) - g(xs[i + 1]),
                                     xs[i + 1] - xs[i]);
  return s;
}

double l2_norm_diff(const MonotoneStep& f, const MonotoneStep& g) {
  detail::require_matching_tails(f.limit_at_minus_inf(), g.limit_at_minus_inf(),
                                 f.total(), g.total(), "l2_norm_diff");
  auto xs = detail::merged_nodes(f.nodes(), g.nodes());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    s += detail::integral_sq_affine(f.eval_right(xs[i]) - g.eval_right(xs[i]),
                                    f(xs[i + 1]) - g(xs[i + 1]),
                                    xs[i + 1] - xs[i]);
  return std::sqrt(s);
}

}  // namespace hsa
