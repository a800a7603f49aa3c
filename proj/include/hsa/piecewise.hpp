#pragma once

#include <cstddef>
#include <vector>

namespace hsa {

/// Continuous piecewise-linear function on the real line with constant
/// tails. Nodes are strictly increasing; the function equals values[0]
/// left of the first node and values.back() right of the last one.
///
/// Immutable after construction; all operations are pure.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> nodes, std::vector<double> values);

  /// Constant function, represented with a single anchor node at x = 0.
  static PiecewiseLinear constant(double c);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;

  /// Slope on the open segment (nodes[i], nodes[i+1]).
  double slope(std::size_t i) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return nodes_.size(); }

  double left_tail() const { return values_.front(); }
  double right_tail() const { return values_.back(); }

  double max_abs_slope() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
};

/// Bounded, left-continuous, nondecreasing step-plus-linear function:
/// the primitive of a positive finite measure. Jumps are allowed at
/// nodes (point masses), linear growth between nodes (densities).
///
/// Value convention: f(x) = left limit at every node (left-continuity),
/// f(x) = left_values[0] for x <= nodes[0], f(x) = right_values.back()
/// for x > nodes.back().
class MonotoneStep {
 public:
  MonotoneStep(std::vector<double> nodes, std::vector<double> left_values,
               std::vector<double> right_values);

  /// The zero measure.
  static MonotoneStep zero();

  /// Primitive of a purely absolutely continuous measure given by the
  /// nodes/values of its (nondecreasing) piecewise-linear primitive.
  static MonotoneStep absolutely_continuous(std::vector<double> nodes,
                                            std::vector<double> values);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  /// Right limit f(x+).
  double eval_right(double x) const;

  double jump(std::size_t i) const { return right_[i] - left_[i]; }
  /// Density on the open segment (nodes[i], nodes[i+1]).
  double slope(std::size_t i) const;

  double total() const { return right_.back(); }        // limit at +inf
  double limit_at_minus_inf() const { return left_.front(); }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& left_values() const { return left_; }
  const std::vector<double>& right_values() const { return right_; }
  std::size_t size() const { return nodes_.size(); }

  bool has_jumps(double tol = 0.0) const;
  bool has_slopes(double tol = 0.0) const;

  /// Pointwise sum of two primitives (measure addition).
  friend MonotoneStep operator+(const MonotoneStep& a, const MonotoneStep& b);

 private:
  std::vector<double> nodes_;
  std::vector<double> left_, right_;
};

/// Incremental builder used when reading a measure off a left-to-right
/// sweep: mixes point masses and linear pieces, then normalizes.
class MonotoneStepBuilder {
 public:
  explicit MonotoneStepBuilder(double start_value = 0.0);
  /// Append a linear piece of the primitive from the current position
  /// to x, accumulating `mass` over it. Zero-length pieces merge.
  void add_segment(double x_from, double x_to, double mass);
  void add_point_mass(double x, double mass);
  MonotoneStep build() &&;

 private:
  struct Entry {
    double x;
    double jump;
  };
  std::vector<double> xs_;
  std::vector<double> left_, right_;
  double start_;
  void open_node(double x);
};

/// Monotone inverse: xi -> sup{ x : x + g(x) < xi } when shift is true,
/// xi -> sup{ x : g(x) < xi } otherwise. Jumps of g map to plateaus of
/// the result; a slope s maps to 1/(1+s) (shifted) or 1/s (unshifted;
/// requires strictly positive slopes). The shifted inverse continues
/// with unit slope at infinity; the result carries padding nodes one
/// span beyond the data on each side, after which the constant-tail
/// carrier clamps.
PiecewiseLinear generalized_inverse(const MonotoneStep& g, bool shift = true);

/// Exact norms of differences of piecewise-linear data. The L1/L2
/// variants integrate segment-wise in closed form and require matching
/// tails (otherwise the integral is infinite and a numeric_error is
/// thrown).
double sup_norm_diff(const PiecewiseLinear& f, const PiecewiseLinear& g);
double l1_norm_diff(const PiecewiseLinear& f, const PiecewiseLinear& g);
double l2_norm_diff(const PiecewiseLinear& f, const PiecewiseLinear& g);

double sup_norm_diff(const MonotoneStep& f, const MonotoneStep& g);
double l1_norm_diff(const MonotoneStep& f, const MonotoneStep& g);
double l2_norm_diff(const MonotoneStep& f, const MonotoneStep& g);

namespace detail {
/// Exact integral of the squared affine function with endpoint values
/// (va, vb) over a width w.
inline double integral_sq_affine(double va, double vb, double w) {
  return w * (va * va + va * vb + vb * vb) / 3.0;
}
/// Exact integral of |affine| with endpoint values (va, vb) over width w.
double integral_abs_affine(double va, double vb, double w);
}  // namespace detail

}  // namespace hsa
