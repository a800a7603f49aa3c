#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hsa/eulerian.hpp"
#include "hsa/evolution.hpp"

namespace hsa {

/// Three-peakon verification dataset: piecewise-linear wave with three
/// descending ramps whose characteristics collide at 2, 40/19 and 20/9.
EulerianState multipeakon_initial();
AlphaProfile multipeakon_alpha();

/// Cusp dataset u = |x|^(2/3) on [-1, 1]: entered as exact node samples
/// of u and F on the projection grid of spacing dx.
EulerianState cusp_initial(double dx);
/// Ramp profile beta*|x| on [-1, 0), beta to the left, 0 to the right.
AlphaProfile cusp_alpha(double beta);

struct ReferenceSpec {
  enum class Kind { none, exact, fine };
  Kind kind = Kind::none;
  double fine_dx = 1e-5;

  static ReferenceSpec parse(const std::string& text);  // "exact"|"none"|"fine:<dx>"
  std::string to_string() const;
};

struct ExperimentConfig {
  std::string initial_data = "multipeakon";  // "multipeakon" | "cusp" | "custom"
  double beta = 19.0 / 20.0;                 // cusp dissipation strength
  std::optional<EulerianState> custom_state;
  std::optional<PiecewiseLinear> custom_alpha;

  std::vector<double> dx_list;
  double T = 3.0;
  std::vector<double> query_times;  // user extras; partition points are added
  bool minimal_steps = true;
  std::size_t max_error_times = 25;  // cap on per-run error-sampling times
  std::string out_dir;
  std::string cache_dir;  // fine-reference cache location ("" = out_dir)
  ReferenceSpec reference;

  void check() const;  // throws config_error on invalid settings
};

/// Strict JSON config reader; unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

struct ErrorRow {
  double dx = 0.0;
  double sup_u_err = std::numeric_limits<double>::quiet_NaN();
  double F_inf_err = std::numeric_limits<double>::quiet_NaN();
  long N = 0;
  long iterations = 0;
  double time_minimal_s = std::numeric_limits<double>::quiet_NaN();
  double time_full_s = std::numeric_limits<double>::quiet_NaN();
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
};

/// Ladder driver: one solve per dx, errors against the configured
/// reference, artifacts (solution dumps, energy traces, errors.csv,
/// summary) under out_dir. With time_both_modes the run is repeated
/// without minimal steps and both wall times are reported (bench mode);
/// otherwise the time columns stay NaN so reruns are byte-identical.
ErrorReport run(const ExperimentConfig& config, bool time_both_modes = false);

void emit_csv(const ErrorReport& report, const std::string& path);

/// Resolve the configured initial data at a given grid spacing.
struct InitialData {
  EulerianState state;
  AlphaProfile alpha;
};
InitialData make_initial(const ExperimentConfig& config, double dx);

}  // namespace hsa
