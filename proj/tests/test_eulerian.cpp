#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hsa/errors.hpp"
#include "hsa/eulerian.hpp"
#include "hsa/experiment.hpp"
#include "helpers.hpp"

using namespace hsa;

namespace {

EulerianState make_ac_state(std::vector<double> xs, std::vector<double> uv,
                            std::vector<double> fv) {
  MonotoneStep F = MonotoneStep::absolutely_continuous(xs, fv);
  MonotoneStep G = F;
  const double total = F.total();
  return EulerianState{PiecewiseLinear(std::move(xs), std::move(uv)),
                       std::move(F), MonotoneStep::zero(), std::move(G),
                       total, total};
}

}  // namespace

TEST_CASE("alpha profile checks range and records the Lipschitz bound") {
  CHECK(multipeakon_alpha().lipschitz() ==
        doctest::Approx(361.0 / 381.0).epsilon(1e-14));
  CHECK(cusp_alpha(0.95).lipschitz() == doctest::Approx(0.95));
  CHECK(AlphaProfile::zero().lipschitz() == 0.0);
  CHECK_THROWS_AS(AlphaProfile(PiecewiseLinear({0.0}, {1.0})), numeric_error);
  CHECK_THROWS_AS(AlphaProfile(PiecewiseLinear({0.0}, {-0.1})), numeric_error);
}

TEST_CASE("validate accepts the builtin initial data") {
  CHECK(validate(multipeakon_initial(), /*require_equal_measures=*/true).empty());
  std::mt19937 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto d = testutil::random_initial_data(rng, i % 2 == 0);
    CHECK(validate(d.state, true).empty());
  }
}

TEST_CASE("validate flags a density mismatch") {
  // u has slope 1 but the energy grows at rate 2
  EulerianState s = make_ac_state({0.0, 1.0}, {0.0, 1.0}, {0.0, 2.0});
  auto v = validate(s);
  REQUIRE(v.size() == 1);
  CHECK(v.front().find("density") != std::string::npos);
}

TEST_CASE("validate flags F exceeding G") {
  MonotoneStep F = MonotoneStep::absolutely_continuous({0.0, 1.0}, {0.0, 1.0});
  MonotoneStep G = MonotoneStep::absolutely_continuous({0.0, 1.0}, {0.0, 0.5});
  EulerianState s{PiecewiseLinear({0.0, 1.0}, {0.0, 1.0}), F,
                  MonotoneStep::zero(), G, 1.0, 0.5};
  auto v = validate(s);
  REQUIRE(!v.empty());
  bool mentions = false;
  for (const auto& msg : v) mentions |= msg.find("exceeds") != std::string::npos;
  CHECK(mentions);
}

TEST_CASE("sign selection") {
  CHECK(select_sign(0.3, 0.7, 0.0) == +1);  // q = 0: canonical
  // matching the midpoint exactly favours the matching branch
  CHECK(select_sign(-1.0, -0.5, 0.5) == +1);  // D+ = Du + q
  CHECK(select_sign(-1.0, -1.5, 0.5) == -1);  // D+ = Du - q
  // exact tie resolves to the lower branch
  CHECK(select_sign(0.25, 0.25, 0.125) == -1);
}

TEST_CASE("projection reproduces aligned piecewise-linear data") {
  EulerianState s = make_ac_state({0.0, 1.0, 2.0}, {0.0, 1.0, 1.0},
                                  {0.0, 1.0, 1.0});
  EulerianState p = project(s, 0.5);
  CHECK(sup_norm_diff(p.u, s.u) <= 1e-14);
  CHECK(sup_norm_diff(p.F_total(), s.F_total()) <= 1e-14);
  CHECK(p.F_inf == doctest::Approx(1.0));
}

TEST_CASE("projection reproduces the three-peakon data on a divisor grid") {
  // 1/29241 divides every node distance except that the kink at x = 1
  // falls on an odd gridpoint, which the sign selection absorbs
  EulerianState s = multipeakon_initial();
  EulerianState p = project(s, 1.0 / 29241.0);
  CHECK(sup_norm_diff(p.u, s.u) <= 1e-9);
  CHECK(sup_norm_diff(p.F_total(), s.F_total()) <= 1e-9);
}

TEST_CASE("cusp projection keeps every ramp segment descending") {
  const double dx = 1e-2;
  EulerianState p = project(cusp_initial(dx), dx);
  const auto& xs = p.u.nodes();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    if (mid > -1.0 && mid < 0.0) CHECK(p.u.slope(i) < 0.0);
  }
}

TEST_CASE("projection interpolates at even gridpoints and preserves cell energy") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    auto d = testutil::random_initial_data(rng, trial % 3 == 0);
    const double dx = trial % 2 == 0 ? 0.05 : 0.02;
    EulerianState p = project(d.state, dx);

    const auto& xs = p.u.nodes();
    REQUIRE(xs.size() % 2 == 1);
    for (std::size_t k = 0; k < xs.size(); k += 2) {
      CHECK(p.u(xs[k]) == doctest::Approx(d.state.u(xs[k])).epsilon(1e-13));
      CHECK(p.F(xs[k]) == doctest::Approx(d.state.F(xs[k])).epsilon(1e-12));
    }
    // two slopes per pair cell carry exactly the cell energy
    for (std::size_t k = 0; k + 2 < xs.size(); k += 2) {
      const double s1 = p.u.slope(k), s2 = p.u.slope(k + 1);
      const double lhs = (s1 * s1 + s2 * s2) * dx;
      const double rhs = p.F_ac(xs[k + 2]) - p.F_ac.eval_right(xs[k]);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    CHECK(validate(p, /*require_equal_measures=*/true).empty());
  }
}

TEST_CASE("projection error bounds") {
  std::mt19937 rng(29);
  const double c_u = 1.0 + std::sqrt(2.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto d = testutil::random_initial_data(rng, trial % 2 == 1);
    for (double dx : {1e-1, 1e-2}) {
      EulerianState p = project(d.state, dx);
      const double fac_inf = d.state.F_ac.total();
      CHECK(sup_norm_diff(p.u, d.state.u) <=
            c_u * std::sqrt(fac_inf) * std::sqrt(dx) + 1e-10);
      const MonotoneStep F = d.state.F_total(), Fp = p.F_total();
      CHECK(l1_norm_diff(Fp, F) <= 2.0 * d.state.F_inf * dx + 1e-10);
      CHECK(l2_norm_diff(Fp, F) <=
            2.0 * d.state.F_inf * std::sqrt(dx) + 1e-10);
    }
  }
}

TEST_CASE("projection is idempotent") {
  std::mt19937 rng(31);
  auto d = testutil::random_initial_data(rng, true);
  const double dx = 0.05;
  EulerianState p1 = project(d.state, dx);
  EulerianState p2 = project(p1, dx);
  CHECK(sup_norm_diff(p1.u, p2.u) <= 1e-13);
  CHECK(sup_norm_diff(p1.F_total(), p2.F_total()) <= 1e-13);
  CHECK(sup_norm_diff(p1.G, p2.G) <= 1e-13);
}

TEST_CASE("projection rejects inadmissible data and parameters") {
  // slope 2 but energy growth 1: no admissible wave has this profile
  EulerianState bad = make_ac_state({0.0, 1.0}, {0.0, 2.0}, {0.0, 1.0});
  CHECK_THROWS_AS(project(bad, 0.25), numeric_error);
  CHECK_THROWS_AS(project(multipeakon_initial(), 0.0), config_error);
}

TEST_CASE("singular mass collapses onto even gridpoints") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    auto d = testutil::random_initial_data(rng, /*with_singular=*/true);
    if (!d.state.F_sing.has_jumps()) continue;
    const double dx = 0.05;
    EulerianState p = project(d.state, dx);
    CHECK(p.F_sing.total() ==
          doctest::Approx(d.state.F_sing.total()).epsilon(1e-13));
    for (std::size_t i = 0; i < p.F_sing.size(); ++i) {
      if (p.F_sing.jump(i) > 0.0) {
        const double q = p.F_sing.nodes()[i] / (2.0 * dx);
        CHECK(std::abs(q - std::round(q)) <= 1e-9);
      }
    }
    CHECK(validate(p, true).empty());
  }
}
