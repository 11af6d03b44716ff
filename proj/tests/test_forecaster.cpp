#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csg/forecaster.hpp"
#include "csg/geometry.hpp"

using namespace csg;

namespace {
Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Forecaster over [0,1] with the G1 deterministic BR binning on the scalar
// embedding p = (x, 1-x).
ScalarForecaster g1_forecaster(const FiniteGame& g, double step, double eps,
                               StartScheme scheme = StartScheme::EveryRound) {
  const BinningSpec b = make_br_binning(g, true);
  return ScalarForecaster({0.0, 1.0, step, eps, scheme}, g.k,
                          [b, &g](double x) { return bin_weights(b, &g, vec2(x, 1.0 - x)); });
}
}  // namespace

TEST_CASE("AdaNormalHedge weight formula") {
  CHECK(anh_weight(0, 0) == doctest::Approx(0.5 * (std::exp(1.0 / 3.0) - 1.0)));
  CHECK(anh_weight(1, 1) == doctest::Approx(0.5 * (std::exp(2.0 / 3.0) - 1.0)));
  CHECK(anh_weight(-1, 0) == doctest::Approx(0.0));
  CHECK(anh_weight(-7.5, 3.0) == doctest::Approx(0.0));
  // Nonnegative and nondecreasing in R.
  double prev = -1.0;
  for (double r = -2.0; r <= 2.0; r += 0.25) {
    const double w = anh_weight(r, 5.0);
    CHECK(w >= 0.0);
    CHECK(w >= prev - 1e-15);
    prev = w;
  }
}

TEST_CASE("grid selection rule") {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};

  SUBCASE("vanishing Z picks the grid midpoint") {
    const auto d = select_from_grid_z(grid, {0, 0, 0, 0, 0}, 0.0, 1.0);
    CHECK(d.support == std::vector<double>{0.5});
    CHECK(d.certified_value == doctest::Approx(0.0));
  }
  SUBCASE("uniformly positive Z pins the upper endpoint") {
    const auto d = select_from_grid_z(grid, {0.5, 0.4, 0.3, 0.2, 0.1}, 0.0, 1.0);
    CHECK(d.support == std::vector<double>{1.0});
    CHECK(d.certified_value == doctest::Approx(0.0));
  }
  SUBCASE("uniformly negative Z pins the lower endpoint") {
    const auto d = select_from_grid_z(grid, {-0.5, -0.4, -0.3, -0.2, -0.1}, 0.0, 1.0);
    CHECK(d.support == std::vector<double>{0.0});
    CHECK(d.certified_value == doctest::Approx(0.0));
  }
  SUBCASE("sign change mixes the adjacent pair to zero expected Z") {
    const std::vector<double> fine{0.45, 0.5, 0.55, 0.6};
    const auto d = select_from_grid_z(fine, {0.3, 0.2, -0.2, -0.4}, 0.0, 1.0);
    REQUIRE(d.support.size() == 2);
    CHECK(d.support[0] == doctest::Approx(0.5));
    CHECK(d.support[1] == doctest::Approx(0.55));
    CHECK(d.probs[0] == doctest::Approx(0.5));
    CHECK(d.probs[1] == doctest::Approx(0.5));
    // The mixture's expected loss no longer depends on h; only the small
    // grid-resolution term remains.
    CHECK(d.certified_value <= 0.05 + 1e-12);
  }
}

TEST_CASE("expert loss formula") {
  const FiniteGame g = make_g1();
  const BinningSpec b = make_br_binning(g, true);
  const Vector p = vec2(0.4, 0.6);  // BR bin = 1
  const Vector h = vec2(1.0, 0.0);
  CHECK(expert_loss({1, 1, 0, +1}, h, p, b, &g) == doctest::Approx(0.6));
  CHECK(expert_loss({1, 1, 0, -1}, h, p, b, &g) == doctest::Approx(-0.6));
  CHECK(expert_loss({1, 0, 0, +1}, h, p, b, &g) == doctest::Approx(0.0));  // asleep bin
  CHECK(expert_loss({1, 0, 0, +1}, h, h, b, &g) == doctest::Approx(0.0));  // p = h
}

TEST_CASE("pi is a probability vector over awake experts") {
  const FiniteGame g = make_g1();
  ScalarForecaster fc = g1_forecaster(g, 0.05, 0.06);
  RngStream rng = derive_stream(41, "fc");
  for (int t = 0; t < 30; ++t) {
    const auto pi = fc.pi();
    double sum = 0.0;
    for (double v : pi) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
    fc.step(rng);
    fc.observe(t % 3 == 0 ? 1.0 : 0.0);
  }
  // Round 1: uniform over the s=1 cohort (equal priors and weights).
  ScalarForecaster fresh = g1_forecaster(g, 0.5, 0.5);
  const auto pi1 = fresh.pi();
  REQUIRE(pi1.size() == 4);
  for (double v : pi1) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("certified value stays within the configured tolerance") {
  const FiniteGame g = make_g1();
  ScalarForecaster fc = g1_forecaster(g, 0.01, 0.02);
  RngStream rng = derive_stream(42, "fc");
  RngStream adv = derive_stream(43, "fc");
  for (int t = 0; t < 200; ++t) {
    fc.step(rng);
    CHECK(fc.last_distribution().certified_value <= 0.02 + 1e-12);
    fc.observe(adv.uniform());
  }
}

TEST_CASE("forecasts converge against a constant adversary") {
  const FiniteGame g = make_g1();
  ScalarForecaster fc = g1_forecaster(g, 0.01, 0.02);
  RngStream rng = derive_stream(44, "fc");
  double tail_dev = 0.0;
  for (int t = 1; t <= 600; ++t) {
    const double p = fc.step(rng);
    fc.observe(1.0);
    if (t > 500) tail_dev = std::max(tail_dev, std::abs(p - 1.0));
  }
  CHECK(tail_dev <= 0.05);
  CHECK(fc.regret_constant(2, 2) <= 10.0);
}

TEST_CASE("dyadic cohorts materialize only at powers of two") {
  const FiniteGame g = make_g1();
  ScalarForecaster fc = g1_forecaster(g, 0.1, 0.12, StartScheme::Dyadic);
  RngStream rng = derive_stream(45, "fc");
  for (int t = 0; t < 40; ++t) {
    fc.step(rng);
    fc.observe(0.3);
  }
  for (const auto& e : fc.experts()) {
    const int s = e.id.s;
    CHECK((s & (s - 1)) == 0);
  }
}

TEST_CASE("compute_z is the binning-weighted signed expert mass") {
  const FiniteGame g = make_g1();
  ScalarForecaster fc = g1_forecaster(g, 0.25, 0.3);
  RngStream rng = derive_stream(46, "fc");
  // Fresh state: sigma-symmetric weights cancel exactly.
  CHECK(fc.compute_z(0.3) == doctest::Approx(0.0));
  for (int t = 0; t < 10; ++t) {
    fc.step(rng);
    fc.observe(1.0);
  }
  // After constant pressure toward h = 1, Z inside the activated bin is
  // positive (pushing the forecast up); the other bin never activated.
  CHECK(fc.compute_z(0.75) > 0.0);
  CHECK(fc.compute_z(0.25) == doctest::Approx(0.0));
}

TEST_CASE("invalid configuration is rejected") {
  const FiniteGame g = make_g1();
  CHECK_THROWS_AS(g1_forecaster(g, 0.0, 0.1), ConfigError);
  ScalarForecaster fc = g1_forecaster(g, 0.1, 0.12);
  CHECK_THROWS_AS(fc.observe(0.5), ConfigError);  // observe before step
}

TEST_CASE("general-m LP forecaster runs and certifies on a 3-action game") {
  FiniteGame g;
  g.m = 3;
  g.k = 2;
  g.u_principal = Matrix(3, 2);
  g.u_principal << 1, 0, 0, 1, 0.5, 0.5;
  g.u_agent = Matrix(3, 2);
  g.u_agent << 1, 0, 0, 1, 0.2, 0.3;
  g.preference = {0, 1};
  SimplexLPForecaster fc({0.2, 0.25, StartScheme::EveryRound}, g, true);
  RngStream rng = derive_stream(47, "fc");
  RngStream adv = derive_stream(48, "fc");
  for (int t = 0; t < 25; ++t) {
    const Vector p = fc.step(rng);
    CHECK(is_simplex_point(p, 1e-9));
    CHECK(fc.last_certified() <= 0.25 + 1e-9);
    fc.observe(sample_simplex_uniform(adv, 3));
  }
  CHECK(fc.round() == 25);
}
