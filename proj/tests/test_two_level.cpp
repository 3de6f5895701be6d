#include <doctest.h>

#include <random>

#include "oracles/two_level_matrix.hpp"
#include "weaktime/two_level.hpp"

using namespace weaktime;

TEST_SUITE("two_level") {

TEST_CASE("closed forms agree with the matrix oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> om(-3.0, 3.0), v(0.2, 2.0), ph(0.0, 6.0), t(0.05, 6.0);
  int compared = 0;
  for (int i = 0; i < 60; ++i) {
    const TwoLevelConfig cfg{om(rng), std::polar(v(rng), ph(rng)), 1.0};
    const double tm = t(rng);
    const auto d = dwell_times(cfg, tm);
    CHECK(d.level0 == doctest::Approx(oracle::two_level_times(cfg.omega, cfg.v, tm, 0, 0).unconditional).epsilon(1e-11));
    for (int f = 0; f < 2; ++f) {
      const auto o0 = oracle::two_level_times(cfg.omega, cfg.v, tm, 0, f);
      const auto o1 = oracle::two_level_times(cfg.omega, cfg.v, tm, 1, f);
      if (o0.probability < 1e-3) continue;
      const auto c = conditional_components(cfg, tm, f);
      CHECK(c.tau1_level0 == doctest::Approx(o0.tau1).epsilon(1e-9));
      CHECK(c.tau2_level0 == doctest::Approx(o0.tau2).epsilon(1e-9).scale(1.0));
      CHECK(c.tau1_level1 == doctest::Approx(o1.tau1).epsilon(1e-9).scale(1.0));
      CHECK(c.tau2_level1 == doctest::Approx(o1.tau2).epsilon(1e-9).scale(1.0));
      CHECK(occupation_probability(cfg, tm, f) == doctest::Approx(o0.probability).epsilon(1e-12));
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("completeness and probability-weighted averages") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> om(0.0, 5.0), v(0.05, 3.0), t(0.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const TwoLevelConfig cfg{om(rng), v(rng), 1.0};
    const double tm = t(rng);
    const auto d = dwell_times(cfg, tm);
    CHECK(std::abs(d.level0 + d.level1 - tm) <= 1e-10 * std::max(1.0, tm));
    try {
      const auto c0 = conditional_components(cfg, tm, 0);
      const auto c1 = conditional_components(cfg, tm, 1);
      const double p0 = occupation_probability(cfg, tm, 0);
      const double p1 = occupation_probability(cfg, tm, 1);
      CHECK(std::abs(p0 * c0.tau1_level0 + p1 * c1.tau1_level0 - d.level0) <= 1e-10 * std::max(1.0, tm));
      CHECK(std::abs(p0 * c0.tau1_level1 + p1 * c1.tau1_level1 - d.level1) <= 1e-10 * std::max(1.0, tm));
      CHECK(c1.tau1_level0 == 0.5 * tm);
    } catch (const SingularityError&) {
    }
  }
}

TEST_CASE("unconditional times from the Rabi formula") {
  const TwoLevelConfig cfg{2.0, std::sqrt(3.0), 1.0};
  CHECK(cfg.Omega() == doctest::Approx(4.0));
  const double t = 1.7, w = 0.25;
  const double expected = 0.5 * (1.0 + w) * t + std::sin(4.0 * t) * (1.0 - w) / 8.0;
  CHECK(dwell_times(cfg, t).level0 == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("singular times are detected") {
  const TwoLevelConfig cfg{2.0, std::sqrt(3.0), 1.0};
  for (int n = 1; n <= 3; ++n) {
    const double t = 2.0 * pi * n / cfg.Omega();
    CHECK_THROWS_AS(conditional_components(cfg, t, 1), SingularityError);
    CHECK_NOTHROW(conditional_components(cfg, t, 0));
  }
  const auto rows = time_table(cfg, {0.5, 2.0 * pi / cfg.Omega()});
  CHECK_FALSE(rows[0].singular);
  CHECK(rows[1].singular);
  CHECK(std::isnan(rows[1].tau1_c1));
  CHECK(std::isfinite(rows[1].tau0));
  // Resonance: final |0> vanishes at odd multiples of pi/Omega.
  const TwoLevelConfig res{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(conditional_components(res, pi / res.Omega(), 0), SingularityError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(dwell_times({0.0, 0.0, 1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(dwell_times({1.0, 1.0, 1.0}, -1.0), DomainError);
  CHECK_THROWS_AS(conditional_components({1.0, 1.0, 1.0}, 1.0, 2), DomainError);
  CHECK_THROWS_AS(occupation_probability({1.0, 1.0, 1.0}, 1.0, 5), DomainError);
}

}  // TEST_SUITE
