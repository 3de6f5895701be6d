#include <doctest.h>

#include <cstring>
#include <random>

#include "weaktime/time_densities.hpp"

using namespace weaktime;

namespace {

const GaussianPacket narrow(1.0, 0.001, -1e4);

double residual(const TimeDensities& td, const DensityPoint& p) {
  return std::abs(p.dwell - td.T() * p.tunnel - td.R() * p.reflect);
}

}  // namespace

TEST_SUITE("time_densities") {

TEST_CASE("dwell density splits into tunneling and reflection parts") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-40.0, 45.0);
  for (const Barrier& b : {Barrier::delta(2.0), Barrier::rectangular(2.0, 5.0), Barrier::rectangular(0.5, 2.0)}) {
    const TimeDensities td(narrow, b);
    for (int i = 0; i < 40; ++i) CHECK(residual(td, td.at(x(rng))) < 1e-6);
  }
}

TEST_CASE("closed-form kernels agree with the eigenfunction kernels") {
  const TimeDensities td(narrow, Barrier::rectangular(0.8, 1.3));
  for (double x : {-7.3, -0.2, 0.4, 1.0, 1.31, 9.0}) {
    for (double p : {0.995, 1.0, 1.004}) {
      const auto a = td.kernels(p, x);
      const auto b = td.generic_kernels(p, x);
      for (int j = 0; j < 3; ++j) {
        CAPTURE(x);
        CAPTURE(j);
        CHECK(std::abs(a[j] - b[j]) < 1e-10 * (1.0 + std::abs(a[j])));
      }
    }
  }
}

TEST_CASE("free motion: all densities equal <M/p>") {
  const GaussianPacket g(1.0, 0.01);
  const TimeDensities td(g, Barrier::free());
  const double inv_p = 1.0 + 1e-4 + 3e-8;
  for (double x : {-20.0, 0.0, 13.0}) {
    const auto p = td.at(x);
    CHECK(p.dwell == doctest::Approx(inv_p).epsilon(1e-8));
    CHECK(p.tunnel == doctest::Approx(inv_p).epsilon(1e-8));
    CHECK(std::abs(p.correction) < 1e-10);
  }
}

TEST_CASE("far-field limits for the delta barrier") {
  const TimeDensities td(narrow, Barrier::delta(2.0));
  for (double x : {3000.0, 3500.0, 4000.0}) {
    CHECK(td.at(x).tunnel == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(td.at(x).reflect) < 0.05);
    CHECK(td.at(-x).reflect == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("tunneling density nearly vanishes inside an opaque barrier") {
  const TimeDensities td(narrow, Barrier::rectangular(2.0, 5.0));
  double sum = 0.0;
  for (int i = 1; i < 50; ++i) sum += td.at(0.1 * i).tunnel;
  CHECK(sum / 49.0 <= 0.1);
}

TEST_CASE("asymptotic tunneling time carries the phase time") {
  const TimeDensities td(narrow, Barrier::delta(2.0));
  const auto a = td.asymptotic();
  CHECK(a.x2 == doctest::Approx(1e4));
  CHECK(a.tunneling_time.real() - a.flight_time == doctest::Approx(a.phase_time).epsilon(0.01));
  CHECK(a.phase_time == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(a.imaginary_time == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(std::abs(a.correction_integral) <= 0.01 * a.phase_time);
  CHECK(a.correction_packet_zone + a.correction_barrier_region == doctest::Approx(a.correction_integral));
}

TEST_CASE("profile is independent of the thread count") {
  const TimeDensities td(narrow, Barrier::delta(2.0));
  std::vector<double> grid;
  for (int i = 0; i < 23; ++i) grid.push_back(-11.0 + i);
  const auto a = td.profile(grid, 1);
  const auto b = td.profile(grid, 4);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(std::memcmp(a.points.data(), b.points.data(), a.points.size() * sizeof(DensityPoint)) == 0);
}

TEST_CASE("profile input validation") {
  const TimeDensities td(narrow, Barrier::delta(2.0));
  CHECK_THROWS_AS(td.profile({}), DomainError);
  CHECK_THROWS_AS(td.profile({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(TimeDensities(narrow, Barrier::delta(2.0, Units{1.0, 2.0})), DomainError);
}

}  // TEST_SUITE
