#include <doctest.h>

#include <random>

#include "oracles/transfer_matrix.hpp"
#include "weaktime/scattering.hpp"

using namespace weaktime;

namespace {

oracle::Amplitudes reference(const Barrier& b, double E) {
  const Units& u = b.units();
  if (const auto* d = std::get_if<DeltaBarrier>(&b.shape())) {
    return oracle::transfer_matrix(oracle::delta_potential(d->strength), E, u.hbar, u.mass);
  }
  const auto& r = std::get<RectangularBarrier>(b.shape());
  return oracle::transfer_matrix(oracle::rectangular_potential(r.height, r.width), E, u.hbar, u.mass);
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("amplitudes agree with the transfer-matrix oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> e(0.01, 10.0), s(0.1, 5.0);
  for (int i = 0; i < 300; ++i) {
    const Units u{s(rng) / 2.0, s(rng)};
    for (const Barrier& b : {Barrier::delta(s(rng), u), Barrier::rectangular(s(rng), s(rng), u)}) {
      const double E = e(rng);
      const auto a = amplitudes(b, E);
      const auto ref = reference(b, E);
      CHECK(std::abs(a.t - ref.t) < 1e-8);
      CHECK(std::abs(a.r - ref.r) < 1e-8);
    }
  }
}

TEST_CASE("unitarity |t|^2 + |r|^2 = 1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(1e-4, 20.0), s(0.05, 6.0);
  for (int i = 0; i < 500; ++i) {
    const auto d = amplitudes(Barrier::delta(s(rng)), e(rng));
    CHECK(std::abs(std::norm(d.t) + std::norm(d.r) - 1.0) < 1e-12);
    const auto r = amplitudes(Barrier::rectangular(s(rng), s(rng)), e(rng));
    CHECK(std::abs(std::norm(r.t) + std::norm(r.r) - 1.0) < 1e-12);
  }
}

TEST_CASE("energy at the barrier top") {
  const Barrier b = Barrier::rectangular(2.0, 5.0);
  for (double E : {2.0, 2.0 - 1e-10, 2.0 + 1e-10}) {
    const auto a = amplitudes(b, E);
    const auto ref = oracle::transfer_matrix(oracle::rectangular_potential(2.0, 5.0), E == 2.0 ? 2.0 + 1e-12 : E);
    CHECK(std::abs(a.t - ref.t) < 1e-8);
    CHECK(std::abs(a.r - ref.r) < 1e-8);
  }
}

TEST_CASE("delta barrier transmission probability") {
  const double alpha = 2.0;
  for (double k : {0.3, 1.0, 4.0}) {
    const auto a = amplitudes(Barrier::delta(alpha), 0.5 * k * k);
    CHECK(std::norm(a.t) == doctest::Approx(1.0 / (1.0 + alpha * alpha / (k * k))).epsilon(1e-14));
  }
}

TEST_CASE("free barrier is transparent") {
  const auto a = amplitudes(Barrier::free(), 1.3);
  CHECK(a.t == cplx(1.0, 0.0));
  CHECK(a.r == cplx(0.0, 0.0));
  CHECK(phase_time(Barrier::free(), 1.3) == 0.0);
}

TEST_CASE("phase and imaginary times of the delta barrier") {
  // t = 1/(1 + i a/k): arg t = -atan(a/k), ln|t| = -ln(1 + a^2/k^2)/2
  const double a = 2.0, k = 1.0;
  const double dk_dE = 1.0 / k;
  CHECK(phase_time(Barrier::delta(a), 0.5) == doctest::Approx(a / (k * k + a * a) * dk_dE).epsilon(1e-8));
  CHECK(imaginary_time(Barrier::delta(a), 0.5) ==
        doctest::Approx(a * a / (k * (k * k + a * a)) * dk_dE).epsilon(1e-8));
}

TEST_CASE("phase time agrees with a finite difference of arg t") {
  const Barrier b = Barrier::rectangular(2.0, 5.0);
  const double E = 0.5, h = 1e-5;
  const double fd = (std::arg(amplitudes(b, E + h).t / amplitudes(b, E - h).t)) / (2.0 * h);
  CHECK(phase_time(b, E) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("eigenfunction is continuous and matches the asymptotic forms") {
  const Barrier b = Barrier::rectangular(2.0, 1.5);
  const double E = 1.1;
  const double k = momentum_from_energy(E, b.units());
  const auto a = amplitudes(b, E);
  const double eps = 1e-9;
  for (double x : {0.0, 1.5}) {
    CHECK(std::abs(eigenfunction(b, E, Direction::plus, x - eps) - eigenfunction(b, E, Direction::plus, x + eps)) <
          1e-7);
  }
  // Energy normalization is a real positive factor.
  const double xl = -3.2, xr = 4.0;
  const cplx c = eigenfunction(b, E, Direction::plus, xr) / (a.t * std::exp(I * k * xr));
  CHECK(std::abs(c.imag()) < 1e-12 * std::abs(c));
  CHECK(c.real() > 0.0);
  CHECK(std::abs(eigenfunction(b, E, Direction::plus, xl) / c - (std::exp(I * k * xl) + a.r * std::exp(-I * k * xl))) <
        1e-12);
  CHECK(std::abs(eigenfunction(b, E, Direction::minus, xl) / c - a.t * std::exp(-I * k * xl)) < 1e-12);
}

TEST_CASE("domain and overflow errors") {
  CHECK_THROWS_AS(amplitudes(Barrier::delta(1.0), 0.0), DomainError);
  CHECK_THROWS_AS(amplitudes(Barrier::delta(1.0), -1.0), DomainError);
  CHECK_THROWS_AS(Barrier::delta(0.0), DomainError);
  CHECK_THROWS_AS(Barrier::rectangular(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(Barrier::free(Units{0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(amplitudes(Barrier::rectangular(1000.0, 20.0), 1.0), OverflowError);
}

}  // TEST_SUITE
