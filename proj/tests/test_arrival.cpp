#include <doctest.h>

#include <random>

#include "oracles/arrival_position_space.hpp"
#include "weaktime/arrival.hpp"

using namespace weaktime;

TEST_SUITE("arrival") {

TEST_CASE("diagonal at p = 0") {
  const cplx d = pi_diagonal(0.0, {0.0, 1.0, 1.0, 1.0});
  CHECK(d.real() == doctest::Approx(0.28209479177387814).epsilon(1e-13));
  CHECK(d.imag() == doctest::Approx(-0.28209479177387814).epsilon(1e-13));
}

TEST_CASE("matrix element reduces to the diagonal formula") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> p(-4.0, 4.0), dt(0.01, 4.0);
  for (int i = 0; i < 200; ++i) {
    const ArrivalConfig cfg{p(rng), dt(rng), 1.0, 1.0};
    const double q = p(rng);
    const cplx d = pi_diagonal(q, cfg);
    CHECK(std::abs(pi_matrix_element(q, q, cfg) - d) < 1e-12 * std::max(1.0, std::abs(d)));
    // continuity across the near-diagonal branch
    const cplx near = pi_matrix_element(q, q + 1e-9, cfg);
    CHECK(std::abs(near - d) < 1e-7 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("closed form matches the position-space sandwich") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> p(-3.0, 3.0), dt(0.05, 3.0), X(-2.0, 2.0);
  for (int i = 0; i < 8; ++i) {
    const ArrivalConfig cfg{X(rng), dt(rng), 1.0, 1.0};
    const double p1 = p(rng), p2 = p(rng);
    const cplx a = pi_matrix_element(p1, p2, cfg);
    const cplx b = oracle::pi_plus_position_space(p1, p2, cfg.X, cfg.dt);
    CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("difference of the two operators is the flux on the diagonal") {
  for (double dt : {1e-3, 0.5, 4.0}) {
    for (double q : {-2.5, -0.3, 0.0, 1.7}) {
      const ArrivalConfig cfg{0.4, dt, 1.0, 1.0};
      const cplx diff = pi_matrix_element(q, q, cfg) - pi_minus_matrix_element(q, q, cfg);
      CHECK(std::abs(diff - q) < 1e-12);
    }
  }
}

TEST_CASE("classical limits of the diagonal") {
  const double dt = 1.0;
  const ArrivalConfig cfg{0.0, dt, 1.0, 1.0};
  const double p = 6.0 * std::sqrt(2.0 / dt);
  CHECK(pi_diagonal(p, cfg).real() == doctest::Approx(p).epsilon(0.01));
  CHECK(std::abs(pi_diagonal(-p, cfg)) < 0.01 * p);
  CHECK(std::abs(pi_diagonal(-40.0, cfg)) < 0.01);
}

TEST_CASE("off-diagonal element approaches the flux operator") {
  const ArrivalConfig cfg{0.7, 1.0, 1.0, 1.0};
  const double p1 = 6.0, p2 = 6.0005;
  const cplx flux = 0.5 * (p1 + p2) * std::exp(I * (p2 - p1) * cfg.X);
  CHECK(std::abs(pi_matrix_element(p1, p2, cfg) - flux) < 0.01 * std::abs(flux));
}

TEST_CASE("packet: current identity and classical agreement") {
  const MomentumPacket pk{1.0, 0.1, -5.0, 5.0};
  const double flux = packet_flux(pk, 0.0);
  const cplx diff = arrival_current_difference(pk, {0.0, 1e-4, 1.0, 1.0});
  CHECK(std::abs(diff - flux) < 1e-3 * flux);

  // Fast packet, dt well above hbar/E_k.
  const MomentumPacket fast{5.0, 0.2, -10.0, 2.0};
  const auto a = arrival_distribution(fast, {0.0, 1.0, 1.0, 1.0});
  CHECK_FALSE(a.resolution_warning);
  const auto rho = free_gaussian_ensemble(-10.0, 1.0 / (2.0 * 0.2), 5.0, 0.2);
  const double classical = classical_window_arrival(rho, 0.0, 2.0, 1.0);
  CHECK(a.pi1 == doctest::Approx(classical).epsilon(0.05));
  CHECK(std::abs(a.pi2) < 0.05 * classical);
  CHECK(a.joint_probability(0.0, 1.0, 1.0) == doctest::Approx(a.pi1));

  // Left-moving mirror packet hardly registers as arriving from the left.
  const MomentumPacket left{-5.0, 0.2, 10.0, 2.0};
  CHECK(std::abs(arrival_distribution(left, {0.0, 1.0, 1.0, 1.0}).pi1) < 0.05 * classical);
}

TEST_CASE("classical arrival currents") {
  const auto rho = free_gaussian_ensemble(0.0, 0.5, 1.0, 0.1);
  // At t = 0 and X = x0 the positive current is a half-Gaussian moment.
  const double z = 10.0;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
  const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double expected = (1.0 * Phi + 0.1 * phi) / (0.5 * std::sqrt(2.0 * pi));
  CHECK(classical_arrival(rho, 0.0, 0.0, Side::plus) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(classical_arrival(rho, 0.0, 0.0, Side::minus) < 1e-20);

  // Every trajectory heading towards X crosses it once.
  for (const double dir : {1.0, -1.0}) {
    const auto beam = free_gaussian_ensemble(-3.0 * dir, 0.5, dir, 0.1);
    const double total =
        integrate(
            [&](double t) {
              return cplx(classical_arrival(beam, 0.0, t, Side::plus) + classical_arrival(beam, 0.0, t, Side::minus),
                          0.0);
            },
            {-20.0, 60.0, 1e-11, 20000})
            .real();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("resolution bound and validation") {
  CHECK(resolution_bound(0.5) == 2.0);
  CHECK(resolution_bound(1e12) < 1e-11);
  CHECK_THROWS_AS(resolution_bound(0.0), DomainError);
  CHECK_THROWS_AS(pi_diagonal(1.0, {0.0, 0.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(arrival_distribution({1.0, -0.1, 0.0, 0.0}, {0.0, 1.0, 1.0, 1.0}), DomainError);
}

}  // TEST_SUITE
