#pragma once

// <p1| P1 U^dag(dt) P2 U(dt) |p2> / dt evaluated directly in position space,
// with P1 = theta(X - x) and P2 = theta(x - X) and <x|p> = exp(i p x / hbar).
//
// With u = X - x1 > 0 and s = x2 - x1 > u the sandwich becomes
//   C * int_0^inf ds exp(i p2 s/hbar - i m s^2/(2 hbar dt)) int_0^s du exp(i (p1 - p2) u/hbar).
// The integrand is entire in s, so the s ray is rotated to s = rho exp(-i pi/4),
// where the propagator chirp turns into a decaying Gaussian.

#include <cmath>
#include <complex>

#include "weaktime/numerics.hpp"

namespace oracle {

inline std::complex<double> pi_plus_position_space(double p1, double p2, double X, double dt, double hbar = 1.0,
                                                   double mass = 1.0) {
  using cplx = std::complex<double>;
  const cplx I(0.0, 1.0);
  const double pi = 3.14159265358979323846;
  const cplx ray = std::polar(1.0, -pi / 4.0);
  const auto& rule = weaktime::gauss_legendre(40);

  const double scale = std::sqrt(hbar * dt / mass);
  const double growth = std::max(std::abs(p1), std::abs(p2)) / (std::sqrt(2.0) * hbar);
  // Gaussian exp(-rho^2/(2 scale^2)) against exp(growth rho): cut at 40 e-folds past the peak.
  const double peak = growth * scale * scale;
  const double rho_max = peak + scale * std::sqrt(2.0 * 40.0) + 10.0 * scale;
  const int rho_panels = static_cast<int>(std::ceil(rho_max / (0.25 * scale))) + 4;
  const double drho = rho_max / rho_panels;

  cplx outer = 0.0;
  for (int pr = 0; pr < rho_panels; ++pr) {
    for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
      const double rho = drho * (pr + 0.5 * (rule.nodes[a] + 1.0));
      const cplx s = rho * ray;
      const cplx kernel = std::exp(I * p2 * s / hbar - I * mass * s * s / (2.0 * hbar * dt));
      // Inner u integral along u = s tau, tau in [0, 1].
      const double span = std::abs((p1 - p2) * s / hbar);
      const int tau_panels = 1 + static_cast<int>(span / 2.0);
      cplx inner = 0.0;
      for (int pt = 0; pt < tau_panels; ++pt) {
        for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
          const double tau = (pt + 0.5 * (rule.nodes[b] + 1.0)) / tau_panels;
          inner += 0.5 / tau_panels * rule.weights[b] * s * std::exp(I * (p1 - p2) * s * tau / hbar);
        }
      }
      outer += 0.5 * drho * rule.weights[a] * ray * kernel * inner;
    }
  }
  const cplx prefactor = std::exp(I * (p2 - p1) * X / hbar) * std::exp(-I * p2 * p2 * dt / (2.0 * mass * hbar)) *
                         std::sqrt(mass / (2.0 * pi * hbar * dt)) * std::polar(1.0, pi / 4.0) / dt;
  return prefactor * outer;
}

}  // namespace oracle
