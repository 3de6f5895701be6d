#pragma once

// Brute-force two-level times from the Heisenberg-picture definitions, using
// Eigen's eigendecomposition for the propagator and Gauss-Legendre in time.

#include <Eigen/Dense>
#include <complex>

#include "weaktime/numerics.hpp"

namespace oracle {

struct TwoLevelTimes {
  double unconditional;  // time in level chi
  double tau1;           // Re part, conditioned on final level f
  double tau2;           // Im part
  double probability;    // of final level f
};

inline Eigen::Matrix2cd propagator(const Eigen::Matrix2cd& H, double s, double hbar) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(H);
  Eigen::Vector2cd phases;
  for (int i = 0; i < 2; ++i) phases(i) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(i) * s / hbar));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline TwoLevelTimes two_level_times(double omega, std::complex<double> v, double t, int chi, int f,
                                     double hbar = 1.0, int panels = 64) {
  Eigen::Matrix2cd H;
  H << -0.5 * hbar * omega, std::conj(v), v, 0.5 * hbar * omega;
  Eigen::Matrix2cd Pchi = Eigen::Matrix2cd::Zero();
  Pchi(chi, chi) = 1.0;
  Eigen::Matrix2cd Pf = Eigen::Matrix2cd::Zero();
  Pf(f, f) = 1.0;

  const auto& rule = weaktime::gauss_legendre(24);
  Eigen::Matrix2cd F = Eigen::Matrix2cd::Zero();
  const double h = t / panels;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double s = h * (p + 0.5 * (rule.nodes[k] + 1.0));
      const Eigen::Matrix2cd U = propagator(H, s, hbar);
      F += 0.5 * h * rule.weights[k] * U.adjoint() * Pchi * U;
    }
  }
  const Eigen::Matrix2cd Ut = propagator(H, t, hbar);
  const Eigen::Matrix2cd Pft = Ut.adjoint() * Pf * Ut;
  auto ev = [](const Eigen::Matrix2cd& O) { return O(0, 0); };
  const double pf = ev(Pft).real();
  return {ev(F).real(), ev(Pft * F + F * Pft).real() / (2.0 * pf),
          (ev(Pft * F - F * Pft) / std::complex<double>(0.0, 2.0 * pf)).real(), pf};
}

}  // namespace oracle
