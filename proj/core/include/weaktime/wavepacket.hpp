#pragma once

#include <optional>
#include <utility>

#include "weaktime/numerics.hpp"
#include "weaktime/scattering.hpp"

namespace weaktime {

// Right-moving Gaussian packet, phi(p) = (2 pi sigma^2)^(-1/4) exp(-(p-pbar)^2/(4 sigma^2)),
// centred at x0 at t = 0. The p < 0 tail is dropped and the rest renormalized.
class GaussianPacket {
 public:
  // x0 defaults to max(-10 hbar/sigma, -1e4).
  GaussianPacket(double p_mean, double sigma, std::optional<double> x0 = std::nullopt, Units u = {});

  double p_mean() const { return p_mean_; }
  double sigma() const { return sigma_; }
  double x0() const { return x0_; }
  const Units& units() const { return units_; }

  // Position-space standard deviation hbar/(2 sigma).
  double spatial_width() const { return units_.hbar / (2.0 * sigma_); }

  // Renormalized phi(p) for p > 0, zero otherwise.
  double momentum_amplitude(double p) const;

  // Support used for all packet averages: p in [p_lo, pbar + 8 sigma], with
  // p_lo = max(sqrt(2 M eps), pbar - 8 sigma), eps = 1e-12.
  std::pair<double, double> momentum_window() const;
  std::pair<double, double> energy_window() const;

 private:
  double p_mean_, sigma_, x0_;
  Units units_;
  double norm_;  // 1/sqrt of the retained p > 0 probability
};

// <E,+|Psi> = sqrt(M/p_E) phi(p_E) exp(-i p_E x0/hbar).
cplx energy_amplitude(const GaussianPacket& packet, double E);

// T = int dE |t(E)|^2 |<E,+|Psi>|^2.
double transmission_probability(const GaussianPacket& packet, const Barrier& barrier,
                                double tolerance = 1e-8);

// Packet average of g over |<E,+|Psi>|^2 dE, evaluated in momentum.
cplx packet_average(const GaussianPacket& packet, const std::function<cplx(double p)>& g,
                    double tolerance = 1e-8, double phase_rate = 0.0);

}  // namespace weaktime
