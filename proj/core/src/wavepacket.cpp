#include "weaktime/wavepacket.hpp"

#include <cmath>

namespace weaktime {

namespace {
constexpr double energy_floor = 1e-12;
constexpr double window_sigmas = 8.0;
}  // namespace

GaussianPacket::GaussianPacket(double p_mean, double sigma, std::optional<double> x0, Units u)
    : p_mean_(p_mean), sigma_(sigma), units_(u) {
  units_.validate();
  if (!(p_mean > 0.0) || !std::isfinite(p_mean)) throw DomainError("packet: mean momentum must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("packet: sigma must be positive");
  if (p_mean / sigma < 5.0) throw DomainError("packet: p_mean/sigma must be at least 5");
  x0_ = x0.value_or(std::max(-10.0 * units_.hbar / sigma, -1e4));
  if (!(x0_ < 0.0) || !std::isfinite(x0_)) throw DomainError("packet: x0 must be negative");
  // Retained mass of |phi|^2 on p > 0.
  const double kept = 0.5 * std::erfc(-p_mean / (sigma * std::sqrt(2.0)));
  norm_ = 1.0 / std::sqrt(kept);
}

double GaussianPacket::momentum_amplitude(double p) const {
  if (!(p > 0.0)) return 0.0;
  const double d = p - p_mean_;
  return norm_ * std::pow(2.0 * pi * sigma_ * sigma_, -0.25) * std::exp(-d * d / (4.0 * sigma_ * sigma_));
}

std::pair<double, double> GaussianPacket::momentum_window() const {
  const double p_floor = std::sqrt(2.0 * units_.mass * energy_floor);
  return {std::max(p_floor, p_mean_ - window_sigmas * sigma_), p_mean_ + window_sigmas * sigma_};
}

std::pair<double, double> GaussianPacket::energy_window() const {
  const auto [lo, hi] = momentum_window();
  return {lo * lo / (2.0 * units_.mass), hi * hi / (2.0 * units_.mass)};
}

cplx energy_amplitude(const GaussianPacket& packet, double E) {
  const Units& u = packet.units();
  const double p = momentum_from_energy(E, u);
  return std::sqrt(u.mass / p) * packet.momentum_amplitude(p) *
         std::exp(cplx(0.0, -p * packet.x0() / u.hbar));
}

cplx packet_average(const GaussianPacket& packet, const std::function<cplx(double p)>& g,
                    double tolerance, double phase_rate) {
  const auto [lo, hi] = packet.momentum_window();
  QuadratureSpec spec{lo, hi, tolerance};
  spec.phase_rate = phase_rate;
  return integrate(
      [&](double p) {
        const double a = packet.momentum_amplitude(p);
        return a * a * g(p);
      },
      spec);
}

double transmission_probability(const GaussianPacket& packet, const Barrier& barrier, double tolerance) {
  const Units& u = packet.units();
  const double T = packet_average(
                       packet,
                       [&](double p) {
                         return cplx(std::norm(amplitudes(barrier, p * p / (2.0 * u.mass)).t), 0.0);
                       },
                       tolerance)
                       .real();
  return std::clamp(T, 0.0, 1.0);
}

}  // namespace weaktime
