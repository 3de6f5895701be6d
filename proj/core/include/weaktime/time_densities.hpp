#pragma once

#include <vector>

#include "weaktime/numerics.hpp"
#include "weaktime/scattering.hpp"
#include "weaktime/wavepacket.hpp"

namespace weaktime {

struct DensityOptions {
  double tolerance = 1e-8;
  std::size_t max_panels = 20000;
};

struct DensityPoint {
  double x;
  double dwell;
  double tunnel;
  double correction;
  double reflect;  // NaN when R vanishes
};

struct TimeDensityProfile {
  std::vector<DensityPoint> points;
  double T = 0.0;
  double R = 0.0;
};

struct AsymptoticTimes {
  double x2 = 0.0;
  cplx tunneling_time;         // t^Tun(x2, x1 -> -inf)
  double flight_time = 0.0;    // <M (x2 - x0)/p> over the transmitted packet
  double packet_phase_time = 0.0;  // <hbar d arg t/dE> over the transmitted packet
  double phase_time = 0.0;     // hbar d arg t/dE at the mean energy
  double imaginary_time = 0.0; // hbar d ln|t|/dE at the mean energy
  double correction_integral = 0.0;
  double correction_packet_zone = 0.0;    // [x0 - 10w, x0 + 10w], finite-time
  double correction_barrier_region = 0.0; // [x0 + 10w, x2], stationary
};

// Time densities of one (packet, barrier) pair. The transmission probability
// is computed once at construction.
class TimeDensities {
 public:
  TimeDensities(GaussianPacket packet, Barrier barrier, DensityOptions opts = {});

  double T() const { return T_; }
  double R() const { return R_; }
  const GaussianPacket& packet() const { return packet_; }
  const Barrier& barrier() const { return barrier_; }

  // All four densities at x. Reflection is NaN if R < 1e-300.
  DensityPoint at(double x) const;

  // Grid evaluation; threads = 0 means hardware concurrency. Output does not
  // depend on the thread count.
  TimeDensityProfile profile(const std::vector<double>& grid, unsigned threads = 0) const;

  // Stationary integral over [a, b] of tau^Tun + i tau_corr.
  cplx region_integral(double a, double b) const;

  // Integral of tau_corr over [x0 - 10w, x0 + 10w] with the packet evolved
  // from t = 0 rather than from t = -inf.
  double packet_zone_correction() const;

  // Requires x2 > L. Default x2 = -x0.
  AsymptoticTimes asymptotic(std::optional<double> x2 = std::nullopt) const;

  // Energy-resolved kernels (exposed for tests). For p > 0 and position x:
  // dwell 2 pi hbar |psi_+|^2, tunnel kernel K = 2 pi hbar (|t|^2 |psi_+|^2 - t r* psi_-* psi_+),
  // reflection kernel; closed forms outside the barrier.
  std::array<cplx, 3> kernels(double p, double x) const;
  std::array<cplx, 3> generic_kernels(double p, double x) const;

 private:
  QuadratureSpec spec_for(double phase_rate) const;

  GaussianPacket packet_;
  Barrier barrier_;
  DensityOptions opts_;
  double T_ = 0.0;
  double R_ = 0.0;
};

double dwell_density(const GaussianPacket& packet, const Barrier& barrier, double x);
double tunnel_density(const GaussianPacket& packet, const Barrier& barrier, double x);
double tunnel_correction_density(const GaussianPacket& packet, const Barrier& barrier, double x);
double reflect_density(const GaussianPacket& packet, const Barrier& barrier, double x);
AsymptoticTimes asymptotic_times(const GaussianPacket& packet, const Barrier& barrier, double x2);
TimeDensityProfile profile(const GaussianPacket& packet, const Barrier& barrier,
                           const std::vector<double>& grid, unsigned threads = 0);

}  // namespace weaktime
