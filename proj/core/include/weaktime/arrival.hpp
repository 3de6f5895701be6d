#pragma once

#include <functional>

#include "weaktime/numerics.hpp"

namespace weaktime {

struct ArrivalConfig {
  double X = 0.0;    // arrival point
  double dt = 1.0;   // resolution time
  double hbar = 1.0;
  double mass = 1.0;
  void validate() const;
};

// Phase-space density rho(x, p, t), supported in p on [p_min, p_max].
struct PhaseSpaceDensity {
  std::function<double(double x, double p, double t)> rho;
  double p_min;
  double p_max;
};

enum class Side { plus, minus };

// J+(X;t) = int_0^inf (p/m) rho(X,p;t) dp, J- = int_-inf^0 (|p|/m) rho dp.
double classical_arrival(const PhaseSpaceDensity& rho, double X, double t, Side side, double mass = 1.0,
                         double tolerance = 1e-10);

// Finite-resolution version: probability per unit time of being left of X
// at t and right of X at t + dt (free motion), i.e.
// (1/dt) int_0^inf dp int_{X - p dt/m}^X rho(x,p;t) dx.
double classical_window_arrival(const PhaseSpaceDensity& rho, double X, double t, double dt,
                                double mass = 1.0, double tolerance = 1e-10);

// Free Gaussian ensemble: rho(x,p,t) = W0(x - p t/m, p), W0 a product of
// normal densities N(x; x0, sigma_x) N(p; pbar, sigma_p).
PhaseSpaceDensity free_gaussian_ensemble(double x0, double sigma_x, double p_mean, double sigma_p,
                                         double mass = 1.0);

// <p1|Pi_+|p2> for momentum states normalized to 2 pi hbar delta(p1 - p2).
cplx pi_matrix_element(double p1, double p2, const ArrivalConfig& cfg);
// <p1|Pi_-|p2> = exp(2i(p2-p1)X/hbar) <-p1|Pi_+|-p2>.
cplx pi_minus_matrix_element(double p1, double p2, const ArrivalConfig& cfg);
// <p|Pi_+|p>.
cplx pi_diagonal(double p, const ArrivalConfig& cfg);

// Gaussian momentum amplitude phi(p) (unit norm in dp) centred at x0, evolved
// freely for `time`; p_mean may have either sign.
struct MomentumPacket {
  double p_mean = 1.0;
  double sigma = 0.1;
  double x0 = 0.0;
  double time = 0.0;
  cplx amplitude(double p, double hbar, double mass) const;
  void validate() const;
};

struct ComplexArrival {
  double pi1;  // Re Pi_C
  double pi2;  // Im Pi_C
  cplx value() const { return {pi1, pi2}; }
  // W(1,2) = Pi1 dt - (2 dt/hbar) (<p_q><q> - Re<q p_q>) Pi2.
  double joint_probability(double detector_coefficient, double dt, double hbar) const {
    return pi1 * dt - 2.0 * dt / hbar * detector_coefficient * pi2;
  }
  bool resolution_warning = false;  // dt below hbar/E_k at the mean momentum
};

struct ArrivalOptions {
  double window_sigmas = 10.0;
  int nodes_per_panel = 32;
};

// <Pi_+> = int int dp1 dp2/(2 pi hbar) phi*(p1) <p1|Pi_+|p2> phi(p2).
ComplexArrival arrival_distribution(const MomentumPacket& packet, const ArrivalConfig& cfg,
                                    const ArrivalOptions& opts = {});
// <Pi_+ - Pi_-> on the same quadrature nodes.
cplx arrival_current_difference(const MomentumPacket& packet, const ArrivalConfig& cfg,
                                 const ArrivalOptions& opts = {});
// Probability current <J(X)> of the packet at its time.
double packet_flux(const MomentumPacket& packet, double X, double hbar = 1.0, double mass = 1.0);

// hbar / E_k.
double resolution_bound(double E_k, double hbar = 1.0);

}  // namespace weaktime
