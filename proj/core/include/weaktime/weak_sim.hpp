#pragma once

#include <Eigen/Dense>

#include "weaktime/numerics.hpp"

namespace weaktime {

// Gaussian pointer: first and second moments of q and p_q.
struct DetectorState {
  double q_mean = 0.0;
  double p_mean = 0.0;
  double var_q = 1.0;
  double var_p = 0.25;
  double covariance = 0.0;  // Re<q p> - <q><p>
  double hbar = 1.0;

  // Minimum-uncertainty (pure) Gaussian with the given covariance.
  static DetectorState gaussian(double q_mean, double p_mean, double var_q, double covariance,
                                double hbar = 1.0);

  // <q><p> - Re<q p>, the factor multiplying the commutator term.
  double coefficient() const { return -covariance; }
  bool is_pure(double tol = 1e-10) const;
  void validate() const;
};

struct CouplingConfig {
  double lambda = 1e-3;
  double duration = 1.0;  // tau_m
  void validate() const;
};

struct FiniteSystem {
  Eigen::MatrixXcd H;    // H_S
  Eigen::MatrixXcd A;    // measured observable
  Eigen::MatrixXcd rho;  // initial state
  double hbar = 1.0;
  void validate() const;
  Eigen::Index dim() const { return H.rows(); }
};

struct SimulationOptions {
  std::size_t min_slices = 1000;
  std::size_t max_slices = 1u << 18;
  double slice_tolerance = 1e-8;  // relative change of the pointer shift on doubling
  bool enforce_weakness = true;
};

struct WeakSimResult {
  double weak_value = 0.0;        // (<p>_0 - <p>_B) / (lambda tau_m)
  double time = 0.0;              // weak_value * tau_m
  double first_order_shift = 0.0; // pointer shift at O(lambda)
  double second_order_shift = 0.0;
  double postselection_probability = 1.0;
  double weakness_parameter = 0.0;  // lambda tau_m sqrt(var q) ||A|| / hbar
  bool weakness_flag = false;       // weakness_parameter > 0.1
  std::size_t slices = 0;
};

// Time-sliced joint evolution under H_S + lambda q A (detector Hamiltonian
// taken as zero), keeping the joint state to second order in lambda.
// WeaknessError if the second-order shift exceeds 10% of the first-order one.
WeakSimResult weak_value_unconditional(const FiniteSystem& sys, const DetectorState& det,
                                       const CouplingConfig& cfg, const SimulationOptions& opts = {});

// As above with postselection on projector B measured dt_post after the
// interaction ends. RarePostselectionError if W(B) < 1e-6.
WeakSimResult weak_value_conditional(const FiniteSystem& sys, const DetectorState& det,
                                     const CouplingConfig& cfg, const Eigen::MatrixXcd& B,
                                     double dt_post = 0.0, const SimulationOptions& opts = {});

// Independent oracle: pure Gaussian pointer on a q grid, exact evolution
// exp(-i(H_S + lambda q A) tau/hbar) at every grid point, p_q applied as a
// derivative. Exact in lambda.
double weak_value_grid(const FiniteSystem& sys, const DetectorState& det, const CouplingConfig& cfg,
                       const Eigen::MatrixXcd& B, double dt_post = 0.0, std::size_t points = 2048);

// First-order closed form:
// <{B,F}>/(2<B>) + (1/(i hbar)) (<q><p> - Re<qp>) <[B,F]>/<B>, divided by tau_m,
// with F = int_0^tau U^dag A U dt.
struct WeakAnalytic {
  double symmetric;    // <{B,F}>/(2<B> tau_m)
  double commutator;   // Im<B F>/(<B> tau_m)
  double value;        // symmetric + (2/hbar) coefficient * commutator
  double probability;  // <B>
};
WeakAnalytic weak_value_analytic(const FiniteSystem& sys, const DetectorState& det, double duration,
                                 const Eigen::MatrixXcd& B, double dt_post = 0.0);

// One Richardson step for an O(lambda) error: 2 v(lambda/2) - v(lambda).
inline double richardson_lambda(double v_lambda, double v_half) { return 2.0 * v_half - v_lambda; }

// Two-level system of the driven-transition example, as a FiniteSystem.
FiniteSystem two_level_system(double omega, cplx v, int measured_level, double hbar = 1.0);
Eigen::MatrixXcd level_projector(int level);

}  // namespace weaktime
