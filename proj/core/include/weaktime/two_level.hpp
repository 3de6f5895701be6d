#pragma once

#include <vector>

#include "weaktime/numerics.hpp"

namespace weaktime {

// H = hbar omega sigma_3 / 2 + v sigma_+ + v* sigma_-, starting in |0> (energy -hbar omega/2).
// Only |v| enters the times below; the phase of v is accepted and ignored.
struct TwoLevelConfig {
  double omega = 2.0;
  cplx v = 0.0;
  double hbar = 1.0;

  double Omega() const;  // sqrt(omega^2 + 4 (|v|/hbar)^2)
  void validate() const;
};

struct LevelTimes {
  double level0;
  double level1;
};

// tau(0,t) and tau(1,t); they sum to t.
LevelTimes dwell_times(const TwoLevelConfig& cfg, double t);

// Probability of finding level `level` at time t.
double occupation_probability(const TwoLevelConfig& cfg, double t, int level);

// Real (1) and imaginary (2) components of the time spent in levels 0 and 1,
// conditioned on final state `final_level` at time t.
struct ConditionalComponents {
  double tau1_level0;
  double tau2_level0;
  double tau1_level1;  // from t - tau1_level0
  double tau2_level1;  // from -tau2_level0
};

// SingularityError when the final-state probability vanishes
// (|Omega t - 2 pi n| < 1e-6 for final level 1).
ConditionalComponents conditional_components(const TwoLevelConfig& cfg, double t, int final_level);

struct TwoLevelRow {
  double t;
  double tau0, tau1;
  double tau1_c1;         // final |1>, time in level 0, real part
  double tau0_c1_level0;  // final |0>, time in level 0, real part
  double tau0_c1_level1;  // final |0>, time in level 1, real part
  double tau0_c2;         // final |0>, time in level 0, imaginary part
  bool singular;          // conditional values undefined at this t (NaN)
};

std::vector<TwoLevelRow> time_table(const TwoLevelConfig& cfg, const std::vector<double>& t_grid);

}  // namespace weaktime
