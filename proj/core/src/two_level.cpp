#include "weaktime/two_level.hpp"

#include <cmath>
#include <limits>

namespace weaktime {

namespace {

constexpr double singular_window = 1e-6;

// Distance of x from the nearest point of period * Z.
double distance_to_lattice(double x, double period) {
  return std::abs(x - period * std::round(x / period));
}

}  // namespace

double TwoLevelConfig::Omega() const {
  const double c = std::abs(v) / hbar;
  return std::sqrt(omega * omega + 4.0 * c * c);
}

void TwoLevelConfig::validate() const {
  if (!std::isfinite(omega)) throw DomainError("two-level: omega must be finite");
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("two-level: v must be finite");
  if (!(hbar > 0.0)) throw DomainError("two-level: hbar must be positive");
  if (!(Omega() > 0.0)) throw DomainError("two-level: omega and v cannot both vanish");
}

LevelTimes dwell_times(const TwoLevelConfig& cfg, double t) {
  cfg.validate();
  if (!(t >= 0.0)) throw DomainError("two-level: t must be non-negative");
  const double W = cfg.Omega();
  const double w = cfg.omega * cfg.omega / (W * W);
  const double osc = std::sin(W * t) * (1.0 - w) / (2.0 * W);
  return {0.5 * (1.0 + w) * t + osc, 0.5 * (1.0 - w) * t - osc};
}

double occupation_probability(const TwoLevelConfig& cfg, double t, int level) {
  cfg.validate();
  const double W = cfg.Omega();
  const double w = cfg.omega * cfg.omega / (W * W);
  const double s = std::sin(0.5 * W * t);
  const double p1 = (1.0 - w) * s * s;
  if (level == 1) return p1;
  if (level == 0) return 1.0 - p1;
  throw DomainError("two-level: level must be 0 or 1");
}

ConditionalComponents conditional_components(const TwoLevelConfig& cfg, double t, int final_level) {
  cfg.validate();
  if (!(t >= 0.0)) throw DomainError("two-level: t must be non-negative");
  if (final_level != 0 && final_level != 1) throw DomainError("two-level: final level must be 0 or 1");
  const double W = cfg.Omega();
  const double w = cfg.omega * cfg.omega / (W * W);
  const double half = 0.5 * W * t;

  if (final_level == 1) {
    if (1.0 - w <= 0.0 || distance_to_lattice(W * t, 2.0 * pi) < singular_window) {
      throw SingularityError("two-level: final state |1> has zero probability at this t", 1);
    }
    const double c1 = 0.5 * t;
    const double c2 = cfg.omega / (2.0 * W) * (2.0 / W - t / std::tan(half));
    return {c1, c2, t - c1, -c2};
  }

  // 4 P0(t) = 2((1 + w) + (1 - w) cos(Omega t)); vanishes only for omega = 0.
  const double den = 2.0 * ((1.0 + w) + (1.0 - w) * std::cos(W * t));
  if (w == 0.0 && distance_to_lattice(W * t - pi, 2.0 * pi) < singular_window) {
    throw SingularityError("two-level: final state |0> has zero probability at this t", 1);
  }
  const double s = std::sin(W * t);
  const double c = std::cos(W * t);
  const double c1 = ((1.0 + 3.0 * w) * t + (1.0 - w) * (2.0 / W * s + t * c)) / den;
  const double c2 = 2.0 * (cfg.omega / W) * (1.0 - w) * std::sin(half) *
                    (t * std::cos(half) - 2.0 / W * std::sin(half)) / den;
  return {c1, c2, t - c1, -c2};
}

std::vector<TwoLevelRow> time_table(const TwoLevelConfig& cfg, const std::vector<double>& t_grid) {
  cfg.validate();
  std::vector<TwoLevelRow> rows;
  rows.reserve(t_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : t_grid) {
    TwoLevelRow row{t, 0, 0, nan, nan, nan, nan, false};
    const auto d = dwell_times(cfg, t);
    row.tau0 = d.level0;
    row.tau1 = d.level1;
    try {
      row.tau1_c1 = conditional_components(cfg, t, 1).tau1_level0;
    } catch (const SingularityError&) {
      row.singular = true;
    }
    try {
      const auto f0 = conditional_components(cfg, t, 0);
      row.tau0_c1_level0 = f0.tau1_level0;
      row.tau0_c1_level1 = f0.tau1_level1;
      row.tau0_c2 = f0.tau2_level0;
    } catch (const SingularityError&) {
      row.singular = true;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace weaktime
