#include "weaktime/time_densities.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "weaktime/errors.hpp"

namespace weaktime {

namespace {

constexpr double vanishing = 1e-300;

// Rule for under-barrier x integrals.
const GaussLegendreRule& interior_rule() {
  static const GaussLegendreRule rule = gauss_legendre(48);
  return rule;
}

[[noreturn]] void rethrow_at_index(const std::exception_ptr& e, std::size_t index, double x) {
  const std::string where = "grid index " + std::to_string(index) + " (x = " + std::to_string(x) + "): ";
  try {
    std::rethrow_exception(e);
  } catch (const ConvergenceError& err) {
    throw ConvergenceError(where + err.what(), err.panels(), err.residual());
  } catch (const OverflowError& err) {
    throw OverflowError(where + err.what());
  } catch (const DomainError& err) {
    throw DomainError(where + err.what());
  }
  std::rethrow_exception(e);
}

}  // namespace

TimeDensities::TimeDensities(GaussianPacket packet, Barrier barrier, DensityOptions opts)
    : packet_(std::move(packet)), barrier_(std::move(barrier)), opts_(opts) {
  const Units& a = packet_.units();
  const Units& b = barrier_.units();
  if (a.hbar != b.hbar || a.mass != b.mass) throw DomainError("packet and barrier use different units");
  T_ = transmission_probability(packet_, barrier_, opts_.tolerance);
  R_ = 1.0 - T_;
}

QuadratureSpec TimeDensities::spec_for(double phase_rate) const {
  const auto [lo, hi] = packet_.momentum_window();
  QuadratureSpec s{lo, hi, opts_.tolerance, opts_.max_panels};
  s.phase_rate = phase_rate;
  return s;
}

std::array<cplx, 3> TimeDensities::generic_kernels(double p, double x) const {
  const Units& u = barrier_.units();
  const double E = p * p / (2.0 * u.mass);
  const auto amp = amplitudes(barrier_, E);
  const cplx plus = eigenfunction(barrier_, E, Direction::plus, x);
  const cplx minus = eigenfunction(barrier_, E, Direction::minus, x);
  const double scale = 2.0 * pi * u.hbar;
  const double dwell = scale * std::norm(plus);
  const cplx K = scale * (std::norm(amp.t) * std::norm(plus) - amp.t * std::conj(amp.r) * std::conj(minus) * plus);
  return {dwell, K, dwell - K.real()};
}

std::array<cplx, 3> TimeDensities::kernels(double p, double x) const {
  const Units& u = barrier_.units();
  const double L = barrier_.width();
  if (x > 0.0 && x < L) return generic_kernels(p, x);
  const double E = p * p / (2.0 * u.mass);
  const auto [t, r, e_unused] = amplitudes(barrier_, E);
  (void)e_unused;
  const double mp = u.mass / p;
  const double T = std::norm(t);
  const double k = p / u.hbar;
  if (x < 0.0) {
    const cplx fringe = r * std::exp(cplx(0.0, -2.0 * k * x));
    const double R = std::norm(r);
    return {mp * (1.0 + R + 2.0 * fringe.real()), mp * T * (1.0 + fringe),
            mp * (2.0 * R + (1.0 + R) * fringe.real())};
  }
  // x >= L; for the delta barrier this branch also covers x = 0 where the
  // eigenfunctions are continuous.
  const cplx fringe = (t / std::conj(t)) * std::conj(r) * std::exp(cplx(0.0, 2.0 * k * x));
  return {mp * T, mp * T * (1.0 - fringe), mp * T * fringe.real()};
}

DensityPoint TimeDensities::at(double x) const {
  const double L = barrier_.width();
  const double rate = 2.0 * (std::abs(x) + L) / barrier_.units().hbar;
  const auto sums = integrate_bundle<3>(
      [&](double p) {
        const double a = packet_.momentum_amplitude(p);
        auto k = kernels(p, x);
        for (auto& v : k) v *= a * a;
        return k;
      },
      spec_for(rate));
  DensityPoint d{x, sums[0].real(), 0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
  if (T_ < vanishing) throw DomainError("tunnel density: transmission probability vanishes");
  d.tunnel = sums[1].real() / T_;
  d.correction = sums[1].imag() / T_;
  if (R_ >= vanishing) d.reflect = sums[2].real() / R_;
  return d;
}

TimeDensityProfile TimeDensities::profile(const std::vector<double>& grid, unsigned threads) const {
  if (grid.empty()) throw DomainError("profile: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("profile: grid must be strictly increasing");
  }
  TimeDensityProfile out;
  out.T = T_;
  out.R = R_;
  out.points.resize(grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));

  // First failure per worker; the lowest grid index wins so the report is thread-count independent.
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> failed_at(threads, grid.size());
  auto work = [&](unsigned id) {
    std::size_t i = id;
    try {
      for (; i < grid.size(); i += threads) out.points[i] = at(grid[i]);
    } catch (...) {
      errors[id] = std::current_exception();
      failed_at[id] = i;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  const auto first = std::min_element(failed_at.begin(), failed_at.end()) - failed_at.begin();
  if (errors[first]) rethrow_at_index(errors[first], failed_at[first], grid[failed_at[first]]);
  return out;
}

cplx TimeDensities::region_integral(double a, double b) const {
  if (!(a < b)) throw DomainError("region_integral: need a < b");
  if (T_ < vanishing) throw DomainError("region_integral: transmission probability vanishes");
  const Units& u = barrier_.units();
  const double L = barrier_.width();
  const double rate = 2.0 * std::max(std::abs(a), std::abs(b)) / u.hbar;
  const auto& rule = interior_rule();

  const cplx sum = integrate(
      [&](double p) {
        const double E = p * p / (2.0 * u.mass);
        const auto [t, r, e_unused] = amplitudes(barrier_, E);
        (void)e_unused;
        const double k = p / u.hbar;
        const double mpT = u.mass / p * std::norm(t);
        cplx acc = 0.0;
        if (a < 0.0) {
          const double hi = std::min(b, 0.0);
          const cplx fringe = (std::exp(cplx(0.0, -2.0 * k * hi)) - std::exp(cplx(0.0, -2.0 * k * a))) /
                              cplx(0.0, -2.0 * k);
          acc += mpT * ((hi - a) + r * fringe);
        }
        const double lo_in = std::max(a, 0.0);
        const double hi_in = std::min(b, L);
        if (hi_in > lo_in) {
          const double half = 0.5 * (hi_in - lo_in);
          const double mid = 0.5 * (hi_in + lo_in);
          for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            acc += rule.weights[j] * half * generic_kernels(p, mid + half * rule.nodes[j])[1];
          }
        }
        if (b > L) {
          const double lo = std::max(a, L);
          const cplx fringe = (std::exp(cplx(0.0, 2.0 * k * b)) - std::exp(cplx(0.0, 2.0 * k * lo))) /
                              cplx(0.0, 2.0 * k);
          acc += mpT * ((b - lo) - (t / std::conj(t)) * std::conj(r) * fringe);
        }
        const double amp = packet_.momentum_amplitude(p);
        return amp * amp * acc;
      },
      spec_for(rate));
  return sum / T_;
}

double TimeDensities::packet_zone_correction() const {
  if (T_ < vanishing) throw DomainError("packet_zone_correction: transmission probability vanishes");
  const Units& u = barrier_.units();
  const double w = packet_.spatial_width();
  const double x0 = packet_.x0();
  const double x_lo = x0 - 10.0 * w;
  const double x_hi = x0 + 10.0 * w;
  if (x_hi >= 0.0) throw DomainError("packet_zone_correction: initial packet overlaps the barrier");

  const auto [p_lo, p_hi] = packet_.momentum_window();
  const double v_min = std::max(packet_.p_mean() - 6.0 * packet_.sigma(), 0.2 * packet_.p_mean()) / u.mass;
  const double t_end = (x_hi - x0 + 12.0 * w) / v_min;

  // Composite Gauss-Legendre grids: panels one packet width wide in x and
  // one packet-crossing time wide in t.
  const auto& g16 = []() -> const GaussLegendreRule& {
    static const GaussLegendreRule r = gauss_legendre(16);
    return r;
  }();
  auto composite = [&](double lo, double hi, double panel) {
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
    std::vector<double> nodes, weights;
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      const double mid = lo + (i + 0.5) * h;
      for (std::size_t j = 0; j < g16.nodes.size(); ++j) {
        nodes.push_back(mid + 0.5 * h * g16.nodes[j]);
        weights.push_back(0.5 * h * g16.weights[j]);
      }
    }
    return std::pair{nodes, weights};
  };
  const auto [xs, wx] = composite(x_lo, x_hi, w);
  const auto [ts, wt] = composite(0.0, t_end, w * u.mass / packet_.p_mean());
  const auto pq = gauss_legendre(512);

  const Eigen::Index np = static_cast<Eigen::Index>(pq.nodes.size());
  const Eigen::Index nx = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index nt = static_cast<Eigen::Index>(ts.size());
  Eigen::VectorXcd phi_weight(np), psi_weight(np), refl_weight(np);
  Eigen::VectorXd ps(np), es(np);
  const double norm = 1.0 / std::sqrt(2.0 * pi * u.hbar);
  for (Eigen::Index j = 0; j < np; ++j) {
    const double p = 0.5 * (p_lo + p_hi) + 0.5 * (p_hi - p_lo) * pq.nodes[j];
    const double wj = 0.5 * (p_hi - p_lo) * pq.weights[j];
    const auto amp = amplitudes(barrier_, p * p / (2.0 * u.mass));
    const double a = packet_.momentum_amplitude(p) * wj * norm;
    ps[j] = p;
    es[j] = p * p / (2.0 * u.mass);
    phi_weight[j] = a * std::norm(amp.t);
    psi_weight[j] = a;
    refl_weight[j] = a * amp.r;
  }

  // Field(x, t) = sum_j weight_j exp(i p_j (+-x - x0)/hbar) exp(-i E_j t/hbar).
  Eigen::MatrixXcd time_phase(np, nt);
  for (Eigen::Index j = 0; j < np; ++j) {
    for (Eigen::Index c = 0; c < nt; ++c) time_phase(j, c) = std::exp(cplx(0.0, -es[j] * ts[c] / u.hbar));
  }
  Eigen::MatrixXcd in_x(nx, np), out_x(nx, np);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      in_x(i, j) = std::exp(cplx(0.0, ps[j] * (xs[i] - x0) / u.hbar));
      out_x(i, j) = std::exp(cplx(0.0, -ps[j] * (xs[i] + x0) / u.hbar));
    }
  }
  const Eigen::MatrixXcd phi = (in_x * phi_weight.asDiagonal()) * time_phase;
  Eigen::MatrixXcd psi = (in_x * psi_weight.asDiagonal()) * time_phase;
  // The reflected wave is centred at -(x0 + v t); add it only if it can reach the zone.
  const double reach = -(x0 + (p_hi / u.mass) * t_end);
  if (reach < x_hi + 12.0 * w) psi += (out_x * refl_weight.asDiagonal()) * time_phase;

  double total = 0.0;
  for (Eigen::Index i = 0; i < nx; ++i) {
    double row = 0.0;
    for (Eigen::Index c = 0; c < nt; ++c) row += wt[c] * (std::conj(phi(i, c)) * psi(i, c)).imag();
    total += wx[i] * row;
  }
  return total / T_;
}

AsymptoticTimes TimeDensities::asymptotic(std::optional<double> x2_opt) const {
  if (T_ < vanishing) throw DomainError("asymptotic times: transmission probability vanishes");
  const Units& u = barrier_.units();
  const double x0 = packet_.x0();
  const double x2 = x2_opt.value_or(-x0);
  if (!(x2 > barrier_.width())) throw DomainError("asymptotic times: x2 must lie beyond the barrier");

  AsymptoticTimes out;
  out.x2 = x2;
  const double rate = (std::abs(x0) + std::abs(x2)) / u.hbar;

  auto f = [&](double E) { return amplitudes(barrier_, E).t * energy_amplitude(packet_, E); };
  // dE |a|^2 = dp |phi|^2, so the energy integrand is carried over with dE = (p/M) dp.
  out.tunneling_time = integrate(
                           [&](double p) {
                             const double E = p * p / (2.0 * u.mass);
                             const cplx fe = f(E);
                             const cplx op = (u.mass / p) * x2 * fe - I * u.hbar * d_dE(f, E);
                             return (p / u.mass) * std::conj(fe) * op;
                           },
                           spec_for(rate)) /
                       T_;

  const auto averaged = integrate_bundle<2>(
      [&](double p) {
        const double E = p * p / (2.0 * u.mass);
        const double a = packet_.momentum_amplitude(p);
        const double weight = a * a * std::norm(amplitudes(barrier_, E).t);
        return std::array<cplx, 2>{weight * u.mass * (x2 - x0) / p, weight * phase_time(barrier_, E)};
      },
      spec_for(0.0));
  out.flight_time = averaged[0].real() / T_;
  out.packet_phase_time = averaged[1].real() / T_;

  const double E_mean = packet_.p_mean() * packet_.p_mean() / (2.0 * u.mass);
  out.phase_time = phase_time(barrier_, E_mean);
  out.imaginary_time = imaginary_time(barrier_, E_mean);

  const double split = x0 + 10.0 * packet_.spatial_width();
  out.correction_packet_zone = packet_zone_correction();
  out.correction_barrier_region = region_integral(split, x2).imag();
  out.correction_integral = out.correction_packet_zone + out.correction_barrier_region;
  return out;
}

double dwell_density(const GaussianPacket& packet, const Barrier& barrier, double x) {
  return TimeDensities(packet, barrier).at(x).dwell;
}

double tunnel_density(const GaussianPacket& packet, const Barrier& barrier, double x) {
  return TimeDensities(packet, barrier).at(x).tunnel;
}

double tunnel_correction_density(const GaussianPacket& packet, const Barrier& barrier, double x) {
  return TimeDensities(packet, barrier).at(x).correction;
}

double reflect_density(const GaussianPacket& packet, const Barrier& barrier, double x) {
  TimeDensities td(packet, barrier);
  if (td.R() < vanishing) throw DomainError("reflect density: reflection probability vanishes");
  return td.at(x).reflect;
}

AsymptoticTimes asymptotic_times(const GaussianPacket& packet, const Barrier& barrier, double x2) {
  return TimeDensities(packet, barrier).asymptotic(x2);
}

TimeDensityProfile profile(const GaussianPacket& packet, const Barrier& barrier,
                           const std::vector<double>& grid, unsigned threads) {
  return TimeDensities(packet, barrier).profile(grid, threads);
}

}  // namespace weaktime
