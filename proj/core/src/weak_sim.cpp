#include "weaktime/weak_sim.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <sstream>

namespace weaktime {

using Eigen::MatrixXcd;

namespace {

constexpr double min_postselection = 1e-6;

bool hermitian(const MatrixXcd& m, double tol = 1e-12) {
  return m.rows() == m.cols() && (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

MatrixXcd evolution(const MatrixXcd& H, double t, double hbar) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -t / hbar)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXcd heisenberg(const MatrixXcd& B, const MatrixXcd& H, double dt, double hbar) {
  if (dt == 0.0) return B;
  const MatrixXcd U = evolution(H, dt, hbar);
  return U.adjoint() * B * U;
}

double spectral_norm(const MatrixXcd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Joint state sum_{a+b<=2} M_ab (x) q^a rho_D q^b.
enum Slot { s00, s10, s01, s20, s11, s02, n_slots };
constexpr std::array<std::pair<int, int>, n_slots> powers{{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

int slot_of(int a, int b) {
  for (int i = 0; i < n_slots; ++i) {
    if (powers[i].first == a && powers[i].second == b) return i;
  }
  return -1;
}

struct Moments {
  // Tr_D(p q^a rho q^b) = <q^b p q^a>, Tr_D(q^a rho q^b) = <q^(a+b)>
  std::array<cplx, n_slots> p_weight;
  std::array<double, n_slots> norm_weight;
};

Moments gaussian_moments(const DetectorState& d) {
  const double q0 = d.q_mean, p0 = d.p_mean, V = d.var_q, c = d.covariance;
  const cplx h2(0.0, 0.5 * d.hbar);
  Moments m{};
  m.p_weight[s00] = p0;
  m.p_weight[s10] = q0 * p0 + c - h2;                             // <p q>
  m.p_weight[s01] = q0 * p0 + c + h2;                             // <q p>
  m.p_weight[s20] = p0 * (q0 * q0 + V) + 2.0 * q0 * (c - h2);     // <p q^2>
  m.p_weight[s11] = p0 * (q0 * q0 + V) + 2.0 * q0 * c;            // <q p q>
  m.p_weight[s02] = p0 * (q0 * q0 + V) + 2.0 * q0 * (c + h2);     // <q^2 p>
  m.norm_weight = {1.0, q0, q0, q0 * q0 + V, q0 * q0 + V, q0 * q0 + V};
  return m;
}

struct SlicedRun {
  double p_first;   // <B p>/<B> through O(lambda)
  double p_second;  // through O(lambda^2)
  double probability;
};

SlicedRun run_sliced(const FiniteSystem& sys, const DetectorState& det, const CouplingConfig& cfg,
                     const MatrixXcd& Bh, std::size_t slices) {
  const double dt = cfg.duration / static_cast<double>(slices);
  const MatrixXcd half = evolution(sys.H, 0.5 * dt, sys.hbar);
  const MatrixXcd half_adj = half.adjoint();
  const cplx c1(0.0, -cfg.lambda * dt / sys.hbar);
  const std::array<cplx, 3> coef{1.0, c1, 0.5 * c1 * c1};
  const std::array<MatrixXcd, 3> Apow{MatrixXcd::Identity(sys.dim(), sys.dim()), sys.A, sys.A * sys.A};

  std::array<MatrixXcd, n_slots> M;
  for (auto& m : M) m = MatrixXcd::Zero(sys.dim(), sys.dim());
  M[s00] = sys.rho;

  std::array<MatrixXcd, n_slots> next;
  for (std::size_t k = 0; k < slices; ++k) {
    for (auto& m : M) m = half * m * half_adj;
    for (auto& m : next) m.setZero(sys.dim(), sys.dim());
    for (int i = 0; i < n_slots; ++i) {
      const auto [a, b] = powers[i];
      for (int n = 0; n + a + b <= 2; ++n) {
        const MatrixXcd left = coef[n] * Apow[n] * M[i];
        for (int m = 0; n + m + a + b <= 2; ++m) {
          next[slot_of(a + n, b + m)] += left * (std::conj(coef[m]) * Apow[m]);
        }
      }
    }
    for (int i = 0; i < n_slots; ++i) M[i] = half * next[i] * half_adj;
  }

  const Moments mom = gaussian_moments(det);
  cplx num1 = 0.0, num2 = 0.0, den1 = 0.0, den2 = 0.0;
  for (int i = 0; i < n_slots; ++i) {
    const cplx tr = (Bh * M[i]).trace();
    const int order = powers[i].first + powers[i].second;
    const cplx pn = tr * mom.p_weight[i];
    const cplx dn = tr * mom.norm_weight[i];
    num2 += pn;
    den2 += dn;
    if (order <= 1) {
      num1 += pn;
      den1 += dn;
    }
  }
  return {num1.real() / den1.real(), num2.real() / den2.real(), den2.real()};
}

WeakSimResult simulate(const FiniteSystem& sys, const DetectorState& det, const CouplingConfig& cfg,
                       const MatrixXcd& B, double dt_post, const SimulationOptions& opts) {
  sys.validate();
  det.validate();
  cfg.validate();
  if (!hermitian(B) || B.rows() != sys.dim()) throw DomainError("weak_sim: B must be a Hermitian matrix of the system dimension");
  if (!(dt_post >= 0.0)) throw DomainError("weak_sim: dt_post must be non-negative");
  const MatrixXcd Bh = heisenberg(B, sys.H, dt_post, sys.hbar);

  const double anorm = spectral_norm(sys.A);
  const double shift_floor = 1e-3 * cfg.lambda * cfg.duration * std::max(anorm, 1e-300);
  std::size_t n = std::max<std::size_t>(opts.min_slices, 1);
  SlicedRun prev = run_sliced(sys, det, cfg, Bh, n);
  SlicedRun cur = prev;
  double change = 0.0;
  for (;;) {
    if (2 * n > opts.max_slices) {
      std::ostringstream msg;
      msg << "weak_sim: time slicing did not converge (relative change " << change << ")";
      throw ConvergenceError(msg.str(), n, change);
    }
    n *= 2;
    cur = run_sliced(sys, det, cfg, Bh, n);
    const double shift = std::abs(det.p_mean - cur.p_second);
    change = std::abs(cur.p_second - prev.p_second) / std::max(shift, shift_floor);
    if (change <= opts.slice_tolerance) break;
    prev = cur;
  }
  // Strang splitting errors are O(dt^2); remove the leading term.
  auto extrapolate = [](double fine, double coarse) { return (4.0 * fine - coarse) / 3.0; };
  cur.p_first = extrapolate(cur.p_first, prev.p_first);
  cur.p_second = extrapolate(cur.p_second, prev.p_second);

  WeakSimResult r;
  r.slices = n;
  r.postselection_probability = cur.probability;
  if (cur.probability < min_postselection) {
    throw RarePostselectionError("weak_sim: postselection probability below 1e-6", cur.probability);
  }
  r.first_order_shift = det.p_mean - cur.p_first;
  r.second_order_shift = cur.p_first - cur.p_second;
  r.weak_value = (det.p_mean - cur.p_second) / (cfg.lambda * cfg.duration);
  r.time = r.weak_value * cfg.duration;
  r.weakness_parameter = cfg.lambda * cfg.duration * std::sqrt(det.var_q) * anorm / sys.hbar;
  r.weakness_flag = r.weakness_parameter > 0.1;
  // A first-order shift of exactly zero is judged against lambda tau ||A||.
  const double scale = std::max(std::abs(r.first_order_shift), 1e-2 * cfg.lambda * cfg.duration * anorm);
  if (opts.enforce_weakness && std::abs(r.second_order_shift) > 0.1 * scale) {
    std::ostringstream msg;
    msg << "weak_sim: second-order pointer shift " << r.second_order_shift
        << " exceeds 10% of the first-order shift " << r.first_order_shift;
    throw WeaknessError(msg.str());
  }
  return r;
}

}  // namespace

DetectorState DetectorState::gaussian(double q_mean, double p_mean, double var_q, double covariance,
                                      double hbar) {
  DetectorState d;
  d.q_mean = q_mean;
  d.p_mean = p_mean;
  d.var_q = var_q;
  d.covariance = covariance;
  d.hbar = hbar;
  d.var_p = (0.25 * hbar * hbar + covariance * covariance) / var_q;
  d.validate();
  return d;
}

bool DetectorState::is_pure(double tol) const {
  return std::abs(var_q * var_p - covariance * covariance - 0.25 * hbar * hbar) <= tol * hbar * hbar;
}

void DetectorState::validate() const {
  if (!(hbar > 0.0)) throw DomainError("detector: hbar must be positive");
  if (!(var_q > 0.0) || !(var_p > 0.0)) throw DomainError("detector: variances must be positive");
  // Robertson-Schroedinger bound.
  if (var_q * var_p - covariance * covariance < 0.25 * hbar * hbar * (1.0 - 1e-12)) {
    throw DomainError("detector: moments violate the uncertainty relation");
  }
}

void CouplingConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("coupling: lambda must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw DomainError("coupling: duration must be positive");
}

void FiniteSystem::validate() const {
  const Eigen::Index n = H.rows();
  if (n < 1 || H.cols() != n || A.rows() != n || A.cols() != n || rho.rows() != n || rho.cols() != n) {
    throw DomainError("system: H, A and rho must be square matrices of equal size");
  }
  if (!(hbar > 0.0)) throw DomainError("system: hbar must be positive");
  if (!hermitian(H)) throw DomainError("system: H_S must be Hermitian");
  if (!hermitian(A)) throw DomainError("system: A must be Hermitian");
  if (!hermitian(rho)) throw DomainError("system: rho must be Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw DomainError("system: rho must have unit trace");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12) throw DomainError("system: rho must be positive semidefinite");
}

WeakSimResult weak_value_unconditional(const FiniteSystem& sys, const DetectorState& det,
                                       const CouplingConfig& cfg, const SimulationOptions& opts) {
  return simulate(sys, det, cfg, MatrixXcd::Identity(sys.dim(), sys.dim()), 0.0, opts);
}

WeakSimResult weak_value_conditional(const FiniteSystem& sys, const DetectorState& det,
                                     const CouplingConfig& cfg, const MatrixXcd& B, double dt_post,
                                     const SimulationOptions& opts) {
  return simulate(sys, det, cfg, B, dt_post, opts);
}

double weak_value_grid(const FiniteSystem& sys, const DetectorState& det, const CouplingConfig& cfg,
                       const MatrixXcd& B, double dt_post, std::size_t points) {
  sys.validate();
  det.validate();
  cfg.validate();
  if (!det.is_pure(1e-8)) throw DomainError("weak_value_grid: needs a pure Gaussian detector");
  if (points < 16) throw DomainError("weak_value_grid: too few grid points");
  const MatrixXcd Bh = heisenberg(B, sys.H, dt_post, sys.hbar);
  const double hbar = sys.hbar;
  if (std::abs(det.hbar - hbar) > 0.0) throw DomainError("weak_value_grid: detector and system hbar differ");

  // Phi(q) ~ exp(-a (q-q0)^2 + i p0 (q-q0)/hbar); -i hbar Phi'/Phi = p0 + 2 i hbar a (q - q0).
  const double ar = 1.0 / (4.0 * det.var_q);
  const double ai = -det.covariance / (2.0 * hbar * det.var_q);
  const cplx a(ar, ai);
  const double sd = std::sqrt(det.var_q);
  const double lo = det.q_mean - 10.0 * sd;
  const double h = 20.0 * sd / static_cast<double>(points - 1);
  const double tau = cfg.duration;

  cplx num = 0.0;
  double den = 0.0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double q = lo + h * static_cast<double>(i);
    const double dq = q - det.q_mean;
    const double w = std::exp(-2.0 * ar * dq * dq);  // |Phi|^2 up to normalization
    if (w < 1e-300) continue;
    const MatrixXcd Hq = sys.H + cfg.lambda * q * sys.A;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Hq);
    const auto& V = es.eigenvectors();
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::Index n = lam.size();
    Eigen::VectorXcd e(n);
    for (Eigen::Index j = 0; j < n; ++j) e[j] = std::exp(cplx(0.0, -lam[j] * tau / hbar));
    const MatrixXcd U = V * e.asDiagonal() * V.adjoint();
    // Daleckii-Krein: dU/dq = V (G o V^dag lambda A V) V^dag.
    const MatrixXcd Ad = V.adjoint() * (cfg.lambda * sys.A) * V;
    MatrixXcd G(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const double gap = lam[j] - lam[k];
        if (std::abs(gap) * tau / hbar < 1e-8) {
          G(j, k) = cplx(0.0, -tau / hbar) * 0.5 * (e[j] + e[k]);
        } else {
          G(j, k) = (e[j] - e[k]) / gap;
        }
      }
    }
    const MatrixXcd dU = V * G.cwiseProduct(Ad) * V.adjoint();
    const MatrixXcd rho_t = U * sys.rho * U.adjoint();
    const cplx local_p = det.p_mean + 2.0 * I * hbar * a * dq;
    const cplx bp = (Bh * (-I * hbar * dU * sys.rho * U.adjoint())).trace() + local_p * (Bh * rho_t).trace();
    num += w * bp;
    den += w * (Bh * rho_t).trace().real();
    weight_sum += w;
  }
  const double prob = den / weight_sum;
  if (prob < min_postselection) throw RarePostselectionError("weak_value_grid: postselection probability below 1e-6", prob);
  const double p_after = num.real() / den;
  return (det.p_mean - p_after) / (cfg.lambda * cfg.duration);
}

WeakAnalytic weak_value_analytic(const FiniteSystem& sys, const DetectorState& det, double duration,
                                 const MatrixXcd& B, double dt_post) {
  sys.validate();
  det.validate();
  if (!(duration > 0.0)) throw DomainError("weak_value_analytic: duration must be positive");
  const MatrixXcd Bh = heisenberg(B, sys.H, dt_post, sys.hbar);
  // F = int_0^tau U^dag A U dt in the energy eigenbasis: A_jk (e^{i w_jk tau} - 1)/(i w_jk).
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sys.H);
  const auto& V = es.eigenvectors();
  const Eigen::VectorXd E = es.eigenvalues();
  const MatrixXcd Ae = V.adjoint() * sys.A * V;
  MatrixXcd Fe(Ae.rows(), Ae.cols());
  for (Eigen::Index j = 0; j < Ae.rows(); ++j) {
    for (Eigen::Index k = 0; k < Ae.cols(); ++k) {
      const double wjk = (E[j] - E[k]) / sys.hbar;
      const cplx f = std::abs(wjk * duration) < 1e-8
                         ? cplx(duration, 0.5 * wjk * duration * duration)
                         : (std::exp(cplx(0.0, wjk * duration)) - 1.0) / cplx(0.0, wjk);
      Fe(j, k) = Ae(j, k) * f;
    }
  }
  const MatrixXcd F = V * Fe * V.adjoint();
  // Heisenberg B at the end of the interaction, seen from t = 0.
  const MatrixXcd U = evolution(sys.H, duration, sys.hbar);
  const MatrixXcd Bt = U.adjoint() * Bh * U;
  const double prob = (Bt * sys.rho).trace().real();
  if (prob < min_postselection) throw RarePostselectionError("weak_value_analytic: postselection probability below 1e-6", prob);
  const cplx bf = (Bt * F * sys.rho).trace();
  const cplx fb = (F * Bt * sys.rho).trace();
  WeakAnalytic out;
  out.probability = prob;
  out.symmetric = 0.5 * (bf + fb).real() / (prob * duration);
  out.commutator = (0.5 * (bf - fb) / I).real() / (prob * duration);
  out.value = out.symmetric + 2.0 / sys.hbar * det.coefficient() * out.commutator;
  return out;
}

Eigen::MatrixXcd level_projector(int level) {
  if (level != 0 && level != 1) throw DomainError("level_projector: level must be 0 or 1");
  MatrixXcd P = MatrixXcd::Zero(2, 2);
  P(level, level) = 1.0;
  return P;
}

FiniteSystem two_level_system(double omega, cplx v, int measured_level, double hbar) {
  FiniteSystem s;
  s.hbar = hbar;
  s.H.resize(2, 2);
  s.H << -0.5 * hbar * omega, std::conj(v), v, 0.5 * hbar * omega;
  s.A = level_projector(measured_level);
  s.rho = level_projector(0);
  return s;
}

}  // namespace weaktime
