#include "weaktime/arrival.hpp"

#include <cmath>
#include <vector>

namespace weaktime {

namespace {

// u(p) = exp(i dt p^2/(2 m hbar)) erfc(-p s) and its derivative, s = sqrt(i dt/(2 hbar m)).
struct UValue {
  cplx u;
  cplx du;
};

UValue u_of(double p, const ArrivalConfig& c) {
  const cplx s = sqrt_i * std::sqrt(c.dt / (2.0 * c.hbar * c.mass));
  const double a = c.dt / (2.0 * c.mass * c.hbar);
  const cplx u = std::exp(cplx(0.0, a * p * p)) * erfc_complex(-p * s);
  const cplx du = cplx(0.0, 2.0 * a * p) * u + 2.0 * s / std::sqrt(pi);
  return {u, du};
}

// Element from precomputed u values; the difference quotient is replaced by
// the derivative at the midpoint when p1 and p2 nearly coincide.
cplx element_from(double p1, const UValue& u1, double p2, const UValue& u2, const ArrivalConfig& c) {
  const double a = c.dt / (2.0 * c.mass * c.hbar);
  const double d = p2 - p1;
  const double scale = 2.0 * a * (std::abs(p1) + std::abs(p2)) + std::sqrt(a);
  cplx quotient;
  if (std::abs(d) * scale < 1e-6) {
    const double mid = 0.5 * (p1 + p2);
    quotient = -(std::abs(d) == 0.0 ? u1.du : u_of(mid, c).du);
  } else {
    quotient = (u1.u - u2.u) / d;
  }
  return cplx(0.0, c.hbar / (2.0 * c.dt)) * std::exp(cplx(0.0, d * c.X / c.hbar)) *
         std::exp(cplx(0.0, -a * p2 * p2)) * quotient;
}

struct Nodes {
  std::vector<double> p;
  std::vector<double> w;
};

Nodes momentum_nodes(const MomentumPacket& pk, const ArrivalConfig& cfg, const ArrivalOptions& opts) {
  const double lo = pk.p_mean - opts.window_sigmas * pk.sigma;
  const double hi = pk.p_mean + opts.window_sigmas * pk.sigma;
  // Largest phase rate in p of phi(p) times the element: packet offset from X
  // plus the dt-dependent chirp.
  const double vmax = std::max(std::abs(lo), std::abs(hi)) / cfg.mass;
  const double rate = (std::abs(cfg.X - pk.x0) + vmax * (pk.time + cfg.dt)) / cfg.hbar;
  const int panels = std::max(1, static_cast<int>(std::ceil(rate * (hi - lo) / (pi / 2.0))));
  const auto rule = gauss_legendre(opts.nodes_per_panel);
  Nodes n;
  const double h = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i) {
    const double mid = lo + (i + 0.5) * h;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      n.p.push_back(mid + 0.5 * h * rule.nodes[j]);
      n.w.push_back(0.5 * h * rule.weights[j]);
    }
  }
  return n;
}

}  // namespace

void ArrivalConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("arrival: dt must be positive");
  if (!(hbar > 0.0) || !(mass > 0.0)) throw DomainError("arrival: hbar and mass must be positive");
  if (!std::isfinite(X)) throw DomainError("arrival: X must be finite");
}

void MomentumPacket::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("arrival packet: sigma must be positive");
  if (!std::isfinite(p_mean) || !std::isfinite(x0) || !std::isfinite(time)) throw DomainError("arrival packet: non-finite parameter");
}

cplx MomentumPacket::amplitude(double p, double hbar, double mass) const {
  const double d = p - p_mean;
  const double g = std::pow(2.0 * pi * sigma * sigma, -0.25) * std::exp(-d * d / (4.0 * sigma * sigma));
  return g * std::exp(cplx(0.0, -p * x0 / hbar - p * p * time / (2.0 * mass * hbar)));
}

cplx pi_matrix_element(double p1, double p2, const ArrivalConfig& cfg) {
  cfg.validate();
  return element_from(p1, u_of(p1, cfg), p2, u_of(p2, cfg), cfg);
}

cplx pi_minus_matrix_element(double p1, double p2, const ArrivalConfig& cfg) {
  return std::exp(cplx(0.0, 2.0 * (p2 - p1) * cfg.X / cfg.hbar)) * pi_matrix_element(-p1, -p2, cfg);
}

cplx pi_diagonal(double p, const ArrivalConfig& cfg) {
  cfg.validate();
  const cplx s = sqrt_i * std::sqrt(cfg.dt / (2.0 * cfg.hbar * cfg.mass));
  return p / (2.0 * cfg.mass) * erfc_complex(-p * s) +
         cfg.hbar / std::sqrt(I * 2.0 * pi * cfg.hbar * cfg.mass * cfg.dt) *
             std::exp(cplx(0.0, -p * p * cfg.dt / (2.0 * cfg.mass * cfg.hbar)));
}

namespace {

template <class Element>
cplx packet_expectation(const MomentumPacket& pk, const ArrivalConfig& cfg, const ArrivalOptions& opts,
                        Element&& element) {
  const Nodes n = momentum_nodes(pk, cfg, opts);
  const std::size_t N = n.p.size();
  std::vector<cplx> amp(N);
  for (std::size_t i = 0; i < N; ++i) amp[i] = n.w[i] * pk.amplitude(n.p[i], cfg.hbar, cfg.mass);
  cplx total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    cplx row = 0.0;
    for (std::size_t j = 0; j < N; ++j) row += element(i, j) * amp[j];
    total += std::conj(amp[i]) * row;
  }
  return total / (2.0 * pi * cfg.hbar);
}

}  // namespace

ComplexArrival arrival_distribution(const MomentumPacket& packet, const ArrivalConfig& cfg,
                                    const ArrivalOptions& opts) {
  cfg.validate();
  packet.validate();
  const Nodes n = momentum_nodes(packet, cfg, opts);
  std::vector<UValue> u(n.p.size());
  for (std::size_t i = 0; i < n.p.size(); ++i) u[i] = u_of(n.p[i], cfg);
  const cplx v = packet_expectation(packet, cfg, opts, [&](std::size_t i, std::size_t j) {
    return element_from(n.p[i], u[i], n.p[j], u[j], cfg);
  });
  ComplexArrival out{v.real(), v.imag()};
  const double Ek = packet.p_mean * packet.p_mean / (2.0 * cfg.mass);
  out.resolution_warning = Ek <= 0.0 || cfg.dt < cfg.hbar / Ek;
  return out;
}

cplx arrival_current_difference(const MomentumPacket& packet, const ArrivalConfig& cfg,
                                const ArrivalOptions& opts) {
  cfg.validate();
  packet.validate();
  const Nodes n = momentum_nodes(packet, cfg, opts);
  const std::size_t N = n.p.size();
  std::vector<UValue> up(N), um(N);
  for (std::size_t i = 0; i < N; ++i) {
    up[i] = u_of(n.p[i], cfg);
    um[i] = u_of(-n.p[i], cfg);
  }
  return packet_expectation(packet, cfg, opts, [&](std::size_t i, std::size_t j) {
    const cplx plus = element_from(n.p[i], up[i], n.p[j], up[j], cfg);
    const cplx minus = std::exp(cplx(0.0, 2.0 * (n.p[j] - n.p[i]) * cfg.X / cfg.hbar)) *
                       element_from(-n.p[i], um[i], -n.p[j], um[j], cfg);
    return plus - minus;
  });
}

double packet_flux(const MomentumPacket& pk, double X, double hbar, double mass) {
  // psi(x) = (2 pi hbar)^(-1/2) int phi(p) exp(i p x/hbar) dp.
  ArrivalConfig cfg{X, 1.0, hbar, mass};
  const Nodes n = momentum_nodes(pk, cfg, ArrivalOptions{});
  cplx psi = 0.0, dpsi = 0.0;
  for (std::size_t i = 0; i < n.p.size(); ++i) {
    const cplx a = n.w[i] * pk.amplitude(n.p[i], hbar, mass) * std::exp(cplx(0.0, n.p[i] * X / hbar));
    psi += a;
    dpsi += a * n.p[i];  // -i hbar d/dx
  }
  const double norm = 1.0 / (2.0 * pi * hbar);
  return (std::conj(psi) * dpsi).real() * norm / mass;
}

double classical_arrival(const PhaseSpaceDensity& rho, double X, double t, Side side, double mass,
                         double tolerance) {
  const double lo = side == Side::plus ? std::max(0.0, rho.p_min) : rho.p_min;
  const double hi = side == Side::plus ? rho.p_max : std::min(0.0, rho.p_max);
  if (!(hi > lo)) return 0.0;
  QuadratureSpec spec{lo, hi, tolerance};
  return integrate([&](double p) { return cplx(std::abs(p) / mass * rho.rho(X, p, t), 0.0); }, spec).real();
}

double classical_window_arrival(const PhaseSpaceDensity& rho, double X, double t, double dt, double mass,
                                double tolerance) {
  if (!(dt > 0.0)) throw DomainError("classical_window_arrival: dt must be positive");
  const double lo = std::max(0.0, rho.p_min);
  const double hi = rho.p_max;
  if (!(hi > lo)) return 0.0;
  QuadratureSpec outer{lo, hi, tolerance};
  const auto& rule = gauss_legendre(24);
  return integrate(
             [&](double p) {
               const double width = p * dt / mass;
               if (width <= 0.0) return cplx(0.0, 0.0);
               double s = 0.0;
               for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                 const double x = X - 0.5 * width + 0.5 * width * rule.nodes[k];
                 s += 0.5 * width * rule.weights[k] * rho.rho(x, p, t);
               }
               return cplx(s / dt, 0.0);
             },
             outer)
      .real();
}

PhaseSpaceDensity free_gaussian_ensemble(double x0, double sigma_x, double p_mean, double sigma_p,
                                         double mass) {
  if (!(sigma_x > 0.0) || !(sigma_p > 0.0)) throw DomainError("gaussian ensemble: widths must be positive");
  auto normal = [](double x, double mu, double s) {
    const double z = (x - mu) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * pi));
  };
  PhaseSpaceDensity d;
  d.rho = [=](double x, double p, double t) {
    return normal(x - p * t / mass, x0, sigma_x) * normal(p, p_mean, sigma_p);
  };
  d.p_min = p_mean - 12.0 * sigma_p;
  d.p_max = p_mean + 12.0 * sigma_p;
  return d;
}

double resolution_bound(double E_k, double hbar) {
  if (!(E_k > 0.0)) throw DomainError("resolution_bound: E_k must be positive");
  return hbar / E_k;
}

}  // namespace weaktime
