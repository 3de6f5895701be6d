#include "weaktime/scattering.hpp"

#include <cmath>

namespace weaktime {

void Units::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("units: hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("units: mass must be positive");
}

Barrier::Barrier(Shape s, Units u) : shape_(s), units_(u) { units_.validate(); }

Barrier Barrier::free(Units u) { return Barrier(FreeBarrier{}, u); }

Barrier Barrier::delta(double strength, Units u) {
  if (!(strength > 0.0) || !std::isfinite(strength)) throw DomainError("delta barrier: strength must be positive");
  return Barrier(DeltaBarrier{strength}, u);
}

Barrier Barrier::rectangular(double height, double width, Units u) {
  if (!(height > 0.0) || !std::isfinite(height)) throw DomainError("rectangular barrier: height must be positive");
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("rectangular barrier: width must be positive");
  return Barrier(RectangularBarrier{height, width}, u);
}

double Barrier::width() const {
  if (const auto* r = std::get_if<RectangularBarrier>(&shape_)) return r->width;
  return 0.0;
}

double momentum_from_energy(double E, const Units& u) {
  if (!(E > 0.0)) throw DomainError("momentum_from_energy: E must be positive");
  return std::sqrt(2.0 * u.mass * E);
}

namespace {

// Fundamental interior solutions of psi'' = (2M(V0-E)/hbar^2) psi:
// c = u1(x) with u1(0)=1, u1'(0)=0; s = u2(x) with u2(0)=0, u2'(0)=1; dc = u1'(x).
struct Interior {
  double c, s, dc;
};

Interior interior(const RectangularBarrier& rb, const Units& u, double E, double x) {
  const double diff = 2.0 * u.mass * (rb.height - E);
  if (diff > 0.0) {
    const double kappa = std::sqrt(diff) / u.hbar;
    if (kappa * x > 350.0) throw OverflowError("rectangular barrier too opaque (kappa*L > 350)");
    const double sh = std::sinh(kappa * x);
    return {std::cosh(kappa * x), sh / kappa, kappa * sh};
  }
  if (diff < 0.0) {
    const double q = std::sqrt(-diff) / u.hbar;
    const double sn = std::sin(q * x);
    return {std::cos(q * x), sn / q, -q * sn};
  }
  return {1.0, x, 0.0};
}

double prefactor(const Units& u, double p) { return std::sqrt(u.mass / (2.0 * pi * u.hbar * p)); }

}  // namespace

ScatteringAmplitudes amplitudes(const Barrier& barrier, double E) {
  const Units& u = barrier.units();
  const double p = momentum_from_energy(E, u);
  const double k = p / u.hbar;
  return std::visit(
      [&](const auto& b) -> ScatteringAmplitudes {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, FreeBarrier>) {
          return {1.0, 0.0, E};
        } else if constexpr (std::is_same_v<B, DeltaBarrier>) {
          const cplx t = p / cplx(p, u.mass * b.strength / u.hbar);
          return {t, t - 1.0, E};
        } else {
          const Interior in = interior(b, u, E, b.width);
          const cplx D = in.c + I / (2.0 * k) * (in.dc - k * k * in.s);
          const cplx t = std::exp(cplx(0.0, -k * b.width)) / D;
          const cplx r = -I / (2.0 * k) * (k * k * in.s + in.dc) / D;
          return {t, r, E};
        }
      },
      barrier.shape());
}

cplx eigenfunction(const Barrier& barrier, double E, Direction alpha, double x) {
  const Units& u = barrier.units();
  const double p = momentum_from_energy(E, u);
  const double k = p / u.hbar;
  const double c = prefactor(u, p);
  const auto [t, r, e_unused] = amplitudes(barrier, E);
  (void)e_unused;
  const double L = barrier.width();
  const cplx in_wave = std::exp(cplx(0.0, k * x));
  const cplx out_wave = std::exp(cplx(0.0, -k * x));

  if (alpha == Direction::plus) {
    if (x < 0.0) return c * (in_wave + r * out_wave);
    if (x >= L) return c * t * in_wave;
    const Interior in = interior(std::get<RectangularBarrier>(barrier.shape()), u, E, x);
    const cplx psi0 = c * (1.0 + r);
    const cplx dpsi0 = c * I * k * (1.0 - r);
    return psi0 * in.c + dpsi0 * in.s;
  }
  if (x < 0.0) return c * t * out_wave;
  if (x >= L) return c * (out_wave - (t / std::conj(t)) * std::conj(r) * in_wave);
  const Interior in = interior(std::get<RectangularBarrier>(barrier.shape()), u, E, x);
  const cplx psi0 = c * t;
  const cplx dpsi0 = -I * k * c * t;
  return psi0 * in.c + dpsi0 * in.s;
}

namespace {

cplx log_derivative(const Barrier& barrier, double E) {
  const auto t_of = [&](double e) { return amplitudes(barrier, e).t; };
  return d_dE(t_of, E) / amplitudes(barrier, E).t;
}

}  // namespace

double phase_time(const Barrier& barrier, double E) {
  return barrier.units().hbar * log_derivative(barrier, E).imag();
}

double imaginary_time(const Barrier& barrier, double E) {
  return barrier.units().hbar * log_derivative(barrier, E).real();
}

}  // namespace weaktime
