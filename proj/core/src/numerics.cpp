#include "weaktime/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace weaktime {

namespace {

constexpr double two_over_sqrt_pi = 1.12837916709551257390;

// Region scheme of Poppe and Wijers: Taylor series near the origin, Laplace
// continued fraction far away, and Gautschi's truncated series/fraction hybrid
// in between.
cplx faddeeva_quadrant(double x_orig, double y_orig) {
  const double xabs = std::abs(x_orig);
  const double yabs = std::abs(y_orig);
  const double x = xabs / 6.3;
  const double y = yabs / 4.4;
  double qrho = x * x + y * y;
  const double xquad0 = xabs * xabs - yabs * yabs;
  const double yquad = 2.0 * xabs * yabs;
  double u = 0.0, v = 0.0, u2 = 0.0, v2 = 0.0;
  const bool small = qrho < 0.085264;

  if (small) {
    qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
    const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
    int j = 2 * n + 1;
    double xsum = 1.0 / j;
    double ysum = 0.0;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad0 - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad0) / i;
      xsum = xaux + 1.0 / j;
    }
    const double u1 = -two_over_sqrt_pi * (xsum * yabs + ysum * xabs) + 1.0;
    const double v1 = two_over_sqrt_pi * (xsum * xabs - ysum * yabs);
    const double daux = std::exp(-xquad0);
    u2 = daux * std::cos(yquad);
    v2 = -daux * std::sin(yquad);
    u = u1 * u2 - v1 * v2;
    v = u1 * v2 + v1 * u2;
  } else {
    double h = 0.0, h2 = 0.0;
    int kapn = 0, nu = 0;
    if (qrho > 1.0) {
      qrho = std::sqrt(qrho);
      nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
    } else {
      qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
      h = 1.88 * qrho;
      h2 = 2.0 * h;
      kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
      nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
    }
    const bool b = h > 0.0;
    double qlambda = b ? std::pow(h2, kapn) : 0.0;
    double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
    for (int n = nu; n >= 0; --n) {
      const double np1 = n + 1.0;
      double tx = yabs + h + np1 * rx;
      double ty = xabs - np1 * ry;
      const double c = 0.5 / (tx * tx + ty * ty);
      rx = c * tx;
      ry = c * ty;
      if (b && n <= kapn) {
        tx = qlambda + sx;
        sx = rx * tx - ry * sy;
        sy = ry * tx + rx * sy;
        qlambda /= h2;
      }
    }
    if (h == 0.0) {
      u = two_over_sqrt_pi * rx;
      v = two_over_sqrt_pi * ry;
    } else {
      u = two_over_sqrt_pi * sx;
      v = two_over_sqrt_pi * sy;
    }
    if (yabs == 0.0) u = std::exp(-xabs * xabs);
  }

  if (y_orig < 0.0) {
    // w(z) = 2 exp(-z^2) - w(-z)
    if (small) {
      u2 *= 2.0;
      v2 *= 2.0;
    } else {
      const double w1 = 2.0 * std::exp(-xquad0);
      u2 = w1 * std::cos(yquad);
      v2 = -w1 * std::sin(yquad);
    }
    u = u2 - u;
    v = v2 - v;
    if (x_orig > 0.0) v = -v;
  } else if (x_orig < 0.0) {
    v = -v;
  }
  return {u, v};
}

}  // namespace

cplx faddeeva(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("faddeeva: non-finite argument");
  if (y < 0.0 && y * y - x * x > 708.0) throw OverflowError("faddeeva: result overflows");
  return faddeeva_quadrant(x, y);
}

cplx erfc_complex(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("erfc_complex: non-finite argument");
  if (std::abs(z) >= 1e6) throw OverflowError("erfc_complex: |z| >= 1e6");
  if (x < 0.0) return 2.0 - erfc_complex(-z);
  // x >= 0: erfc(z) = exp(-z^2) w(iz), with Im(iz) = x >= 0 so w is well conditioned.
  const double log_scale = y * y - x * x;
  if (log_scale > 708.0) throw OverflowError("erfc_complex: result overflows");
  if (log_scale < -740.0) throw OverflowError("erfc_complex: result underflows");
  const cplx w = faddeeva(cplx(-y, x));
  const double mag = std::exp(log_scale);
  const double phase = -2.0 * x * y;
  return mag * cplx(std::cos(phase), std::sin(phase)) * w;
}

void QuadratureSpec::validate() const {
  if (!(lower < upper)) throw DomainError("quadrature: lower limit must be below upper limit");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("quadrature: tolerance must lie in (0, 1)");
  if (max_panels < 1) throw DomainError("quadrature: max_panels must be >= 1");
  if (!(phase_rate >= 0.0) || !std::isfinite(phase_rate)) throw DomainError("quadrature: bad phase rate");
}

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const GaussLegendreRule& panel_rule() {
  static const GaussLegendreRule rule = gauss_legendre(20);
  return rule;
}

cplx integrate(const std::function<cplx(double)>& f, const QuadratureSpec& spec) {
  auto r = integrate_adaptive<cplx>(f, spec);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << spec.lower << ", " << spec.upper << "] after "
        << r.panels << " panels (residual " << r.error << ")";
    throw ConvergenceError(msg.str(), r.panels, r.error);
  }
  return r.value;
}

cplx d_dE(const std::function<cplx(double)>& f, double E, std::optional<double> step) {
  const double h = step.value_or(std::max(E, 1.0) * 1e-6);
  if (!(h > 0.0)) throw DomainError("d_dE: step must be positive");
  if (E - h <= 0.0) throw DomainError("d_dE: stencil crosses E <= 0");
  const cplx d1 = (f(E + h) - f(E - h)) / (2.0 * h);
  const cplx d2 = (f(E + 0.5 * h) - f(E - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace weaktime
