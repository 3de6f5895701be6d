#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include "weaktime/errors.hpp"

namespace weaktime {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};
// Principal branch: sqrt(i) = exp(i pi/4).
inline const cplx sqrt_i{0.70710678118654752440, 0.70710678118654752440};

// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
cplx faddeeva(cplx z);

// Complementary error function continued to the complex plane.
// Throws OverflowError if |z| >= 1e6 or the result leaves double range.
cplx erfc_complex(cplx z);

struct QuadratureSpec {
  double lower = 0.0;
  double upper = 1.0;
  double tolerance = 1e-8;
  std::size_t max_panels = 20000;
  // Largest |d(phase)/dx| of the integrand; initial panels are cut so that
  // each one sees at most pi/4 of phase.
  double phase_rate = 0.0;

  void validate() const;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
GaussLegendreRule gauss_legendre(int n);

// Rule used by the adaptive integrator on each panel.
const GaussLegendreRule& panel_rule();

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

namespace detail {

inline double magnitude(const cplx& v) { return std::abs(v); }
inline double magnitude(double v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<cplx, N>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

template <class T>
T zero_like() {
  if constexpr (std::is_arithmetic_v<T>) {
    return T(0);
  } else if constexpr (std::is_same_v<T, cplx>) {
    return cplx(0.0, 0.0);
  } else {
    T z;
    for (auto& c : z) c = cplx(0.0, 0.0);
    return z;
  }
}

template <class T>
void axpy(T& acc, double w, const T& v) {
  if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
    acc += w * v;
  } else {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
  }
}

template <class T>
T difference(const T& a, const T& b) {
  T d = a;
  axpy(d, -1.0, b);
  return d;
}

template <class T>
struct Panel {
  double a, b;
  T value;
  T abs_value;  // integral of |f| componentwise, for the cancellation floor
  double error;
  bool operator<(const Panel& o) const {
    if (error != o.error) return error < o.error;
    return a > o.a;  // deterministic tie-break
  }
};

template <class T, class F>
std::pair<T, T> panel_sum(F& f, double a, double b) {
  const auto& rule = panel_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  T s = zero_like<T>();
  T sa = zero_like<T>();
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const T v = f(mid + half * rule.nodes[k]);
    axpy(s, rule.weights[k] * half, v);
    if constexpr (std::is_arithmetic_v<T>) {
      sa += rule.weights[k] * half * std::abs(v);
    } else if constexpr (std::is_same_v<T, cplx>) {
      sa += rule.weights[k] * half * std::abs(v);
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) sa[i] += rule.weights[k] * half * std::abs(v[i]);
    }
  }
  return {s, sa};
}

}  // namespace detail

// Relative size below which a result is treated as pure cancellation:
// convergence is then judged against this fraction of the integral of |f|.
inline constexpr double cancellation_floor = 1e-6;

// Adaptive Gauss-Legendre quadrature. A panel's error is the difference
// between its own estimate and the sum of its two halves; the panel with the
// largest error is split first. Returns best effort with converged=false when
// the panel budget runs out.
template <class T, class F>
QuadratureResult<T> integrate_adaptive(F&& f, const QuadratureSpec& spec) {
  spec.validate();
  using detail::Panel;
  std::size_t initial = 1;
  if (spec.phase_rate > 0.0) {
    const double width = spec.upper - spec.lower;
    initial = static_cast<std::size_t>(std::ceil(spec.phase_rate * width / (pi / 4.0)));
    initial = std::clamp<std::size_t>(initial, 1, std::max<std::size_t>(1, spec.max_panels / 2));
  }

  auto make_panel = [&](double a, double b) {
    const double m = 0.5 * (a + b);
    auto [whole, whole_abs] = detail::panel_sum<T>(f, a, b);
    auto [left, left_abs] = detail::panel_sum<T>(f, a, m);
    auto [right, right_abs] = detail::panel_sum<T>(f, m, b);
    T halves = left;
    detail::axpy(halves, 1.0, right);
    T habs = left_abs;
    detail::axpy(habs, 1.0, right_abs);
    return Panel<T>{a, b, halves, habs, detail::magnitude(detail::difference(whole, halves))};
  };

  std::priority_queue<Panel<T>> queue;
  double error = 0.0;
  T value = detail::zero_like<T>();
  T abs_value = detail::zero_like<T>();
  const double h = (spec.upper - spec.lower) / static_cast<double>(initial);
  for (std::size_t i = 0; i < initial; ++i) {
    const double a = spec.lower + h * static_cast<double>(i);
    const double b = (i + 1 == initial) ? spec.upper : spec.lower + h * static_cast<double>(i + 1);
    Panel<T> p = make_panel(a, b);
    error += p.error;
    detail::axpy(value, 1.0, p.value);
    detail::axpy(abs_value, 1.0, p.abs_value);
    queue.push(std::move(p));
  }

  // Final sums are recomputed in left-to-right order so the result does not
  // depend on the refinement history's rounding.
  auto totals = [&]() {
    std::vector<Panel<T>> all;
    all.reserve(queue.size());
    while (!queue.empty()) {
      all.push_back(queue.top());
      queue.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    QuadratureResult<T> r;
    r.value = detail::zero_like<T>();
    T abs_total = detail::zero_like<T>();
    for (const auto& p : all) {
      detail::axpy(r.value, 1.0, p.value);
      detail::axpy(abs_total, 1.0, p.abs_value);
      r.error += p.error;
    }
    r.panels = all.size();
    return std::pair{r, detail::magnitude(abs_total)};
  };

  auto target = [&](const T& v, const T& av) {
    return spec.tolerance *
           std::max(detail::magnitude(v), cancellation_floor * detail::magnitude(av));
  };

  while (error > target(value, abs_value) && queue.size() < spec.max_panels) {
    Panel<T> worst = queue.top();
    queue.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      queue.push(worst);
      break;  // panel cannot be split further in double precision
    }
    Panel<T> left = make_panel(worst.a, m);
    Panel<T> right = make_panel(m, worst.b);
    error += left.error + right.error - worst.error;
    detail::axpy(value, 1.0, left.value);
    detail::axpy(value, 1.0, right.value);
    detail::axpy(value, -1.0, worst.value);
    detail::axpy(abs_value, 1.0, left.abs_value);
    detail::axpy(abs_value, 1.0, right.abs_value);
    detail::axpy(abs_value, -1.0, worst.abs_value);
    queue.push(left);
    queue.push(right);
    if (error < 0.0) error = 0.0;
  }

  auto [result, abs_total] = totals();
  result.converged =
      result.error <= spec.tolerance * std::max(detail::magnitude(result.value),
                                                cancellation_floor * abs_total);
  return result;
}

// Adaptive integral of a complex-valued function; throws ConvergenceError
// (with panel count and residual) when the tolerance is not reached.
cplx integrate(const std::function<cplx(double)>& f, const QuadratureSpec& spec);

// Same as integrate() for a fixed-size bundle of integrands sharing panels.
template <std::size_t N, class F>
std::array<cplx, N> integrate_bundle(F&& f, const QuadratureSpec& spec) {
  auto r = integrate_adaptive<std::array<cplx, N>>(std::forward<F>(f), spec);
  if (!r.converged) {
    throw ConvergenceError("quadrature did not converge", r.panels, r.error);
  }
  return r.value;
}

// Central difference with one Richardson step. Default step max(E,1)*1e-6.
// Throws DomainError if the stencil reaches E <= 0.
cplx d_dE(const std::function<cplx(double)>& f, double E,
          std::optional<double> step = std::nullopt);

}  // namespace weaktime
