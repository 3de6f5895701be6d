#pragma once

#include <variant>

#include "weaktime/numerics.hpp"

namespace weaktime {

struct Units {
  double hbar = 1.0;
  double mass = 1.0;
  void validate() const;
};

struct FreeBarrier {};
struct DeltaBarrier {
  double strength;  // V(x) = strength * delta(x)
};
struct RectangularBarrier {
  double height;  // V0 on [0, width]
  double width;
};

// Immutable 1D potential. The barrier occupies [0, width()].
class Barrier {
 public:
  using Shape = std::variant<FreeBarrier, DeltaBarrier, RectangularBarrier>;

  static Barrier free(Units u = {});
  static Barrier delta(double strength, Units u = {});
  static Barrier rectangular(double height, double width, Units u = {});

  const Shape& shape() const { return shape_; }
  const Units& units() const { return units_; }
  double width() const;
  bool is_free() const { return std::holds_alternative<FreeBarrier>(shape_); }

 private:
  Barrier(Shape s, Units u);
  Shape shape_;
  Units units_;
};

struct ScatteringAmplitudes {
  cplx t;
  cplx r;
  double E;
};

enum class Direction { plus, minus };

// p_E = sqrt(2 M E); DomainError for E <= 0.
double momentum_from_energy(double E, const Units& u);

// Transmission and reflection amplitudes for a wave incident from the left.
// OverflowError for rectangular barriers with kappa*L > 350.
ScatteringAmplitudes amplitudes(const Barrier& barrier, double E);

// <x|E,alpha>, normalized as sqrt(M/(2 pi hbar p_E)) times unit-amplitude
// incoming waves. Inside a rectangular barrier the solution matched at x = 0
// is returned.
cplx eigenfunction(const Barrier& barrier, double E, Direction alpha, double x);

// hbar d(arg t)/dE and hbar d(ln|t|)/dE.
double phase_time(const Barrier& barrier, double E);
double imaginary_time(const Barrier& barrier, double E);

}  // namespace weaktime
