#pragma once

#include <cmath>
#include <numbers>

#include "gaugelab/core/error.hpp"

namespace gaugelab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical constants every phase and flux is resolved through.
///
/// Natural units (hbar = c = e = 1) are the default, which puts the flux
/// quantum at 2*pi. Gaussian-CGS style values can be supplied instead; the
/// formulas below never assume natural units.
class UnitSystem {
 public:
  UnitSystem() = default;
  UnitSystem(double hbar, double c, double e) : hbar_(hbar), c_(c), e_(e) {
    if (!(hbar > 0.0) || !(c > 0.0) || !(e > 0.0) || !std::isfinite(hbar) || !std::isfinite(c) ||
        !std::isfinite(e)) {
      throw InvalidArgument("UnitSystem: hbar, c and e must be finite and strictly positive");
    }
  }

  static UnitSystem natural() { return {}; }

  double hbar() const noexcept { return hbar_; }
  double c() const noexcept { return c_; }
  double e() const noexcept { return e_; }
  double planck() const noexcept { return kTwoPi * hbar_; }

  /// h c / e for the elementary charge.
  double flux_quantum() const noexcept { return kTwoPi * hbar_ * c_ / e_; }

  friend bool operator==(const UnitSystem&, const UnitSystem&) = default;

 private:
  double hbar_ = 1.0;
  double c_ = 1.0;
  double e_ = 1.0;
};

/// Magnetic flux through a surface; positive along +z.
class Flux {
 public:
  constexpr Flux() = default;
  explicit Flux(double value) : value_(value) {
    if (!std::isfinite(value)) throw InvalidArgument("Flux must be finite");
  }

  /// `k` elementary flux quanta (h c / e) in the given units.
  static Flux quanta(double k, const UnitSystem& u) { return Flux(k * u.flux_quantum()); }

  double value() const noexcept { return value_; }
  double in_quanta(const UnitSystem& u) const noexcept { return value_ / u.flux_quantum(); }

  friend bool operator==(const Flux&, const Flux&) = default;

 private:
  double value_ = 0.0;
};

/// Particle charge; non-integer multiples of e are allowed for scaling studies.
class Charge {
 public:
  constexpr Charge() = default;
  explicit Charge(double value) : value_(value) {
    if (!std::isfinite(value)) throw InvalidArgument("Charge must be finite");
  }

  static Charge elementary(double multiple, const UnitSystem& u) { return Charge(multiple * u.e()); }

  double value() const noexcept { return value_; }
  double in_elementary(const UnitSystem& u) const noexcept { return value_ / u.e(); }

  friend bool operator==(const Charge&, const Charge&) = default;

 private:
  double value_ = 1.0;
};

}  // namespace gaugelab
