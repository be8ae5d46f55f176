#pragma once

#include <cstdint>

namespace fransonlab {

/// Optical wavelength, stored in meters. Construction rejects non-positive values.
class Wavelength {
 public:
  static Wavelength from_m(double meters);
  static Wavelength from_nm(double nanometers) { return from_m(nanometers * 1e-9); }

  double m() const { return meters_; }
  double nm() const { return meters_ * 1e9; }

  friend bool operator==(Wavelength a, Wavelength b) { return a.meters_ == b.meters_; }

 private:
  explicit Wavelength(double meters) : meters_(meters) {}
  double meters_;
};

/// Time interval in seconds. Sign is not restricted here; operations that
/// require a non-negative duration (delays, dead times, gate widths) check it
/// themselves.
class Duration {
 public:
  constexpr Duration() = default;
  static constexpr Duration from_s(double s) { return Duration(s); }
  static constexpr Duration from_ms(double ms) { return Duration(ms * 1e-3); }
  static constexpr Duration from_us(double us) { return Duration(us * 1e-6); }
  static constexpr Duration from_ns(double ns) { return Duration(ns * 1e-9); }
  static constexpr Duration from_ps(double ps) { return Duration(ps * 1e-12); }

  constexpr double s() const { return seconds_; }
  constexpr double ps() const { return seconds_ * 1e12; }
  std::int64_t round_ps() const;

  friend constexpr Duration operator+(Duration a, Duration b) {
    return Duration(a.seconds_ + b.seconds_);
  }
  friend constexpr Duration operator-(Duration a, Duration b) {
    return Duration(a.seconds_ - b.seconds_);
  }
  friend constexpr Duration operator*(double k, Duration d) { return Duration(k * d.seconds_); }
  friend constexpr bool operator<(Duration a, Duration b) { return a.seconds_ < b.seconds_; }
  friend constexpr bool operator==(Duration a, Duration b) { return a.seconds_ == b.seconds_; }

 private:
  explicit constexpr Duration(double s) : seconds_(s) {}
  double seconds_ = 0.0;
};

}  // namespace fransonlab
