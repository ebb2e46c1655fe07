// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_EXTENDED_REAL_HPP
#define INCLUSION_LAB_EXTENDED_REAL_HPP

#include <iosfwd>
#include <string>

namespace inclusion_lab {

/// Element of R ∪ {+∞}.
///
/// The infinite value is a tag, never an IEEE infinity, so a finite
/// comparison can never be silently polluted: `value()` on the sentinel
/// throws, and every arithmetic operation treats +∞ as absorbing.
class ExtendedReal {
 public:
  /// Finite value. Non-finite input is a contract violation.
  ExtendedReal(double v = 0.0);  // NOLINT(google-explicit-constructor)

  static ExtendedReal infinity() noexcept;

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  /// The finite value; throws ContractViolation on the sentinel.
  double value() const;

  /// Finite value, or `fallback` on the sentinel.
  double value_or(double fallback) const noexcept {
    return infinite_ ? fallback : value_;
  }

  ExtendedReal& operator+=(const ExtendedReal& other) noexcept;

  friend ExtendedReal operator+(ExtendedReal a, const ExtendedReal& b) noexcept {
    a += b;
    return a;
  }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept;
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) noexcept;
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return !(b < a);
  }
  friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) noexcept { return b < a; }
  friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return !(a < b);
  }

  /// "inf" for the sentinel, shortest round-trip decimal otherwise.
  std::string to_string() const;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) noexcept;
ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) noexcept;

/// Scales a finite value; the sentinel stays +∞ for positive factors.
ExtendedReal scale(const ExtendedReal& a, double factor);

/// (a - b) / delta for finite b. +∞ if a is infinite.
ExtendedReal difference_quotient(const ExtendedReal& a, const ExtendedReal& b, double delta);

std::ostream& operator<<(std::ostream& os, const ExtendedReal& v);

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_EXTENDED_REAL_HPP
