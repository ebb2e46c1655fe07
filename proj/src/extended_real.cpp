// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/extended_real.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "inclusion_lab/errors.hpp"

namespace inclusion_lab {

ExtendedReal::ExtendedReal(double v) : value_(v) {
  if (!std::isfinite(v)) throw ContractViolation("ExtendedReal: finite value required");
}

ExtendedReal ExtendedReal::infinity() noexcept {
  ExtendedReal r;
  r.infinite_ = true;
  return r;
}

double ExtendedReal::value() const {
  if (infinite_) throw ContractViolation("ExtendedReal: value() of +inf");
  return value_;
}

ExtendedReal& ExtendedReal::operator+=(const ExtendedReal& other) noexcept {
  if (infinite_ || other.infinite_) {
    infinite_ = true;
    value_ = 0.0;
  } else {
    value_ += other.value_;
  }
  return *this;
}

bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

bool operator<(const ExtendedReal& a, const ExtendedReal& b) noexcept {
  if (a.infinite_) return false;
  if (b.infinite_) return true;
  return a.value_ < b.value_;
}

std::string ExtendedReal::to_string() const {
  if (infinite_) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value_);
  return std::string(buf, res.ptr);
}

ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) noexcept { return b < a ? b : a; }

ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) noexcept { return a < b ? b : a; }

ExtendedReal scale(const ExtendedReal& a, double factor) {
  if (a.is_infinite()) {
    if (factor > 0.0) return a;
    throw ContractViolation("ExtendedReal: scaling +inf by a non-positive factor");
  }
  return ExtendedReal(a.value() * factor);
}

ExtendedReal difference_quotient(const ExtendedReal& a, const ExtendedReal& b, double delta) {
  require(delta > 0.0, "difference_quotient: delta must be positive");
  require(b.is_finite(), "difference_quotient: base point must be in the effective domain");
  if (a.is_infinite()) return ExtendedReal::infinity();
  return ExtendedReal((a.value() - b.value()) / delta);
}

std::ostream& operator<<(std::ostream& os, const ExtendedReal& v) { return os << v.to_string(); }

}  // namespace inclusion_lab
