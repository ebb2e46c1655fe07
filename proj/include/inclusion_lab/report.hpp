// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_REPORT_HPP
#define INCLUSION_LAB_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace inclusion_lab {

/// Data needed to re-evaluate one sampled inequality.
struct Witness {
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> vectors;
};

/// Outcome of a sampled hypothesis check.
///
/// Margins are normalized slacks: for an inequality lhs >= rhs the margin is
/// (lhs - rhs) / max(1, |lhs|, |rhs|), so a negative margin is a violation
/// and rounding noise stays at machine-epsilon scale regardless of the sample
/// magnitude. `witness` holds the worst sample (the violating one on failure).
struct HypothesisReport {
  std::string hypothesis;
  bool pass = true;
  double min_margin = 0.0;
  std::vector<double> margins;
  std::optional<Witness> witness;
  std::vector<std::string> notes;

  /// Records one sample. `tolerance` is the admissible negative margin.
  void record(double margin, double tolerance, const Witness& sample);

  std::size_t samples() const noexcept { return margins.size(); }

  /// JSON object with fields hypothesis, pass, min_margin, samples, witness, notes.
  std::string to_json() const;
};

/// Normalized slack of lhs >= rhs.
double margin_ge(double lhs, double rhs);

/// Normalized slack of lhs <= rhs.
inline double margin_le(double lhs, double rhs) { return margin_ge(rhs, lhs); }

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_REPORT_HPP
