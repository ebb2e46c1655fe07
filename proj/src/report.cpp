// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/report.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"

namespace inclusion_lab {

double margin_ge(double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return (lhs - rhs) / scale;
}

void HypothesisReport::record(double margin, double tolerance, const Witness& sample) {
  const bool first = margins.empty();
  margins.push_back(margin);
  if (first || margin < min_margin) {
    min_margin = margin;
    witness = sample;
  }
  if (!(margin >= -tolerance)) pass = false;
}

std::string HypothesisReport::to_json() const { return detail::to_json(*this).dump(2); }

namespace detail {

json to_json(const Witness& witness) {
  json out = json::object();
  for (const auto& [k, v] : witness.scalars) out[k] = v;
  for (const auto& [k, v] : witness.vectors) out[k] = v;
  return out;
}

json to_json(const HypothesisReport& report) {
  json out;
  out["hypothesis"] = report.hypothesis;
  out["pass"] = report.pass;
  out["min_margin"] = report.min_margin;
  out["samples"] = report.samples();
  out["witness"] = report.witness ? to_json(*report.witness) : json(nullptr);
  out["notes"] = report.notes;
  return out;
}

}  // namespace detail
}  // namespace inclusion_lab
