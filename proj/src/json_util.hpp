// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Internal JSON helpers shared by the report writers, the config parser and
// the C API. Not installed.

#ifndef INCLUSION_LAB_SRC_JSON_UTIL_HPP
#define INCLUSION_LAB_SRC_JSON_UTIL_HPP

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

#include "inclusion_lab/extended_real.hpp"
#include "inclusion_lab/report.hpp"

namespace inclusion_lab::detail {

using json = nlohmann::ordered_json;

json to_json(const HypothesisReport& report);
json to_json(const Witness& witness);

inline json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Numbers for finite values, the string "inf" for the sentinel.
inline json extended_json(const ExtendedReal& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

}  // namespace inclusion_lab::detail

#endif  // INCLUSION_LAB_SRC_JSON_UTIL_HPP
