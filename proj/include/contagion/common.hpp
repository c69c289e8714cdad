// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace contagion {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<int>;  // sorted, unique node indices
using Mask = std::vector<char>;      // 0/1 membership by node index

// Absolute slack used in every threshold comparison: a firm fails when its
// value is below threshold by more than this, and an influence activation
// fires when value + payment is within this of the threshold. A single shared
// constant keeps the economic and reduced-instance cascades consistent on
// boundary cases.
inline constexpr double kThresholdTol = 1e-12;

// Relative + absolute slack for budget feasibility checks (costs are sums of
// solver-derived quantities, so exact comparison against the budget would
// reject exact top-up plans by one ulp).
inline constexpr double kBudgetTol = 1e-12;

struct singular_system_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct empty_failed_set_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct instance_too_large_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct infeasible_construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Mask make_mask(int n, const IndexList& members) {
  Mask mask(static_cast<std::size_t>(n), 0);
  for (int i : members) {
    if (i < 0 || i >= n) throw std::out_of_range("node index out of range: " + std::to_string(i));
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

inline IndexList mask_to_indices(const Mask& mask) {
  IndexList out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

inline int mask_count(const Mask& mask) {
  int c = 0;
  for (char m : mask) c += (m != 0);
  return c;
}

}  // namespace contagion
