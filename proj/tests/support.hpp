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

// Test-only generators and oracles. The oracles deliberately re-derive
// results through independent code paths (enumeration, truncated series,
// quadrature) so library changes cannot silently agree with themselves.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "contagion/common.hpp"
#include "contagion/infmax.hpp"
#include "contagion/influence.hpp"
#include "contagion/network.hpp"
#include "contagion/rng.hpp"

namespace testsupport {

using contagion::EconomicNetwork;
using contagion::IndexList;
using contagion::Mask;
using contagion::Matrix;
using contagion::Vector;

struct NetworkParams {
  double max_column_sum = 0.85;
  double edge_density = 0.6;
  double beta_scale = 0.6;       // relative to mean underlying value
  double theta_lo = 0.7;         // thresholds as a share of default-free value
  double theta_hi = 1.25;
};

// Random valid network with thresholds straddling the default-free market
// values, so cascades of varying depth occur.
inline EconomicNetwork random_network(contagion::rng::Substream& stream, int n,
                                      const NetworkParams& params = {}) {
  Matrix c = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i != j && stream.u01() < params.edge_density) c(i, j) = stream.u01();
    }
    const double sum = c.col(j).sum();
    if (sum > 0.0) c.col(j) *= params.max_column_sum * stream.u01() / sum;
  }
  Vector p(n);
  for (int j = 0; j < n; ++j) p(j) = 0.5 + 1.5 * stream.u01();
  Vector beta(n);
  for (int i = 0; i < n; ++i) beta(i) = params.beta_scale * stream.u01();

  EconomicNetwork base(c, Matrix::Identity(n, n), p, Vector::Zero(n), beta);
  const Vector v_clean = contagion::market_values(base, Mask(static_cast<std::size_t>(n), 0));
  Vector theta(n);
  for (int i = 0; i < n; ++i) {
    theta(i) = v_clean(i) * (params.theta_lo + (params.theta_hi - params.theta_lo) * stream.u01());
  }
  return EconomicNetwork(c, Matrix::Identity(n, n), p, theta, beta);
}

// All self-consistent failure sets by exhaustive enumeration (n <= ~16).
inline std::vector<Mask> enumerate_equilibria(const EconomicNetwork& net) {
  const int n = net.firm_count();
  std::vector<Mask> fixed_points;
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    Mask mask(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
    const Vector v = contagion::market_values(net, mask);
    bool consistent = true;
    for (int i = 0; i < n; ++i) {
      const bool below = v(i) < net.thresholds()(i) - contagion::kThresholdTol;
      if (below != (mask[static_cast<std::size_t>(i)] != 0)) {
        consistent = false;
        break;
      }
    }
    if (consistent) fixed_points.push_back(mask);
  }
  return fixed_points;
}

inline bool subset_of(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

// Set-based cascade closure, recomputed from raw matrix entries each pass.
inline std::set<int> closure_oracle(const Matrix& a, const Vector& theta, const Vector& x,
                                    const std::set<int>& seeds) {
  const int k = static_cast<int>(theta.size());
  std::set<int> active = seeds;
  for (;;) {
    std::set<int> next = active;
    for (int v = 0; v < k; ++v) {
      if (next.count(v)) continue;
      double f = 0.0;
      for (int u : active) {
        if (u != v) f += a(v, u);
      }
      if (f + x(v) >= theta(v) - contagion::kThresholdTol) next.insert(v);
    }
    if (next == active) return active;
    active.swap(next);
  }
}

// Exact expected activated weight under independent uniform threshold bands,
// by enumerating the product cells cut by every reachable influence level.
// Feasible for k <= 4.
inline double sigma_by_quadrature(const contagion::InfluenceInstance& inst, const Vector& x,
                                  double band_halfwidth) {
  const int k = inst.node_count();
  if (k > 5) throw std::invalid_argument("quadrature oracle: k too large");
  const Vector& nominal = inst.theta_tilde();

  // All influence levels f(S)_u + x_u over subsets S.
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(k));
  for (unsigned bits = 0; bits < (1u << k); ++bits) {
    Mask active(static_cast<std::size_t>(k), 0);
    for (int u = 0; u < k; ++u) active[static_cast<std::size_t>(u)] = (bits >> u) & 1u;
    const Vector f = inst.influence_of(active);
    for (int u = 0; u < k; ++u) levels[static_cast<std::size_t>(u)].push_back(f(u) + x(u));
  }

  struct Cell {
    double lo, hi;
  };
  std::vector<std::vector<Cell>> cells(static_cast<std::size_t>(k));
  for (int u = 0; u < k; ++u) {
    const double lo = std::max(0.0, nominal(u) * (1.0 - band_halfwidth));
    const double hi = nominal(u) * (1.0 + band_halfwidth);
    if (hi <= lo) {
      cells[static_cast<std::size_t>(u)].push_back({lo, lo});
      continue;
    }
    std::vector<double> cuts{lo, hi};
    for (double lvl : levels[static_cast<std::size_t>(u)]) {
      if (lvl > lo && lvl < hi) cuts.push_back(lvl);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      cells[static_cast<std::size_t>(u)].push_back({cuts[i], cuts[i + 1]});
    }
  }

  double expectation = 0.0;
  std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
  for (;;) {
    double probability = 1.0;
    Vector theta(k);
    for (int u = 0; u < k; ++u) {
      const Cell cell = cells[static_cast<std::size_t>(u)][pick[static_cast<std::size_t>(u)]];
      const double lo = std::max(0.0, nominal(u) * (1.0 - band_halfwidth));
      const double hi = nominal(u) * (1.0 + band_halfwidth);
      if (hi <= lo) {
        theta(u) = lo;
      } else {
        probability *= (cell.hi - cell.lo) / (hi - lo);
        theta(u) = 0.5 * (cell.lo + cell.hi);
      }
    }
    if (probability > 0.0) {
      expectation +=
          probability * contagion::calc_frac_cascade(inst, x, theta).weight;
    }
    int u = 0;
    while (u < k) {
      if (++pick[static_cast<std::size_t>(u)] < cells[static_cast<std::size_t>(u)].size()) break;
      pick[static_cast<std::size_t>(u)] = 0;
      ++u;
    }
    if (u == k) break;
  }
  return expectation;
}

// Independent-set checks by direct enumeration.
inline bool has_independent_set(int vertices, const std::vector<std::pair<int, int>>& edges,
                                int k) {
  for (unsigned bits = 0; bits < (1u << vertices); ++bits) {
    if (__builtin_popcount(bits) != k) continue;
    bool independent = true;
    for (auto [i, j] : edges) {
      if (((bits >> i) & 1u) && ((bits >> j) & 1u)) {
        independent = false;
        break;
      }
    }
    if (independent) return true;
  }
  return false;
}

// Synthetic influence instance with nonnegative zero-diagonal matrix.
inline contagion::InfluenceInstance random_instance(contagion::rng::Substream& stream, int k,
                                                    double density = 0.5,
                                                    double zero_threshold_prob = 0.0) {
  Matrix a = Matrix::Zero(k, k);
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      if (u != v && stream.u01() < density) a(v, u) = stream.u01();
    }
  }
  Vector tt(k);
  for (int u = 0; u < k; ++u) {
    tt(u) = stream.u01() < zero_threshold_prob ? 0.0 : 0.2 + 1.3 * stream.u01();
  }
  std::vector<int> node_map(static_cast<std::size_t>(k));
  for (int u = 0; u < k; ++u) node_map[static_cast<std::size_t>(u)] = u;
  return contagion::InfluenceInstance(std::move(a), std::move(tt), Vector(), std::move(node_map));
}

}  // namespace testsupport
