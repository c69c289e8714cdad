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

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "contagion/common.hpp"
#include "contagion/infmax.hpp"
#include "contagion/influence.hpp"
#include "contagion/network.hpp"
#include "contagion/rng.hpp"

namespace contagion {

// One-factor Gaussian return model: r = drift + sigma (sqrt(rho) Z0 +
// sqrt(1-rho) Zi) with a common factor Z0 per scenario, and gross returns
// floored at `floor`.
struct ShockSpec {
  double rho = 0.6;
  double sigma = 0.15;
  double drift = -0.3;
  double floor = 0.0;
  int count = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("rho must lie in [0, 1)");
    if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (floor < 0.0) throw std::invalid_argument("floor must be >= 0");
    if (count < 0) throw std::invalid_argument("count must be >= 0");
  }
};

// Raw (unfloored) return matrix, count x m. Each scenario draws from its own
// substream, so results are independent of evaluation order.
inline Matrix sample_raw_returns(const ShockSpec& spec, int m) {
  spec.validate();
  Matrix r(spec.count, m);
  const double common_load = std::sqrt(spec.rho);
  const double idio_load = std::sqrt(1.0 - spec.rho);
  for (int s = 0; s < spec.count; ++s) {
    rng::Substream stream = rng::substream(spec.seed, rng::kShocks, static_cast<std::uint64_t>(s));
    const double z_common = stream.gauss();
    for (int j = 0; j < m; ++j) {
      r(s, j) = spec.drift + spec.sigma * (common_load * z_common + idio_load * stream.gauss());
    }
  }
  return r;
}

// Gross return matrix: max(1 + r, floor), componentwise.
inline Matrix sample_shocks(const ShockSpec& spec, int m) {
  Matrix gross = sample_raw_returns(spec, m);
  for (int s = 0; s < gross.rows(); ++s) {
    for (int j = 0; j < m; ++j) gross(s, j) = std::max(1.0 + gross(s, j), spec.floor);
  }
  return gross;
}

// Copy of the network with componentwise-repriced assets. The (I - C)
// factorization is shared, not recomputed.
inline EconomicNetwork apply_shock(const EconomicNetwork& net, const Vector& gross) {
  if (gross.size() != net.asset_count()) throw std::invalid_argument("gross: size != m");
  return net.with_prices(net.prices().cwiseProduct(gross));
}

enum class MaxShockMethod { Greedy, Exact };

struct MaxShockResult {
  IndexList zeroed_assets;
  double cost = 0.0;  // total price reduction
  EquilibriumState equilibrium;
  int default_count = 0;
};

namespace detail {

inline EquilibriumState zeroed_equilibrium(const EconomicNetwork& net, const Mask& zeroed) {
  Vector p = net.prices();
  for (int j = 0; j < net.asset_count(); ++j) {
    if (zeroed[static_cast<std::size_t>(j)]) p(j) = 0.0;
  }
  return solve_equilibrium(net.with_prices(std::move(p)), CascadeMode::BestCase);
}

}  // namespace detail

// Adversarial aggregate shock: choose assets to zero, total price reduction
// at most `budget`, maximizing the resulting best-case default count.
// Greedy adds the asset with the largest marginal default count and stops at
// the first unaffordable pick, which makes larger budgets extend smaller
// ones. Exact enumerates zero-or-keep subsets (m <= 20).
inline MaxShockResult find_max_shock(const EconomicNetwork& net, double budget,
                                     MaxShockMethod method = MaxShockMethod::Greedy) {
  if (budget < 0.0) throw std::invalid_argument("budget must be >= 0");
  const int m = net.asset_count();
  const Vector& p = net.prices();

  MaxShockResult result;
  Mask zeroed(static_cast<std::size_t>(m), 0);

  if (method == MaxShockMethod::Greedy) {
    double spent = 0.0;
    EquilibriumState eq = solve_equilibrium(net, CascadeMode::BestCase);
    int defaults = static_cast<int>(eq.failed.size());
    for (;;) {
      // Argmax of marginal defaults over remaining priced assets, ties to the
      // lowest index; the selection ignores the budget, and the loop stops at
      // the first unaffordable pick, so the chosen sequence for a larger
      // budget extends the sequence for a smaller one.
      int pick = -1;
      int pick_defaults = -1;
      EquilibriumState pick_eq;
      for (int j = 0; j < m; ++j) {
        if (zeroed[static_cast<std::size_t>(j)] || p(j) <= 0.0) continue;
        Mask trial = zeroed;
        trial[static_cast<std::size_t>(j)] = 1;
        EquilibriumState trial_eq = detail::zeroed_equilibrium(net, trial);
        const int trial_defaults = static_cast<int>(trial_eq.failed.size());
        if (trial_defaults > pick_defaults) {
          pick_defaults = trial_defaults;
          pick = j;
          pick_eq = std::move(trial_eq);
        }
      }
      if (pick < 0) break;
      if (!budget_allows(spent, p(pick), budget)) break;
      zeroed[static_cast<std::size_t>(pick)] = 1;
      spent += p(pick);
      defaults = pick_defaults;
      eq = std::move(pick_eq);
    }
    result.zeroed_assets = mask_to_indices(zeroed);
    result.cost = spent;
    result.equilibrium = std::move(eq);
    result.default_count = defaults;
    return result;
  }

  if (m > 20) throw instance_too_large_error("find_max_shock exact: m > 20");
  int best_defaults = -1;
  Mask best_mask(static_cast<std::size_t>(m), 0);
  double best_cost = 0.0;
  EquilibriumState best_eq;
  Mask current(static_cast<std::size_t>(m), 0);
  auto dfs = [&](auto&& self, int j, double spent) -> void {
    if (j == m) {
      // Defaults are monotone in the zeroed set; evaluating non-maximal sets
      // is redundant but harmless, so only obvious extensions are skipped.
      for (int q = 0; q < m; ++q) {
        if (!current[static_cast<std::size_t>(q)] && p(q) > 0.0 &&
            budget_allows(spent, p(q), budget)) {
          return;  // a superset leaf exists
        }
      }
      EquilibriumState eq = detail::zeroed_equilibrium(net, current);
      const int defaults = static_cast<int>(eq.failed.size());
      if (defaults > best_defaults) {
        best_defaults = defaults;
        best_mask = current;
        best_cost = spent;
        best_eq = std::move(eq);
      }
      return;
    }
    if (p(j) > 0.0 && budget_allows(spent, p(j), budget)) {
      current[static_cast<std::size_t>(j)] = 1;
      self(self, j + 1, spent + p(j));
      current[static_cast<std::size_t>(j)] = 0;
    }
    self(self, j + 1, spent);
  };
  dfs(dfs, 0, 0.0);
  result.zeroed_assets = mask_to_indices(best_mask);
  result.cost = best_cost;
  result.default_count = best_defaults;
  result.equilibrium = std::move(best_eq);
  return result;
}

// Simple undirected graph for the reduction gadgets.
struct GadgetSpec {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, no duplicates
  int independent_set_size = 0;            // k

  void validate() const {
    if (vertex_count <= 0) throw std::invalid_argument("gadget: vertex_count must be > 0");
    if (independent_set_size < 1 || independent_set_size > vertex_count) {
      throw std::invalid_argument("gadget: k out of range");
    }
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : edges) {
      if (i == j) throw std::invalid_argument("gadget: self-loop");
      if (i < 0 || j < 0 || i >= vertex_count || j >= vertex_count) {
        throw std::invalid_argument("gadget: edge endpoint out of range");
      }
      auto key = std::minmax(i, j);
      if (!seen.insert({key.first, key.second}).second) {
        throw std::invalid_argument("gadget: duplicate edge");
      }
    }
  }

  bool has_edge(int i, int j) const {
    for (auto [a, b] : edges) {
      if ((a == i && b == j) || (a == j && b == i)) return true;
    }
    return false;
  }
};

struct InterventionGadget {
  EconomicNetwork network;
  double budget = 0.0;        // k / |U|
  double target_saved = 0.0;  // k |U|
  int first_layer_count = 0;  // |U|, nodes 0..|U|-1 mirror the source graph
};

// Two-layer DAG network built from a graph so that the budgeted intervention
// problem encodes independent set. Every node fails without intervention,
// every influence threshold equals 1/|U|, and saving a first-layer node saves
// its |U|-1 second-layer children. All quantities are closed-form:
// beta = 1, underlying values = 1, theta_u = chat_u (1 + 1/|U|).
inline InterventionGadget build_is_gadget(const GadgetSpec& spec) {
  spec.validate();
  const int u_count = spec.vertex_count;
  const double w = 1.0 / u_count;

  // Second layer: one shared node per edge, two private nodes per non-edge.
  std::vector<std::vector<int>> parents;  // second-layer node -> first-layer parents
  for (auto [i, j] : spec.edges) parents.push_back({i, j});
  for (int i = 0; i < u_count; ++i) {
    for (int j = i + 1; j < u_count; ++j) {
      if (!spec.has_edge(i, j)) {
        parents.push_back({i});
        parents.push_back({j});
      }
    }
  }
  const int n = u_count + static_cast<int>(parents.size());

  Matrix c = Matrix::Zero(n, n);
  for (std::size_t row = 0; row < parents.size(); ++row) {
    for (int parent : parents[row]) c(u_count + static_cast<int>(row), parent) = w;
  }

  const Vector chat = Vector::Ones(n) - c.colwise().sum().transpose();
  Vector theta(n);
  for (int i = 0; i < n; ++i) theta(i) = chat(i) * (1.0 + w);

  EconomicNetwork net(c, Matrix::Identity(n, n), Vector::Ones(n), theta, Vector::Ones(n));
  const auto violations = validate_network(net);
  if (!violations.empty()) {
    throw infeasible_construction_error("is gadget: " + violations.front());
  }

  // The construction guarantees full failure and uniform influence
  // thresholds; verify rather than trust the algebra.
  const EquilibriumState eq = solve_equilibrium(net, CascadeMode::BestCase);
  if (static_cast<int>(eq.failed.size()) != n) {
    throw infeasible_construction_error("is gadget: not all nodes fail pre-intervention");
  }
  const InfluenceInstance inst = reduce_to_influence(net, eq);
  for (int u = 0; u < n; ++u) {
    if (std::abs(inst.theta_tilde()(u) - w) > 1e-9) {
      throw infeasible_construction_error("is gadget: influence threshold mismatch");
    }
  }

  InterventionGadget out{std::move(net), static_cast<double>(spec.independent_set_size) / u_count,
                         static_cast<double>(spec.independent_set_size) * u_count, u_count};
  return out;
}

struct MaxShockGadget {
  EconomicNetwork network;
  double budget = 0.0;          // k (asset prices are unit)
  double target_defaults = 0.0; // k |U|
};

// Asset-shock twin of the intervention gadget: assets mirror the graph's
// vertices, firms mirror vertices (self-firms) plus edge/non-edge slots, with
// C = 0 and beta = 0. Zeroing an independent set of k unit-price assets
// defaults exactly k |U| firms; any dependent choice defaults fewer.
inline MaxShockGadget build_maxshock_gadget(const GadgetSpec& spec) {
  spec.validate();
  const int u_count = spec.vertex_count;
  const double w = 1.0 / u_count;

  std::vector<std::vector<int>> holdings;  // firm -> held assets
  std::vector<double> theta_list;
  for (int i = 0; i < u_count; ++i) {  // self-firms
    holdings.push_back({i});
    theta_list.push_back(0.5 * w);
  }
  for (auto [i, j] : spec.edges) {  // one shared firm per edge
    holdings.push_back({i, j});
    theta_list.push_back(1.5 * w);
  }
  for (int i = 0; i < u_count; ++i) {  // two private firms per non-edge
    for (int j = i + 1; j < u_count; ++j) {
      if (!spec.has_edge(i, j)) {
        holdings.push_back({i});
        theta_list.push_back(0.5 * w);
        holdings.push_back({j});
        theta_list.push_back(0.5 * w);
      }
    }
  }
  const int n = static_cast<int>(holdings.size());
  const int m = u_count;

  Matrix d = Matrix::Zero(n, m);
  for (int f = 0; f < n; ++f) {
    for (int asset : holdings[static_cast<std::size_t>(f)]) d(f, asset) = w;
  }
  Vector theta = Eigen::Map<const Vector>(theta_list.data(), n);

  EconomicNetwork net(Matrix::Zero(n, n), d, Vector::Ones(m), theta, Vector::Zero(n));
  const auto violations = validate_network(net);
  if (!violations.empty()) {
    throw infeasible_construction_error("max-shock gadget: " + violations.front());
  }
  if (!solve_equilibrium(net, CascadeMode::BestCase).failed.empty()) {
    throw infeasible_construction_error("max-shock gadget: defaults before any shock");
  }
  return {std::move(net), static_cast<double>(spec.independent_set_size),
          static_cast<double>(spec.independent_set_size) * u_count};
}

struct ScenarioBatch {
  Matrix gross;             // count x m gross returns
  Vector weight;            // importance weight per scenario
  std::vector<int> default_count;
  Vector default_fraction;
  std::vector<char> adversarial;  // 1 where the scenario came from an atom
};

struct ImportanceOptions {
  double adversarial_fraction = 0.0;   // mixture probability of an atom draw
  double adversarial_budget = -1.0;    // price-reduction budget for the seeds;
                                       // < 0 means max(|drift| * ||p||_1,
                                       // max price), so at least one asset is
                                       // always affordable
  double atom_width = 0.02;            // stddev of the return-space component
                                       // placed around each adversarial atom
};

// Mixture sampler: plain one-factor Gaussian shocks blended with narrow
// Gaussian components centred on greedy max-shock prefixes. The proposal is a
// genuine density, so phi/q weights keep downstream expectations unbiased for
// the declared model.
inline ScenarioBatch importance_weighted_batch(const EconomicNetwork& net, const ShockSpec& spec,
                                               const ImportanceOptions& options, int threads = 1) {
  spec.validate();
  if (options.adversarial_fraction < 0.0 || options.adversarial_fraction > 1.0) {
    throw std::invalid_argument("adversarial_fraction must lie in [0, 1]");
  }
  const int m = net.asset_count();
  const double frac = options.adversarial_fraction;
  if (frac > 0.0 && spec.sigma <= 0.0) {
    throw std::invalid_argument("importance sampling requires sigma > 0");
  }

  // Adversarial atoms: greedy max-shock prefixes, as return vectors. Zeroed
  // assets sit at gross 0 (return -1); the rest sit at the drift.
  std::vector<Vector> atoms;
  if (frac > 0.0) {
    const double budget =
        options.adversarial_budget >= 0.0
            ? options.adversarial_budget
            : std::max(std::abs(spec.drift) * net.prices().lpNorm<1>(),
                       net.prices().size() > 0 ? net.prices().maxCoeff() : 0.0);
    const MaxShockResult shock = find_max_shock(net, budget, MaxShockMethod::Greedy);
    Vector center = Vector::Constant(m, spec.drift);
    for (int asset : shock.zeroed_assets) {
      center(asset) = -1.0;
      atoms.push_back(center);  // nested prefixes in greedy order
    }
  }
  const int atom_count = static_cast<int>(atoms.size());
  const bool mix_atoms = frac > 0.0 && atom_count > 0;

  // One-factor model density: covariance sigma^2 ((1-rho) I + rho 1 1^T).
  const double a_diag = spec.sigma * spec.sigma * (1.0 - spec.rho);
  const double b_rank1 = spec.sigma * spec.sigma * spec.rho;
  const double log_det_phi =
      (m - 1) * std::log(a_diag) + std::log(a_diag + b_rank1 * m) + m * std::log(2.0 * M_PI);
  auto log_phi = [&](const Vector& r) {
    const Vector y = r - Vector::Constant(m, spec.drift);
    const double s = y.sum();
    const double quad = (y.squaredNorm() - b_rank1 / (a_diag + b_rank1 * m) * s * s) / a_diag;
    return -0.5 * (quad + log_det_phi);
  };
  const double aw = options.atom_width;
  const double log_norm_atom = -0.5 * m * std::log(2.0 * M_PI * aw * aw);
  auto log_atom = [&](const Vector& r, const Vector& center) {
    return log_norm_atom - 0.5 * (r - center).squaredNorm() / (aw * aw);
  };
  auto log_sum_exp = [](double x, double y) {
    const double hi = std::max(x, y);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log(std::exp(x - hi) + std::exp(y - hi));
  };

  ScenarioBatch batch;
  batch.gross = Matrix(spec.count, m);
  batch.weight = Vector::Ones(spec.count);
  batch.default_count.assign(static_cast<std::size_t>(spec.count), 0);
  batch.default_fraction = Vector::Zero(spec.count);
  batch.adversarial.assign(static_cast<std::size_t>(spec.count), 0);

  const double common_load = std::sqrt(spec.rho);
  const double idio_load = std::sqrt(1.0 - spec.rho);

  rng::parallel_for(spec.count, threads, [&](int s) {
    rng::Substream stream = rng::substream(spec.seed, rng::kMixture, static_cast<std::uint64_t>(s));
    Vector r(m);
    bool from_atom = false;
    if (mix_atoms && stream.u01() < frac) {
      from_atom = true;
      const int a = std::min<int>(atom_count - 1, static_cast<int>(stream.u01() * atom_count));
      for (int j = 0; j < m; ++j) r(j) = atoms[static_cast<std::size_t>(a)](j) + aw * stream.gauss();
    } else {
      const double z_common = stream.gauss();
      for (int j = 0; j < m; ++j) {
        r(j) = spec.drift + spec.sigma * (common_load * z_common + idio_load * stream.gauss());
      }
    }
    double weight = 1.0;
    if (mix_atoms) {
      const double lp = log_phi(r);
      double lq_atoms = -std::numeric_limits<double>::infinity();
      for (const Vector& center : atoms) lq_atoms = log_sum_exp(lq_atoms, log_atom(r, center));
      const double lq = log_sum_exp(std::log1p(-frac) + lp,
                                    std::log(frac) - std::log(atom_count) + lq_atoms);
      weight = std::exp(lp - lq);
    }

    Vector gross(m);
    for (int j = 0; j < m; ++j) gross(j) = std::max(1.0 + r(j), spec.floor);
    const EquilibriumState eq =
        solve_equilibrium(apply_shock(net, gross), CascadeMode::BestCase);

    batch.gross.row(s) = gross.transpose();
    batch.weight(s) = weight;
    batch.default_count[static_cast<std::size_t>(s)] = static_cast<int>(eq.failed.size());
    batch.default_fraction(s) =
        static_cast<double>(eq.failed.size()) / static_cast<double>(net.firm_count());
    batch.adversarial[static_cast<std::size_t>(s)] = from_atom ? 1 : 0;
  });
  return batch;
}

}  // namespace contagion
