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
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "contagion/common.hpp"
#include "contagion/network.hpp"
#include "contagion/rng.hpp"

namespace contagion {

// Threshold randomization attached directly to the nonnegative influence
// thresholds. Fixed is the degenerate band h = 0; UniformBand draws each
// node's threshold independently and uniformly on
// [max(0, t(1-h)), t(1+h)].
struct ThresholdModel {
  enum class Kind { Fixed, UniformBand };

  Kind kind = Kind::Fixed;
  double band_halfwidth = 0.0;

  static ThresholdModel fixed() { return {}; }

  static ThresholdModel uniform_band(double h) {
    if (h < 0.0 || h > 1.0) throw std::invalid_argument("band_halfwidth must lie in [0, 1]");
    return {Kind::UniformBand, h};
  }

  bool is_random() const { return kind == Kind::UniformBand && band_halfwidth > 0.0; }

  // Upper support point of the threshold distribution for a node with
  // nominal threshold t.
  double theta_max(double t) const {
    return kind == Kind::UniformBand ? t * (1.0 + band_halfwidth) : t;
  }
};

// Reduction of a post-shock economic network to the node set T that fails
// without intervention. Reversing node u's default exerts influence
// A(v, u) = beta_u * [(I-C)^{-1}]_{v,u} on every other node v in T; the
// self-term is folded into theta_tilde instead, so A has a zero diagonal and
// the influence of a reversed set S on v is simply [A 1_S]_v.
class InfluenceInstance {
 public:
  // Dense representation: the k x k influence matrix is materialized.
  InfluenceInstance(Matrix influence, Vector theta_tilde, Vector weights,
                    std::vector<int> node_map)
      : k_(static_cast<int>(theta_tilde.size())),
        theta_tilde_(std::move(theta_tilde)),
        weights_(std::move(weights)),
        node_map_(std::move(node_map)),
        dense_(std::move(influence)) {
    finish_init();
  }

  // Operator representation for large T: keeps the shared factorization and
  // answers influence queries with one solve instead of storing k^2 entries.
  InfluenceInstance(std::shared_ptr<const NetworkFactorization> fact, Vector beta_full,
                    Vector self_influence, Vector theta_tilde, Vector weights,
                    std::vector<int> node_map)
      : k_(static_cast<int>(theta_tilde.size())),
        theta_tilde_(std::move(theta_tilde)),
        weights_(std::move(weights)),
        node_map_(std::move(node_map)),
        fact_(std::move(fact)),
        beta_full_(std::move(beta_full)),
        self_influence_(std::move(self_influence)) {
    finish_init();
  }

  int node_count() const { return k_; }
  const Vector& theta_tilde() const { return theta_tilde_; }
  const Vector& weights() const { return weights_; }
  const std::vector<int>& node_map() const { return node_map_; }
  const IndexList& free_seeds() const { return free_seeds_; }
  bool is_dense() const { return dense_.has_value(); }
  const Matrix& dense_influence() const { return *dense_; }

  // f(S) on the reduced coordinates. f(empty) = 0 and no node influences
  // itself.
  Vector influence_of(const Mask& active) const {
    check_size(active);
    if (dense_) {
      Vector f = Vector::Zero(k_);
      for (int u = 0; u < k_; ++u) {
        if (active[static_cast<std::size_t>(u)]) f += dense_->col(u);
      }
      return f;
    }
    const int n = static_cast<int>(beta_full_.size());
    Vector rhs = Vector::Zero(n);
    for (int u = 0; u < k_; ++u) {
      if (active[static_cast<std::size_t>(u)]) {
        const int orig = node_map_[static_cast<std::size_t>(u)];
        rhs(orig) += beta_full_(orig);
      }
    }
    const Vector books = fact_->lu.solve(rhs);
    Vector f(k_);
    for (int v = 0; v < k_; ++v) {
      f(v) = books(node_map_[static_cast<std::size_t>(v)]);
      if (active[static_cast<std::size_t>(v)]) f(v) -= self_influence_(v);
    }
    return f;
  }

  Vector influence_of(const IndexList& active) const {
    return influence_of(make_mask(k_, active));
  }

  // Column u of the influence matrix: f({u}).
  Vector influence_column(int u) const {
    Mask single(static_cast<std::size_t>(k_), 0);
    single[static_cast<std::size_t>(u)] = 1;
    if (dense_) return dense_->col(u);
    return influence_of(single);
  }

  // Row u of the influence matrix: the influence each node exerts on u.
  Vector influence_row(int u) const {
    if (dense_) return dense_->row(u).transpose();
    const int n = static_cast<int>(beta_full_.size());
    Vector rhs = Vector::Zero(n);
    rhs(node_map_[static_cast<std::size_t>(u)]) = 1.0;
    const Vector row = fact_->lu.transpose().solve(rhs);
    Vector out(k_);
    for (int v = 0; v < k_; ++v) {
      const int orig = node_map_[static_cast<std::size_t>(v)];
      out(v) = v == u ? 0.0 : row(orig) * beta_full_(orig);
    }
    return out;
  }

  // Per-column totals of the influence matrix: total influence each node
  // exerts on the rest of the instance.
  Vector influence_column_sums() const {
    if (dense_) return dense_->colwise().sum().transpose();
    const int n = static_cast<int>(beta_full_.size());
    Vector rhs = Vector::Zero(n);
    for (int v = 0; v < k_; ++v) rhs(node_map_[static_cast<std::size_t>(v)]) = 1.0;
    const Vector sums = fact_->lu.transpose().solve(rhs);
    Vector out(k_);
    for (int v = 0; v < k_; ++v) {
      const int orig = node_map_[static_cast<std::size_t>(v)];
      out(v) = sums(orig) * beta_full_(orig) - self_influence_(v);
    }
    return out;
  }

  double weight_of(const Mask& active) const {
    check_size(active);
    double w = 0.0;
    for (int u = 0; u < k_; ++u) {
      if (active[static_cast<std::size_t>(u)]) w += weights_(u);
    }
    return w;
  }

  double total_weight() const { return weights_.sum(); }

 private:
  void finish_init() {
    if (weights_.size() == 0) weights_ = Vector::Ones(k_);
    if (weights_.size() != k_ || static_cast<int>(node_map_.size()) != k_) {
      throw std::invalid_argument("influence instance: inconsistent dimensions");
    }
    for (int u = 0; u < k_; ++u) {
      if (theta_tilde_(u) < 0.0) throw std::invalid_argument("theta_tilde: negative entry");
      if (theta_tilde_(u) == 0.0) free_seeds_.push_back(u);
    }
  }

  void check_size(const Mask& active) const {
    if (static_cast<int>(active.size()) != k_) {
      throw std::invalid_argument("active set: size mismatch");
    }
  }

  int k_ = 0;
  Vector theta_tilde_;
  Vector weights_;
  std::vector<int> node_map_;
  IndexList free_seeds_;

  std::optional<Matrix> dense_;

  std::shared_ptr<const NetworkFactorization> fact_;
  Vector beta_full_;
  Vector self_influence_;
};

struct ReduceOptions {
  // Above this node count the influence matrix is not materialized; queries
  // go through the cached factorization instead.
  int dense_cutoff = 5000;
  // Optional node weights: size n (per original firm, mapped through T),
  // size |T| (used directly), or empty for the cardinality objective.
  Vector weights;
};

// Builds the influence-maximization instance for the failed set T of the
// given equilibrium. theta_tilde is the book-value slack that must be
// recovered to reverse each node's failure, net of the node's own failure
// cost; negative slack is clamped to zero and such nodes are recorded as
// free seeds (activatable at zero cost).
inline InfluenceInstance reduce_to_influence(const EconomicNetwork& net,
                                             const EquilibriumState& eq,
                                             const ReduceOptions& options = {}) {
  const IndexList& t = eq.failed;
  if (t.empty()) throw empty_failed_set_error("reduce_to_influence: no failed firms");
  const int n = net.firm_count();
  const int k = static_cast<int>(t.size());
  const Vector& beta = net.failure_costs();
  const Vector& theta = net.thresholds();
  const Vector& chat = net.chat();

  // Columns of (I - C)^{-1} for the failed firms.
  Matrix unit_rhs = Matrix::Zero(n, k);
  for (int j = 0; j < k; ++j) unit_rhs(t[static_cast<std::size_t>(j)], j) = 1.0;
  const Matrix columns = net.solve_books(unit_rhs);

  Vector theta_tilde(k);
  Vector self_influence(k);
  for (int j = 0; j < k; ++j) {
    const int u = t[static_cast<std::size_t>(j)];
    self_influence(j) = columns(u, j) * beta(u);
    const double raw = theta(u) / chat(u) - eq.book_values(u) - self_influence(j);
    theta_tilde(j) = std::max(raw, 0.0);
  }

  Vector weights = options.weights;
  if (weights.size() == n && n != k) {
    Vector mapped(k);
    for (int j = 0; j < k; ++j) mapped(j) = weights(t[static_cast<std::size_t>(j)]);
    weights = std::move(mapped);
  } else if (weights.size() != 0 && weights.size() != k) {
    throw std::invalid_argument("weights: size must be n, |T|, or 0");
  }
  if (weights.size() != 0 && weights.minCoeff() < 0.0) {
    throw std::invalid_argument("weights: negative entry");
  }

  std::vector<int> node_map(t.begin(), t.end());
  if (k <= options.dense_cutoff) {
    Matrix a = Matrix::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      const int u = t[static_cast<std::size_t>(j)];
      for (int i = 0; i < k; ++i) {
        if (i == j) continue;
        a(i, j) = columns(t[static_cast<std::size_t>(i)], j) * beta(u);
      }
    }
    return InfluenceInstance(std::move(a), std::move(theta_tilde), std::move(weights),
                             std::move(node_map));
  }
  return InfluenceInstance(net.factorization(), beta, std::move(self_influence),
                           std::move(theta_tilde), std::move(weights), std::move(node_map));
}

// Lifts a reduced payment vector to a full-length intervention vector.
inline Vector lift_payments(const InfluenceInstance& inst, const Vector& payments, int n) {
  if (payments.size() != inst.node_count()) {
    throw std::invalid_argument("payments: size mismatch");
  }
  Vector gamma = Vector::Zero(n);
  for (int u = 0; u < inst.node_count(); ++u) {
    gamma(inst.node_map()[static_cast<std::size_t>(u)]) += payments(u);
  }
  return gamma;
}

// Deterministic draw of the threshold vector. Fixed returns theta_tilde
// unchanged; UniformBand draws each node independently from its band. Nodes
// with zero nominal threshold stay at zero, so free seeds stay free.
inline Vector sample_thresholds(const InfluenceInstance& inst, const ThresholdModel& model,
                                std::uint64_t seed) {
  const Vector& nominal = inst.theta_tilde();
  if (!model.is_random()) return nominal;
  rng::Substream stream = rng::substream(seed, rng::kThresholds);
  Vector out(nominal.size());
  for (int u = 0; u < nominal.size(); ++u) {
    const double lo = std::max(0.0, nominal(u) * (1.0 - model.band_halfwidth));
    const double hi = nominal(u) * (1.0 + model.band_halfwidth);
    out(u) = lo + (hi - lo) * stream.u01();
  }
  return out;
}

}  // namespace contagion
