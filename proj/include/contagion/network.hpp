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

#include <algorithm>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "contagion/common.hpp"

namespace contagion {

// Shared LU of (I - C) plus the retained-ownership diagonal. Shocked copies
// of a network differ only in asset prices, so they share this object.
struct NetworkFactorization {
  Eigen::PartialPivLU<Matrix> lu;  // factorization of (I - C)
  Vector chat;                     // chat[i] = 1 - sum_j C(j, i)
  double rcond = 0.0;
};

// Cross-holdings economic network: n firms holding shares of each other (C)
// and of m underlying assets (D) priced at p. A firm whose market value drops
// below its threshold theta incurs failure cost beta, which propagates
// through the holding network.
class EconomicNetwork {
 public:
  EconomicNetwork(Matrix cross_holdings, Matrix asset_shares, Vector prices, Vector thresholds,
                  Vector failure_costs, std::vector<std::string> labels = {})
      : c_(std::move(cross_holdings)),
        d_(std::move(asset_shares)),
        p_(std::move(prices)),
        theta_(std::move(thresholds)),
        beta_(std::move(failure_costs)),
        labels_(std::move(labels)) {
    const int n = static_cast<int>(c_.rows());
    if (labels_.empty()) {
      labels_.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) labels_.push_back("n" + std::to_string(i));
    }
    auto fact = std::make_shared<NetworkFactorization>();
    Matrix system = Matrix::Identity(n, n) - c_;
    fact->lu = Eigen::PartialPivLU<Matrix>(system);
    fact->rcond = fact->lu.rcond();
    fact->chat = Vector::Ones(n) - c_.colwise().sum().transpose();
    fact_ = std::move(fact);
  }

  int firm_count() const { return static_cast<int>(c_.rows()); }
  int asset_count() const { return static_cast<int>(d_.cols()); }

  const Matrix& cross_holdings() const { return c_; }
  const Matrix& asset_shares() const { return d_; }
  const Vector& prices() const { return p_; }
  const Vector& thresholds() const { return theta_; }
  const Vector& failure_costs() const { return beta_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Vector& chat() const { return fact_->chat; }

  Vector underlying_values() const { return d_ * p_; }

  // (I - C)^{-1} rhs through the cached factorization.
  Vector solve_books(const Vector& rhs) const {
    require_invertible();
    return fact_->lu.solve(rhs);
  }

  Matrix solve_books(const Matrix& rhs) const {
    require_invertible();
    return fact_->lu.solve(rhs);
  }

  // Copy with repriced assets; the factorization is shared, not recomputed.
  EconomicNetwork with_prices(Vector prices) const {
    EconomicNetwork copy = *this;
    copy.p_ = std::move(prices);
    return copy;
  }

  std::shared_ptr<const NetworkFactorization> factorization() const { return fact_; }

 private:
  void require_invertible() const {
    if (!(fact_->rcond > 1e-14)) {
      throw singular_system_error("(I - C) is numerically singular (rcond " +
                                  std::to_string(fact_->rcond) + "); C is not column-substochastic");
    }
  }

  Matrix c_;
  Matrix d_;
  Vector p_;
  Vector theta_;
  Vector beta_;
  std::vector<std::string> labels_;
  std::shared_ptr<const NetworkFactorization> fact_;
};

enum class CascadeMode { BestCase, WorstCase };

struct EquilibriumState {
  Vector book_values;    // V
  Vector market_values;  // v = chat . V
  IndexList failed;      // sorted firm indices
  CascadeMode mode = CascadeMode::BestCase;
  int sweeps = 0;

  bool has_failed(int i) const {
    return std::binary_search(failed.begin(), failed.end(), i);
  }
};

// Checks every structural invariant and returns human-readable violations.
// Validation never throws; an empty result means the network is usable.
inline std::vector<std::string> validate_network(const EconomicNetwork& net,
                                                 bool require_asset_columns_stochastic = true) {
  std::vector<std::string> out;
  const int n = net.firm_count();
  const int m = net.asset_count();
  const Matrix& c = net.cross_holdings();
  const Matrix& d = net.asset_shares();

  auto fail = [&out](const std::string& msg) { out.push_back(msg); };

  if (c.rows() != c.cols()) fail("C: not square");
  if (d.rows() != n) fail("D: row count " + std::to_string(d.rows()) + " != n");
  if (net.prices().size() != m) fail("p: size != m");
  if (net.thresholds().size() != n) fail("theta: size != n");
  if (net.failure_costs().size() != n) fail("beta: size != n");
  if (static_cast<int>(net.labels().size()) != n) fail("labels: size != n");
  if (!out.empty()) return out;  // dimension errors make index checks meaningless

  for (int i = 0; i < n; ++i) {
    if (c(i, i) != 0.0) fail("C: nonzero diagonal at " + std::to_string(i));
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (c(i, j) < 0.0)
        fail("C: negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    const double sum = c.col(j).sum();
    if (!(sum < 1.0)) {
      std::ostringstream os;
      os << "C: column " << j << " sum " << sum << " not < 1";
      fail(os.str());
    }
  }
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      if (d(i, j) < 0.0)
        fail("D: negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    if (require_asset_columns_stochastic) {
      const double sum = d.col(j).sum();
      if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "D: column " << j << " sum " << sum << " != 1";
        fail(os.str());
      }
    }
  }
  for (int j = 0; j < m; ++j) {
    if (net.prices()(j) < 0.0) fail("p: negative at " + std::to_string(j));
  }
  for (int i = 0; i < n; ++i) {
    if (net.failure_costs()(i) < 0.0) fail("beta: negative at " + std::to_string(i));
  }
  return out;
}

// chat (I - C)^{-1}: column-stochastic map from net underlying value to
// market value. Computed via the cached LU, not an explicit inverse.
inline Matrix dependency_matrix(const EconomicNetwork& net) {
  const int n = net.firm_count();
  const Matrix identity = Matrix::Identity(n, n);
  Matrix inv = net.solve_books(identity);
  return net.chat().asDiagonal() * inv;
}

inline Vector market_values(const EconomicNetwork& net, const Mask& failed) {
  Vector rhs = net.underlying_values();
  const Vector& beta = net.failure_costs();
  for (int i = 0; i < net.firm_count(); ++i) {
    if (failed[static_cast<std::size_t>(i)]) rhs(i) -= beta(i);
  }
  Vector books = net.solve_books(rhs);
  return net.chat().asDiagonal() * books;
}

inline Vector market_values(const EconomicNetwork& net, const IndexList& failed) {
  return market_values(net, make_mask(net.firm_count(), failed));
}

namespace detail {

inline EquilibriumState finalize_state(const EconomicNetwork& net, const Mask& failed,
                                       CascadeMode mode, int sweeps) {
  EquilibriumState state;
  Vector rhs = net.underlying_values();
  const Vector& beta = net.failure_costs();
  for (int i = 0; i < net.firm_count(); ++i) {
    if (failed[static_cast<std::size_t>(i)]) rhs(i) -= beta(i);
  }
  state.book_values = net.solve_books(rhs);
  state.market_values = net.chat().asDiagonal() * state.book_values;
  state.failed = mask_to_indices(failed);
  state.mode = mode;
  state.sweeps = sweeps;
  return state;
}

}  // namespace detail

// Synchronous Tarski iteration. BestCase starts from no failures and adds
// every firm strictly below threshold until stable (least fixed point);
// WorstCase starts from all failed and removes survivors (greatest fixed
// point). The failed set is monotone across sweeps, so at most n + 1 sweeps
// run. Ties (v == theta) survive.
inline EquilibriumState solve_equilibrium(const EconomicNetwork& net, CascadeMode mode) {
  const int n = net.firm_count();
  const Vector& theta = net.thresholds();
  Mask failed(static_cast<std::size_t>(n), mode == CascadeMode::WorstCase ? 1 : 0);
  int sweeps = 0;
  for (int iter = 0; iter <= n; ++iter) {
    ++sweeps;
    const Vector v = market_values(net, failed);
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const bool below = v(i) < theta(i) - kThresholdTol;
      auto& flag = failed[static_cast<std::size_t>(i)];
      if (mode == CascadeMode::BestCase) {
        if (!flag && below) {
          flag = 1;
          changed = true;
        }
      } else {
        if (flag && !below) {
          flag = 0;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return detail::finalize_state(net, failed, mode, sweeps);
}

// Post-intervention equilibrium under payments gamma >= 0. Firm i's failure
// condition becomes V_i + gamma_i < [chat^{-1} theta]_i. Starting from the
// no-intervention best case T, failures are reversed in causal order: a
// failed firm is un-failed when its book value with its own failure cost
// removed (but all other still-failed costs charged) plus gamma clears the
// book threshold. Reversals raise values monotonically, so the sweep
// terminates in at most |T| rounds and never fails a surviving firm. This is
// exactly the reverse cascade of the reduced influence instance, which keeps
// the transform between the two representations lossless.
inline EquilibriumState apply_intervention(const EconomicNetwork& net, const Vector& gamma,
                                           const EquilibriumState& baseline) {
  const int n = net.firm_count();
  if (gamma.size() != n) throw std::invalid_argument("gamma: size != n");
  if (gamma.size() > 0 && gamma.minCoeff() < 0.0) throw std::invalid_argument("gamma: negative entry");

  const IndexList& t = baseline.failed;
  if (t.empty()) {
    EquilibriumState state = baseline;
    state.mode = CascadeMode::BestCase;
    return state;
  }
  const int k = static_cast<int>(t.size());
  const Vector& beta = net.failure_costs();
  const Vector& theta = net.thresholds();
  const Vector& chat = net.chat();

  // Self-effect of firm u's own failure cost on its own book value:
  // beta_u * [(I - C)^{-1}]_{uu}.
  Matrix unit_rhs = Matrix::Zero(n, k);
  for (int j = 0; j < k; ++j) unit_rhs(t[static_cast<std::size_t>(j)], j) = 1.0;
  const Matrix columns = net.solve_books(unit_rhs);
  Vector self_effect(k);
  for (int j = 0; j < k; ++j) {
    self_effect(j) = columns(t[static_cast<std::size_t>(j)], j) * beta(t[static_cast<std::size_t>(j)]);
  }

  Mask failed = make_mask(n, t);
  Vector book_threshold(n);
  for (int i = 0; i < n; ++i) book_threshold(i) = theta(i) / chat(i);

  int sweeps = 0;
  for (int iter = 0; iter <= k; ++iter) {
    ++sweeps;
    Vector rhs = net.underlying_values();
    for (int i = 0; i < n; ++i) {
      if (failed[static_cast<std::size_t>(i)]) rhs(i) -= beta(i);
    }
    const Vector books = net.solve_books(rhs);
    bool changed = false;
    for (int j = 0; j < k; ++j) {
      const int i = t[static_cast<std::size_t>(j)];
      if (!failed[static_cast<std::size_t>(i)]) continue;
      const double cleared = books(i) + self_effect(j) + gamma(i);
      if (cleared >= book_threshold(i) - kThresholdTol) {
        failed[static_cast<std::size_t>(i)] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return detail::finalize_state(net, failed, CascadeMode::BestCase, sweeps);
}

inline EquilibriumState apply_intervention(const EconomicNetwork& net, const Vector& gamma) {
  return apply_intervention(net, gamma, solve_equilibrium(net, CascadeMode::BestCase));
}

}  // namespace contagion
