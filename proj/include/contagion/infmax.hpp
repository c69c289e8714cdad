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
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "contagion/common.hpp"
#include "contagion/influence.hpp"
#include "contagion/rng.hpp"

namespace contagion {

inline constexpr int kDefaultReplicates = 10000;

// Either a seed set activated outright (integral) or a payment vector
// (fractional). Costs are always in threshold units, so integral and
// fractional budgets are commensurate: an integral seed u costs its nominal
// threshold.
struct InterventionPlan {
  enum class Kind { Integral, Fractional };

  Kind kind = Kind::Fractional;
  IndexList seeds;  // integral: reduced node indices, sorted
  Vector payments;  // fractional: size k, >= 0
  double budget = 0.0;
  double spent = 0.0;
  double sigma_estimate = 0.0;
  double sigma_std_error = 0.0;

  static InterventionPlan integral(IndexList s, double budget, double spent) {
    InterventionPlan p;
    p.kind = Kind::Integral;
    p.seeds = std::move(s);
    std::sort(p.seeds.begin(), p.seeds.end());
    p.budget = budget;
    p.spent = spent;
    return p;
  }

  static InterventionPlan fractional(Vector x, double budget, double spent) {
    InterventionPlan p;
    p.kind = Kind::Fractional;
    p.payments = std::move(x);
    p.budget = budget;
    p.spent = spent;
    return p;
  }
};

struct CascadeResult {
  Mask active;
  IndexList activated;  // sorted
  double weight = 0.0;
  int rounds = 0;  // productive expansion sweeps
};

inline bool budget_allows(double spent, double cost, double budget) {
  return spent + cost <= budget * (1.0 + kBudgetTol) + kBudgetTol;
}

namespace detail {

inline void check_thresholds(const InfluenceInstance& inst, const Vector& theta) {
  if (theta.size() != inst.node_count()) throw std::invalid_argument("theta: size mismatch");
  if (theta.size() > 0 && theta.minCoeff() < 0.0) throw std::invalid_argument("theta: negative entry");
}

inline CascadeResult finish_cascade(const InfluenceInstance& inst, Mask active, int rounds) {
  CascadeResult result;
  result.weight = inst.weight_of(active);
  result.activated = mask_to_indices(active);
  result.active = std::move(active);
  result.rounds = rounds;
  return result;
}

}  // namespace detail

// Progressive cascade from a seed set activated by fiat: each round adds
// every node whose exerted influence meets its threshold, until stable.
inline CascadeResult calc_int_cascade(const InfluenceInstance& inst, const IndexList& seeds,
                                      const Vector& theta) {
  detail::check_thresholds(inst, theta);
  const int k = inst.node_count();
  Mask active = make_mask(k, seeds);
  int rounds = 0;
  for (int iter = 0; iter <= k; ++iter) {
    const Vector f = inst.influence_of(active);
    bool changed = false;
    for (int v = 0; v < k; ++v) {
      if (!active[static_cast<std::size_t>(v)] && f(v) >= theta(v) - kThresholdTol) {
        active[static_cast<std::size_t>(v)] = 1;
        changed = true;
      }
    }
    if (!changed) break;
    ++rounds;
  }
  return detail::finish_cascade(inst, std::move(active), rounds);
}

// Fractional cascade: round one activates nodes whose payment alone meets the
// threshold, later rounds recompute membership from influence + payment. The
// membership rule does not force a union; monotonicity of f makes the
// sequence nondecreasing anyway, which is asserted every round.
inline CascadeResult calc_frac_cascade(const InfluenceInstance& inst, const Vector& x,
                                       const Vector& theta) {
  detail::check_thresholds(inst, theta);
  const int k = inst.node_count();
  if (x.size() != k) throw std::invalid_argument("payments: size mismatch");
  if (k > 0 && x.minCoeff() < 0.0) throw std::invalid_argument("payments: negative entry");

  Mask active(static_cast<std::size_t>(k), 0);
  for (int v = 0; v < k; ++v) {
    if (x(v) >= theta(v) - kThresholdTol) active[static_cast<std::size_t>(v)] = 1;
  }
  int rounds = 0;
  for (int iter = 0; iter <= k; ++iter) {
    const Vector f = inst.influence_of(active);
    Mask next(static_cast<std::size_t>(k), 0);
    bool changed = false;
    for (int v = 0; v < k; ++v) {
      const bool member = f(v) + x(v) >= theta(v) - kThresholdTol;
      next[static_cast<std::size_t>(v)] = member ? 1 : 0;
      if (active[static_cast<std::size_t>(v)] && !member) {
        throw std::logic_error("fractional cascade shrank; influence function is not monotone");
      }
      if (member != (active[static_cast<std::size_t>(v)] != 0)) changed = true;
    }
    if (!changed) break;
    active = std::move(next);
    ++rounds;
  }
  return detail::finish_cascade(inst, std::move(active), rounds);
}

inline CascadeResult run_plan_cascade(const InfluenceInstance& inst, const InterventionPlan& plan,
                                      const Vector& theta) {
  if (plan.kind == InterventionPlan::Kind::Integral) {
    return calc_int_cascade(inst, plan.seeds, theta);
  }
  Vector x = plan.payments;
  if (x.size() == 0) x = Vector::Zero(inst.node_count());
  return calc_frac_cascade(inst, x, theta);
}

// Reduced payment vector realizing the plan: fractional plans carry it
// directly, integral seeds pay their nominal threshold.
inline Vector plan_payments(const InterventionPlan& plan, const InfluenceInstance& inst) {
  if (plan.kind == InterventionPlan::Kind::Fractional) {
    if (plan.payments.size() == 0) return Vector::Zero(inst.node_count());
    return plan.payments;
  }
  Vector x = Vector::Zero(inst.node_count());
  for (int u : plan.seeds) x(u) = inst.theta_tilde()(u);
  return x;
}

struct SigmaEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int replicates = 0;
};

// Custom threshold distribution hook. Must be a deterministic function of the
// seed; whether the induced objective stays monotone submodular is the
// caller's concern.
using ThresholdSampler = std::function<Vector(const InfluenceInstance&, std::uint64_t)>;

// Monte Carlo estimate of the expected activated weight under a threshold
// sampler. Deterministic in (plan, sampler, replicates, seed); replicate
// results land in index-addressed slots and are reduced in index order, so
// the thread count never changes the value.
inline SigmaEstimate estimate_sigma(const InfluenceInstance& inst, const InterventionPlan& plan,
                                    const ThresholdSampler& sampler, int replicates,
                                    std::uint64_t seed, int threads = 1) {
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(replicates), 0.0);
  rng::parallel_for(replicates, threads, [&](int rep) {
    const Vector theta = sampler(inst, rng::mix(seed, rng::kSigma, static_cast<std::uint64_t>(rep)));
    values[static_cast<std::size_t>(rep)] = run_plan_cascade(inst, plan, theta).weight;
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= replicates;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = replicates > 1 ? ss / (replicates - 1) : 0.0;
  return {mean, std::sqrt(variance / replicates), replicates};
}

inline SigmaEstimate estimate_sigma(const InfluenceInstance& inst, const InterventionPlan& plan,
                                    const ThresholdModel& model, int replicates, std::uint64_t seed,
                                    int threads = 1) {
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (!model.is_random()) {
    const CascadeResult r = run_plan_cascade(inst, plan, inst.theta_tilde());
    return {r.weight, 0.0, replicates};
  }
  return estimate_sigma(
      inst, plan,
      [&model](const InfluenceInstance& i, std::uint64_t s) { return sample_thresholds(i, model, s); },
      replicates, seed, threads);
}

// Total influence exerted on v by the activated set A.
inline double gamma_plus(const InfluenceInstance& inst, int v, const IndexList& a) {
  return inst.influence_of(a)(v);
}

// Total influence v would exert on the set A.
inline double gamma_minus(const InfluenceInstance& inst, int v, const IndexList& a) {
  const Vector col = inst.influence_column(v);
  double sum = 0.0;
  for (int u : a) sum += col(u);
  return sum;
}

namespace detail {

// Shared scaffolding for the budget-checkpoint loops: every optimizer runs
// once against an ascending budget list and snapshots its plan at each
// checkpoint, so the plans for nested budgets are themselves nested. A lone
// budget degenerates to the plain single-run algorithm.
inline std::vector<double> checked_budgets(std::span<const double> budgets) {
  if (budgets.empty()) throw std::invalid_argument("budget list is empty");
  std::vector<double> out(budgets.begin(), budgets.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) throw std::invalid_argument("budget must be >= 0");
    if (i > 0 && out[i] < out[i - 1]) throw std::invalid_argument("budgets must be ascending");
  }
  return out;
}

inline void attach_sigma(const InfluenceInstance& inst, const ThresholdModel& model,
                         int replicates, std::uint64_t seed, int threads, InterventionPlan& plan,
                         std::size_t checkpoint) {
  const SigmaEstimate est =
      estimate_sigma(inst, plan, model, replicates,
                     rng::mix(seed, rng::kSigma, 0x66696e616cULL, checkpoint), threads);
  plan.sigma_estimate = est.mean;
  plan.sigma_std_error = est.std_error;
}

}  // namespace detail

// Greedy hill-climbing for integral influence: free seeds enter first at zero
// cost, then the affordable node with the best estimated objective is added
// until none remains. Candidate evaluations within a step share one threshold
// substream (common random numbers); ties break to the lowest node index.
inline std::vector<InterventionPlan> greedy_int_sweep(const InfluenceInstance& inst,
                                                      const ThresholdModel& model,
                                                      std::span<const double> budgets,
                                                      int replicates, std::uint64_t seed,
                                                      int threads = 1) {
  const std::vector<double> checkpoints = detail::checked_budgets(budgets);
  const int k = inst.node_count();
  const Vector& tt = inst.theta_tilde();

  Mask chosen(static_cast<std::size_t>(k), 0);
  IndexList seeds;
  for (int u : inst.free_seeds()) {
    chosen[static_cast<std::size_t>(u)] = 1;
    seeds.push_back(u);
  }
  double spent = 0.0;
  std::uint64_t step = 0;

  std::vector<InterventionPlan> plans;
  for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
    const double budget = checkpoints[ci];
    for (;;) {
      IndexList candidates;
      for (int u = 0; u < k; ++u) {
        if (!chosen[static_cast<std::size_t>(u)] && budget_allows(spent, tt(u), budget)) {
          candidates.push_back(u);
        }
      }
      if (candidates.empty()) break;

      const std::uint64_t step_seed = rng::mix(seed, rng::kGreedyStep, step);
      std::vector<double> value(candidates.size(), 0.0);
      rng::parallel_for(static_cast<int>(candidates.size()), threads, [&](int ci_) {
        IndexList trial = seeds;
        trial.push_back(candidates[static_cast<std::size_t>(ci_)]);
        const InterventionPlan probe = InterventionPlan::integral(std::move(trial), budget, 0.0);
        value[static_cast<std::size_t>(ci_)] =
            estimate_sigma(inst, probe, model, replicates, step_seed).mean;
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (value[i] > value[best]) best = i;  // ties keep the lowest index
      }
      const int u = candidates[best];
      chosen[static_cast<std::size_t>(u)] = 1;
      seeds.push_back(u);
      spent += tt(u);
      ++step;
    }
    InterventionPlan plan = InterventionPlan::integral(seeds, budget, spent);
    detail::attach_sigma(inst, model, replicates, seed, threads, plan, ci);
    plans.push_back(std::move(plan));
  }
  return plans;
}

inline InterventionPlan greedy_int(const InfluenceInstance& inst, const ThresholdModel& model,
                                   double budget, int replicates = kDefaultReplicates,
                                   std::uint64_t seed = 0, int threads = 1) {
  const double budgets[] = {budget};
  return greedy_int_sweep(inst, model, budgets, replicates, seed, threads).front();
}

// Greedy fractional influence: each step tops the candidate up to the upper
// support point of its threshold distribution net of influence already
// exerted by paid nodes, and commits the candidate with the best estimated
// objective. Candidates that are already sure to activate (top-up <= 0) are
// never paid.
inline std::vector<InterventionPlan> greedy_frac_sweep(const InfluenceInstance& inst,
                                                       const ThresholdModel& model,
                                                       std::span<const double> budgets,
                                                       int replicates, std::uint64_t seed,
                                                       int threads = 1) {
  const std::vector<double> checkpoints = detail::checked_budgets(budgets);
  const int k = inst.node_count();
  const Vector& tt = inst.theta_tilde();

  Vector x = Vector::Zero(k);
  Mask support(static_cast<std::size_t>(k), 0);
  double spent = 0.0;
  std::uint64_t step = 0;

  std::vector<InterventionPlan> plans;
  for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
    const double budget = checkpoints[ci];
    for (;;) {
      const Vector f_support = inst.influence_of(support);
      IndexList candidates;
      std::vector<double> topup;
      for (int v = 0; v < k; ++v) {
        if (support[static_cast<std::size_t>(v)]) continue;
        const double t = model.theta_max(tt(v)) - f_support(v);
        if (t <= kThresholdTol) continue;  // already sure to activate
        if (!budget_allows(spent, t, budget)) continue;
        candidates.push_back(v);
        topup.push_back(t);
      }
      if (candidates.empty()) break;

      const std::uint64_t step_seed = rng::mix(seed, rng::kGreedyStep, step);
      std::vector<double> value(candidates.size(), 0.0);
      rng::parallel_for(static_cast<int>(candidates.size()), threads, [&](int ci_) {
        Vector trial = x;
        trial(candidates[static_cast<std::size_t>(ci_)]) += topup[static_cast<std::size_t>(ci_)];
        const InterventionPlan probe = InterventionPlan::fractional(std::move(trial), budget, 0.0);
        value[static_cast<std::size_t>(ci_)] =
            estimate_sigma(inst, probe, model, replicates, step_seed).mean;
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (value[i] > value[best]) best = i;
      }
      const int u = candidates[best];
      x(u) += topup[best];
      support[static_cast<std::size_t>(u)] = 1;
      spent += topup[best];
      ++step;
    }
    InterventionPlan plan = InterventionPlan::fractional(x, budget, spent);
    detail::attach_sigma(inst, model, replicates, seed, threads, plan, ci);
    plans.push_back(std::move(plan));
  }
  return plans;
}

inline InterventionPlan greedy_frac(const InfluenceInstance& inst, const ThresholdModel& model,
                                    double budget, int replicates = kDefaultReplicates,
                                    std::uint64_t seed = 0, int threads = 1) {
  const double budgets[] = {budget};
  return greedy_frac_sweep(inst, model, budgets, replicates, seed, threads).front();
}

namespace detail {

// Shared loop for the DiscountFrac family. cost_adjusted toggles the score
// between raw out-influence and out-influence per unit of remaining nominal
// activation cost; nodes whose nominal cost is already covered are taken
// first at zero payment.
inline std::vector<InterventionPlan> discount_sweep(const InfluenceInstance& inst,
                                                    const ThresholdModel& model,
                                                    std::span<const double> budgets,
                                                    bool cost_adjusted) {
  const std::vector<double> checkpoints = checked_budgets(budgets);
  const int k = inst.node_count();
  const Vector& tt = inst.theta_tilde();

  // out_total(v) = total influence v exerts; out_to_support(v) = part of it
  // landing on the current support. Their difference is gamma_minus(v, V\S).
  Vector out_total = inst.influence_column_sums();
  Vector out_to_support = Vector::Zero(k);

  Vector x = Vector::Zero(k);
  Vector f_support = Vector::Zero(k);  // influence of paid nodes
  Mask chosen(static_cast<std::size_t>(k), 0);
  double spent = 0.0;

  auto add_to_support = [&](int u) {
    f_support += inst.influence_column(u);
    out_to_support += inst.influence_row(u);
  };

  std::vector<InterventionPlan> plans;
  for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
    const double budget = checkpoints[ci];
    for (;;) {
      int pick = -1;
      double pick_payment = 0.0;
      bool pick_is_free = false;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int v = 0; v < k; ++v) {
        if (chosen[static_cast<std::size_t>(v)]) continue;
        const double payment = std::max(0.0, model.theta_max(tt(v)) - f_support(v));
        if (cost_adjusted) {
          const double remaining_cost = tt(v) - f_support(v);
          if (remaining_cost <= kThresholdTol) {
            // Already activatable: taken before any paid node, lowest index
            // first, at zero marginal cost.
            if (!pick_is_free) {
              pick = v;
              pick_payment = 0.0;
              pick_is_free = true;
            }
            continue;
          }
          if (pick_is_free) continue;
          if (!budget_allows(spent, payment, budget)) continue;
          const double score = (out_total(v) - out_to_support(v)) / remaining_cost;
          if (score > best_score) {
            best_score = score;
            pick = v;
            pick_payment = payment;
          }
        } else {
          if (!budget_allows(spent, payment, budget)) continue;
          const double score = out_total(v) - out_to_support(v);
          if (score > best_score) {
            best_score = score;
            pick = v;
            pick_payment = payment;
          }
        }
      }
      if (pick < 0) break;
      chosen[static_cast<std::size_t>(pick)] = 1;
      if (pick_payment > 0.0) {
        x(pick) = pick_payment;
        spent += pick_payment;
        add_to_support(pick);
      }
    }
    InterventionPlan plan = InterventionPlan::fractional(x, budget, spent);
    const CascadeResult outcome = calc_frac_cascade(inst, x, tt);
    plan.sigma_estimate = outcome.weight;
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace detail

// DiscountFrac heuristic: repeatedly pays the node exerting the most total
// influence on the not-yet-paid set, topping it up to the upper support point
// of its threshold.
inline std::vector<InterventionPlan> discount_frac_sweep(const InfluenceInstance& inst,
                                                         const ThresholdModel& model,
                                                         std::span<const double> budgets) {
  return detail::discount_sweep(inst, model, budgets, /*cost_adjusted=*/false);
}

inline InterventionPlan discount_frac(const InfluenceInstance& inst, const ThresholdModel& model,
                                      double budget) {
  const double budgets[] = {budget};
  return discount_frac_sweep(inst, model, budgets).front();
}

// Cost-adjusted DiscountFrac: the selection score divides out-influence by
// the remaining nominal activation cost, so cheap high-influence nodes win.
inline std::vector<InterventionPlan> discount_frac_cost_adjusted_sweep(
    const InfluenceInstance& inst, const ThresholdModel& model, std::span<const double> budgets) {
  return detail::discount_sweep(inst, model, budgets, /*cost_adjusted=*/true);
}

inline InterventionPlan discount_frac_cost_adjusted(const InfluenceInstance& inst,
                                                    const ThresholdModel& model, double budget) {
  const double budgets[] = {budget};
  return discount_frac_cost_adjusted_sweep(inst, model, budgets).front();
}

namespace detail {

// Integral oracle: depth-first include/exclude over affordable seed sets,
// evaluating maximal sets only, with an exact monotone bound (closure of the
// set plus every still-affordable candidate). Free seeds are always in. The
// work guard keeps pathological instances from running unbounded.
inline InterventionPlan brute_force_integral(const InfluenceInstance& inst, double budget,
                                             long work_limit) {
  const int k = inst.node_count();
  const Vector& tt = inst.theta_tilde();
  IndexList paid_candidates;
  for (int u = 0; u < k; ++u) {
    if (tt(u) > 0.0) paid_candidates.push_back(u);
  }

  IndexList base = inst.free_seeds();
  double best_weight = -1.0;
  IndexList best_set;
  double best_spent = 0.0;
  long work = 0;

  IndexList current = base;
  const auto evaluate = [&](const IndexList& seeds, double spent) {
    const CascadeResult r = calc_int_cascade(inst, seeds, tt);
    if (r.weight > best_weight) {
      best_weight = r.weight;
      best_set = seeds;
      best_spent = spent;
    }
  };

  auto dfs = [&](auto&& self, std::size_t idx, double spent) -> void {
    if (++work > work_limit) {
      throw instance_too_large_error("brute_force_optimum: enumeration exceeds the work limit");
    }
    // Monotone upper bound: closure of current plus everything later still
    // individually affordable. Subtrees that cannot strictly beat the best
    // are pruned, which changes neither the optimum nor the first-found tie.
    IndexList optimistic = current;
    bool any_affordable = false;
    for (std::size_t j = idx; j < paid_candidates.size(); ++j) {
      const int u = paid_candidates[j];
      if (budget_allows(spent, tt(u), budget)) {
        optimistic.push_back(u);
        any_affordable = true;
      }
    }
    if (!any_affordable) {
      // Leaf: skip non-maximal sets (an excluded candidate that is still
      // affordable means a superset leaf exists elsewhere).
      for (int u : paid_candidates) {
        const bool in_current = std::find(current.begin(), current.end(), u) != current.end();
        if (!in_current && budget_allows(spent, tt(u), budget)) return;
      }
      evaluate(current, spent);
      return;
    }
    const CascadeResult bound = calc_int_cascade(inst, optimistic, tt);
    if (bound.weight <= best_weight) return;

    const int u = paid_candidates[idx];
    if (budget_allows(spent, tt(u), budget)) {
      current.push_back(u);
      self(self, idx + 1, spent + tt(u));
      current.pop_back();
    }
    self(self, idx + 1, spent);
  };

  evaluate(base, 0.0);  // the empty paid plan is always feasible
  if (!paid_candidates.empty()) dfs(dfs, 0, 0.0);

  std::sort(best_set.begin(), best_set.end());
  InterventionPlan plan = InterventionPlan::integral(std::move(best_set), budget, best_spent);
  plan.sigma_estimate = best_weight;
  return plan;
}

// Fractional oracle: any optimal payment vector is a sequence of activation
// top-ups, so the cheapest way to reach an activation closure is a shortest
// path over closure states with edge cost max(0, theta_u - f(S)_u). Dijkstra
// over the reachable closures gives the exact optimum over all payment
// vectors.
inline InterventionPlan brute_force_fractional(const InfluenceInstance& inst, double budget,
                                               long work_limit) {
  const int k = inst.node_count();
  const Vector& tt = inst.theta_tilde();
  const auto closure_of = [&](std::uint32_t seeds) {
    IndexList list;
    for (int u = 0; u < k; ++u) {
      if ((seeds >> u) & 1u) list.push_back(u);
    }
    const CascadeResult r = calc_int_cascade(inst, list, tt);
    std::uint32_t mask = 0;
    for (int u : r.activated) mask |= (1u << u);
    return mask;
  };

  struct State {
    double cost = std::numeric_limits<double>::infinity();
    std::uint32_t previous = 0;
    int paid_node = -1;
    double paid_amount = 0.0;
    bool settled = false;
  };
  std::map<std::uint32_t, State> states;

  const std::uint32_t start = closure_of(0);
  states[start].cost = 0.0;
  std::set<std::pair<double, std::uint32_t>> queue{{0.0, start}};
  long work = 0;

  std::uint32_t best_state = start;
  double best_weight = -1.0;

  const auto weight_of_mask = [&](std::uint32_t mask) {
    double w = 0.0;
    for (int u = 0; u < k; ++u) {
      if ((mask >> u) & 1u) w += inst.weights()(u);
    }
    return w;
  };

  while (!queue.empty()) {
    const auto [cost, mask] = *queue.begin();
    queue.erase(queue.begin());
    State& state = states[mask];
    if (state.settled) continue;
    state.settled = true;

    const double w = weight_of_mask(mask);
    if (w > best_weight) {
      best_weight = w;
      best_state = mask;
    }

    Mask active(static_cast<std::size_t>(k), 0);
    for (int u = 0; u < k; ++u) active[static_cast<std::size_t>(u)] = (mask >> u) & 1u;
    const Vector f = inst.influence_of(active);
    for (int u = 0; u < k; ++u) {
      if ((mask >> u) & 1u) continue;
      if (++work > work_limit) {
        throw instance_too_large_error("brute_force_optimum: search exceeds the work limit");
      }
      const double topup = std::max(0.0, tt(u) - f(u));
      if (!budget_allows(0.0, cost + topup, budget)) continue;
      const std::uint32_t next = closure_of(mask | (1u << u));
      State& ns = states[next];
      if (cost + topup < ns.cost) {
        queue.erase({ns.cost, next});
        ns.cost = cost + topup;
        ns.previous = mask;
        ns.paid_node = u;
        ns.paid_amount = topup;
        queue.insert({ns.cost, next});
      }
    }
  }

  Vector x = Vector::Zero(k);
  double spent = 0.0;
  for (std::uint32_t at = best_state; at != start;) {
    const State& state = states.at(at);
    x(state.paid_node) += state.paid_amount;
    spent += state.paid_amount;
    at = state.previous;
  }
  InterventionPlan plan = InterventionPlan::fractional(std::move(x), budget, spent);
  plan.sigma_estimate = best_weight;
  return plan;
}

}  // namespace detail

// Exhaustive oracle, feasible at desk scale only. The integral form
// enumerates affordable seed sets; the fractional form searches all
// sequences of exact top-up payments, which covers every payment vector.
inline InterventionPlan brute_force_optimum(const InfluenceInstance& inst,
                                            const ThresholdModel& model, double budget,
                                            InterventionPlan::Kind kind =
                                                InterventionPlan::Kind::Fractional,
                                            long work_limit = 50000000) {
  if (model.is_random()) {
    throw std::invalid_argument("brute_force_optimum requires fixed thresholds");
  }
  const int k = inst.node_count();
  if (kind == InterventionPlan::Kind::Integral) {
    if (k > 30) {
      throw instance_too_large_error("brute_force_optimum: " + std::to_string(k) + " nodes > 30");
    }
    return detail::brute_force_integral(inst, budget, work_limit);
  }
  if (k > 18) {
    throw instance_too_large_error("brute_force_optimum: " + std::to_string(k) + " nodes > 18");
  }
  return detail::brute_force_fractional(inst, budget, work_limit);
}

}  // namespace contagion
