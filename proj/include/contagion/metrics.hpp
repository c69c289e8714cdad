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
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "contagion/common.hpp"
#include "contagion/infmax.hpp"
#include "contagion/influence.hpp"
#include "contagion/network.hpp"
#include "contagion/rng.hpp"
#include "contagion/scenarios.hpp"

namespace contagion {

// Empirical value-at-risk with q interpreted as tail mass: the q-th fraction
// of worst baseline outcomes forms the conditioning tail, so q = 1 recovers
// the unconditional mean. The cutoff is the ceil(q N)-th largest baseline
// value.
inline double value_at_risk(const Vector& baseline, double q) {
  const int n = static_cast<int>(baseline.size());
  if (n == 0) throw std::invalid_argument("value_at_risk: empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in (0, 1]");
  std::vector<double> sorted(baseline.data(), baseline.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const int rank = static_cast<int>(std::ceil(q * n));
  return sorted[static_cast<std::size_t>(std::clamp(rank, 1, n) - 1)];
}

// TVaR(q; b): mean default fraction under budget b over the scenarios whose
// budget-0 outcome reaches the baseline q-tail. Conditioning is always on the
// baseline tail, for every budget.
inline double tvar(const Vector& samples, const Vector& baseline, double q) {
  if (samples.size() != baseline.size()) throw std::invalid_argument("tvar: length mismatch");
  const double cutoff = value_at_risk(baseline, q);
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < samples.size(); ++i) {
    if (baseline(i) >= cutoff) {
      sum += samples(i);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("tvar: empty conditioning set");
  return sum / count;
}

enum class Optimizer { GreedyInt, GreedyFrac, DiscountFrac, DiscountFracCost, BruteForce };

inline std::string optimizer_name(Optimizer o) {
  switch (o) {
    case Optimizer::GreedyInt: return "greedy-int";
    case Optimizer::GreedyFrac: return "greedy-frac";
    case Optimizer::DiscountFrac: return "discount-frac";
    case Optimizer::DiscountFracCost: return "discount-frac-cost";
    case Optimizer::BruteForce: return "brute";
  }
  return "unknown";
}

struct StressConfig {
  std::vector<double> budget_fractions;  // of total unshocked asset value, ascending
  Optimizer optimizer = Optimizer::DiscountFracCost;
  ThresholdModel model = ThresholdModel::fixed();
  int replicates = kDefaultReplicates;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<double> quantiles = {0.1, 0.2, 0.4, 0.6, 1.0};
};

struct StressReport {
  std::vector<double> budget_fractions;
  std::vector<double> budgets_absolute;
  Vector baseline_fraction;  // per-scenario default fraction at budget 0
  Matrix default_fraction;   // scenarios x budgets
  std::vector<double> quantiles;
  Matrix tvar_table;         // quantiles x budgets
  Vector tvar_baseline;      // quantiles (budget 0)

  int scenarios = 0;
  int firms = 0;
  double total_assets = 0.0;
  std::uint64_t seed = 0;
  std::string optimizer;
  double band_halfwidth = 0.0;
  int replicates = 0;
};

namespace detail {

inline std::vector<InterventionPlan> plans_for_budgets(const InfluenceInstance& inst,
                                                       const StressConfig& config,
                                                       std::span<const double> budgets,
                                                       std::uint64_t seed) {
  switch (config.optimizer) {
    case Optimizer::GreedyInt:
      return greedy_int_sweep(inst, config.model, budgets, config.replicates, seed);
    case Optimizer::GreedyFrac:
      return greedy_frac_sweep(inst, config.model, budgets, config.replicates, seed);
    case Optimizer::DiscountFrac:
      return discount_frac_sweep(inst, config.model, budgets);
    case Optimizer::DiscountFracCost:
      return discount_frac_cost_adjusted_sweep(inst, config.model, budgets);
    case Optimizer::BruteForce: {
      std::vector<InterventionPlan> plans;
      plans.reserve(budgets.size());
      for (double b : budgets) plans.push_back(brute_force_optimum(inst, config.model, b));
      return plans;
    }
  }
  throw std::invalid_argument("unknown optimizer");
}

}  // namespace detail

// Per-scenario pipeline: shock, baseline equilibrium, reduction, one
// optimizer run per budget (ascending, warm-started so plans nest), realized
// default fraction per budget. Scenarios run in parallel with per-scenario
// substreams; results land in index-addressed slots.
inline StressReport budget_sweep(const EconomicNetwork& net, const Matrix& gross,
                                 const StressConfig& config) {
  if (gross.cols() != net.asset_count()) throw std::invalid_argument("gross: column count != m");
  const auto& fractions = config.budget_fractions;
  if (fractions.empty()) throw std::invalid_argument("budget list is empty");
  for (std::size_t i = 0; i + 1 < fractions.size(); ++i) {
    if (fractions[i] > fractions[i + 1]) throw std::invalid_argument("budgets must be ascending");
  }

  const int scenarios = static_cast<int>(gross.rows());
  const int n = net.firm_count();
  const int nb = static_cast<int>(fractions.size());
  const double total_assets = net.prices().lpNorm<1>();

  StressReport report;
  report.budget_fractions = fractions;
  report.budgets_absolute.reserve(static_cast<std::size_t>(nb));
  for (double f : fractions) report.budgets_absolute.push_back(f * total_assets);
  report.baseline_fraction = Vector::Zero(scenarios);
  report.default_fraction = Matrix::Zero(scenarios, nb);
  report.scenarios = scenarios;
  report.firms = n;
  report.total_assets = total_assets;
  report.seed = config.seed;
  report.optimizer = optimizer_name(config.optimizer);
  report.band_halfwidth = config.model.band_halfwidth;
  report.replicates = config.replicates;

  rng::parallel_for(scenarios, config.threads, [&](int s) {
    const EconomicNetwork shocked = apply_shock(net, gross.row(s).transpose());
    const EquilibriumState base = solve_equilibrium(shocked, CascadeMode::BestCase);
    const int baseline_defaults = static_cast<int>(base.failed.size());
    report.baseline_fraction(s) = static_cast<double>(baseline_defaults) / n;
    if (baseline_defaults == 0) return;  // row stays zero

    const InfluenceInstance inst = reduce_to_influence(shocked, base);
    const std::vector<InterventionPlan> plans = detail::plans_for_budgets(
        inst, config, report.budgets_absolute,
        rng::mix(config.seed, rng::kScenarioPlan, static_cast<std::uint64_t>(s)));
    for (int b = 0; b < nb; ++b) {
      const CascadeResult saved = run_plan_cascade(inst, plans[static_cast<std::size_t>(b)],
                                                   inst.theta_tilde());
      const int reversed = static_cast<int>(saved.activated.size());
      report.default_fraction(s, b) = static_cast<double>(baseline_defaults - reversed) / n;
    }
  });

  report.quantiles = config.quantiles;
  const int nq = static_cast<int>(config.quantiles.size());
  report.tvar_table = Matrix::Zero(nq, nb);
  report.tvar_baseline = Vector::Zero(nq);
  for (int qi = 0; qi < nq; ++qi) {
    const double q = config.quantiles[static_cast<std::size_t>(qi)];
    report.tvar_baseline(qi) = tvar(report.baseline_fraction, report.baseline_fraction, q);
    for (int b = 0; b < nb; ++b) {
      report.tvar_table(qi, b) = tvar(report.default_fraction.col(b), report.baseline_fraction, q);
    }
  }
  return report;
}

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string report_metadata_json(const StressReport& report, double bin_width) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "{\"seed\":" << report.seed << ",\"scenarios\":" << report.scenarios
     << ",\"firms\":" << report.firms << ",\"optimizer\":\"" << report.optimizer
     << "\",\"replicates\":" << report.replicates
     << ",\"band_halfwidth\":" << report.band_halfwidth
     << ",\"total_assets\":" << report.total_assets << ",\"bin_width\":" << bin_width
     << ",\"budget_fractions\":[";
  for (std::size_t i = 0; i < report.budget_fractions.size(); ++i) {
    os << (i ? "," : "") << report.budget_fractions[i];
  }
  os << "]}";
  return os.str();
}

inline std::vector<int> histogram_counts(const Vector& values, double bin_width, int bins) {
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (int i = 0; i < values.size(); ++i) {
    int bin = static_cast<int>(std::floor(values(i) / bin_width));
    bin = std::clamp(bin, 0, bins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  return counts;
}

}  // namespace detail

// Plot-ready CSV exports: per-scenario table, 1-D default-fraction densities
// per budget, the 2-D (budget x fraction) count table, the defaults-averted
// distribution, and the TVaR table. Every file starts with one JSON metadata
// comment line. Budget index -1 denotes the no-intervention baseline.
inline std::vector<std::string> export_histograms(const StressReport& report,
                                                  const std::string& out_dir,
                                                  double bin_width = 0.01) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw std::invalid_argument("bin_width must lie in (0, 1]");
  }
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string meta = "# " + detail::report_metadata_json(report, bin_width);
  const int bins = static_cast<int>(std::ceil(1.0 / bin_width));
  const int nb = static_cast<int>(report.budget_fractions.size());
  std::vector<std::string> written;

  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << meta << "\n";
    written.push_back(path);
    return out;
  };

  {
    std::ofstream out = open("scenarios.csv");
    out << "scenario,baseline_fraction";
    for (double f : report.budget_fractions) out << ",fraction_b" << detail::format_double(f);
    out << "\n";
    for (int s = 0; s < report.scenarios; ++s) {
      out << s << "," << detail::format_double(report.baseline_fraction(s));
      for (int b = 0; b < nb; ++b) {
        out << "," << detail::format_double(report.default_fraction(s, b));
      }
      out << "\n";
    }
  }

  auto write_hist_block = [&](std::ofstream& out, int budget_index, double budget_fraction,
                              const Vector& values, bool with_density) {
    const std::vector<int> counts = detail::histogram_counts(values, bin_width, bins);
    for (int bin = 0; bin < bins; ++bin) {
      out << budget_index << "," << detail::format_double(budget_fraction) << ","
          << detail::format_double(bin * bin_width) << ","
          << detail::format_double(std::min(1.0, (bin + 1) * bin_width)) << ","
          << counts[static_cast<std::size_t>(bin)];
      if (with_density) {
        const double density =
            report.scenarios > 0
                ? counts[static_cast<std::size_t>(bin)] / (report.scenarios * bin_width)
                : 0.0;
        out << "," << detail::format_double(density);
      }
      out << "\n";
    }
  };

  {
    std::ofstream out = open("hist1d.csv");
    out << "budget_index,budget_fraction,bin_lo,bin_hi,count,density\n";
    write_hist_block(out, -1, 0.0, report.baseline_fraction, true);
    for (int b = 0; b < nb; ++b) {
      write_hist_block(out, b, report.budget_fractions[static_cast<std::size_t>(b)],
                       report.default_fraction.col(b), true);
    }
  }

  {
    std::ofstream out = open("hist2d.csv");
    out << "budget_index,budget_fraction,bin_lo,bin_hi,count\n";
    for (int b = 0; b < nb; ++b) {
      write_hist_block(out, b, report.budget_fractions[static_cast<std::size_t>(b)],
                       report.default_fraction.col(b), false);
    }
  }

  {
    std::ofstream out = open("averted.csv");
    out << "budget_index,budget_fraction,bin_lo,bin_hi,count\n";
    for (int b = 0; b < nb; ++b) {
      const Vector averted = report.baseline_fraction - report.default_fraction.col(b);
      write_hist_block(out, b, report.budget_fractions[static_cast<std::size_t>(b)], averted,
                       false);
    }
  }

  {
    std::ofstream out = open("tvar.csv");
    out << "q,budget_index,budget_fraction,tvar\n";
    for (std::size_t qi = 0; qi < report.quantiles.size(); ++qi) {
      out << detail::format_double(report.quantiles[qi]) << ",-1,0,"
          << detail::format_double(report.tvar_baseline(static_cast<int>(qi))) << "\n";
      for (int b = 0; b < nb; ++b) {
        out << detail::format_double(report.quantiles[qi]) << "," << b << ","
            << detail::format_double(report.budget_fractions[static_cast<std::size_t>(b)]) << ","
            << detail::format_double(report.tvar_table(static_cast<int>(qi), b)) << "\n";
      }
    }
  }
  return written;
}

// ScenarioBatch CSV: one row per scenario with default counts and mixture
// weights; per-asset gross returns are emitted only when requested.
inline void write_scenario_batch_csv(const ScenarioBatch& batch, const std::string& path,
                                     bool include_returns = false) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "scenario,adversarial,default_count,default_fraction,weight";
  if (include_returns) {
    for (int j = 0; j < batch.gross.cols(); ++j) out << ",gross_" << j;
  }
  out << "\n";
  for (int s = 0; s < batch.gross.rows(); ++s) {
    out << s << "," << static_cast<int>(batch.adversarial[static_cast<std::size_t>(s)]) << ","
        << batch.default_count[static_cast<std::size_t>(s)] << ","
        << detail::format_double(batch.default_fraction(s)) << ","
        << detail::format_double(batch.weight(s));
    if (include_returns) {
      for (int j = 0; j < batch.gross.cols(); ++j) {
        out << "," << detail::format_double(batch.gross(s, j));
      }
    }
    out << "\n";
  }
}

}  // namespace contagion
