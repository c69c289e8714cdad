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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "contagion/ingest.hpp"
#include "contagion/metrics.hpp"
#include "support.hpp"

using namespace contagion;
using Catch::Approx;

TEST_CASE("tvar with q = 1 is the unconditional mean") {
  Vector baseline(6), samples(6);
  baseline << 0.1, 0.9, 0.3, 0.7, 0.5, 0.2;
  samples << 0.05, 0.6, 0.2, 0.4, 0.3, 0.1;
  REQUIRE(tvar(samples, baseline, 1.0) == Approx(samples.mean()).margin(1e-15));
}

TEST_CASE("tvar of the baseline against itself is the tail mean") {
  Vector baseline(10);
  baseline << 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9;
  // q = 0.3 keeps the three largest outcomes.
  REQUIRE(tvar(baseline, baseline, 0.3) == Approx((0.7 + 0.8 + 0.9) / 3.0).margin(1e-12));
}

TEST_CASE("tvar on a hand-worked paired dataset") {
  Vector baseline(10), treated(10);
  baseline << 0.9, 0.1, 0.8, 0.2, 0.7, 0.3, 0.6, 0.4, 0.5, 0.05;
  treated << 0.5, 0.1, 0.6, 0.2, 0.1, 0.3, 0.2, 0.4, 0.5, 0.05;
  // q = 0.2 -> cutoff is the 2nd largest baseline (0.8): scenarios 0 and 2.
  REQUIRE(tvar(treated, baseline, 0.2) == Approx((0.5 + 0.6) / 2.0).margin(1e-12));
  REQUIRE_THROWS_AS(tvar(treated, baseline, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(tvar(treated, baseline, 1.5), std::invalid_argument);
}

namespace {

StressReport toy_sweep(Optimizer optimizer, int scenarios, std::vector<double> budgets,
                       int threads = 1) {
  rng::Substream stream = rng::substream(211, rng::kFixture);
  const EconomicNetwork net = testsupport::random_network(stream, 5);
  ShockSpec spec;
  spec.count = scenarios;
  spec.seed = 31;
  const Matrix gross = sample_shocks(spec, net.asset_count());
  StressConfig config;
  config.budget_fractions = std::move(budgets);
  config.optimizer = optimizer;
  config.replicates = 60;
  config.seed = 9;
  config.threads = threads;
  return budget_sweep(net, gross, config);
}

}  // namespace

TEST_CASE("a zero budget reproduces the baseline") {
  const StressReport report = toy_sweep(Optimizer::DiscountFracCost, 40, {0.0});
  REQUIRE((report.default_fraction.col(0) - report.baseline_fraction).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("an overwhelming budget removes every default") {
  const StressReport report = toy_sweep(Optimizer::DiscountFracCost, 40, {10.0});
  REQUIRE(report.default_fraction.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-scenario defaults are nonincreasing in the budget") {
  for (Optimizer optimizer : {Optimizer::DiscountFracCost, Optimizer::DiscountFrac,
                              Optimizer::GreedyFrac, Optimizer::GreedyInt}) {
    const StressReport report =
        toy_sweep(optimizer, 60, {0.0, 0.001, 0.005, 0.02, 0.1});
    for (int s = 0; s < report.scenarios; ++s) {
      REQUIRE(report.default_fraction(s, 0) == Approx(report.baseline_fraction(s)).margin(1e-15));
      for (int b = 1; b < static_cast<int>(report.budget_fractions.size()); ++b) {
        REQUIRE(report.default_fraction(s, b) <= report.default_fraction(s, b - 1) + 1e-12);
      }
    }
    // Intervention can only shrink the TVaR at any quantile.
    for (std::size_t qi = 0; qi < report.quantiles.size(); ++qi) {
      for (int b = 0; b < static_cast<int>(report.budget_fractions.size()); ++b) {
        REQUIRE(report.tvar_table(static_cast<int>(qi), b) <=
                report.tvar_baseline(static_cast<int>(qi)) + 1e-12);
      }
    }
  }
}

TEST_CASE("stress reports are identical across thread counts") {
  const StressReport a = toy_sweep(Optimizer::GreedyFrac, 30, {0.0, 0.01, 0.05}, 1);
  const StressReport b = toy_sweep(Optimizer::GreedyFrac, 30, {0.0, 0.01, 0.05}, 8);
  REQUIRE((a.default_fraction - b.default_fraction).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((a.tvar_table - b.tvar_table).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cost-adjusted discount stays within budget on an ingested network") {
  SyntheticIOOptions options;
  options.sectors = 60;
  options.cluster_size = 12;
  std::istringstream csv(synthetic_io_csv(options));
  const EconomicNetwork net = build_network(parse_io_table(csv));
  ShockSpec spec;
  spec.count = 5;
  spec.seed = 77;
  const Matrix gross = sample_shocks(spec, net.asset_count());
  const double budget = 0.01 * net.prices().lpNorm<1>();
  for (int s = 0; s < spec.count; ++s) {
    const EconomicNetwork shocked = apply_shock(net, gross.row(s).transpose());
    const EquilibriumState base = solve_equilibrium(shocked, CascadeMode::BestCase);
    if (base.failed.empty()) continue;
    const InfluenceInstance inst = reduce_to_influence(shocked, base);
    const InterventionPlan plan =
        discount_frac_cost_adjusted(inst, ThresholdModel::uniform_band(0.2), budget);
    REQUIRE(plan.spent <= budget * (1.0 + 1e-9) + 1e-9);
    REQUIRE(plan.payments.minCoeff() >= 0.0);
  }
}

TEST_CASE("histogram exports conserve scenario counts") {
  namespace fs = std::filesystem;
  const StressReport report = toy_sweep(Optimizer::DiscountFracCost, 37, {0.0, 0.01});
  const fs::path dir = fs::temp_directory_path() / "contagion_metrics_test";
  fs::remove_all(dir);
  const auto files = export_histograms(report, dir.string(), 0.05);
  REQUIRE(files.size() == 5u);

  std::ifstream hist(dir / "hist1d.csv");
  REQUIRE(hist.good());
  std::string line;
  std::getline(hist, line);
  REQUIRE(line.rfind("# {", 0) == 0);  // metadata comment
  std::getline(hist, line);            // header
  std::map<int, long> totals;
  while (std::getline(hist, line)) {
    const auto cells = detail::split_line(line, ',');
    totals[std::stoi(cells[0])] += std::stol(cells[4]);
  }
  REQUIRE(totals.size() == 3u);  // baseline + 2 budgets
  for (const auto& [index, total] : totals) REQUIRE(total == 37);
  fs::remove_all(dir);
}

TEST_CASE("a single scenario lands in exactly one bin") {
  const StressReport report = toy_sweep(Optimizer::DiscountFracCost, 1, {0.0});
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "contagion_metrics_single";
  fs::remove_all(dir);
  export_histograms(report, dir.string(), 0.01);
  std::ifstream hist(dir / "hist2d.csv");
  std::string line;
  std::getline(hist, line);
  std::getline(hist, line);
  int nonzero = 0;
  while (std::getline(hist, line)) {
    const auto cells = detail::split_line(line, ',');
    if (std::stol(cells[4]) != 0) ++nonzero;
  }
  REQUIRE(nonzero == 1);
  fs::remove_all(dir);
}
