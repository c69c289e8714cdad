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

// Command-line front end: ingestion, equilibrium solving, optimal
// intervention, adversarial shocks, and Monte Carlo stress reports. Every
// run is fully determined by its input files, flags, and seed; thread count
// changes wall time only.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contagion/infmax.hpp"
#include "contagion/influence.hpp"
#include "contagion/ingest.hpp"
#include "contagion/io_json.hpp"
#include "contagion/metrics.hpp"
#include "contagion/network.hpp"
#include "contagion/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

using contagion::EconomicNetwork;
using contagion::EquilibriumState;
using contagion::Matrix;
using contagion::Vector;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int default_threads() {
  if (const char* env = std::getenv("CONTAGION_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

// Plain CSV of gross returns, one scenario per row, m columns. A leading
// non-numeric header row is skipped.
Matrix load_returns_csv(const std::string& path, int m) {
  std::ifstream in(path);
  if (!in) throw contagion::parse_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string trimmed = contagion::detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto cells = contagion::detail::split_line(trimmed, ',');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& cell : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw contagion::parse_error("non-numeric cell in '" + path + "'");
    }
    if (static_cast<int>(row.size()) != m) {
      throw contagion::parse_error("row in '" + path + "' has " + std::to_string(row.size()) +
                                   " cells, expected " + std::to_string(m));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw contagion::parse_error("no return rows in '" + path + "'");
  Matrix out(static_cast<int>(rows.size()), m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < m; ++j) out(static_cast<int>(r), j) = rows[r][static_cast<std::size_t>(j)];
  }
  return out;
}

contagion::Optimizer parse_optimizer(const std::string& name) {
  if (name == "greedy-int") return contagion::Optimizer::GreedyInt;
  if (name == "greedy-frac") return contagion::Optimizer::GreedyFrac;
  if (name == "discount-frac") return contagion::Optimizer::DiscountFrac;
  if (name == "discount-frac-cost") return contagion::Optimizer::DiscountFracCost;
  if (name == "brute") return contagion::Optimizer::BruteForce;
  throw CLI::ValidationError("--algo", "unknown algorithm '" + name + "'");
}

void print_equilibrium(const EconomicNetwork& net, const EquilibriumState& eq, bool per_firm) {
  std::cout << "firms: " << net.firm_count() << "\n";
  std::cout << "defaults: " << eq.failed.size() << " (fraction "
            << fmt(static_cast<double>(eq.failed.size()) / net.firm_count()) << ")\n";
  std::cout << "total market value: " << fmt(eq.market_values.sum()) << "\n";
  std::cout << "sweeps: " << eq.sweeps << "\n";
  if (per_firm) {
    std::cout << "firm,label,market_value,threshold,failed\n";
    for (int i = 0; i < net.firm_count(); ++i) {
      std::cout << i << "," << net.labels()[static_cast<std::size_t>(i)] << ","
                << fmt(eq.market_values(i)) << "," << fmt(net.thresholds()(i)) << ","
                << (eq.has_failed(i) ? 1 : 0) << "\n";
    }
  }
}

struct GlobalOptions {
  int threads = default_threads();
  std::uint64_t seed = 0;
};

int run(int argc, char** argv) {
  CLI::App app{"Economic-network contagion, optimal intervention, and stress testing"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker pool size (env CONTAGION_THREADS)");
  app.add_option("--seed", global.seed, "Global seed; all randomness derives from it");

  // ---- build ----
  auto* build = app.add_subcommand("build", "Construct a network from an input-output CSV");
  std::string build_input, build_out, emit_fixture;
  double beta_factor = 0.1, va_cutoff = 1e-6;
  bool use_fixture = false;
  int fixture_sectors = 3;
  contagion::IOTableFormat format;
  std::string delimiter = ",";
  build->add_option("--input", build_input, "Input-output CSV path");
  build->add_option("--out", build_out, "Output network JSON path");
  build->add_option("--beta-factor", beta_factor, "Failure cost as a fraction of value added");
  build->add_option("--va-cutoff", va_cutoff,
                    "Drop sectors with value added below cutoff x median");
  build->add_option("--delimiter", delimiter, "CSV delimiter (single character)");
  build->add_option("--va-label", format.value_added_label, "Value-added row label");
  build->add_option("--go-label", format.gross_output_label, "Gross-output row label");
  build->add_option("--header-rows", format.header_rows, "Header row count");
  build->add_flag("--fixture", use_fixture, "Use the embedded 3-sector example table");
  build->add_option("--emit-fixture", emit_fixture,
                    "Write a fixture CSV to this path and exit (3 sectors, or --sectors)");
  build->add_option("--sectors", fixture_sectors, "Synthetic fixture sector count");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "Solve the failure-cascade equilibrium");
  std::string solve_net, solve_mode = "best", solve_shock;
  int solve_shock_row = 0;
  bool per_firm = false;
  solve->add_option("--net", solve_net, "Network JSON")->required();
  solve->add_option("--mode", solve_mode, "best|worst");
  solve->add_option("--shock", solve_shock, "Gross-return CSV applied before solving");
  solve->add_option("--shock-row", solve_shock_row, "Scenario row of --shock to use");
  solve->add_flag("--per-firm", per_firm, "Print the per-firm table");

  // ---- intervene ----
  auto* intervene = app.add_subcommand("intervene", "Optimize an intervention for one scenario");
  std::string int_net, int_shock, int_algo = "greedy-frac", int_out;
  int int_shock_row = 0;
  double int_budget = 0.0, int_band = 0.0;
  bool int_absolute = false;
  int int_replicates = contagion::kDefaultReplicates;
  intervene->add_option("--net", int_net, "Network JSON")->required();
  intervene->add_option("--shock", int_shock, "Gross-return CSV");
  intervene->add_option("--shock-row", int_shock_row, "Scenario row of --shock to use");
  intervene->add_option("--budget", int_budget, "Budget (fraction of total initial assets)")
      ->required();
  intervene->add_flag("--absolute", int_absolute, "Treat --budget as absolute currency");
  intervene->add_option("--algo", int_algo,
                        "greedy-frac|greedy-int|discount-frac|discount-frac-cost|brute");
  intervene->add_option("--band", int_band, "Uniform threshold band halfwidth h");
  intervene->add_option("--replicates", int_replicates, "Monte Carlo replicates");
  intervene->add_option("--out", int_out, "Plan JSON output path");
  std::string int_dump_instance;
  intervene->add_option("--dump-instance", int_dump_instance,
                        "Write the reduced influence instance as JSON");

  // ---- stress ----
  auto* stress = app.add_subcommand("stress", "Monte Carlo budget sweep with TVaR reporting");
  std::string stress_net, stress_algo = "discount-frac-cost", stress_out_dir;
  int stress_scenarios = 5000;
  std::vector<double> stress_budgets{0.0, 0.0025, 0.005, 0.01};
  std::vector<double> stress_quantiles{0.1, 0.2, 0.4, 0.6, 1.0};
  contagion::ShockSpec shock_spec;
  double stress_band = 0.0, stress_bin_width = 0.01;
  int stress_replicates = contagion::kDefaultReplicates;
  stress->add_option("--net", stress_net, "Network JSON")->required();
  stress->add_option("--scenarios", stress_scenarios, "Scenario count");
  stress->add_option("--budgets", stress_budgets, "Budget fractions, ascending")
      ->delimiter(',');
  stress->add_option("--quantiles", stress_quantiles, "TVaR tail masses in (0,1]")
      ->delimiter(',');
  stress->add_option("--rho", shock_spec.rho, "Common correlation factor");
  stress->add_option("--sigma", shock_spec.sigma, "Marginal return volatility");
  stress->add_option("--drift", shock_spec.drift, "Mean return");
  stress->add_option("--floor", shock_spec.floor, "Gross return floor");
  stress->add_option("--algo", stress_algo, "Optimizer");
  stress->add_option("--band", stress_band, "Uniform threshold band halfwidth h");
  stress->add_option("--replicates", stress_replicates, "Monte Carlo replicates");
  stress->add_option("--bin-width", stress_bin_width, "Histogram bin width");
  stress->add_option("--out-dir", stress_out_dir, "Report output directory")->required();

  // ---- maxshock ----
  auto* maxshock = app.add_subcommand("maxshock", "Adversarial budgeted asset shock");
  std::string ms_net, ms_out;
  double ms_budget = 0.0;
  bool ms_exact = false, ms_absolute = false;
  maxshock->add_option("--net", ms_net, "Network JSON")->required();
  maxshock->add_option("--budget", ms_budget, "Aggregate price-reduction budget (fraction)")
      ->required();
  maxshock->add_flag("--absolute", ms_absolute, "Treat --budget as absolute currency");
  maxshock->add_flag("--exact", ms_exact, "Exact subset enumeration (m <= 20)");
  maxshock->add_option("--out", ms_out, "Write the chosen asset set as JSON");

  // ---- batch ----
  auto* batch = app.add_subcommand(
      "batch", "Importance-weighted scenario batch mixing adversarial shocks");
  std::string batch_net, batch_out;
  contagion::ShockSpec batch_spec;
  int batch_scenarios = 1000;
  contagion::ImportanceOptions importance;
  bool include_returns = false;
  batch->add_option("--net", batch_net, "Network JSON")->required();
  batch->add_option("--scenarios", batch_scenarios, "Scenario count");
  batch->add_option("--rho", batch_spec.rho, "Common correlation factor");
  batch->add_option("--sigma", batch_spec.sigma, "Marginal return volatility");
  batch->add_option("--drift", batch_spec.drift, "Mean return");
  batch->add_option("--adversarial-fraction", importance.adversarial_fraction,
                    "Mixture probability of an adversarial component");
  batch->add_option("--adversarial-budget", importance.adversarial_budget,
                    "Price-reduction budget for adversarial seeds (absolute)");
  batch->add_option("--atom-width", importance.atom_width,
                    "Stddev of the adversarial mixture components");
  batch->add_flag("--include-returns", include_returns, "Emit per-asset gross returns");
  batch->add_option("--out", batch_out, "Scenario CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (build->parsed()) {
    if (!emit_fixture.empty()) {
      std::ofstream out(emit_fixture);
      if (!out) throw std::runtime_error("cannot write '" + emit_fixture + "'");
      if (fixture_sectors <= 3) {
        out << contagion::three_sector_fixture_csv();
      } else {
        contagion::SyntheticIOOptions options;
        options.sectors = fixture_sectors;
        options.seed = global.seed != 0 ? global.seed : options.seed;
        out << contagion::synthetic_io_csv(options);
      }
      std::cout << "wrote fixture: " << emit_fixture << "\n";
      return kExitOk;
    }
    if (build_out.empty()) throw CLI::ValidationError("--out", "output path required");
    if (!delimiter.empty()) format.delimiter = delimiter.front();
    contagion::IOTable table;
    if (use_fixture) {
      std::istringstream in(contagion::three_sector_fixture_csv());
      table = contagion::parse_io_table(in, format);
    } else {
      if (build_input.empty()) throw CLI::ValidationError("--input", "input path required");
      table = contagion::load_io_table(build_input, format);
    }
    contagion::BuildReport report;
    const EconomicNetwork net = contagion::build_network(table, beta_factor, va_cutoff, &report);
    contagion::save_network(net, build_out);
    std::cout << "sectors: " << table.labels.size() << " kept: " << net.firm_count()
              << " dropped: " << report.dropped_nodes.size() << "\n";
    std::cout << "validation: ok\n";
    std::cout << "total assets: " << fmt(net.prices().lpNorm<1>()) << "\n";
    std::cout << "wrote " << build_out << "\n";
    return kExitOk;
  }

  if (solve->parsed()) {
    EconomicNetwork net = contagion::load_network(solve_net);
    const auto violations = contagion::validate_network(net);
    if (!violations.empty()) {
      std::cerr << "invalid network: " << violations.front() << "\n";
      return kExitInput;
    }
    if (!solve_shock.empty()) {
      const Matrix gross = load_returns_csv(solve_shock, net.asset_count());
      if (solve_shock_row < 0 || solve_shock_row >= gross.rows()) {
        throw contagion::parse_error("--shock-row out of range");
      }
      net = contagion::apply_shock(net, gross.row(solve_shock_row).transpose());
    }
    const auto mode = solve_mode == "worst" ? contagion::CascadeMode::WorstCase
                                            : contagion::CascadeMode::BestCase;
    print_equilibrium(net, contagion::solve_equilibrium(net, mode), per_firm);
    return kExitOk;
  }

  if (intervene->parsed()) {
    EconomicNetwork net = contagion::load_network(int_net);
    const double total_assets = net.prices().lpNorm<1>();
    if (!int_shock.empty()) {
      const Matrix gross = load_returns_csv(int_shock, net.asset_count());
      if (int_shock_row < 0 || int_shock_row >= gross.rows()) {
        throw contagion::parse_error("--shock-row out of range");
      }
      net = contagion::apply_shock(net, gross.row(int_shock_row).transpose());
    }
    const double budget = int_absolute ? int_budget : int_budget * total_assets;
    const EquilibriumState base =
        contagion::solve_equilibrium(net, contagion::CascadeMode::BestCase);
    std::cout << "baseline defaults: " << base.failed.size() << "\n";
    if (base.failed.empty()) {
      std::cerr << "nothing to intervene on: no defaults in the baseline equilibrium\n";
      return kExitInfeasible;
    }
    const contagion::InfluenceInstance inst = contagion::reduce_to_influence(net, base);
    if (!int_dump_instance.empty()) {
      std::ofstream out(int_dump_instance);
      if (!out) throw std::runtime_error("cannot write '" + int_dump_instance + "'");
      out << contagion::instance_to_json(inst).dump(2) << "\n";
      std::cout << "wrote " << int_dump_instance << "\n";
    }
    const contagion::ThresholdModel model = int_band > 0.0
                                                ? contagion::ThresholdModel::uniform_band(int_band)
                                                : contagion::ThresholdModel::fixed();
    contagion::InterventionPlan plan;
    switch (parse_optimizer(int_algo)) {
      case contagion::Optimizer::GreedyInt:
        plan = contagion::greedy_int(inst, model, budget, int_replicates, global.seed,
                                     global.threads);
        break;
      case contagion::Optimizer::GreedyFrac:
        plan = contagion::greedy_frac(inst, model, budget, int_replicates, global.seed,
                                      global.threads);
        break;
      case contagion::Optimizer::DiscountFrac:
        plan = contagion::discount_frac(inst, model, budget);
        break;
      case contagion::Optimizer::DiscountFracCost:
        plan = contagion::discount_frac_cost_adjusted(inst, model, budget);
        break;
      case contagion::Optimizer::BruteForce:
        plan = contagion::brute_force_optimum(inst, model, budget);
        break;
    }
    const Vector gamma =
        contagion::lift_payments(inst, contagion::plan_payments(plan, inst), net.firm_count());
    const EquilibriumState post = contagion::apply_intervention(net, gamma, base);
    std::cout << "plan spent: " << fmt(plan.spent) << " (budget " << fmt(budget) << ")\n";
    std::cout << "sigma estimate: " << fmt(plan.sigma_estimate) << " (std error "
              << fmt(plan.sigma_std_error) << ")\n";
    std::cout << "post-intervention defaults: " << post.failed.size() << " (reversed "
              << base.failed.size() - post.failed.size() << ")\n";
    if (!int_out.empty()) {
      std::ofstream out(int_out);
      if (!out) throw std::runtime_error("cannot write '" + int_out + "'");
      out << contagion::plan_to_json(plan, inst).dump(2) << "\n";
      std::cout << "wrote " << int_out << "\n";
    }
    return kExitOk;
  }

  if (stress->parsed()) {
    const EconomicNetwork net = contagion::load_network(stress_net);
    shock_spec.count = stress_scenarios;
    shock_spec.seed = global.seed;
    const Matrix gross = contagion::sample_shocks(shock_spec, net.asset_count());
    contagion::StressConfig config;
    config.budget_fractions = stress_budgets;
    config.optimizer = parse_optimizer(stress_algo);
    config.model = stress_band > 0.0 ? contagion::ThresholdModel::uniform_band(stress_band)
                                     : contagion::ThresholdModel::fixed();
    config.replicates = stress_replicates;
    config.seed = global.seed;
    config.threads = global.threads;
    config.quantiles = stress_quantiles;
    const contagion::StressReport report = contagion::budget_sweep(net, gross, config);
    const auto files = contagion::export_histograms(report, stress_out_dir, stress_bin_width);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    for (std::size_t qi = 0; qi < report.quantiles.size(); ++qi) {
      std::cout << "tvar q=" << fmt(report.quantiles[qi]) << " baseline "
                << fmt(report.tvar_baseline(static_cast<int>(qi)));
      for (int b = 0; b < static_cast<int>(report.budget_fractions.size()); ++b) {
        std::cout << " b" << fmt(report.budget_fractions[static_cast<std::size_t>(b)]) << "="
                  << fmt(report.tvar_table(static_cast<int>(qi), b));
      }
      std::cout << "\n";
    }
    return kExitOk;
  }

  if (maxshock->parsed()) {
    const EconomicNetwork net = contagion::load_network(ms_net);
    const double total = net.prices().lpNorm<1>();
    const double budget = ms_absolute ? ms_budget : ms_budget * total;
    const auto result = contagion::find_max_shock(
        net, budget,
        ms_exact ? contagion::MaxShockMethod::Exact : contagion::MaxShockMethod::Greedy);
    std::cout << "zeroed assets (" << result.zeroed_assets.size() << "):";
    for (int a : result.zeroed_assets) std::cout << " " << a;
    std::cout << "\n";
    std::cout << "price reduction: " << fmt(result.cost) << " (budget " << fmt(budget) << ")\n";
    std::cout << "defaults: " << result.default_count << "\n";
    if (!ms_out.empty()) {
      nlohmann::json j;
      j["zeroed_assets"] = result.zeroed_assets;
      j["cost"] = result.cost;
      j["budget"] = budget;
      j["default_count"] = result.default_count;
      std::ofstream out(ms_out);
      if (!out) throw std::runtime_error("cannot write '" + ms_out + "'");
      out << j.dump(2) << "\n";
      std::cout << "wrote " << ms_out << "\n";
    }
    return kExitOk;
  }

  if (batch->parsed()) {
    const EconomicNetwork net = contagion::load_network(batch_net);
    batch_spec.count = batch_scenarios;
    batch_spec.seed = global.seed;
    const contagion::ScenarioBatch result =
        contagion::importance_weighted_batch(net, batch_spec, importance, global.threads);
    contagion::write_scenario_batch_csv(result, batch_out, include_returns);
    double weighted = 0.0;
    for (int s = 0; s < result.default_fraction.size(); ++s) {
      weighted += result.weight(s) * result.default_fraction(s);
    }
    std::cout << "scenarios: " << batch_scenarios << "\n";
    std::cout << "weighted mean default fraction: "
              << fmt(batch_scenarios > 0 ? weighted / batch_scenarios : 0.0) << "\n";
    std::cout << "wrote " << batch_out << "\n";
    return kExitOk;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    return CLI::App{}.exit(e) == 0 ? kExitOk : kExitInput;
  } catch (const contagion::empty_failed_set_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const contagion::instance_too_large_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const contagion::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const contagion::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const contagion::singular_system_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
