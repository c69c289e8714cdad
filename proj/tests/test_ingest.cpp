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

#include <sstream>

#include "contagion/ingest.hpp"
#include "contagion/network.hpp"

using namespace contagion;
using Catch::Approx;

namespace {

IOTable parse(const std::string& text, IOTableFormat format = {}) {
  std::istringstream in(text);
  return parse_io_table(in, format);
}

}  // namespace

TEST_CASE("the 3-sector fixture reads back exactly") {
  const IOTable table = parse(three_sector_fixture_csv());
  REQUIRE(table.labels == std::vector<std::string>{"AGR", "MFG", "SRV"});
  REQUIRE(table.year == "2014");
  Matrix expected(3, 3);
  expected << 10, 40, 15, 30, 20, 25, 20, 30, 5;
  REQUIRE((table.flows - expected).cwiseAbs().maxCoeff() == 0.0);
  Vector va(3), go(3);
  va << 40, 60, 80;
  go << 100, 150, 125;
  REQUIRE((table.value_added - va).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((table.gross_output - go).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parser rejects malformed tables") {
  REQUIRE_THROWS_AS(parse(""), parse_error);
  REQUIRE_THROWS_AS(parse("sector,A\nA,1\nVA,1\n"), parse_error);      // missing TOT_GO
  REQUIRE_THROWS_AS(parse("sector,A\nA,1\nTOT_GO,1\n"), parse_error);  // missing VA
  REQUIRE_THROWS_AS(parse("sector,A,B\nA,1\nB,1,2\nVA,1,1\nTOT_GO,1,1\n"),
                    parse_error);  // ragged
  REQUIRE_THROWS_AS(parse("sector,A,B\nA,1,x\nB,1,2\nVA,1,1\nTOT_GO,1,1\n"),
                    parse_error);  // non-numeric
  REQUIRE_THROWS_AS(parse("sector,A\nA,1\nVA,1\nTOT_GO,-1\n"), parse_error);  // negative output
}

TEST_CASE("two-sector hand-checked construction") {
  const std::string csv =
      "sector,A,B\n"
      "A,0,10\n"
      "B,20,0\n"
      "VA,70,90\n"
      "TOT_GO,90,100\n";
  const EconomicNetwork net = build_network(parse(csv));
  REQUIRE(net.firm_count() == 2);
  // Column A: flows 20, value added 70 -> scale 1/90; column B: 10 + 90 -> 1/100.
  REQUIRE(net.cross_holdings()(1, 0) == Approx(20.0 / 90.0).margin(1e-15));
  REQUIRE(net.cross_holdings()(0, 1) == Approx(10.0 / 100.0).margin(1e-15));
  REQUIRE(net.cross_holdings()(0, 0) == 0.0);
  // theta = chat (I - C)^{-1} go - va, computed by hand via the 2x2 inverse.
  REQUIRE(net.thresholds()(0) == Approx(105.0 / 11.0).margin(1e-9));
  REQUIRE(net.thresholds()(1) == Approx(225.0 / 11.0).margin(1e-9));
  REQUIRE(net.failure_costs()(0) == Approx(7.0).margin(1e-12));
  REQUIRE(net.failure_costs()(1) == Approx(9.0).margin(1e-12));
}

TEST_CASE("negative flows transpose before scaling") {
  const std::string csv =
      "sector,A,B\n"
      "A,0,-5\n"
      "B,20,0\n"
      "VA,70,100\n"
      "TOT_GO,90,100\n";
  const EconomicNetwork net = build_network(parse(csv));
  // The -5 at (A,B) moves to +5 at (B,A): column A flows become 25, scaled by
  // 1/(25+70); column B has no flows left.
  REQUIRE(net.cross_holdings()(1, 0) == Approx(25.0 / 95.0).margin(1e-15));
  REQUIRE(net.cross_holdings()(0, 1) == 0.0);
}

TEST_CASE("zero beta factor disables failure costs") {
  const EconomicNetwork net = build_network(parse(three_sector_fixture_csv()), 0.0);
  REQUIRE(net.failure_costs().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("built networks validate and have a default-free unshocked equilibrium") {
  const IOTable table = parse(three_sector_fixture_csv());
  const EconomicNetwork net = build_network(table);
  REQUIRE(validate_network(net).empty());
  const EquilibriumState eq = solve_equilibrium(net, CascadeMode::BestCase);
  REQUIRE(eq.failed.empty());
  // Unshocked slack above threshold equals value added, sector by sector.
  for (int i = 0; i < net.firm_count(); ++i) {
    REQUIRE(eq.market_values(i) - net.thresholds()(i) ==
            Approx(table.value_added(i)).margin(1e-9));
  }
}

TEST_CASE("construction is idempotent") {
  const IOTable table = parse(three_sector_fixture_csv());
  const EconomicNetwork a = build_network(table);
  const EconomicNetwork b = build_network(table);
  REQUIRE((a.cross_holdings() - b.cross_holdings()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((a.thresholds() - b.thresholds()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((a.prices() - b.prices()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sectors with near-zero value added are dropped") {
  const std::string csv =
      "sector,A,B,C\n"
      "A,0,10,5\n"
      "B,20,0,5\n"
      "C,1,1,0\n"
      "VA,70,90,0.000001\n"
      "TOT_GO,90,100,10\n";
  BuildReport report;
  const EconomicNetwork net = build_network(parse(csv), 0.1, 1e-3, &report);
  REQUIRE(net.firm_count() == 2);
  REQUIRE(report.dropped_nodes == IndexList{2});
  REQUIRE(net.labels() == std::vector<std::string>{"A", "B"});
}

TEST_CASE("a zero value-added column with flows is scaled just below one") {
  const std::string csv =
      "sector,A,B\n"
      "A,0,10\n"
      "B,20,0\n"
      "VA,70,0\n"
      "TOT_GO,90,100\n";
  const EconomicNetwork net = build_network(parse(csv), 0.1, -1.0);  // keep everything
  REQUIRE(net.cross_holdings().col(1).sum() == Approx(1.0 - 1e-6).margin(1e-12));
  REQUIRE(validate_network(net).empty());
}

TEST_CASE("the synthetic clustered table builds a clean network") {
  SyntheticIOOptions options;
  options.sectors = 60;
  options.cluster_size = 12;
  const std::string csv = synthetic_io_csv(options);
  const IOTable table = parse(csv);
  REQUIRE(static_cast<int>(table.labels.size()) == 60);
  const EconomicNetwork net = build_network(table);
  REQUIRE(validate_network(net).empty());
  REQUIRE(solve_equilibrium(net, CascadeMode::BestCase).failed.empty());
  // Same options, same bytes.
  REQUIRE(synthetic_io_csv(options) == csv);
}

TEST_CASE("alternative delimiters and labels are honoured") {
  IOTableFormat format;
  format.delimiter = ';';
  format.value_added_label = "ValueAdded";
  format.gross_output_label = "Output";
  const std::string csv =
      "sector;A;B\n"
      "A;0;10\n"
      "B;20;0\n"
      "ValueAdded;70;90\n"
      "Output;90;100\n";
  const IOTable table = parse(csv, format);
  REQUIRE(table.flows(1, 0) == 20.0);
}
