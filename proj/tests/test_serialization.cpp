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

#include "contagion/infmax.hpp"
#include "contagion/io_json.hpp"
#include "support.hpp"

using namespace contagion;

TEST_CASE("network JSON round-trips exactly") {
  rng::Substream stream = rng::substream(301, rng::kFixture);
  for (int trial = 0; trial < 10; ++trial) {
    const EconomicNetwork net = testsupport::random_network(stream, 5);
    const EconomicNetwork back = network_from_json(network_to_json(net));
    REQUIRE((back.cross_holdings() - net.cross_holdings()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.asset_shares() - net.asset_shares()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.prices() - net.prices()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.thresholds() - net.thresholds()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.failure_costs() - net.failure_costs()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.labels() == net.labels());

    // Identical bits in, identical equilibria out.
    const EquilibriumState a = solve_equilibrium(net, CascadeMode::BestCase);
    const EquilibriumState b = solve_equilibrium(back, CascadeMode::BestCase);
    REQUIRE(a.failed == b.failed);
  }
}

TEST_CASE("influence instance JSON round-trips exactly") {
  rng::Substream stream = rng::substream(302, rng::kFixture);
  const InfluenceInstance inst = testsupport::random_instance(stream, 6, 0.5, 0.2);
  const InfluenceInstance back = instance_from_json(instance_to_json(inst));
  REQUIRE(back.node_count() == inst.node_count());
  REQUIRE((back.dense_influence() - inst.dense_influence()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((back.theta_tilde() - inst.theta_tilde()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.node_map() == inst.node_map());
  REQUIRE(back.free_seeds() == inst.free_seeds());
}

TEST_CASE("plans serialize with original firm indices") {
  Matrix a = Matrix::Zero(3, 3);
  a(1, 0) = 0.4;
  Vector tt(3);
  tt << 0.3, 0.6, 0.9;
  const InfluenceInstance inst(a, tt, Vector(), {4, 7, 9});

  InterventionPlan plan = InterventionPlan::fractional(Vector::Zero(3), 1.0, 0.3);
  plan.payments(0) = 0.3;
  plan.sigma_estimate = 2.0;
  const nlohmann::json j = plan_to_json(plan, inst);
  REQUIRE(j.at("kind") == "fractional");
  REQUIRE(j.at("payments").size() == 1u);
  REQUIRE(j.at("payments")[0].at("node") == 4);
  REQUIRE(j.at("payments")[0].at("amount").get<double>() == 0.3);
  REQUIRE(j.at("budget").get<double>() == 1.0);

  InterventionPlan integral = InterventionPlan::integral({1, 2}, 2.0, 1.5);
  const nlohmann::json ji = plan_to_json(integral, inst);
  REQUIRE(ji.at("kind") == "integral");
  REQUIRE(ji.at("nodes").get<std::vector<int>>() == std::vector<int>{7, 9});
}

TEST_CASE("malformed network JSON is rejected") {
  nlohmann::json j = network_to_json(EconomicNetwork(
      Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Ones(2), Vector::Zero(2),
      Vector::Zero(2)));
  j["C"] = std::vector<double>{0.0, 0.0, 0.0};  // wrong length
  REQUIRE_THROWS_AS(network_from_json(j), parse_error);
}
