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

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contagion/common.hpp"
#include "contagion/infmax.hpp"
#include "contagion/influence.hpp"
#include "contagion/network.hpp"

namespace contagion {

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return nlohmann::json(flat);
}

inline Matrix matrix_from_json(const nlohmann::json& j, int rows, int cols,
                               const std::string& name) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols) {
    throw parse_error(name + ": expected " + std::to_string(rows * cols) + " entries, found " +
                      std::to_string(flat.size()));
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j2 = 0; j2 < cols; ++j2) m(i, j2) = flat[static_cast<std::size_t>(i * cols + j2)];
  }
  return m;
}

inline Vector vector_from_json(const nlohmann::json& j, int size, const std::string& name) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != size) {
    throw parse_error(name + ": expected " + std::to_string(size) + " entries, found " +
                      std::to_string(flat.size()));
  }
  return Eigen::Map<const Vector>(flat.data(), size);
}

}  // namespace detail

inline nlohmann::json network_to_json(const EconomicNetwork& net) {
  nlohmann::json j;
  j["n"] = net.firm_count();
  j["m"] = net.asset_count();
  j["C"] = detail::matrix_to_json(net.cross_holdings());
  j["D"] = detail::matrix_to_json(net.asset_shares());
  j["p"] = std::vector<double>(net.prices().data(), net.prices().data() + net.asset_count());
  j["theta"] =
      std::vector<double>(net.thresholds().data(), net.thresholds().data() + net.firm_count());
  j["beta"] = std::vector<double>(net.failure_costs().data(),
                                  net.failure_costs().data() + net.firm_count());
  j["labels"] = net.labels();
  return j;
}

inline EconomicNetwork network_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  Matrix c = detail::matrix_from_json(j.at("C"), n, n, "C");
  Matrix d = detail::matrix_from_json(j.at("D"), n, m, "D");
  Vector p = detail::vector_from_json(j.at("p"), m, "p");
  Vector theta = detail::vector_from_json(j.at("theta"), n, "theta");
  Vector beta = detail::vector_from_json(j.at("beta"), n, "beta");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  return EconomicNetwork(std::move(c), std::move(d), std::move(p), std::move(theta),
                         std::move(beta), std::move(labels));
}

inline void save_network(const EconomicNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << network_to_json(net).dump(2) << "\n";
}

inline EconomicNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid network JSON: ") + e.what());
  }
  return network_from_json(j);
}

inline nlohmann::json instance_to_json(const InfluenceInstance& inst) {
  nlohmann::json j;
  const int k = inst.node_count();
  j["k"] = k;
  Matrix a(k, k);
  for (int u = 0; u < k; ++u) a.col(u) = inst.influence_column(u);
  j["A"] = detail::matrix_to_json(a);
  j["theta_tilde"] =
      std::vector<double>(inst.theta_tilde().data(), inst.theta_tilde().data() + k);
  j["weights"] = std::vector<double>(inst.weights().data(), inst.weights().data() + k);
  j["node_map"] = inst.node_map();
  return j;
}

inline InfluenceInstance instance_from_json(const nlohmann::json& j) {
  const int k = j.at("k").get<int>();
  Matrix a = detail::matrix_from_json(j.at("A"), k, k, "A");
  Vector tt = detail::vector_from_json(j.at("theta_tilde"), k, "theta_tilde");
  Vector w = detail::vector_from_json(j.at("weights"), k, "weights");
  auto node_map = j.at("node_map").get<std::vector<int>>();
  return InfluenceInstance(std::move(a), std::move(tt), std::move(w), std::move(node_map));
}

// Plans are reported in original firm indices through the instance node map.
inline nlohmann::json plan_to_json(const InterventionPlan& plan, const InfluenceInstance& inst) {
  nlohmann::json j;
  j["kind"] = plan.kind == InterventionPlan::Kind::Integral ? "integral" : "fractional";
  j["budget"] = plan.budget;
  j["spent"] = plan.spent;
  j["sigma_estimate"] = plan.sigma_estimate;
  j["stderr"] = plan.sigma_std_error;
  if (plan.kind == InterventionPlan::Kind::Integral) {
    std::vector<int> firms;
    firms.reserve(plan.seeds.size());
    for (int u : plan.seeds) firms.push_back(inst.node_map()[static_cast<std::size_t>(u)]);
    j["nodes"] = firms;
  } else {
    nlohmann::json payments = nlohmann::json::array();
    for (int u = 0; u < plan.payments.size(); ++u) {
      if (plan.payments(u) > 0.0) {
        payments.push_back({{"node", inst.node_map()[static_cast<std::size_t>(u)]},
                            {"amount", plan.payments(u)}});
      }
    }
    j["payments"] = payments;
  }
  return j;
}

}  // namespace contagion
