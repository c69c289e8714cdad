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
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "contagion/common.hpp"
#include "contagion/network.hpp"
#include "contagion/rng.hpp"

namespace contagion {

struct IOTableFormat {
  char delimiter = ',';
  int header_rows = 1;  // the last header row carries the sector labels
  std::string value_added_label = "VA";
  std::string gross_output_label = "TOT_GO";
};

// Raw input-output table: inter-sector currency flows plus the value-added
// and gross-output rows.
struct IOTable {
  std::vector<std::string> labels;
  Matrix flows;         // n x n, flows(i, j) = flow from sector i into sector j
  Vector value_added;   // n
  Vector gross_output;  // n (the TOT_GO row)
  std::string year;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.push_back("");
  return cells;
}

inline double parse_cell(const std::string& cell, int row, int col) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != cell.size() || cell.empty()) {
    throw parse_error("non-numeric cell '" + cell + "' at data row " + std::to_string(row) +
                      ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace detail

inline IOTable parse_io_table(std::istream& in, const IOTableFormat& format = {}) {
  std::vector<std::vector<std::string>> rows;
  std::string year;
  std::string line;
  while (std::getline(in, line)) {
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      const auto pos = trimmed.find("year=");
      if (pos != std::string::npos) year = detail::trim(trimmed.substr(pos + 5));
      continue;
    }
    rows.push_back(detail::split_line(trimmed, format.delimiter));
  }
  if (rows.empty()) throw parse_error("empty table");
  if (static_cast<int>(rows.size()) <= format.header_rows) {
    throw parse_error("no data rows after header");
  }

  const auto& header = rows[static_cast<std::size_t>(format.header_rows - 1)];
  if (header.size() < 2) throw parse_error("header row has no sector columns");
  std::vector<std::string> labels(header.begin() + 1, header.end());
  const int n = static_cast<int>(labels.size());

  IOTable table;
  table.labels = labels;
  table.year = year;
  table.flows = Matrix::Zero(n, n);
  table.value_added = Vector::Zero(n);
  table.gross_output = Vector::Zero(n);
  bool saw_va = false;
  bool saw_go = false;

  int flow_row = 0;
  for (std::size_t r = static_cast<std::size_t>(format.header_rows); r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (static_cast<int>(cells.size()) != n + 1) {
      throw parse_error("ragged row '" + (cells.empty() ? std::string() : cells.front()) +
                        "': expected " + std::to_string(n + 1) + " cells, found " +
                        std::to_string(cells.size()));
    }
    const std::string& label = cells.front();
    Vector values(n);
    for (int j = 0; j < n; ++j) {
      values(j) = detail::parse_cell(cells[static_cast<std::size_t>(j) + 1],
                                     static_cast<int>(r), j + 1);
    }
    if (label == format.value_added_label) {
      table.value_added = values;
      saw_va = true;
    } else if (label == format.gross_output_label) {
      table.gross_output = values;
      saw_go = true;
    } else {
      if (flow_row >= n) {
        throw parse_error("too many flow rows: row '" + label + "' exceeds " + std::to_string(n));
      }
      table.flows.row(flow_row) = values.transpose();
      ++flow_row;
    }
  }
  if (!saw_va) throw parse_error("missing value-added row '" + format.value_added_label + "'");
  if (!saw_go) throw parse_error("missing gross-output row '" + format.gross_output_label + "'");
  if (flow_row != n) {
    throw parse_error("expected " + std::to_string(n) + " flow rows, found " +
                      std::to_string(flow_row));
  }
  if (table.gross_output.minCoeff() < 0.0) throw parse_error("negative gross output");
  return table;
}

inline IOTable load_io_table(const std::string& path, const IOTableFormat& format = {}) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  return parse_io_table(in, format);
}

struct BuildReport {
  IndexList dropped_nodes;
  double median_value_added = 0.0;
};

// Input-output network construction, in order: (1) move each negative flow to
// its transposed position, (2) scale every column to sum to 1 inclusive of
// value added (a positive column with zero value added is scaled to 1 - 1e-6
// to stay strictly substochastic; zero columns stay zero), (3) zero the
// diagonal to obtain C, (4) drop sectors with value added below
// va_cutoff x median, (5) one synthetic asset per sector priced at gross
// output, (6) thresholds = default-free market value minus value added,
// (7) failure costs = beta_factor x value added.
inline EconomicNetwork build_network(const IOTable& table, double beta_factor = 0.1,
                                     double va_cutoff = 1e-6, BuildReport* report = nullptr) {
  const int n = static_cast<int>(table.labels.size());

  Matrix flows = table.flows.cwiseMax(0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (table.flows(i, j) < 0.0) flows(j, i) += -table.flows(i, j);
    }
  }

  for (int j = 0; j < n; ++j) {
    const double flow_sum = flows.col(j).sum();
    if (flow_sum <= 0.0) continue;
    const double va = std::max(table.value_added(j), 0.0);
    const double scale = va > 0.0 ? 1.0 / (flow_sum + va) : (1.0 - 1e-6) / flow_sum;
    flows.col(j) *= scale;
  }
  flows.diagonal().setZero();

  std::vector<double> va_sorted(table.value_added.data(), table.value_added.data() + n);
  std::sort(va_sorted.begin(), va_sorted.end());
  const double median = n % 2 == 1 ? va_sorted[static_cast<std::size_t>(n / 2)]
                                   : 0.5 * (va_sorted[static_cast<std::size_t>(n / 2) - 1] +
                                            va_sorted[static_cast<std::size_t>(n / 2)]);

  IndexList kept;
  IndexList dropped;
  for (int j = 0; j < n; ++j) {
    if (table.value_added(j) < va_cutoff * median) {
      dropped.push_back(j);
    } else {
      kept.push_back(j);
    }
  }
  if (kept.empty()) throw validation_error("all sectors dropped by the value-added cutoff");
  if (report != nullptr) {
    report->dropped_nodes = dropped;
    report->median_value_added = median;
  }

  const int nk = static_cast<int>(kept.size());
  Matrix c(nk, nk);
  Vector va(nk), go(nk);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(nk));
  for (int a = 0; a < nk; ++a) {
    const int ja = kept[static_cast<std::size_t>(a)];
    va(a) = table.value_added(ja);
    go(a) = table.gross_output(ja);
    labels.push_back(table.labels[static_cast<std::size_t>(ja)]);
    for (int b = 0; b < nk; ++b) c(a, b) = flows(ja, kept[static_cast<std::size_t>(b)]);
  }

  // Default-free market values pin the thresholds: with unshocked prices each
  // sector clears its threshold by exactly its value added.
  const Matrix system = Matrix::Identity(nk, nk) - c;
  const Vector chat = Vector::Ones(nk) - c.colwise().sum().transpose();
  const Vector books = Eigen::PartialPivLU<Matrix>(system).solve(go);
  const Vector theta = chat.cwiseProduct(books) - va;
  const Vector beta = beta_factor * va;

  EconomicNetwork net(std::move(c), Matrix::Identity(nk, nk), std::move(go), theta, beta,
                      std::move(labels));
  const auto violations = validate_network(net);
  if (!violations.empty()) {
    std::string msg = "constructed network is invalid:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw validation_error(msg);
  }
  return net;
}

// Hand-checkable 3-sector table for smoke tests.
inline std::string three_sector_fixture_csv() {
  return "# year=2014\n"
         "sector,AGR,MFG,SRV\n"
         "AGR,10,40,15\n"
         "MFG,30,20,25\n"
         "SRV,20,30,5\n"
         "VA,40,60,80\n"
         "TOT_GO,100,150,125\n";
}

struct SyntheticIOOptions {
  int sectors = 200;
  int cluster_size = 20;
  std::uint64_t seed = 7;
  double intra_cluster_density = 0.35;
  double cross_cluster_density = 0.02;
  double va_share_min = 0.2;
  double va_share_max = 0.55;
};

// Deterministic clustered input-output table: dense flows inside clusters,
// sparse links between them, heterogeneous sector sizes, and value-added
// shares low enough that aggregate shocks propagate.
inline std::string synthetic_io_csv(const SyntheticIOOptions& options = {}) {
  const int n = options.sectors;
  rng::Substream stream = rng::substream(options.seed, rng::kFixture);

  std::vector<double> size(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) size[static_cast<std::size_t>(j)] = std::exp(0.8 * stream.gauss());

  Matrix weight = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool same_cluster = i / options.cluster_size == j / options.cluster_size;
      const double density =
          same_cluster ? options.intra_cluster_density : options.cross_cluster_density;
      if (stream.u01() < density) {
        weight(i, j) = stream.u01() * size[static_cast<std::size_t>(i)];
      }
    }
  }

  // Column j: pick a value-added share and size the flows so that
  // flows + value added = gross output, with gross output proportional to
  // the sector size.
  Vector go(n), va(n);
  Matrix flows = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    go(j) = 100.0 * size[static_cast<std::size_t>(j)];
    const double share =
        options.va_share_min + (options.va_share_max - options.va_share_min) * stream.u01();
    va(j) = share * go(j);
    const double col_weight = weight.col(j).sum();
    if (col_weight > 0.0) {
      flows.col(j) = weight.col(j) * ((go(j) - va(j)) / col_weight);
    } else {
      va(j) = go(j);  // no suppliers: pure value-added sector
    }
  }

  std::ostringstream out;
  out << "# year=synthetic\n";
  out << std::setprecision(17);
  out << "sector";
  for (int j = 0; j < n; ++j) {
    out << ",C" << j / options.cluster_size << "S" << j % options.cluster_size;
  }
  out << "\n";
  for (int i = 0; i < n; ++i) {
    out << "C" << i / options.cluster_size << "S" << i % options.cluster_size;
    for (int j = 0; j < n; ++j) out << "," << flows(i, j);
    out << "\n";
  }
  out << "VA";
  for (int j = 0; j < n; ++j) out << "," << va(j);
  out << "\n";
  out << "TOT_GO";
  for (int j = 0; j < n; ++j) out << "," << go(j);
  out << "\n";
  return out.str();
}

}  // namespace contagion
