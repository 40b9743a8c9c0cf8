// Copyright 2026 The qomdp Authors
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

#include "qomdp/trajectory.hpp"

#include <ostream>
#include <random>

#include "json.hpp"
#include "qomdp/bloch.hpp"

namespace qomdp {

namespace {

void print_double(std::ostream& os, double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  os << buffer;
}

}  // namespace

std::vector<TrajectoryRecord> simulate_trajectory(const QuantumMooreMachine& m,
                                                  const SymbolString& actions,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TrajectoryRecord> records;
  DensityMatrix state = m.initial_state();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Channel& channel = m.transition().channel(actions[i]);
    const DensityMatrix after =
        DensityMatrix(apply_cp(channel.kraus_map(), state.mat()));
    const auto branches = instrument_outcomes(m.output(), after);
    double draw = unit(rng);
    const OutcomeBranch* picked = nullptr;
    for (const auto& branch : branches) {
      if (!branch.post_state.has_value()) continue;
      picked = &branch;
      if (draw < branch.probability) break;
      draw -= branch.probability;
    }
    if (picked == nullptr) {
      throw std::runtime_error("simulate_trajectory: no realizable instrument branch");
    }
    state = *picked->post_state;
    records.push_back(TrajectoryRecord{static_cast<int>(i), actions[i],
                                       picked->outcome, picked->probability,
                                       state});
  }
  return records;
}

std::vector<TrajectoryRecord> simulate_trajectory(const QuantumMealyMachine& m,
                                                  const SymbolString& actions,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TrajectoryRecord> records;
  DensityMatrix state = m.initial_state();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto branches =
        instrument_outcomes(m.instrument(actions[i]), state);
    double draw = unit(rng);
    const OutcomeBranch* picked = nullptr;
    for (const auto& branch : branches) {
      if (!branch.post_state.has_value()) continue;
      picked = &branch;
      if (draw < branch.probability) break;
      draw -= branch.probability;
    }
    if (picked == nullptr) {
      throw std::runtime_error("simulate_trajectory: no realizable instrument branch");
    }
    state = *picked->post_state;
    records.push_back(TrajectoryRecord{static_cast<int>(i), actions[i],
                                       picked->outcome, picked->probability,
                                       state});
  }
  return records;
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) {
    os << "step,action,output,probability\n";
    return;
  }
  const Eigen::Index dim = records.front().state.dim();
  os << "step,action,output,probability";
  if (dim == 2) os << ",bloch_x,bloch_y,bloch_z";
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      os << ",rho" << i << j << "_re,rho" << i << j << "_im";
    }
  }
  os << "\n";
  for (const auto& record : records) {
    os << record.step << "," << record.action << "," << record.output << ",";
    print_double(os, record.probability);
    if (dim == 2) {
      const auto bloch = bloch_vector(record.state);
      for (double coord : bloch) {
        os << ",";
        print_double(os, coord);
      }
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        os << ",";
        print_double(os, record.state.mat()(i, j).real());
        os << ",";
        print_double(os, record.state.mat()(i, j).imag());
      }
    }
    os << "\n";
  }
}

void write_trajectory_jsonl(std::ostream& os,
                            const std::vector<TrajectoryRecord>& records) {
  for (const auto& record : records) {
    nlohmann::json row;
    row["step"] = record.step;
    row["action"] = record.action;
    row["output"] = record.output;
    row["probability"] = record.probability;
    nlohmann::json state = nlohmann::json::array();
    const auto& mat = record.state.mat();
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      nlohmann::json row_entries = nlohmann::json::array();
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        row_entries.push_back({mat(i, j).real(), mat(i, j).imag()});
      }
      state.push_back(std::move(row_entries));
    }
    row["state"] = std::move(state);
    if (record.state.dim() == 2) {
      const auto bloch = bloch_vector(record.state);
      row["bloch"] = {bloch[0], bloch[1], bloch[2]};
    }
    os << row.dump() << "\n";
  }
}

}  // namespace qomdp
