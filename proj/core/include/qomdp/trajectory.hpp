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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qomdp/transducers.hpp"

namespace qomdp {

struct TrajectoryRecord {
  int step = 0;
  std::string action;
  std::string output;
  // Probability of the sampled instrument branch at this step.
  double probability = 0.0;
  DensityMatrix state;
};

// Runs the machine over the given action symbols, sampling one instrument
// outcome per step with the seeded generator. Every recorded state is a unit
// trace density matrix.
std::vector<TrajectoryRecord> simulate_trajectory(
    const QuantumMooreMachine& m, const SymbolString& actions,
    std::uint64_t seed);
std::vector<TrajectoryRecord> simulate_trajectory(
    const QuantumMealyMachine& m, const SymbolString& actions,
    std::uint64_t seed);

// CSV with one row per step; qubit trajectories carry bloch_x/y/z columns,
// and density-matrix entries are flattened to rho<i><j>_re / _im columns.
void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryRecord>& records);

// JSON lines, one record per line, complex entries as [re, im] pairs.
void write_trajectory_jsonl(std::ostream& os,
                            const std::vector<TrajectoryRecord>& records);

}  // namespace qomdp
