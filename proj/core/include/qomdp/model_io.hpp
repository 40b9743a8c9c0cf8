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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qomdp/classical.hpp"
#include "qomdp/search.hpp"
#include "qomdp/solver.hpp"
#include "qomdp/transducers.hpp"

// JSON model files. Every file carries a "kind" of classical_moore,
// classical_pomdp, quantum_moore, quantum_mealy or qomdp; complex numbers
// are always two-element [re, im] arrays and matrices are row-major nested
// arrays. See the README for the field layout of each kind.

namespace qomdp {

using Model = std::variant<ClassicalMoore, ClassicalPomdp, QuantumMooreMachine,
                           QuantumMealyMachine, Qomdp>;

struct ModelIssue {
  // JSON-path-style location, e.g. "$.channels.a0[1]".
  std::string path;
  std::string message;
};

struct LoadOptions {
  // Structural validation tolerance for the numeric invariants.
  double structural_tol = k_structural_tol;
  // Report issues only, without constructing the typed model afterwards.
  // Lets the tolerance be overridden past the library defaults.
  bool validate_only = false;
};

struct LoadResult {
  std::optional<Model> model;
  std::vector<ModelIssue> issues;
  // True when the text was not valid JSON at all (issues hold the message).
  bool parse_error = false;

  bool ok() const { return model.has_value() && issues.empty(); }
};

LoadResult parse_model_json(const std::string& text,
                            const LoadOptions& options = {});
LoadResult load_model_file(const std::string& path,
                           const LoadOptions& options = {});

std::string kind_of(const Model& model);

// Pretty-printed JSON; save(load(file)) is byte-stable modulo key ordering
// and float formatting.
std::string model_to_json(const Model& model);
void save_model_file(const Model& model, const std::string& path);

// Solver output: alpha operators with action tags, iteration count and the
// certified bound, plus the discount and requested epsilon.
std::string solution_to_json(const ValueIterationResult& result,
                             double discount, double epsilon);

// Witness / exhausted / cap report for the search commands.
std::string search_result_to_json(const SearchResult& result,
                                  const std::string& problem, double tau);

}  // namespace qomdp
