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

#include "qomdp/model_io.hpp"

#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "qomdp/bloch.hpp"
#include "qomdp/random.hpp"

using namespace qomdp;
using nlohmann::json;

namespace {

bool has_issue_at(const LoadResult& result, const std::string& fragment) {
  return std::any_of(result.issues.begin(), result.issues.end(),
                     [&](const ModelIssue& issue) {
                       return issue.path.find(fragment) != std::string::npos;
                     });
}

LoadResult reparse(const Model& model) {
  return parse_model_json(model_to_json(model));
}

}  // namespace

TEST_CASE("every model kind survives a save/load round trip byte-stably") {
  Rng rng(277);
  std::vector<Model> models;
  models.emplace_back(random_classical_moore(3, 2, 2, rng, true));
  models.emplace_back(random_classical_pomdp(3, 2, 2, 0.9, rng));
  models.emplace_back(random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng));
  models.emplace_back(random_mealy_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng));
  models.emplace_back(random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.9, rng));
  models.emplace_back(make_bloch_transducer());

  for (const auto& model : models) {
    const std::string first = model_to_json(model);
    const LoadResult loaded = parse_model_json(first);
    REQUIRE_MESSAGE(loaded.ok(), first.substr(0, 200));
    CHECK(kind_of(*loaded.model) == kind_of(model));
    const std::string second = model_to_json(*loaded.model);
    CHECK(first == second);
  }
}

TEST_CASE("action-reward processes round trip too") {
  Rng rng(281);
  const Model model =
      random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.5, rng, false);
  const LoadResult loaded = reparse(model);
  REQUIRE(loaded.ok());
  CHECK_FALSE(std::get<Qomdp>(*loaded.model).has_state_reward());
  CHECK(model_to_json(*loaded.model) == model_to_json(model));
}

TEST_CASE("malformed JSON is a parse error") {
  const LoadResult result = parse_model_json("{ not json");
  CHECK(result.parse_error);
  CHECK_FALSE(result.model.has_value());
  REQUIRE_FALSE(result.issues.empty());
}

TEST_CASE("missing files report cleanly") {
  const LoadResult result = load_model_file("/nonexistent/nowhere.json");
  CHECK(result.parse_error);
}

TEST_CASE("unknown kinds and missing fields carry JSON paths") {
  CHECK(has_issue_at(parse_model_json(R"({"kind": "mystery"})"), "$.kind"));

  json incomplete;
  incomplete["kind"] = "classical_moore";
  incomplete["states"] = {"s0"};
  const auto result = parse_model_json(incomplete.dump());
  CHECK_FALSE(result.ok());
  CHECK(has_issue_at(result, "$"));
}

TEST_CASE("planted classical violations are reported with locations") {
  Rng rng(283);
  const Model model = Model(random_classical_moore(3, 2, 2, rng, true));
  json j = json::parse(model_to_json(model));

  SUBCASE("non-stochastic transition column") {
    j["transitions"]["a0"][0][1] = j["transitions"]["a0"][0][1].get<double>() + 0.1;
    const auto result = parse_model_json(j.dump());
    CHECK_FALSE(result.ok());
    CHECK(has_issue_at(result, "$.transitions.a0"));
  }
  SUBCASE("negative emission entry") {
    j["emissions"][0][0] = -0.5;
    j["emissions"][1][0] = 1.5;
    const auto result = parse_model_json(j.dump());
    CHECK(has_issue_at(result, "$.emissions"));
  }
  SUBCASE("initial distribution off by mass") {
    j["initial_distribution"][0] = j["initial_distribution"][0].get<double>() + 0.2;
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.initial_distribution"));
  }
  SUBCASE("goal not absorbing") {
    const std::string goal = j["goal"].get<std::string>();
    json& column = j["transitions"]["a1"];
    // Find the goal column index from the states list.
    std::size_t g = 0;
    for (std::size_t i = 0; i < j["states"].size(); ++i) {
      if (j["states"][i] == goal) g = i;
    }
    for (std::size_t i = 0; i < j["states"].size(); ++i) {
      column[i][g] = (i == g) ? 0.5 : column[i][g].get<double>() + 0.25;
    }
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.transitions.a1"));
  }
}

TEST_CASE("planted quantum violations are reported with locations") {
  Rng rng(293);
  const Model model =
      Model(random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng));
  json j = json::parse(model_to_json(model));

  SUBCASE("channel loses trace preservation") {
    j["channels"]["a0"][0][0][0][0] =
        j["channels"]["a0"][0][0][0][0].get<double>() + 0.05;
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.channels.a0"));
  }
  SUBCASE("instrument union broken") {
    j["instrument"]["b1"][0][1][1][0] =
        j["instrument"]["b1"][0][1][1][0].get<double>() + 0.05;
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.instrument"));
  }
  SUBCASE("initial state trace off") {
    j["initial_state"][0][0][0] = j["initial_state"][0][0][0].get<double>() + 0.05;
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.initial_state"));
  }
  SUBCASE("initial state not PSD") {
    j["initial_state"] = {{{1.5, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {-0.5, 0.0}}};
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.initial_state"));
  }
  SUBCASE("projection not idempotent") {
    j["accepting_projection"] = {{{0.5, 0.0}, {0.0, 0.0}},
                                 {{0.0, 0.0}, {0.5, 0.0}}};
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.accepting_projection"));
  }
  SUBCASE("dimension mismatch across fields") {
    j["initial_state"] = {{{1.0, 0.0}}};
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.initial_state"));
  }
  SUBCASE("complex entries must be [re, im] pairs") {
    j["initial_state"][0][0] = 1.0;
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.initial_state"));
  }
}

TEST_CASE("planted qomdp violations are reported with locations") {
  Rng rng(307);
  const Model model = Model(random_qomdp(2, {"a0", "a1"}, {"b0", "b1"}, 0.9, rng));
  json j = json::parse(model_to_json(model));

  SUBCASE("reward must be Hermitian") {
    j["reward"][0][1] = {1.0, 2.0};
    j["reward"][1][0] = {1.0, 2.0};
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.reward"));
  }
  SUBCASE("discount out of range") {
    j["discount"] = 1.0;
    CHECK(has_issue_at(parse_model_json(j.dump()), "$.discount"));
  }
  SUBCASE("reward variants are mutually exclusive") {
    j["action_rewards"]["a0"] = j["reward"];
    j["action_rewards"]["a1"] = j["reward"];
    const auto result = parse_model_json(j.dump());
    CHECK_FALSE(result.ok());
  }
}

TEST_CASE("mealy instrument files validate per action") {
  Rng rng(311);
  const Model model =
      Model(random_mealy_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng));
  json j = json::parse(model_to_json(model));
  j["instruments"]["a1"]["b0"][0][0][0][0] =
      j["instruments"]["a1"]["b0"][0][0][0][0].get<double>() + 0.05;
  CHECK(has_issue_at(parse_model_json(j.dump()), "$.instruments.a1"));
}

TEST_CASE("validate-only mode honors a loosened tolerance") {
  Rng rng(313);
  const Model model =
      Model(random_moore_machine(2, {"a0", "a1"}, {"b0", "b1"}, rng));
  json j = json::parse(model_to_json(model));
  j["initial_state"][0][0][0] = j["initial_state"][0][0][0].get<double>() + 1e-7;

  LoadOptions strict;
  CHECK_FALSE(parse_model_json(j.dump(), strict).ok());

  LoadOptions loose;
  loose.structural_tol = 1e-5;
  loose.validate_only = true;
  const auto result = parse_model_json(j.dump(), loose);
  CHECK(result.issues.empty());
  CHECK_FALSE(result.parse_error);
}

TEST_CASE("solution and search reports serialize the advertised keys") {
  Rng rng(317);
  const Qomdp m = random_qomdp(2, {"a0", "a1"}, {"b0"}, 0.5, rng);
  const auto solved = value_iteration(m, 1e-3);
  const json solution = json::parse(solution_to_json(solved, 0.5, 1e-3));
  CHECK(solution.at("kind") == "alpha_set_solution");
  CHECK(solution.at("iterations").get<int>() == solved.iterations);
  CHECK(solution.at("operators").size() == solved.values.size());
  CHECK(solution.at("bound").get<double>() <= 1e-3);

  SearchResult found;
  found.status = SearchStatus::witness_found;
  found.witness = Witness{{"a0", "a1"}, SymbolString{"b0", "b0"}, 0.25};
  found.max_len_searched = 4;
  found.nodes_expanded = 17;
  found.restricted_to_realizable = true;
  const json report = json::parse(search_result_to_json(found, "non_occurrence", 0.3));
  CHECK(report.at("status") == "witness");
  CHECK(report.at("alpha").size() == 2);
  CHECK(report.at("beta").size() == 2);
  CHECK(report.at("achieved").get<double>() == 0.25);
  CHECK(report.at("maxLenSearched").get<int>() == 4);
  CHECK(report.at("nodesExpanded").get<int>() == 17);

  SearchResult exhausted;
  exhausted.status = SearchStatus::exhausted;
  exhausted.max_len_searched = 3;
  const json empty_report =
      json::parse(search_result_to_json(exhausted, "reachability", 0.9));
  CHECK(empty_report.at("status") == "exhausted");
  CHECK_FALSE(empty_report.contains("alpha"));
}
