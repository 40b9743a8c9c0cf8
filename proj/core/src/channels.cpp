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

#include "qomdp/channels.hpp"

#include <algorithm>
#include <unordered_set>

namespace qomdp {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
  }
}

void require_unique(const std::vector<std::string>& symbols, const char* what) {
  if (symbols.empty()) {
    throw ValidationError(std::string(what) + ": alphabet must be nonempty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols) {
    if (!seen.insert(s).second) {
      throw ValidationError(std::string(what) + ": duplicate symbol '" + s +
                            "'");
    }
  }
}

// Residual of sum_k K_k^dag K_k against the identity, max-entry norm.
double completeness_residual(const std::vector<const KrausMap*>& maps,
                             Eigen::Index dim) {
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const KrausMap* m : maps) {
    for (const ComplexMatrix& k : m->kraus) sum += k.adjoint() * k;
  }
  return max_abs_entry(sum - ComplexMatrix::Identity(dim, dim));
}

}  // namespace

KrausMap make_kraus_map(std::vector<ComplexMatrix> operators) {
  if (operators.empty()) {
    throw ValidationError("KrausMap: needs at least one Kraus operator");
  }
  const Eigen::Index dim = operators.front().rows();
  for (const auto& k : operators) {
    if (!is_square_finite(k)) {
      throw ValidationError("KrausMap: Kraus operators must be square and finite");
    }
    if (k.rows() != dim) {
      throw ValidationError("KrausMap: Kraus operators must share one dimension");
    }
  }
  return KrausMap{dim, std::move(operators)};
}

ChannelCheck validate_channel(const KrausMap& m, double tol) {
  const double residual = completeness_residual({&m}, m.dim);
  return ChannelCheck{residual <= tol, residual};
}

ComplexMatrix apply_cp(const KrausMap& m, const ComplexMatrix& rho) {
  require_same_dim(m.dim, rho.rows(), "apply_cp");
  require_same_dim(rho.rows(), rho.cols(), "apply_cp");
  ComplexMatrix out = ComplexMatrix::Zero(m.dim, m.dim);
  for (const ComplexMatrix& k : m.kraus) out += k * rho * k.adjoint();
  return out;
}

ComplexMatrix adjoint_apply_cp(const KrausMap& m, const ComplexMatrix& x) {
  require_same_dim(m.dim, x.rows(), "adjoint_apply_cp");
  require_same_dim(x.rows(), x.cols(), "adjoint_apply_cp");
  ComplexMatrix out = ComplexMatrix::Zero(m.dim, m.dim);
  for (const ComplexMatrix& k : m.kraus) out += k.adjoint() * x * k;
  return out;
}

KrausMap compose_cp(const KrausMap& f, const KrausMap& g) {
  require_same_dim(f.dim, g.dim, "compose_cp");
  std::vector<ComplexMatrix> product;
  product.reserve(f.kraus.size() * g.kraus.size());
  for (const ComplexMatrix& fi : f.kraus) {
    for (const ComplexMatrix& gj : g.kraus) product.push_back(fi * gj);
  }
  return KrausMap{f.dim, std::move(product)};
}

Channel::Channel(KrausMap m, double tol) : map_(std::move(m)) {
  map_ = make_kraus_map(std::move(map_.kraus));
  const ChannelCheck check = validate_channel(map_, tol);
  if (!check.ok) {
    throw ValidationError("Channel: trace preservation violated, residual " +
                          std::to_string(check.residual));
  }
}

Instrument::Instrument(std::vector<std::string> outcomes,
                       std::vector<KrausMap> branches, double tol)
    : outcomes_(std::move(outcomes)), branches_(std::move(branches)) {
  require_unique(outcomes_, "Instrument");
  if (outcomes_.size() != branches_.size()) {
    throw ValidationError("Instrument: one branch map per outcome required");
  }
  dim_ = branches_.front().dim;
  std::vector<const KrausMap*> all;
  for (auto& b : branches_) {
    b = make_kraus_map(std::move(b.kraus));
    if (b.dim != dim_) {
      throw ValidationError("Instrument: branches must share one dimension");
    }
    all.push_back(&b);
  }
  const double residual = completeness_residual(all, dim_);
  if (residual > tol) {
    throw ValidationError(
        "Instrument: union of branches is not trace preserving, residual " +
        std::to_string(residual));
  }
}

const KrausMap& Instrument::branch(const std::string& outcome) const {
  return branches_[outcome_index(outcome)];
}

std::size_t Instrument::outcome_index(const std::string& outcome) const {
  const auto it = std::find(outcomes_.begin(), outcomes_.end(), outcome);
  if (it == outcomes_.end()) {
    throw std::invalid_argument("Instrument: unknown output symbol '" +
                                outcome + "'");
  }
  return static_cast<std::size_t>(it - outcomes_.begin());
}

ConditionalChannel::ConditionalChannel(std::vector<std::string> actions,
                                       std::vector<Channel> channels)
    : actions_(std::move(actions)), channels_(std::move(channels)) {
  require_unique(actions_, "ConditionalChannel");
  if (actions_.size() != channels_.size()) {
    throw ValidationError("ConditionalChannel: one channel per action required");
  }
  dim_ = channels_.front().dim();
  for (const Channel& c : channels_) {
    if (c.dim() != dim_) {
      throw ValidationError("ConditionalChannel: members must share one dimension");
    }
  }
}

const Channel& ConditionalChannel::channel(const std::string& action) const {
  return channels_[action_index(action)];
}

std::size_t ConditionalChannel::action_index(const std::string& action) const {
  const auto it = std::find(actions_.begin(), actions_.end(), action);
  if (it == actions_.end()) {
    throw std::invalid_argument("ConditionalChannel: unknown action symbol '" +
                                action + "'");
  }
  return static_cast<std::size_t>(it - actions_.begin());
}

std::vector<OutcomeBranch> instrument_outcomes(const Instrument& omega,
                                               const DensityMatrix& rho) {
  require_same_dim(omega.dim(), rho.dim(), "instrument_outcomes");
  std::vector<OutcomeBranch> out;
  out.reserve(omega.n_outcomes());
  for (std::size_t i = 0; i < omega.n_outcomes(); ++i) {
    const ComplexMatrix unnormalized = apply_cp(omega.branch(i), rho.mat());
    const double p = unnormalized.trace().real();
    OutcomeBranch branch;
    branch.outcome = omega.outcomes()[i];
    if (p > k_branch_floor) {
      branch.probability = p;
      branch.post_state = DensityMatrix(unnormalized / p);
    }
    out.push_back(std::move(branch));
  }
  return out;
}

}  // namespace qomdp
