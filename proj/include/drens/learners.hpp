/*
 * Copyright 2026 The drens Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DRENS_LEARNERS_HPP_
#define DRENS_LEARNERS_HPP_

#include <cstdint>
#include <string>
#include <variant>

#include "drens/learners/forest.hpp"
#include "drens/learners/logistic.hpp"
#include "drens/learners/mlp.hpp"
#include "drens/learners/model.hpp"
#include "drens/learners/svm.hpp"
#include "drens/learners/tree.hpp"

namespace drens {

enum class LearnerKind { tree, forest, mlp, svm, logistic };

std::string to_string(LearnerKind kind);
// Accepts the canonical names plus the CLI aliases "rf" and "nn".
LearnerKind learner_kind_from_string(const std::string& name);

using Hyperparameters = std::variant<TreeParams, ForestParams, MlpParams, SvmParams, LogisticParams>;

struct LearnerSpec {
  Hyperparameters params = ForestParams{};
  std::uint64_t seed = 42;

  static LearnerSpec defaults(LearnerKind kind, std::uint64_t seed = 42);
  LearnerKind kind() const;
  // Throws InvalidArgument when a hyperparameter is outside its range.
  void validate() const;
};

nlohmann::json hyperparameters_to_json(const Hyperparameters& params);
Hyperparameters hyperparameters_from_json(LearnerKind kind, const nlohmann::json& j);

// Sets one hyperparameter by name, e.g. ("tree_count", "50"). Unknown names
// for the spec's kind are rejected.
void apply_override(LearnerSpec& spec, const std::string& name, const std::string& value);

ModelPtr train_model(const TabularDataset& ds, const LearnerSpec& spec);
Trainer make_trainer(LearnerSpec spec);

}  // namespace drens

#endif  // DRENS_LEARNERS_HPP_
