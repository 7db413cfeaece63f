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

#include "drens/learners.hpp"

#include <type_traits>

namespace drens {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::tree: return "tree";
    case LearnerKind::forest: return "forest";
    case LearnerKind::mlp: return "mlp";
    case LearnerKind::svm: return "svm";
    case LearnerKind::logistic: return "logistic";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "tree") return LearnerKind::tree;
  if (name == "forest" || name == "rf") return LearnerKind::forest;
  if (name == "mlp" || name == "nn") return LearnerKind::mlp;
  if (name == "svm") return LearnerKind::svm;
  if (name == "logistic") return LearnerKind::logistic;
  throw InvalidArgument("unknown learner '" + name + "'");
}

LearnerSpec LearnerSpec::defaults(LearnerKind kind, std::uint64_t seed) {
  switch (kind) {
    case LearnerKind::tree: return {TreeParams{}, seed};
    case LearnerKind::forest: return {ForestParams{}, seed};
    case LearnerKind::mlp: return {MlpParams{}, seed};
    case LearnerKind::svm: return {SvmParams{}, seed};
    case LearnerKind::logistic: return {LogisticParams{}, seed};
  }
  throw InvalidArgument("unknown learner kind");
}

LearnerKind LearnerSpec::kind() const {
  return std::visit(Overloaded{
                        [](const TreeParams&) { return LearnerKind::tree; },
                        [](const ForestParams&) { return LearnerKind::forest; },
                        [](const MlpParams&) { return LearnerKind::mlp; },
                        [](const SvmParams&) { return LearnerKind::svm; },
                        [](const LogisticParams&) { return LearnerKind::logistic; },
                    },
                    params);
}

void LearnerSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
  };
  std::visit(Overloaded{
                 [&](const TreeParams& p) { require(p.min_leaf >= 1, "min_leaf must be >= 1"); },
                 [&](const ForestParams& p) {
                   require(p.tree_count >= 1, "tree_count must be >= 1");
                   require(p.min_leaf >= 1, "min_leaf must be >= 1");
                 },
                 [&](const MlpParams& p) {
                   require(p.learning_rate > 0.0, "learning_rate must be > 0");
                   require(p.momentum >= 0.0 && p.momentum < 1.0, "momentum must be in [0, 1)");
                   require(p.batch_size >= 1, "batch_size must be >= 1");
                 },
                 [&](const SvmParams& p) {
                   require(p.c > 0.0, "C must be > 0");
                   require(p.gamma >= 0.0, "gamma must be >= 0");
                   require(p.tolerance > 0.0, "tolerance must be > 0");
                   require(p.max_passes >= 1, "max_passes must be >= 1");
                 },
                 [&](const LogisticParams& p) { require(p.l2 >= 0.0, "l2 must be >= 0"); },
             },
             params);
}

nlohmann::json hyperparameters_to_json(const Hyperparameters& params) {
  return std::visit(
      Overloaded{
          [](const TreeParams& p) -> nlohmann::json {
            return {{"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}};
          },
          [](const ForestParams& p) -> nlohmann::json {
            return {{"tree_count", p.tree_count},
                    {"bootstrap", p.bootstrap},
                    {"features_per_split", p.features_per_split},
                    {"max_depth", p.max_depth},
                    {"min_leaf", p.min_leaf}};
          },
          [](const MlpParams& p) -> nlohmann::json {
            return {{"hidden_units", p.hidden_units},
                    {"learning_rate", p.learning_rate},
                    {"momentum", p.momentum},
                    {"epochs", p.epochs},
                    {"batch_size", p.batch_size}};
          },
          [](const SvmParams& p) -> nlohmann::json {
            return {{"kernel", to_string(p.kernel)},
                    {"c", p.c},
                    {"gamma", p.gamma},
                    {"tolerance", p.tolerance},
                    {"max_passes", p.max_passes},
                    {"calibration_folds", p.calibration_folds}};
          },
          [](const LogisticParams& p) -> nlohmann::json {
            return {{"l2", p.l2}, {"iterations", p.iterations}};
          },
      },
      params);
}

Hyperparameters hyperparameters_from_json(LearnerKind kind, const nlohmann::json& j) {
  auto get = [&](const char* key, auto fallback) {
    return j.contains(key) ? j.at(key).get<decltype(fallback)>() : fallback;
  };
  switch (kind) {
    case LearnerKind::tree: {
      TreeParams p;
      p.max_depth = get("max_depth", p.max_depth);
      p.min_leaf = get("min_leaf", p.min_leaf);
      return p;
    }
    case LearnerKind::forest: {
      ForestParams p;
      p.tree_count = get("tree_count", p.tree_count);
      p.bootstrap = get("bootstrap", p.bootstrap);
      p.features_per_split = get("features_per_split", p.features_per_split);
      p.max_depth = get("max_depth", p.max_depth);
      p.min_leaf = get("min_leaf", p.min_leaf);
      return p;
    }
    case LearnerKind::mlp: {
      MlpParams p;
      p.hidden_units = get("hidden_units", p.hidden_units);
      p.learning_rate = get("learning_rate", p.learning_rate);
      p.momentum = get("momentum", p.momentum);
      p.epochs = get("epochs", p.epochs);
      p.batch_size = get("batch_size", p.batch_size);
      return p;
    }
    case LearnerKind::svm: {
      SvmParams p;
      p.kernel = kernel_type_from_string(get("kernel", to_string(p.kernel)));
      p.c = get("c", p.c);
      p.gamma = get("gamma", p.gamma);
      p.tolerance = get("tolerance", p.tolerance);
      p.max_passes = get("max_passes", p.max_passes);
      p.calibration_folds = get("calibration_folds", p.calibration_folds);
      return p;
    }
    case LearnerKind::logistic: {
      LogisticParams p;
      p.l2 = get("l2", p.l2);
      p.iterations = get("iterations", p.iterations);
      return p;
    }
  }
  throw InvalidArgument("unknown learner kind");
}

void apply_override(LearnerSpec& spec, const std::string& name, const std::string& value) {
  if (name == "seed") {
    spec.seed = std::stoull(value);
    return;
  }
  nlohmann::json j = hyperparameters_to_json(spec.params);
  if (!j.contains(name)) {
    throw InvalidArgument("'" + name + "' is not a " + to_string(spec.kind()) + " hyperparameter");
  }
  auto& slot = j[name];
  try {
    if (slot.is_boolean()) {
      if (value != "true" && value != "false") throw InvalidArgument("expected true or false");
      slot = value == "true";
    } else if (slot.is_number_unsigned() || slot.is_number_integer()) {
      std::size_t used = 0;
      if (value.empty() || value.front() == '-') throw InvalidArgument("expected a count");
      slot = std::stoull(value, &used);
      if (used != value.size()) throw InvalidArgument("expected a count");
    } else if (slot.is_number()) {
      std::size_t used = 0;
      slot = std::stod(value, &used);
      if (used != value.size()) throw InvalidArgument("expected a number");
    } else {
      slot = value;
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("invalid value '" + value + "' for " + name);
  }
  spec.params = hyperparameters_from_json(spec.kind(), j);
  spec.validate();
}

ModelPtr train_model(const TabularDataset& ds, const LearnerSpec& spec) {
  spec.validate();
  return std::visit(
      Overloaded{
          [&](const TreeParams& p) -> ModelPtr { return train_decision_tree(ds, p, spec.seed); },
          [&](const ForestParams& p) -> ModelPtr {
            return train_random_forest(ds, p, spec.seed);
          },
          [&](const MlpParams& p) -> ModelPtr { return train_mlp(ds, p, spec.seed); },
          [&](const SvmParams& p) -> ModelPtr { return train_svm(ds, p, spec.seed); },
          [&](const LogisticParams& p) -> ModelPtr { return train_logistic(ds, p); },
      },
      spec.params);
}

Trainer make_trainer(LearnerSpec spec) {
  spec.validate();
  return [spec](const TabularDataset& ds) { return train_model(ds, spec); };
}

}  // namespace drens
