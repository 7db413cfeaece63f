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

// Stacked generalization: base learners produce out-of-fold probabilities
// that train a meta learner, then are refit on all rows.

#ifndef DRENS_ENSEMBLE_HPP_
#define DRENS_ENSEMBLE_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "drens/learners.hpp"

namespace drens {

struct StackingSpec {
  std::vector<LearnerSpec> base_specs;
  LearnerSpec meta_spec{LogisticParams{}, 42};
  std::size_t internal_folds = 5;
  std::uint64_t seed = 42;

  // Forest, MLP and SVM under a logistic meta learner, all seeded with seed.
  static StackingSpec defaults(std::uint64_t seed = 42);
  void validate() const;
};

class StackedModel final : public Model {
 public:
  StackedModel(std::vector<ModelPtr> bases, std::vector<std::string> base_names, ModelPtr meta);

  std::string kind() const override { return "stacking"; }
  std::size_t n_features() const override { return n_features_; }
  nlohmann::json to_json() const override;

  const std::vector<ModelPtr>& bases() const { return bases_; }
  const std::vector<std::string>& base_names() const { return base_names_; }
  const ModelPtr& meta() const { return meta_; }

  // The base probabilities the meta learner sees for this instance.
  std::vector<double> meta_features(std::span<const double> instance) const;

 protected:
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  std::vector<ModelPtr> bases_;
  std::vector<std::string> base_names_;
  ModelPtr meta_;
  std::size_t n_features_;
};

struct StackingPrediction {
  int label = 0;
  double probability = 0.0;
};

StackingPrediction predict_stacking(const StackedModel& model, std::span<const double> instance);

struct NamedTrainer {
  std::string name;
  Trainer train;
};

// Generic form: the base and meta trainers are arbitrary callables. Each
// (base, internal fold) job trains on the fold's complement and scores the
// held-out rows; the meta trainer receives the n_rows x n_bases matrix of
// those out-of-fold probabilities; every base is then refit on all of ds.
std::shared_ptr<const StackedModel> train_stacking(const TabularDataset& ds,
                                                   std::span<const NamedTrainer> bases,
                                                   const Trainer& meta,
                                                   std::size_t internal_folds,
                                                   std::uint64_t seed);

std::shared_ptr<const StackedModel> train_stacking(const TabularDataset& ds,
                                                   const StackingSpec& spec);

// Restricts a model to a fixed subset of the incoming feature columns.
class ProjectedModel final : public Model {
 public:
  ProjectedModel(std::vector<std::size_t> indices, std::size_t n_features, ModelPtr inner);

  std::string kind() const override { return "projected"; }
  std::size_t n_features() const override { return n_features_; }
  nlohmann::json to_json() const override;

  const std::vector<std::size_t>& indices() const { return indices_; }
  const ModelPtr& inner() const { return inner_; }

 protected:
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  std::vector<std::size_t> indices_;
  std::size_t n_features_;
  ModelPtr inner_;
};

}  // namespace drens

#endif  // DRENS_ENSEMBLE_HPP_
