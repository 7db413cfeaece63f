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

#include "drens/learners/forest.hpp"

#include <cmath>
#include <numeric>

namespace drens {

RandomForest::RandomForest(std::vector<std::shared_ptr<const DecisionTree>> trees,
                           std::size_t n_features, ForestParams params, std::uint64_t seed)
    : trees_(std::move(trees)), n_features_(n_features), params_(params), seed_(seed) {
  if (trees_.empty()) throw InvalidArgument("random forest needs at least one tree");
}

double RandomForest::proba_unchecked(std::span<const double> instance) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree->leaf_for(instance).proba;
  return sum / static_cast<double>(trees_.size());
}

nlohmann::json RandomForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : trees_) trees.push_back(tree->nodes_json());
  return model_document(kind(), n_features_, seed_,
                        {{"tree_count", params_.tree_count},
                         {"bootstrap", params_.bootstrap},
                         {"features_per_split", params_.features_per_split},
                         {"max_depth", params_.max_depth},
                         {"min_leaf", params_.min_leaf}},
                        {{"trees", std::move(trees)}});
}

std::shared_ptr<const RandomForest> RandomForest::from_json(const nlohmann::json& doc) {
  check_model_document(doc, "forest");
  const auto& hp = doc.at("hyperparameters");
  ForestParams params;
  params.tree_count = hp.at("tree_count").get<std::size_t>();
  params.bootstrap = hp.at("bootstrap").get<bool>();
  params.features_per_split = hp.at("features_per_split").get<std::size_t>();
  params.max_depth = hp.at("max_depth").get<std::size_t>();
  params.min_leaf = hp.at("min_leaf").get<std::size_t>();
  const auto n_features = doc.at("n_features").get<std::size_t>();
  const auto seed = doc.at("seed").get<std::uint64_t>();
  std::vector<std::shared_ptr<const DecisionTree>> trees;
  for (const auto& nodes : doc.at("parameters").at("trees")) {
    trees.push_back(std::make_shared<const DecisionTree>(
        DecisionTree::nodes_from_json(nodes), n_features,
        TreeParams{params.max_depth, params.min_leaf}, seed));
  }
  return std::make_shared<const RandomForest>(std::move(trees), n_features, params, seed);
}

std::shared_ptr<const RandomForest> train_random_forest(const TabularDataset& ds,
                                                        const ForestParams& params,
                                                        std::uint64_t seed) {
  if (ds.n_rows() == 0) throw TrainingError("cannot train a random forest on an empty dataset");
  if (params.tree_count < 1) throw InvalidArgument("tree_count must be at least 1");
  const std::size_t n = ds.n_rows();
  const std::size_t per_split =
      params.features_per_split != 0
          ? params.features_per_split
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ds.n_features()))));
  const TreeParams tree_params{params.max_depth, params.min_leaf};

  std::vector<std::shared_ptr<const DecisionTree>> trees;
  trees.reserve(params.tree_count);
  std::vector<std::size_t> rows(n);
  for (std::size_t t = 0; t < params.tree_count; ++t) {
    Rng rng(derive_seed(seed, t));
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees.push_back(std::make_shared<const DecisionTree>(
        grow_tree(ds, rows, tree_params, per_split, rng), ds.n_features(), tree_params, seed));
  }
  return std::make_shared<const RandomForest>(std::move(trees), ds.n_features(), params, seed);
}

}  // namespace drens
