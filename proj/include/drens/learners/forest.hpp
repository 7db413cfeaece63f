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

#ifndef DRENS_LEARNERS_FOREST_HPP_
#define DRENS_LEARNERS_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "drens/learners/tree.hpp"

namespace drens {

struct ForestParams {
  std::size_t tree_count = 100;
  bool bootstrap = true;
  std::size_t features_per_split = 0;  // 0 selects ceil(sqrt(n_features))
  std::size_t max_depth = 12;
  std::size_t min_leaf = 2;
};

class RandomForest final : public Model {
 public:
  RandomForest(std::vector<std::shared_ptr<const DecisionTree>> trees, std::size_t n_features,
               ForestParams params, std::uint64_t seed);

  std::string kind() const override { return "forest"; }
  std::size_t n_features() const override { return n_features_; }
  nlohmann::json to_json() const override;
  static std::shared_ptr<const RandomForest> from_json(const nlohmann::json& doc);

  const std::vector<std::shared_ptr<const DecisionTree>>& trees() const { return trees_; }

 protected:
  // Arithmetic mean of the member trees' leaf probabilities.
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  std::vector<std::shared_ptr<const DecisionTree>> trees_;
  std::size_t n_features_;
  ForestParams params_;
  std::uint64_t seed_;
};

std::shared_ptr<const RandomForest> train_random_forest(const TabularDataset& ds,
                                                        const ForestParams& params = {},
                                                        std::uint64_t seed = 42);

}  // namespace drens

#endif  // DRENS_LEARNERS_FOREST_HPP_
