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

#ifndef DRENS_LEARNERS_TREE_HPP_
#define DRENS_LEARNERS_TREE_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "drens/learners/model.hpp"

namespace drens {

struct TreeParams {
  std::size_t max_depth = 12;
  std::size_t min_leaf = 2;
};

// Split nodes route x[feature] <= threshold to the left child. Leaves carry
// the class-1 frequency of the training rows that reached them.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double proba = 0.0;
  std::size_t samples = 0;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree final : public Model {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features, TreeParams params,
               std::uint64_t seed);

  std::string kind() const override { return "tree"; }
  std::size_t n_features() const override { return n_features_; }
  nlohmann::json to_json() const override;
  static std::shared_ptr<const DecisionTree> from_json(const nlohmann::json& doc);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  std::size_t depth() const;
  const TreeNode& leaf_for(std::span<const double> instance) const;

  nlohmann::json nodes_json() const;
  static std::vector<TreeNode> nodes_from_json(const nlohmann::json& j);

 protected:
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_;
  TreeParams params_;
  std::uint64_t seed_;
};

// Greedy gini-impurity tree. features_per_split < n_features samples that
// many candidate features per node from rng; otherwise all are tried and rng
// is never touched. Ties go to the lower feature index, then lower threshold.
std::vector<TreeNode> grow_tree(const TabularDataset& ds, std::span<const std::size_t> rows,
                                const TreeParams& params, std::size_t features_per_split,
                                Rng& rng);

std::shared_ptr<const DecisionTree> train_decision_tree(const TabularDataset& ds,
                                                        const TreeParams& params = {},
                                                        std::uint64_t seed = 0);

}  // namespace drens

#endif  // DRENS_LEARNERS_TREE_HPP_
