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

#include "drens/learners/tree.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace drens {

namespace {

double gini(std::size_t positives, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

// Midpoint that stays strictly below hi even when lo and hi are adjacent
// doubles.
double split_point(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

class TreeGrower {
 public:
  TreeGrower(const TabularDataset& ds, const TreeParams& params, std::size_t features_per_split,
             Rng& rng)
      : ds_(ds), params_(params), features_per_split_(features_per_split), rng_(rng) {
    all_features_.resize(ds.n_features());
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> grow(std::vector<std::size_t> rows) {
    nodes_.clear();
    build(rows, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  int build(std::vector<std::size_t>& rows, std::size_t depth) {
    std::size_t positives = 0;
    for (std::size_t r : rows) positives += static_cast<std::size_t>(ds_.label(r));
    const int index = static_cast<int>(nodes_.size());
    TreeNode node;
    node.samples = rows.size();
    node.proba = rows.empty() ? 0.0 : static_cast<double>(positives) / rows.size();
    nodes_.push_back(node);

    const bool pure = positives == 0 || positives == rows.size();
    if (pure || depth >= params_.max_depth || rows.size() < 2 * params_.min_leaf) return index;

    const Split split = best_split(rows, positives);
    if (split.feature < 0) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (ds_.row(r)[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes_[index].feature = split.feature;
    nodes_[index].threshold = split.threshold;
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  std::vector<std::size_t> candidate_features() {
    if (features_per_split_ == 0 || features_per_split_ >= all_features_.size()) {
      return all_features_;
    }
    std::vector<std::size_t> pool = all_features_;
    for (std::size_t i = 0; i < features_per_split_; ++i) {
      std::swap(pool[i], pool[i + rng_.below(pool.size() - i)]);
    }
    pool.resize(features_per_split_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  Split best_split(const std::vector<std::size_t>& rows, std::size_t positives) {
    const std::size_t n = rows.size();
    const double parent = gini(positives, n);
    Split best;
    best.impurity = parent;
    const auto features = candidate_features();
    auto& sorted = scratch_;
    for (std::size_t f : features) {
      sorted.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        sorted[i] = {ds_.row(rows[i])[f], ds_.label(rows[i])};
      }
      std::sort(sorted.begin(), sorted.end());
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += static_cast<std::size_t>(sorted[i].second);
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < params_.min_leaf) continue;
        if (n_right < params_.min_leaf) break;
        if (!(sorted[i].first < sorted[i + 1].first)) continue;
        const double impurity = (n_left * gini(left_pos, n_left) +
                                 n_right * gini(positives - left_pos, n_right)) /
                                static_cast<double>(n);
        if (impurity < best.impurity - 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = split_point(sorted[i].first, sorted[i + 1].first);
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  const TabularDataset& ds_;
  TreeParams params_;
  std::size_t features_per_split_;
  Rng& rng_;
  std::vector<std::size_t> all_features_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, int>> scratch_;
};

}  // namespace

std::vector<TreeNode> grow_tree(const TabularDataset& ds, std::span<const std::size_t> rows,
                                const TreeParams& params, std::size_t features_per_split,
                                Rng& rng) {
  if (rows.empty()) throw TrainingError("cannot grow a tree on an empty dataset");
  TreeGrower grower(ds, params, features_per_split, rng);
  return grower.grow(std::vector<std::size_t>(rows.begin(), rows.end()));
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features, TreeParams params,
                           std::uint64_t seed)
    : nodes_(std::move(nodes)), n_features_(n_features), params_(params), seed_(seed) {
  if (nodes_.empty()) throw InvalidArgument("decision tree needs at least one node");
  for (const auto& node : nodes_) {
    if (node.is_leaf()) continue;
    const auto count = static_cast<int>(nodes_.size());
    if (static_cast<std::size_t>(node.feature) >= n_features_ || node.left <= 0 ||
        node.right <= 0 || node.left >= count || node.right >= count) {
      throw InvalidArgument("malformed decision tree node");
    }
  }
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> instance) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const int next = instance[static_cast<std::size_t>(node->feature)] <= node->threshold
                         ? node->left
                         : node->right;
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return *node;
}

double DecisionTree::proba_unchecked(std::span<const double> instance) const {
  return leaf_for(instance).proba;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth_of(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth_of[i]);
    if (!nodes_[i].is_leaf()) {
      depth_of[static_cast<std::size_t>(nodes_[i].left)] = depth_of[i] + 1;
      depth_of[static_cast<std::size_t>(nodes_[i].right)] = depth_of[i] + 1;
    }
  }
  return deepest;
}

nlohmann::json DecisionTree::nodes_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : nodes_) {
    out.push_back({n.feature, n.threshold, n.left, n.right, n.proba, n.samples});
  }
  return out;
}

std::vector<TreeNode> DecisionTree::nodes_from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 6) throw ParseError("malformed tree node");
    TreeNode n;
    n.feature = item[0].get<int>();
    n.threshold = item[1].get<double>();
    n.left = item[2].get<int>();
    n.right = item[3].get<int>();
    n.proba = item[4].get<double>();
    n.samples = item[5].get<std::size_t>();
    nodes.push_back(n);
  }
  return nodes;
}

nlohmann::json DecisionTree::to_json() const {
  return model_document(
      kind(), n_features_, seed_,
      {{"max_depth", params_.max_depth}, {"min_leaf", params_.min_leaf}},
      {{"nodes", nodes_json()}});
}

std::shared_ptr<const DecisionTree> DecisionTree::from_json(const nlohmann::json& doc) {
  check_model_document(doc, "tree");
  const auto& hp = doc.at("hyperparameters");
  TreeParams params{hp.at("max_depth").get<std::size_t>(), hp.at("min_leaf").get<std::size_t>()};
  return std::make_shared<const DecisionTree>(
      nodes_from_json(doc.at("parameters").at("nodes")), doc.at("n_features").get<std::size_t>(),
      params, doc.at("seed").get<std::uint64_t>());
}

std::shared_ptr<const DecisionTree> train_decision_tree(const TabularDataset& ds,
                                                        const TreeParams& params,
                                                        std::uint64_t seed) {
  if (ds.n_rows() == 0) throw TrainingError("cannot train a decision tree on an empty dataset");
  if (params.min_leaf < 1) throw InvalidArgument("min_leaf must be at least 1");
  std::vector<std::size_t> rows(ds.n_rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(seed);
  return std::make_shared<const DecisionTree>(grow_tree(ds, rows, params, 0, rng),
                                              ds.n_features(), params, seed);
}

}  // namespace drens
