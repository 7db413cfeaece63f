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

// Feature scoring and ranking: information gain over MDL-discretized
// features, and greedy forward wrapper search scored by internal CV.

#ifndef DRENS_FEATURE_SELECTION_HPP_
#define DRENS_FEATURE_SELECTION_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "drens/dataset.hpp"

namespace drens {

// Shannon entropy in bits with 0*log(0) = 0. Throws if all counts are zero.
double entropy(std::span<const std::size_t> counts);

// Fayyad-Irani recursive binary discretization with the MDL stopping rule.
// Returns strictly increasing cut points; a value v falls left of cut t when
// v <= t.
std::vector<double> discretize_mdl(std::span<const double> column, std::span<const int> labels);

struct DiscretizationScheme {
  std::vector<std::vector<double>> cuts;  // per feature
};

DiscretizationScheme discretize_dataset(const TabularDataset& ds);

// Index of the bin a value lands in under the given sorted cuts.
std::size_t bin_of(double value, std::span<const double> cuts);

struct FeatureScore {
  std::size_t feature_index = 0;
  double score = 0.0;

  bool operator==(const FeatureScore&) const = default;
};

// Gain in bits of the label partition induced by the feature's cut points.
FeatureScore information_gain(const TabularDataset& ds, std::size_t feature_index,
                              const DiscretizationScheme& scheme);

enum class SelectionMethod { info_gain, wrapper };

std::string to_string(SelectionMethod method);
SelectionMethod selection_method_from_string(const std::string& name);

struct FeatureRanking {
  SelectionMethod method = SelectionMethod::info_gain;
  std::vector<FeatureScore> ordered;
  std::map<std::string, std::string> selector_config;

  std::vector<std::size_t> indices() const;
  FeatureRanking truncated(std::size_t k) const;
};

// Top-k features by descending gain, ties by ascending index. Gains are
// computed on features discretized over the whole of ds.
FeatureRanking rank_by_information_gain(const TabularDataset& ds, std::size_t top_k);

struct WrapperConfig {
  std::size_t internal_folds = 5;
  std::size_t max_depth = 5;
  std::size_t min_leaf = 5;
};

// Greedy forward selection. Each step adds the feature whose inclusion gives
// the best mean internal stratified-CV accuracy of a shallow gini tree; the
// inclusion order is the ranking and each score is the accuracy reached when
// that feature joined. Internal folds are drawn once from the seed and shared
// by every candidate.
FeatureRanking wrapper_subset_search(const TabularDataset& ds, std::size_t top_k,
                                     std::uint64_t seed, const WrapperConfig& config = {});

// Mean internal-CV accuracy of the wrapper's evaluator on a feature subset.
double wrapper_subset_accuracy(const TabularDataset& ds, std::span<const std::size_t> features,
                               const FoldAssignment& folds, const WrapperConfig& config);

}  // namespace drens

#endif  // DRENS_FEATURE_SELECTION_HPP_
