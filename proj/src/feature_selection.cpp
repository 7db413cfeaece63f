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

#include "drens/feature_selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "drens/learners/tree.hpp"

namespace drens {

double entropy(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  if (total == 0) throw InvalidArgument("entropy of all-zero counts is undefined");
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

using Counts = std::array<std::size_t, 2>;

std::size_t classes_present(const Counts& c) {
  return static_cast<std::size_t>(c[0] > 0) + static_cast<std::size_t>(c[1] > 0);
}

// Value groups of a sorted column: rows with equal values share a group.
struct ValueGroup {
  double value;
  Counts counts;
};

void mdl_split(const std::vector<ValueGroup>& groups, std::size_t begin, std::size_t end,
               std::vector<double>& cuts) {
  Counts total{0, 0};
  for (std::size_t g = begin; g < end; ++g) {
    total[0] += groups[g].counts[0];
    total[1] += groups[g].counts[1];
  }
  const std::size_t n = total[0] + total[1];
  if (end - begin < 2 || classes_present(total) < 2) return;
  const double h = entropy(total);

  double best_weighted = std::numeric_limits<double>::infinity();
  std::size_t best_split = 0;  // first group of the right side
  Counts best_left{0, 0};
  Counts left{0, 0};
  for (std::size_t g = begin; g + 1 < end; ++g) {
    left[0] += groups[g].counts[0];
    left[1] += groups[g].counts[1];
    // Boundary points only: skip when both adjacent groups hold the same
    // single class.
    const auto& a = groups[g].counts;
    const auto& b = groups[g + 1].counts;
    const bool same_pure = classes_present(a) == 1 && classes_present(b) == 1 &&
                           (a[0] > 0) == (b[0] > 0);
    if (same_pure) continue;
    const Counts right{total[0] - left[0], total[1] - left[1]};
    const std::size_t nl = left[0] + left[1];
    const std::size_t nr = n - nl;
    const double weighted = (static_cast<double>(nl) * entropy(left) +
                             static_cast<double>(nr) * entropy(right)) /
                            static_cast<double>(n);
    if (weighted < best_weighted) {
      best_weighted = weighted;
      best_split = g + 1;
      best_left = left;
    }
  }
  if (best_split == 0) return;

  const Counts best_right{total[0] - best_left[0], total[1] - best_left[1]};
  const double gain = h - best_weighted;
  const double k = static_cast<double>(classes_present(total));
  const double k1 = static_cast<double>(classes_present(best_left));
  const double k2 = static_cast<double>(classes_present(best_right));
  const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                       (k * h - k1 * entropy(best_left) - k2 * entropy(best_right));
  const double threshold =
      (std::log2(static_cast<double>(n - 1)) + delta) / static_cast<double>(n);
  if (gain <= threshold) return;

  const double lo = groups[best_split - 1].value;
  const double hi = groups[best_split].value;
  const double mid = lo + (hi - lo) / 2.0;
  cuts.push_back(mid < hi ? mid : lo);
  mdl_split(groups, begin, best_split, cuts);
  mdl_split(groups, best_split, end, cuts);
}

}  // namespace

std::vector<double> discretize_mdl(std::span<const double> column, std::span<const int> labels) {
  if (column.size() != labels.size()) {
    throw DimensionMismatch("discretize_mdl: column has " + std::to_string(column.size()) +
                            " values but there are " + std::to_string(labels.size()) + " labels");
  }
  std::vector<std::pair<double, int>> sorted(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) sorted[i] = {column[i], labels[i]};
  std::sort(sorted.begin(), sorted.end());
  std::vector<ValueGroup> groups;
  for (const auto& [value, label] : sorted) {
    if (groups.empty() || groups.back().value < value) groups.push_back({value, {0, 0}});
    ++groups.back().counts[static_cast<std::size_t>(label)];
  }
  std::vector<double> cuts;
  mdl_split(groups, 0, groups.size(), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

DiscretizationScheme discretize_dataset(const TabularDataset& ds) {
  DiscretizationScheme scheme;
  scheme.cuts.resize(ds.n_features());
  for (std::size_t f = 0; f < ds.n_features(); ++f) {
    scheme.cuts[f] = discretize_mdl(ds.features().column(f), ds.labels());
  }
  return scheme;
}

std::size_t bin_of(double value, std::span<const double> cuts) {
  return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), value) -
                                  cuts.begin());
}

FeatureScore information_gain(const TabularDataset& ds, std::size_t feature_index,
                              const DiscretizationScheme& scheme) {
  if (feature_index >= ds.n_features()) {
    throw InvalidArgument("feature index " + std::to_string(feature_index) + " out of range");
  }
  if (feature_index >= scheme.cuts.size()) {
    throw InvalidArgument("discretization scheme does not cover feature " +
                          std::to_string(feature_index));
  }
  const auto& cuts = scheme.cuts[feature_index];
  std::vector<Counts> bins(cuts.size() + 1, Counts{0, 0});
  Counts total{0, 0};
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const auto y = static_cast<std::size_t>(ds.label(r));
    ++bins[bin_of(ds.row(r)[feature_index], cuts)][y];
    ++total[y];
  }
  const double n = static_cast<double>(ds.n_rows());
  double conditional = 0.0;
  for (const auto& bin : bins) {
    const std::size_t size = bin[0] + bin[1];
    if (size > 0) conditional += static_cast<double>(size) / n * entropy(bin);
  }
  const double h = entropy(total);
  return {feature_index, std::clamp(h - conditional, 0.0, h)};
}

std::string to_string(SelectionMethod method) {
  return method == SelectionMethod::info_gain ? "infogain" : "wrapper";
}

SelectionMethod selection_method_from_string(const std::string& name) {
  if (name == "infogain" || name == "info_gain") return SelectionMethod::info_gain;
  if (name == "wrapper") return SelectionMethod::wrapper;
  throw InvalidArgument("unknown selection method '" + name + "'");
}

std::vector<std::size_t> FeatureRanking::indices() const {
  std::vector<std::size_t> out;
  out.reserve(ordered.size());
  for (const auto& s : ordered) out.push_back(s.feature_index);
  return out;
}

FeatureRanking FeatureRanking::truncated(std::size_t k) const {
  if (k > ordered.size()) throw InvalidArgument("cannot truncate a ranking beyond its length");
  FeatureRanking out = *this;
  out.ordered.resize(k);
  out.selector_config["top_k"] = std::to_string(k);
  return out;
}

namespace {

void check_top_k(const TabularDataset& ds, std::size_t top_k) {
  if (top_k < 1 || top_k > ds.n_features()) {
    throw InvalidArgument("top_k must be in [1, " + std::to_string(ds.n_features()) + "], got " +
                          std::to_string(top_k));
  }
}

}  // namespace

FeatureRanking rank_by_information_gain(const TabularDataset& ds, std::size_t top_k) {
  check_top_k(ds, top_k);
  const auto scheme = discretize_dataset(ds);
  std::vector<FeatureScore> scores;
  for (std::size_t f = 0; f < ds.n_features(); ++f) {
    scores.push_back(information_gain(ds, f, scheme));
  }
  std::stable_sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
    return a.score > b.score;
  });
  scores.resize(top_k);
  FeatureRanking ranking{SelectionMethod::info_gain, std::move(scores), {}};
  ranking.selector_config = {{"discretization", "mdl"}, {"top_k", std::to_string(top_k)}};
  return ranking;
}

double wrapper_subset_accuracy(const TabularDataset& ds, std::span<const std::size_t> features,
                               const FoldAssignment& folds, const WrapperConfig& config) {
  const TabularDataset projected = project_features(ds, features);
  const TreeParams params{config.max_depth, config.min_leaf};
  double total = 0.0;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto train_rows = folds.train_rows(f);
    const auto test_rows = folds.test_rows(f);
    const auto tree = train_decision_tree(projected.subset(train_rows), params);
    std::size_t correct = 0;
    for (std::size_t r : test_rows) {
      correct += static_cast<std::size_t>(tree->predict(projected.row(r)) == projected.label(r));
    }
    total += static_cast<double>(correct) / static_cast<double>(test_rows.size());
  }
  return total / static_cast<double>(folds.k);
}

FeatureRanking wrapper_subset_search(const TabularDataset& ds, std::size_t top_k,
                                     std::uint64_t seed, const WrapperConfig& config) {
  check_top_k(ds, top_k);
  const auto folds = stratified_k_folds(ds, config.internal_folds, seed);
  std::vector<std::size_t> selected;
  std::vector<bool> used(ds.n_features(), false);
  FeatureRanking ranking{SelectionMethod::wrapper, {}, {}};

  while (selected.size() < top_k) {
    std::vector<std::size_t> candidates;
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
      if (!used[f]) candidates.push_back(f);
    }
    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
      std::vector<std::size_t> subset = selected;
      subset.push_back(candidates[i]);
      scores[i] = wrapper_subset_accuracy(ds, subset, folds, config);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (scores[i] > scores[best]) best = i;
    }
    selected.push_back(candidates[best]);
    used[candidates[best]] = true;
    ranking.ordered.push_back({candidates[best], scores[best]});
  }
  ranking.selector_config = {{"evaluator", "gini_tree"},
                             {"search", "forward_greedy"},
                             {"internal_folds", std::to_string(config.internal_folds)},
                             {"max_depth", std::to_string(config.max_depth)},
                             {"min_leaf", std::to_string(config.min_leaf)},
                             {"seed", std::to_string(seed)},
                             {"top_k", std::to_string(top_k)}};
  return ranking;
}

}  // namespace drens
