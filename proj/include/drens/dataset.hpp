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

#ifndef DRENS_DATASET_HPP_
#define DRENS_DATASET_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "drens/common.hpp"

namespace drens {

struct Provenance {
  std::string source;
  std::size_t row_count = 0;
};

// Numeric feature matrix with binary labels (0 = healthy, 1 = DR).
//
// Immutable once constructed; the constructor enforces every invariant
// (matching lengths, labels in {0,1}, finite values, unique names). Each row
// also carries the id of the row it came from in the originally loaded file,
// which survives subsetting and projection and lets tests audit which rows a
// training step saw.
class TabularDataset {
 public:
  TabularDataset(Matrix features, std::vector<int> labels,
                 std::vector<std::string> feature_names, Provenance provenance = {},
                 std::vector<std::size_t> row_ids = {});

  std::size_t n_rows() const { return labels_.size(); }
  std::size_t n_features() const { return features_.cols(); }

  const Matrix& features() const { return features_; }
  std::span<const double> row(std::size_t i) const { return features_.row(i); }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Provenance& provenance() const { return provenance_; }
  const std::vector<std::size_t>& row_ids() const { return row_ids_; }

  // Rows in the given order; names, provenance and row ids follow along.
  TabularDataset subset(std::span<const std::size_t> rows) const;

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
  Provenance provenance_;
  std::vector<std::size_t> row_ids_;
};

using ClassCounts = std::array<std::size_t, 2>;

// CSV: comma separated, final column is the label. With has_header the first
// non-blank line supplies feature names; otherwise names are "f0", "f1", ...
TabularDataset load_csv(std::istream& in, bool has_header, const std::string& source = "<stream>");
TabularDataset load_csv(const std::filesystem::path& path, bool has_header);

// Numeric-only ARFF with a {0,1} class as the last attribute.
TabularDataset load_arff(std::istream& in, const std::string& source = "<stream>");
TabularDataset load_arff(const std::filesystem::path& path);

// Picks ARFF or CSV from the content; CSV headers are detected by the first
// line containing a non-numeric field.
TabularDataset load_dataset(const std::filesystem::path& path);

// Unlabeled feature rows for prediction. Header autodetected; an empty file
// yields a 0-row matrix.
Matrix load_feature_rows(std::istream& in, const std::string& source = "<stream>");

void write_csv(std::ostream& out, const TabularDataset& ds, bool header = true);

ClassCounts class_distribution(const TabularDataset& ds);

TabularDataset project_features(const TabularDataset& ds, std::span<const std::size_t> indices);

struct FoldAssignment {
  std::vector<std::size_t> fold_of_row;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Shuffles each class's rows with the seeded RNG and deals them round-robin
// into k folds, continuing the deal from where the previous class stopped.
FoldAssignment stratified_k_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);
FoldAssignment stratified_k_folds(const TabularDataset& ds, std::size_t k, std::uint64_t seed);

}  // namespace drens

#endif  // DRENS_DATASET_HPP_
