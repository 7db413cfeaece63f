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

// Dataset builders shared by the test binaries.

#ifndef DRENS_TESTS_SUPPORT_HPP_
#define DRENS_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "drens/dataset.hpp"

namespace drens::testing {

inline TabularDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels) {
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  Matrix x(rows.size(), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = rows[r][c];
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < d; ++c) names.push_back("f" + std::to_string(c));
  return TabularDataset(std::move(x), labels, std::move(names));
}

// Two Gaussian blobs in d dimensions, centres at -separation/2 and
// +separation/2 along every axis, unit variance.
inline TabularDataset gaussian_blobs(std::size_t per_class, std::size_t d, double separation,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int y = 0; y < 2; ++y) {
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> row(d);
      for (auto& v : row) v = (y == 1 ? 0.5 : -0.5) * separation + rng.normal();
      rows.push_back(std::move(row));
      labels.push_back(y);
    }
  }
  return make_dataset(rows, labels);
}

// Stand-in with the Messidor shape: 540 class-0 and 611 class-1 rows, 19
// features mixing binary flags, correlated lesion counts and heavy-tailed
// continuous measurements.
inline TabularDataset synthetic_messidor(std::uint64_t seed = 2026) {
  Rng rng(seed);
  std::vector<int> labels(540, 0);
  labels.resize(1151, 1);
  rng.shuffle(labels);
  std::vector<std::vector<double>> rows;
  for (int y : labels) {
    const double latent = rng.normal() + 0.9 * y;
    std::vector<double> row;
    row.push_back(rng.uniform() < 0.996 ? 1.0 : 0.0);
    row.push_back(rng.uniform() < 0.9 ? 1.0 : 0.0);
    const double base = std::round(std::exp(2.5 + 0.5 * latent + 0.3 * rng.normal()));
    for (int k = 0; k < 6; ++k) {
      row.push_back(std::max(0.0, std::round(base * (1.0 - 0.12 * k) + rng.normal())));
    }
    const double exudate = std::exp(1.0 + 0.3 * latent + rng.normal());
    for (int k = 0; k < 8; ++k) row.push_back(exudate * (1.0 - 0.1 * k) + std::abs(rng.normal()));
    row.push_back(0.52 + 0.03 * rng.normal());
    row.push_back(0.108 + 0.018 * rng.normal());
    row.push_back(rng.uniform() < 0.33 + 0.05 * y ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  return make_dataset(rows, labels);
}

// The real Messidor-features file, if one is available.
inline std::optional<std::filesystem::path> messidor_path() {
  if (const char* env = std::getenv("DRENS_MESSIDOR"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
#ifdef DRENS_DEFAULT_MESSIDOR
  const std::filesystem::path fallback(DRENS_DEFAULT_MESSIDOR);
  if (std::filesystem::exists(fallback)) return fallback;
#endif
  return std::nullopt;
}

}  // namespace drens::testing

#endif  // DRENS_TESTS_SUPPORT_HPP_
