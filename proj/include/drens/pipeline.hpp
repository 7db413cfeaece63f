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

// End-to-end runs shared by the CLI and the Python module: feature ranking
// reports, the full reproduction grid, run manifests and checksums.

#ifndef DRENS_PIPELINE_HPP_
#define DRENS_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drens/evaluation.hpp"
#include "drens/feature_selection.hpp"

namespace drens {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view text);

nlohmann::json ranking_to_json(const FeatureRanking& ranking, const TabularDataset& ds);
// rank | index | name | score
Table ranking_table(const FeatureRanking& ranking, const TabularDataset& ds);

FeatureRanking rank_features(const TabularDataset& ds, SelectionMethod method, std::size_t top_k,
                             std::uint64_t seed, const WrapperConfig& wrapper = {});

// Fits selection on the training rows it is given, then trains inner on the
// selected columns. The resulting model accepts full-width rows.
Trainer selecting_trainer(SelectionMethod method, std::size_t top_k, std::uint64_t seed,
                          Trainer inner, WrapperConfig wrapper = {});

// The model columns of the result grid, in order: SVM, NN, RF, Proposed.
struct GridModel {
  std::string name;
  std::string description;
  Trainer trainer;
};
std::vector<GridModel> default_grid_models(std::uint64_t seed);

struct ReproduceConfig {
  std::uint64_t seed = 42;
  std::size_t folds = 10;
  std::size_t repeats = 1;
  bool strict_selection = false;
  WrapperConfig wrapper;
  std::function<void(const std::string&)> progress;
};

struct ReproduceResult {
  FeatureRanking infogain;  // top 10; the top-5 set is its prefix
  FeatureRanking wrapper;
  std::vector<CvCell> cells;
  ReportTables tables;
  std::vector<CvCell> strict_cells;
  std::optional<ReportTables> strict_tables;
};

// In-memory reproduction: ranks once on all of ds, builds the four reduced
// datasets and cross-validates every grid model on all five. With
// strict_selection the reduced cells are repeated with selection refit
// inside each training fold.
ReproduceResult run_reproduction(const TabularDataset& ds, const ReproduceConfig& config,
                                 std::vector<GridModel> models = {});

// Thrown by reproduce_to_directory; names the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Loads the dataset, runs the reproduction and writes every report plus
// manifest.json into out_dir. On failure, outputs written so far are kept
// alongside a FAILED marker and a StageError is thrown.
ReproduceResult reproduce_to_directory(const std::filesystem::path& data_path,
                                       const std::filesystem::path& out_dir,
                                       const ReproduceConfig& config);

// Skeleton of a run manifest: tool version, command, seed, config and the
// dataset's identity.
nlohmann::json run_manifest(const std::string& command, std::uint64_t seed, nlohmann::json config,
                            const std::filesystem::path& data_path, const TabularDataset& ds);

}  // namespace drens

#endif  // DRENS_PIPELINE_HPP_
