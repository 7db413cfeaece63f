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

// Confusion-matrix metrics, ROC AUC, repeated stratified cross-validation and
// the result-table summaries built from it.

#ifndef DRENS_EVALUATION_HPP_
#define DRENS_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drens/ensemble.hpp"

namespace drens {

// Positive class is 1.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels);

// Each returns nullopt when its denominator is zero.
std::optional<double> precision(const ConfusionMatrix& cm);
std::optional<double> recall(const ConfusionMatrix& cm);
std::optional<double> accuracy(const ConfusionMatrix& cm);
// Undefined when precision or recall is, or when both are zero.
std::optional<double> f_measure(const ConfusionMatrix& cm);

// Mann-Whitney form: the chance a random positive outscores a random
// negative, ties worth one half. Throws unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

enum class Metric { accuracy, precision, recall, f_measure, auc };

inline constexpr Metric kAllMetrics[] = {Metric::accuracy, Metric::precision, Metric::recall,
                                         Metric::f_measure, Metric::auc};

std::string to_string(Metric metric);

struct MetricsReport {
  ConfusionMatrix counts;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
  std::optional<double> auc;  // undefined on single-class folds

  std::optional<double> value(Metric metric) const;
};

// Labels are thresholded probabilities; AUC uses the probabilities directly.
MetricsReport evaluate_probabilities(std::span<const double> probabilities,
                                     std::span<const int> labels);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 with fewer than 2 values
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

// Mean and sample std of the defined values, summed in sorted order.
MetricSummary summarize(std::span<const std::optional<double>> values);

struct CvProtocol {
  std::size_t folds = 10;
  std::size_t repeats = 1;
  std::uint64_t seed = 42;
  // Repeat r uses seed ^ r; when false every repeat reuses seed.
  bool vary_seed_per_repeat = true;
  std::string learner;  // description echoed into reports
  std::string dataset;

  std::uint64_t repeat_seed(std::size_t repeat) const {
    return vary_seed_per_repeat ? seed ^ static_cast<std::uint64_t>(repeat) : seed;
  }
};

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  MetricsReport metrics;
};

struct CvResult {
  CvProtocol protocol;
  std::vector<FoldResult> folds;  // repeat-major, then fold

  MetricSummary summary(Metric metric) const;
};

// The trainer only ever sees the training complement of each fold; any
// fold-local work (stacking internals, per-fold selection) happens inside it.
CvResult cross_validate(const TabularDataset& ds, const Trainer& trainer,
                        const CvProtocol& protocol);
CvResult cross_validate(const TabularDataset& ds, const LearnerSpec& spec, CvProtocol protocol);
CvResult cross_validate(const TabularDataset& ds, const StackingSpec& spec, CvProtocol protocol);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_markdown() const;
  std::string to_csv() const;
};

// "0.751(0.033)"
std::string format_mean_std(const MetricSummary& summary);
std::string format_fixed(double value, int decimals = 3);

struct CvCell {
  std::string dataset;
  std::string model;
  CvResult result;
};

inline const std::vector<std::string> kTableDatasets = {
    "Original", "Wrapper top 5", "Wrapper top 10", "InfoGain top 5", "InfoGain top 10"};
inline const std::vector<std::string> kTableModels = {"SVM", "NN", "RF", "Proposed"};
inline constexpr const char* kProposedModel = "Proposed";

struct ReportTables {
  Table accuracy_grid;     // dataset x model, mean(std) accuracy
  Table best_vs_proposed;  // original dataset: best single model and the ensemble
  Table subdatasets;       // ensemble on each reduced dataset
  std::string best_single;
};

// Throws InvalidArgument naming the first missing (dataset, model) cell.
ReportTables summarize_tables(std::span<const CvCell> cells);

// One CSV row per (cell, fold): dataset, model, repeat, fold, sizes, counts,
// metrics ("" for undefined).
std::string folds_csv(std::span<const CvCell> cells);

}  // namespace drens

#endif  // DRENS_EVALUATION_HPP_
