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

#include "drens/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

namespace drens {

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DimensionMismatch("confusion_matrix: " + std::to_string(predictions.size()) +
                            " predictions for " + std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      throw InvalidArgument("confusion_matrix: values must be 0 or 1");
    }
    if (p == 1) {
      ++(y == 1 ? cm.tp : cm.fp);
    } else {
      ++(y == 1 ? cm.fn : cm.tn);
    }
  }
  return cm;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
std::optional<double> recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
std::optional<double> accuracy(const ConfusionMatrix& cm) {
  return ratio(cm.tp + cm.tn, cm.total());
}

std::optional<double> f_measure(const ConfusionMatrix& cm) {
  const auto p = precision(cm);
  const auto r = recall(cm);
  if (!p || !r || *p + *r == 0.0) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionMismatch("auc: " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of positive mid-ranks, 1-based.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) {
        rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw InvalidArgument("auc needs both classes present");
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::accuracy: return "accuracy";
    case Metric::precision: return "precision";
    case Metric::recall: return "recall";
    case Metric::f_measure: return "f_measure";
    case Metric::auc: return "auc";
  }
  return "unknown";
}

std::optional<double> MetricsReport::value(Metric metric) const {
  switch (metric) {
    case Metric::accuracy: return accuracy;
    case Metric::precision: return precision;
    case Metric::recall: return recall;
    case Metric::f_measure: return f_measure;
    case Metric::auc: return auc;
  }
  return std::nullopt;
}

MetricsReport evaluate_probabilities(std::span<const double> probabilities,
                                     std::span<const int> labels) {
  std::vector<int> predicted(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    predicted[i] = threshold_label(probabilities[i]);
  }
  MetricsReport report;
  report.counts = confusion_matrix(predicted, labels);
  report.accuracy = accuracy(report.counts);
  report.precision = precision(report.counts);
  report.recall = recall(report.counts);
  report.f_measure = f_measure(report.counts);
  const bool both = std::find(labels.begin(), labels.end(), 0) != labels.end() &&
                    std::find(labels.begin(), labels.end(), 1) != labels.end();
  if (both) report.auc = auc(probabilities, labels);
  return report;
}

MetricSummary summarize(std::span<const std::optional<double>> values) {
  MetricSummary s;
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) {
      defined.push_back(*v);
    } else {
      ++s.undefined;
    }
  }
  s.defined = defined.size();
  if (defined.empty()) return s;
  std::sort(defined.begin(), defined.end());
  double sum = 0.0;
  for (double v : defined) sum += v;
  s.mean = sum / static_cast<double>(defined.size());
  if (defined.size() >= 2) {
    double ss = 0.0;
    for (double v : defined) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(defined.size() - 1));
  }
  return s;
}

MetricSummary CvResult::summary(Metric metric) const {
  std::vector<std::optional<double>> values;
  values.reserve(folds.size());
  for (const auto& f : folds) values.push_back(f.metrics.value(metric));
  return summarize(values);
}

CvResult cross_validate(const TabularDataset& ds, const Trainer& trainer,
                        const CvProtocol& protocol) {
  if (protocol.folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  if (protocol.repeats < 1) throw InvalidArgument("cross-validation needs at least 1 repeat");
  std::vector<FoldAssignment> assignments;
  for (std::size_t r = 0; r < protocol.repeats; ++r) {
    assignments.push_back(stratified_k_folds(ds, protocol.folds, protocol.repeat_seed(r)));
  }
  CvResult result;
  result.protocol = protocol;
  result.folds.resize(protocol.folds * protocol.repeats);
  parallel_for(result.folds.size(), [&](std::size_t job) {
    const std::size_t r = job / protocol.folds;
    const std::size_t f = job % protocol.folds;
    const auto& folds = assignments[r];
    const auto train_rows = folds.train_rows(f);
    const auto test_rows = folds.test_rows(f);
    ModelPtr model;
    try {
      model = trainer(ds.subset(train_rows));
    } catch (const std::exception& e) {
      throw TrainingError("repeat " + std::to_string(r) + ", fold " + std::to_string(f) + ": " +
                          e.what());
    }
    std::vector<double> probabilities(test_rows.size());
    std::vector<int> labels(test_rows.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      probabilities[i] = model->predict_proba(ds.row(test_rows[i]));
      labels[i] = ds.label(test_rows[i]);
    }
    auto& out = result.folds[job];
    out.repeat = r;
    out.fold = f;
    out.train_size = train_rows.size();
    out.test_size = test_rows.size();
    out.metrics = evaluate_probabilities(probabilities, labels);
  });
  return result;
}

CvResult cross_validate(const TabularDataset& ds, const LearnerSpec& spec, CvProtocol protocol) {
  if (protocol.learner.empty()) protocol.learner = to_string(spec.kind());
  return cross_validate(ds, make_trainer(spec), protocol);
}

CvResult cross_validate(const TabularDataset& ds, const StackingSpec& spec, CvProtocol protocol) {
  spec.validate();
  if (protocol.learner.empty()) protocol.learner = "stacking";
  return cross_validate(
      ds, [spec](const TabularDataset& train) -> ModelPtr { return train_stacking(train, spec); },
      protocol);
}

std::string Table::to_markdown() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (const auto& c : cells) out << ' ' << c << " |";
    out << '\n';
  };
  line(header);
  out << '|';
  for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
  out << '\n';
  for (const auto& row : rows) line(row);
  return out.str();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << csv_field(cells[i]);
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return out.str();
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_mean_std(const MetricSummary& summary) {
  return format_fixed(summary.mean) + "(" + format_fixed(summary.std) + ")";
}

ReportTables summarize_tables(std::span<const CvCell> cells) {
  std::map<std::pair<std::string, std::string>, const CvResult*> grid;
  for (const auto& cell : cells) grid[{cell.dataset, cell.model}] = &cell.result;
  auto at = [&](const std::string& dataset, const std::string& model) -> const CvResult& {
    const auto it = grid.find({dataset, model});
    if (it == grid.end()) {
      throw InvalidArgument("missing result for dataset '" + dataset + "', model '" + model + "'");
    }
    return *it->second;
  };
  for (const auto& d : kTableDatasets) {
    for (const auto& m : kTableModels) at(d, m);
  }

  ReportTables out;
  out.accuracy_grid.header = {"Dataset"};
  for (const auto& m : kTableModels) out.accuracy_grid.header.push_back(m);
  for (const auto& d : kTableDatasets) {
    std::vector<std::string> row{d};
    for (const auto& m : kTableModels) {
      row.push_back(format_mean_std(at(d, m).summary(Metric::accuracy)));
    }
    out.accuracy_grid.rows.push_back(std::move(row));
  }

  const std::string& original = kTableDatasets.front();
  double best = -1.0;
  for (const auto& m : kTableModels) {
    if (m == kProposedModel) continue;
    const double acc = at(original, m).summary(Metric::accuracy).mean;
    if (acc > best) {
      best = acc;
      out.best_single = m;
    }
  }

  const std::vector<Metric> quartet = {Metric::accuracy, Metric::recall, Metric::precision,
                                       Metric::auc};
  auto metric_row = [&](std::string label, const CvResult& r) {
    std::vector<std::string> row{std::move(label)};
    for (Metric metric : quartet) row.push_back(format_fixed(r.summary(metric).mean));
    return row;
  };
  out.best_vs_proposed.header = {"Model", "Accuracy", "Recall", "Precision", "AUC"};
  out.best_vs_proposed.rows.push_back(
      metric_row("Best single (" + out.best_single + ")", at(original, out.best_single)));
  out.best_vs_proposed.rows.push_back(metric_row(kProposedModel, at(original, kProposedModel)));

  out.subdatasets.header = {"Subdataset", "Accuracy", "Recall", "Precision", "AUC"};
  for (std::size_t d = 1; d < kTableDatasets.size(); ++d) {
    out.subdatasets.rows.push_back(
        metric_row(kTableDatasets[d], at(kTableDatasets[d], kProposedModel)));
  }
  return out;
}

std::string folds_csv(std::span<const CvCell> cells) {
  std::ostringstream out;
  out << "dataset,model,repeat,fold,train_size,test_size,tp,fp,tn,fn";
  for (Metric m : kAllMetrics) out << ',' << to_string(m);
  out << '\n';
  for (const auto& cell : cells) {
    for (const auto& f : cell.result.folds) {
      const auto& c = f.metrics.counts;
      out << csv_field(cell.dataset) << ',' << csv_field(cell.model) << ',' << f.repeat << ','
          << f.fold << ',' << f.train_size << ',' << f.test_size << ',' << c.tp << ',' << c.fp
          << ',' << c.tn << ',' << c.fn;
      for (Metric m : kAllMetrics) {
        const auto v = f.metrics.value(m);
        out << ',' << (v ? format_double(*v) : "");
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace drens
