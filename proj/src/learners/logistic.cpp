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

#include "drens/learners/logistic.hpp"

#include <cmath>

namespace drens {

LogisticModel::LogisticModel(Standardizer standardizer, std::vector<double> weights, double bias,
                             LogisticParams params)
    : standardizer_(std::move(standardizer)),
      weights_(std::move(weights)),
      bias_(bias),
      params_(params) {
  if (standardizer_.mean.size() != weights_.size()) {
    throw InvalidArgument("logistic standardizer and weights differ in length");
  }
}

double LogisticModel::proba_unchecked(std::span<const double> instance) const {
  double z = bias_;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    z += weights_[i] * (instance[i] - standardizer_.mean[i]) / standardizer_.scale[i];
  }
  return sigmoid(z);
}

nlohmann::json LogisticModel::to_json() const {
  return model_document(kind(), weights_.size(), 0,
                        {{"l2", params_.l2}, {"iterations", params_.iterations}},
                        {{"weights", weights_},
                         {"bias", bias_},
                         {"standardizer", standardizer_.to_json()}});
}

std::shared_ptr<const LogisticModel> LogisticModel::from_json(const nlohmann::json& doc) {
  check_model_document(doc, "logistic");
  const auto& hp = doc.at("hyperparameters");
  const auto& p = doc.at("parameters");
  return std::make_shared<const LogisticModel>(
      Standardizer::from_json(p.at("standardizer")), p.at("weights").get<std::vector<double>>(),
      p.at("bias").get<double>(),
      LogisticParams{hp.at("l2").get<double>(), hp.at("iterations").get<std::size_t>()});
}

std::shared_ptr<const LogisticModel> train_logistic(const Matrix& x, std::span<const int> labels,
                                                    const LogisticParams& params) {
  if (x.rows() == 0) throw TrainingError("cannot train a logistic model on empty input");
  if (x.rows() != labels.size()) throw DimensionMismatch("logistic: row and label counts differ");
  if (params.l2 < 0.0) throw InvalidArgument("l2 penalty must be non-negative");
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Standardizer standardizer = Standardizer::fit(x);
  const Matrix xs = standardizer.apply(x);

  // Hessian of the mean log-loss is bounded by 0.25 * trace([X 1]^T [X 1]) / n.
  double trace = static_cast<double>(n);
  for (double v : xs.data()) trace += v * v;
  const double lipschitz = 0.25 * trace / static_cast<double>(n) + params.l2;
  const double step = 1.0 / lipschitz;

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> grad_w(d);
  for (std::size_t iter = 0; iter < params.iterations; ++iter) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = xs.row(r);
      double z = b;
      for (std::size_t c = 0; c < d; ++c) z += w[c] * row[c];
      const double residual = sigmoid(z) - labels[r];
      for (std::size_t c = 0; c < d; ++c) grad_w[c] += residual * row[c];
      grad_b += residual;
    }
    for (std::size_t c = 0; c < d; ++c) {
      w[c] -= step * (grad_w[c] / static_cast<double>(n) + params.l2 * w[c]);
    }
    b -= step * (grad_b / static_cast<double>(n) + params.l2 * b);
  }
  return std::make_shared<const LogisticModel>(std::move(standardizer), std::move(w), b, params);
}

std::shared_ptr<const LogisticModel> train_logistic(const TabularDataset& ds,
                                                    const LogisticParams& params) {
  return train_logistic(ds.features(), ds.labels(), params);
}

}  // namespace drens
