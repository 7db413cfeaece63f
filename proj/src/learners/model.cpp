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

#include "drens/learners/model.hpp"

#include <algorithm>
#include <cmath>

namespace drens {

double Model::predict_proba(std::span<const double> instance) const {
  if (instance.size() != n_features()) {
    throw DimensionMismatch(kind() + " model expects " + std::to_string(n_features()) +
                            " features, got " + std::to_string(instance.size()));
  }
  const double p = proba_unchecked(instance);
  if (std::isnan(p)) throw Error(kind() + " model produced a NaN probability");
  return std::clamp(p, 0.0, 1.0);
}

int Model::predict(std::span<const double> instance) const {
  return threshold_label(predict_proba(instance));
}

std::vector<double> Model::predict_proba(const Matrix& rows) const {
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict_proba(rows.row(i));
  return out;
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += x(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (x(r, c) - mean) * (x(r, c) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[c] = mean;
    s.scale[c] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t c = 0; c < mean.size(); ++c) out[c] = (in[c] - mean[c]) / scale[c];
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply(x.row(r), out.row(r));
  return out;
}

nlohmann::json Standardizer::to_json() const { return {{"mean", mean}, {"scale", scale}}; }

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != s.scale.size()) throw ParseError("standardizer mean/scale size mismatch");
  return s;
}

nlohmann::json model_document(const std::string& kind, std::size_t n_features,
                              std::uint64_t seed, nlohmann::json hyperparameters,
                              nlohmann::json parameters) {
  return {{"format_version", kModelFormatVersion},
          {"kind", kind},
          {"n_features", n_features},
          {"seed", seed},
          {"hyperparameters", std::move(hyperparameters)},
          {"parameters", std::move(parameters)}};
}

const nlohmann::json& check_model_document(const nlohmann::json& doc, const std::string& kind) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw FormatError("model document has no format_version");
  }
  const auto& version = doc.at("format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw FormatError("unsupported model format_version " + version.dump() + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  const auto found = doc.at("kind").get<std::string>();
  if (found != kind) throw FormatError("expected a '" + kind + "' model, found '" + found + "'");
  return doc;
}

}  // namespace drens
