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

#ifndef DRENS_LEARNERS_MODEL_HPP_
#define DRENS_LEARNERS_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "drens/common.hpp"
#include "drens/dataset.hpp"
#include "json.hpp"

namespace drens {

inline constexpr int kModelFormatVersion = 1;

// A fitted binary classifier. Instances are immutable and safe to share
// between threads.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t n_features() const = 0;
  // Complete persisted document, including format_version and kind.
  virtual nlohmann::json to_json() const = 0;

  // Probability of class 1, always in [0, 1]. Throws DimensionMismatch when
  // the instance length differs from n_features().
  double predict_proba(std::span<const double> instance) const;
  // 1 iff predict_proba >= 0.5.
  int predict(std::span<const double> instance) const;
  std::vector<double> predict_proba(const Matrix& rows) const;

 protected:
  virtual double proba_unchecked(std::span<const double> instance) const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;
using Trainer = std::function<ModelPtr(const TabularDataset&)>;

inline double predict_proba(const Model& model, std::span<const double> instance) {
  return model.predict_proba(instance);
}
inline int predict(const Model& model, std::span<const double> instance) {
  return model.predict(instance);
}

// Applies the fixed decision threshold; a tie at exactly 0.5 maps to 1.
inline int threshold_label(double probability) { return probability >= 0.5 ? 1 : 0; }

// Per-feature affine standardization (population standard deviation).
// Features with zero spread keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  void apply(std::span<const double> in, std::span<double> out) const;
  Matrix apply(const Matrix& x) const;

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);
};

// Shared skeleton of a persisted model document.
nlohmann::json model_document(const std::string& kind, std::size_t n_features,
                              std::uint64_t seed, nlohmann::json hyperparameters,
                              nlohmann::json parameters);
// Checks format_version and kind, returning the document for field access.
const nlohmann::json& check_model_document(const nlohmann::json& doc, const std::string& kind);

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace drens

#endif  // DRENS_LEARNERS_MODEL_HPP_
