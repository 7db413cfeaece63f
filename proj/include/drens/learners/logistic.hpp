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

#ifndef DRENS_LEARNERS_LOGISTIC_HPP_
#define DRENS_LEARNERS_LOGISTIC_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "drens/learners/model.hpp"

namespace drens {

struct LogisticParams {
  double l2 = 1e-4;
  std::size_t iterations = 2000;
};

// probability = sigmoid(w . standardize(x) + b)
class LogisticModel final : public Model {
 public:
  LogisticModel(Standardizer standardizer, std::vector<double> weights, double bias,
                LogisticParams params = {});

  std::string kind() const override { return "logistic"; }
  std::size_t n_features() const override { return weights_.size(); }
  nlohmann::json to_json() const override;
  static std::shared_ptr<const LogisticModel> from_json(const nlohmann::json& doc);

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const Standardizer& standardizer() const { return standardizer_; }

 protected:
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  Standardizer standardizer_;
  std::vector<double> weights_;
  double bias_;
  LogisticParams params_;
};

// Full-batch gradient descent from zero on mean log-loss plus
// (l2 / 2) * (|w|^2 + b^2), with step 1/L from a Lipschitz bound.
std::shared_ptr<const LogisticModel> train_logistic(const TabularDataset& ds,
                                                    const LogisticParams& params = {});
std::shared_ptr<const LogisticModel> train_logistic(const Matrix& x, std::span<const int> labels,
                                                    const LogisticParams& params = {});

}  // namespace drens

#endif  // DRENS_LEARNERS_LOGISTIC_HPP_
