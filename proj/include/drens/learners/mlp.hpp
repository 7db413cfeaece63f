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

#ifndef DRENS_LEARNERS_MLP_HPP_
#define DRENS_LEARNERS_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "drens/learners/model.hpp"

namespace drens {

struct MlpParams {
  std::size_t hidden_units = 0;  // 0 selects ceil((n_features + 2) / 2)
  double learning_rate = 0.3;
  double momentum = 0.2;
  std::size_t epochs = 500;
  std::size_t batch_size = 32;
};

// One sigmoid hidden layer feeding a sigmoid output unit.
//
// Flat parameter layout: for each hidden unit, `inputs` weights followed by
// its bias; then `hidden` output weights followed by the output bias.
struct MlpNetwork {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> params;

  static std::size_t param_count(std::size_t inputs, std::size_t hidden) {
    return hidden * (inputs + 1) + hidden + 1;
  }
  // Weights uniform in [-0.5, 0.5].
  static MlpNetwork random(std::size_t inputs, std::size_t hidden, Rng& rng);

  // Pre-sigmoid output activation.
  double logit(std::span<const double> x) const;
};

// Mean log-loss over the rows. When gradient is non-empty it must have
// params.size() entries and receives the analytic gradient of that mean.
double mlp_log_loss(const MlpNetwork& net, const Matrix& x, std::span<const int> y,
                    std::span<double> gradient = {});

class MlpModel final : public Model {
 public:
  MlpModel(Standardizer standardizer, MlpNetwork network, MlpParams params, std::uint64_t seed);

  std::string kind() const override { return "mlp"; }
  std::size_t n_features() const override { return network_.inputs; }
  nlohmann::json to_json() const override;
  static std::shared_ptr<const MlpModel> from_json(const nlohmann::json& doc);

  const MlpNetwork& network() const { return network_; }
  const Standardizer& standardizer() const { return standardizer_; }

 protected:
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  Standardizer standardizer_;
  MlpNetwork network_;
  MlpParams params_;
  std::uint64_t seed_;
};

// Seeded mini-batch gradient descent with momentum on standardized inputs.
// Throws TrainingError naming the epoch if the loss stops being finite.
std::shared_ptr<const MlpModel> train_mlp(const TabularDataset& ds, const MlpParams& params = {},
                                          std::uint64_t seed = 42);

}  // namespace drens

#endif  // DRENS_LEARNERS_MLP_HPP_
