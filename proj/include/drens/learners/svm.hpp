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

// Soft-margin SVM: SMO dual solver, RBF/linear kernels and Platt scaling.

#ifndef DRENS_LEARNERS_SVM_HPP_
#define DRENS_LEARNERS_SVM_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drens/learners/model.hpp"

namespace drens {

enum class KernelType { linear, rbf };

std::string to_string(KernelType type);
KernelType kernel_type_from_string(const std::string& name);

struct Kernel {
  KernelType type = KernelType::rbf;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

struct SvmParams {
  KernelType kernel = KernelType::rbf;
  double c = 1.0;
  double gamma = 0.0;  // 0 selects 1 / n_features
  double tolerance = 1e-3;
  std::size_t max_passes = 200;  // iteration cap is max_passes * n_rows
  std::size_t calibration_folds = 3;
};

// Dual solution with decision f(x) = sum_i alpha_i * y_i * K(x_i, x) + bias.
struct SmoSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// SMO with second-order working-set selection. Stops once the maximal KKT
// violating pair gap drops below tolerance. signs holds +1/-1 labels.
SmoSolution solve_smo(const Matrix& x, std::span<const int> signs, const Kernel& kernel, double c,
                      double tolerance, std::size_t max_iterations);

// P(y = 1 | f) = 1 / (1 + exp(a * f + b)).
struct PlattScaling {
  double a = 0.0;
  double b = 0.0;

  double operator()(double decision) const { return sigmoid(-(a * decision + b)); }
};

// Newton fit with regularized targets (Lin, Lin and Weng's formulation).
PlattScaling fit_platt(std::span<const double> decisions, std::span<const int> labels);

class SvmModel final : public Model {
 public:
  struct Fit {
    Standardizer standardizer;
    Matrix support_vectors;  // standardized
    std::vector<double> coefficients;  // alpha_i * y_i
    double bias = 0.0;
    bool converged = true;
    std::size_t iterations = 0;
  };

  SvmModel(Fit fit, Kernel kernel, PlattScaling platt, SvmParams params, std::size_t n_features,
           std::uint64_t seed, std::optional<int> constant_label = std::nullopt);

  std::string kind() const override { return "svm"; }
  std::size_t n_features() const override { return n_features_; }
  nlohmann::json to_json() const override;
  static std::shared_ptr<const SvmModel> from_json(const nlohmann::json& doc);

  // Signed margin on raw (unstandardized) features.
  double decision_value(std::span<const double> instance) const;
  const Fit& fit() const { return fit_; }
  const Kernel& kernel() const { return kernel_; }
  const PlattScaling& platt() const { return platt_; }
  bool converged() const { return fit_.converged; }
  // Set when the training labels were all one class.
  std::optional<int> constant_label() const { return constant_label_; }

 protected:
  double proba_unchecked(std::span<const double> instance) const override;

 private:
  Fit fit_;
  Kernel kernel_;
  PlattScaling platt_;
  SvmParams params_;
  std::size_t n_features_;
  std::uint64_t seed_;
  std::optional<int> constant_label_;
};

// Standardizes inputs, solves the dual, then fits Platt scaling on margins
// from seeded internal out-of-fold models. When a class has fewer rows than
// calibration_folds the in-sample margins are used instead. A model that hit
// the iteration cap is still returned with converged() == false.
std::shared_ptr<const SvmModel> train_svm(const TabularDataset& ds, const SvmParams& params = {},
                                          std::uint64_t seed = 42);

}  // namespace drens

#endif  // DRENS_LEARNERS_SVM_HPP_
