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

#include "drens/learners/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drens {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Accumulates the loss of one row and, if grad is non-empty, adds the row's
// gradient into it. hidden_out is scratch of size net.hidden.
double accumulate_row(const MlpNetwork& net, std::span<const double> x, int y,
                      std::span<double> grad, std::vector<double>& hidden_out) {
  const std::size_t stride = net.inputs + 1;
  const double* p = net.params.data();
  const double* out_w = p + net.hidden * stride;
  double z = out_w[net.hidden];
  for (std::size_t h = 0; h < net.hidden; ++h) {
    const double* w = p + h * stride;
    double a = w[net.inputs];
    for (std::size_t i = 0; i < net.inputs; ++i) a += w[i] * x[i];
    hidden_out[h] = sigmoid(a);
    z += out_w[h] * hidden_out[h];
  }
  const double loss = softplus(z) - y * z;
  if (!grad.empty()) {
    const double delta = sigmoid(z) - y;
    double* g = grad.data();
    double* g_out = g + net.hidden * stride;
    for (std::size_t h = 0; h < net.hidden; ++h) {
      g_out[h] += delta * hidden_out[h];
      const double dh = delta * out_w[h] * hidden_out[h] * (1.0 - hidden_out[h]);
      double* gw = g + h * stride;
      for (std::size_t i = 0; i < net.inputs; ++i) gw[i] += dh * x[i];
      gw[net.inputs] += dh;
    }
    g_out[net.hidden] += delta;
  }
  return loss;
}

}  // namespace

MlpNetwork MlpNetwork::random(std::size_t inputs, std::size_t hidden, Rng& rng) {
  MlpNetwork net{inputs, hidden, std::vector<double>(param_count(inputs, hidden))};
  for (auto& w : net.params) w = rng.uniform(-0.5, 0.5);
  return net;
}

double MlpNetwork::logit(std::span<const double> x) const {
  const std::size_t stride = inputs + 1;
  const double* out_w = params.data() + hidden * stride;
  double z = out_w[hidden];
  for (std::size_t h = 0; h < hidden; ++h) {
    const double* w = params.data() + h * stride;
    double a = w[inputs];
    for (std::size_t i = 0; i < inputs; ++i) a += w[i] * x[i];
    z += out_w[h] * sigmoid(a);
  }
  return z;
}

double mlp_log_loss(const MlpNetwork& net, const Matrix& x, std::span<const int> y,
                    std::span<double> gradient) {
  if (x.rows() != y.size() || x.cols() != net.inputs) {
    throw DimensionMismatch("mlp_log_loss: data does not match the network shape");
  }
  if (!gradient.empty()) {
    if (gradient.size() != net.params.size()) throw DimensionMismatch("gradient size mismatch");
    std::fill(gradient.begin(), gradient.end(), 0.0);
  }
  std::vector<double> hidden_out(net.hidden);
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    total += accumulate_row(net, x.row(r), y[r], gradient, hidden_out);
  }
  const double n = static_cast<double>(std::max<std::size_t>(x.rows(), 1));
  for (auto& g : gradient) g /= n;
  return total / n;
}

MlpModel::MlpModel(Standardizer standardizer, MlpNetwork network, MlpParams params,
                   std::uint64_t seed)
    : standardizer_(std::move(standardizer)),
      network_(std::move(network)),
      params_(params),
      seed_(seed) {
  if (network_.params.size() != MlpNetwork::param_count(network_.inputs, network_.hidden) ||
      standardizer_.mean.size() != network_.inputs) {
    throw InvalidArgument("inconsistent MLP parameter shapes");
  }
}

double MlpModel::proba_unchecked(std::span<const double> instance) const {
  std::vector<double> x(instance.size());
  standardizer_.apply(instance, x);
  return sigmoid(network_.logit(x));
}

nlohmann::json MlpModel::to_json() const {
  return model_document(kind(), network_.inputs, seed_,
                        {{"hidden_units", params_.hidden_units},
                         {"learning_rate", params_.learning_rate},
                         {"momentum", params_.momentum},
                         {"epochs", params_.epochs},
                         {"batch_size", params_.batch_size}},
                        {{"hidden", network_.hidden},
                         {"weights", network_.params},
                         {"standardizer", standardizer_.to_json()}});
}

std::shared_ptr<const MlpModel> MlpModel::from_json(const nlohmann::json& doc) {
  check_model_document(doc, "mlp");
  const auto& hp = doc.at("hyperparameters");
  MlpParams params;
  params.hidden_units = hp.at("hidden_units").get<std::size_t>();
  params.learning_rate = hp.at("learning_rate").get<double>();
  params.momentum = hp.at("momentum").get<double>();
  params.epochs = hp.at("epochs").get<std::size_t>();
  params.batch_size = hp.at("batch_size").get<std::size_t>();
  const auto& p = doc.at("parameters");
  MlpNetwork net{doc.at("n_features").get<std::size_t>(), p.at("hidden").get<std::size_t>(),
                 p.at("weights").get<std::vector<double>>()};
  return std::make_shared<const MlpModel>(Standardizer::from_json(p.at("standardizer")),
                                          std::move(net), params,
                                          doc.at("seed").get<std::uint64_t>());
}

std::shared_ptr<const MlpModel> train_mlp(const TabularDataset& ds, const MlpParams& params,
                                          std::uint64_t seed) {
  if (ds.n_rows() == 0) throw TrainingError("cannot train an MLP on an empty dataset");
  if (params.learning_rate <= 0.0) throw InvalidArgument("learning_rate must be positive");
  if (params.batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  const std::size_t d = ds.n_features();
  const std::size_t hidden = params.hidden_units != 0 ? params.hidden_units : (d + 3) / 2;

  Standardizer standardizer = Standardizer::fit(ds.features());
  const Matrix x = standardizer.apply(ds.features());
  Rng rng(seed);
  MlpNetwork net = MlpNetwork::random(d, hidden, rng);

  const std::size_t n = ds.n_rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(net.params.size());
  std::vector<double> velocity(net.params.size(), 0.0);
  std::vector<double> hidden_out(hidden);

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::size_t end = std::min(n, start + params.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        epoch_loss += accumulate_row(net, x.row(order[k]), ds.label(order[k]), grad, hidden_out);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = 0; i < net.params.size(); ++i) {
        velocity[i] = params.momentum * velocity[i] - params.learning_rate * grad[i] * scale;
        net.params[i] += velocity[i];
      }
    }
    const bool weights_finite = std::all_of(net.params.begin(), net.params.end(),
                                            [](double w) { return std::isfinite(w); });
    if (!std::isfinite(epoch_loss) || !weights_finite) {
      throw TrainingError("MLP training diverged (non-finite loss or weights) at epoch " + std::to_string(epoch + 1));
    }
  }
  return std::make_shared<const MlpModel>(std::move(standardizer), std::move(net), params, seed);
}

}  // namespace drens
