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

#include "drens/learners/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drens {

namespace {

constexpr double kTau = 1e-12;

SvmModel::Fit fit_dual(const TabularDataset& ds, const Kernel& kernel, const SvmParams& params) {
  SvmModel::Fit fit;
  fit.standardizer = Standardizer::fit(ds.features());
  const Matrix x = fit.standardizer.apply(ds.features());
  std::vector<int> signs(ds.n_rows());
  for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = ds.label(i) == 1 ? 1 : -1;

  const SmoSolution solution =
      solve_smo(x, signs, kernel, params.c, params.tolerance, params.max_passes * ds.n_rows());
  fit.bias = solution.bias;
  fit.converged = solution.converged;
  fit.iterations = solution.iterations;

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < solution.alpha.size(); ++i) {
    if (solution.alpha[i] > 0.0) support.push_back(i);
  }
  fit.support_vectors = Matrix(support.size(), x.cols());
  fit.coefficients.resize(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto src = x.row(support[k]);
    std::copy(src.begin(), src.end(), fit.support_vectors.row(k).begin());
    fit.coefficients[k] = solution.alpha[support[k]] * signs[support[k]];
  }
  return fit;
}

double fit_decision(const SvmModel::Fit& fit, const Kernel& kernel,
                    std::span<const double> instance) {
  std::vector<double> x(instance.size());
  fit.standardizer.apply(instance, x);
  double f = fit.bias;
  for (std::size_t k = 0; k < fit.coefficients.size(); ++k) {
    f += fit.coefficients[k] * kernel(fit.support_vectors.row(k), x);
  }
  return f;
}

}  // namespace

std::string to_string(KernelType type) { return type == KernelType::linear ? "linear" : "rbf"; }

KernelType kernel_type_from_string(const std::string& name) {
  if (name == "linear") return KernelType::linear;
  if (name == "rbf") return KernelType::rbf;
  throw InvalidArgument("unknown kernel '" + name + "'");
}

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  if (type == KernelType::linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double dist = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * dist);
}

SmoSolution solve_smo(const Matrix& x, std::span<const int> signs, const Kernel& kernel, double c,
                      double tolerance, std::size_t max_iterations) {
  const std::size_t n = x.rows();
  if (n != signs.size()) throw DimensionMismatch("solve_smo: row and label counts differ");
  if (c <= 0.0) throw InvalidArgument("SVM C must be positive");

  // Q(i, j) = y_i y_j K(x_i, x_j), kept in full.
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = signs[i] * signs[j] * kernel(x.row(i), x.row(j));
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }
  auto qrow = [&](std::size_t i) { return q.data() + i * n; };

  SmoSolution s;
  s.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& alpha = s.alpha;
  const auto at_upper = [&](std::size_t t) { return alpha[t] >= c; };
  const auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  const double inf = std::numeric_limits<double>::infinity();

  while (true) {
    double gmax = -inf;
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (signs[t] == 1) {
        if (!at_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i_sel < 0) {
      s.converged = true;
      break;
    }
    const auto i = static_cast<std::size_t>(i_sel);
    const double* q_i = qrow(i);

    double gmax2 = -inf;
    double best_obj = inf;
    std::ptrdiff_t j_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      double grad_diff;
      double quad;
      if (signs[t] == 1) {
        if (at_lower(t)) continue;
        grad_diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        quad = q_i[i] + qrow(t)[t] - 2.0 * signs[i] * q_i[t];
      } else {
        if (at_upper(t)) continue;
        grad_diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        quad = q_i[i] + qrow(t)[t] + 2.0 * signs[i] * q_i[t];
      }
      if (grad_diff > 0.0) {
        const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
        if (obj <= best_obj) {
          best_obj = obj;
          j_sel = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (gmax + gmax2 < tolerance || j_sel < 0) {
      s.converged = true;
      break;
    }
    if (s.iterations >= max_iterations) break;
    ++s.iterations;

    const auto j = static_cast<std::size_t>(j_sel);
    const double* q_j = qrow(j);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (signs[i] != signs[j]) {
      double quad = q_i[i] + q_j[j] + 2.0 * q_i[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = q_i[i] + q_j[j] - 2.0 * q_i[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0.0) {
          alpha[i] = 0.0;
          alpha[j] = sum;
        }
      }
    }
    const double d_i = alpha[i] - old_i;
    const double d_j = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q_i[t] * d_i + q_j[t] * d_j;
  }

  // Offset: average y*G over free vectors, else the middle of the feasible range.
  double upper = inf;
  double lower = -inf;
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = signs[t] * grad[t];
    if (at_upper(t)) {
      if (signs[t] == -1) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (at_lower(t)) {
      if (signs[t] == 1) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                     : (upper + lower) / 2.0;
  s.bias = -rho;
  return s;
}

PlattScaling fit_platt(std::span<const double> decisions, std::span<const int> labels) {
  if (decisions.size() != labels.size()) throw DimensionMismatch("fit_platt: size mismatch");
  const std::size_t n = decisions.size();
  double prior1 = 0.0;
  for (int y : labels) prior1 += y == 1 ? 1.0 : 0.0;
  const double prior0 = static_cast<double>(n) - prior1;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi_target : lo_target;

  const auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fab = decisions[i] * a + b;
      f += fab >= 0 ? t[i] * fab + std::log1p(std::exp(-fab))
                    : (t[i] - 1.0) * fab + std::log1p(std::exp(fab));
    }
    return f;
  };

  PlattScaling platt{0.0, std::log((prior0 + 1.0) / (prior1 + 1.0))};
  double fval = objective(platt.a, platt.b);
  constexpr double kSigma = 1e-12;
  constexpr double kMinStep = 1e-10;
  constexpr double kEps = 1e-5;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fab = decisions[i] * platt.a + platt.b;
      double p, q;
      if (fab >= 0) {
        p = std::exp(-fab) / (1.0 + std::exp(-fab));
        q = 1.0 / (1.0 + std::exp(-fab));
      } else {
        p = 1.0 / (1.0 + std::exp(fab));
        q = std::exp(fab) / (1.0 + std::exp(fab));
      }
      const double d2 = p * q;
      h11 += decisions[i] * decisions[i] * d2;
      h22 += d2;
      h21 += decisions[i] * d2;
      const double d1 = t[i] - p;
      g1 += decisions[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = platt.a + step * da;
      const double nb = platt.b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        platt = {na, nb};
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return platt;
}

SvmModel::SvmModel(Fit fit, Kernel kernel, PlattScaling platt, SvmParams params,
                   std::size_t n_features, std::uint64_t seed, std::optional<int> constant_label)
    : fit_(std::move(fit)),
      kernel_(kernel),
      platt_(platt),
      params_(params),
      n_features_(n_features),
      seed_(seed),
      constant_label_(constant_label) {
  if (fit_.coefficients.size() != fit_.support_vectors.rows() ||
      (fit_.support_vectors.rows() > 0 && fit_.support_vectors.cols() != n_features_)) {
    throw InvalidArgument("inconsistent SVM support-vector shapes");
  }
}

double SvmModel::decision_value(std::span<const double> instance) const {
  if (instance.size() != n_features_) {
    throw DimensionMismatch("svm model expects " + std::to_string(n_features_) +
                            " features, got " + std::to_string(instance.size()));
  }
  return fit_decision(fit_, kernel_, instance);
}

double SvmModel::proba_unchecked(std::span<const double> instance) const {
  if (constant_label_) return static_cast<double>(*constant_label_);
  return platt_(fit_decision(fit_, kernel_, instance));
}

nlohmann::json SvmModel::to_json() const {
  nlohmann::json params = {{"standardizer", fit_.standardizer.to_json()},
                           {"support_vectors", fit_.support_vectors.data()},
                           {"support_vector_count", fit_.support_vectors.rows()},
                           {"coefficients", fit_.coefficients},
                           {"bias", fit_.bias},
                           {"gamma", kernel_.gamma},
                           {"platt", {platt_.a, platt_.b}},
                           {"converged", fit_.converged},
                           {"iterations", fit_.iterations}};
  params["constant_label"] = constant_label_ ? nlohmann::json(*constant_label_) : nlohmann::json();
  return model_document(kind(), n_features_, seed_,
                        {{"kernel", to_string(params_.kernel)},
                         {"c", params_.c},
                         {"gamma", params_.gamma},
                         {"tolerance", params_.tolerance},
                         {"max_passes", params_.max_passes},
                         {"calibration_folds", params_.calibration_folds}},
                        std::move(params));
}

std::shared_ptr<const SvmModel> SvmModel::from_json(const nlohmann::json& doc) {
  check_model_document(doc, "svm");
  const auto& hp = doc.at("hyperparameters");
  SvmParams params;
  params.kernel = kernel_type_from_string(hp.at("kernel").get<std::string>());
  params.c = hp.at("c").get<double>();
  params.gamma = hp.at("gamma").get<double>();
  params.tolerance = hp.at("tolerance").get<double>();
  params.max_passes = hp.at("max_passes").get<std::size_t>();
  params.calibration_folds = hp.at("calibration_folds").get<std::size_t>();
  const auto& p = doc.at("parameters");
  const auto n_features = doc.at("n_features").get<std::size_t>();
  Fit fit;
  fit.standardizer = Standardizer::from_json(p.at("standardizer"));
  fit.support_vectors = Matrix(p.at("support_vector_count").get<std::size_t>(), n_features,
                               p.at("support_vectors").get<std::vector<double>>());
  fit.coefficients = p.at("coefficients").get<std::vector<double>>();
  fit.bias = p.at("bias").get<double>();
  fit.converged = p.at("converged").get<bool>();
  fit.iterations = p.at("iterations").get<std::size_t>();
  const auto platt = p.at("platt").get<std::vector<double>>();
  if (platt.size() != 2) throw ParseError("platt must hold two coefficients");
  std::optional<int> constant;
  if (!p.at("constant_label").is_null()) constant = p.at("constant_label").get<int>();
  return std::make_shared<const SvmModel>(
      std::move(fit), Kernel{params.kernel, p.at("gamma").get<double>()},
      PlattScaling{platt[0], platt[1]}, params, n_features, doc.at("seed").get<std::uint64_t>(),
      constant);
}

std::shared_ptr<const SvmModel> train_svm(const TabularDataset& ds, const SvmParams& params,
                                          std::uint64_t seed) {
  if (ds.n_rows() == 0) throw TrainingError("cannot train an SVM on an empty dataset");
  if (params.c <= 0.0) throw InvalidArgument("SVM C must be positive");
  const Kernel kernel{params.kernel, params.gamma > 0.0
                                         ? params.gamma
                                         : 1.0 / static_cast<double>(std::max<std::size_t>(
                                                     ds.n_features(), 1))};
  const auto counts = class_distribution(ds);
  if (counts[0] == 0 || counts[1] == 0) {
    SvmModel::Fit fit;
    fit.standardizer = Standardizer::fit(ds.features());
    fit.support_vectors = Matrix(0, ds.n_features());
    const int label = counts[1] > 0 ? 1 : 0;
    fit.bias = label == 1 ? 1.0 : -1.0;
    return std::make_shared<const SvmModel>(std::move(fit), kernel, PlattScaling{}, params,
                                             ds.n_features(), seed, label);
  }

  SvmModel::Fit fit = fit_dual(ds, kernel, params);

  std::vector<double> margins(ds.n_rows());
  const std::size_t folds = params.calibration_folds;
  if (folds >= 2 && counts[0] >= folds && counts[1] >= folds) {
    const auto assignment = stratified_k_folds(ds, folds, derive_seed(seed, 0x5107));
    for (std::size_t f = 0; f < folds; ++f) {
      const auto train_rows = assignment.train_rows(f);
      const auto fold_fit = fit_dual(ds.subset(train_rows), kernel, params);
      for (std::size_t r : assignment.test_rows(f)) {
        margins[r] = fit_decision(fold_fit, kernel, ds.row(r));
      }
    }
  } else {
    for (std::size_t r = 0; r < ds.n_rows(); ++r) margins[r] = fit_decision(fit, kernel, ds.row(r));
  }
  const PlattScaling platt = fit_platt(margins, ds.labels());
  return std::make_shared<const SvmModel>(std::move(fit), kernel, platt, params, ds.n_features(),
                                           seed);
}

}  // namespace drens
