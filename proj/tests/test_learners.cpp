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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "drens/learners.hpp"
#include "drens/model_io.hpp"
#include "support.hpp"

using namespace drens;
using drens::testing::gaussian_blobs;
using drens::testing::make_dataset;

namespace {

double training_accuracy(const Model& model, const TabularDataset& ds) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) correct += model.predict(ds.row(r)) == ds.label(r);
  return static_cast<double>(correct) / static_cast<double>(ds.n_rows());
}

TabularDataset affine(const TabularDataset& ds, double scale, double shift) {
  Matrix x = ds.features();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = x(r, c) * scale * (c + 1) + shift * c;
  }
  return TabularDataset(std::move(x), ds.labels(), ds.feature_names());
}

std::vector<LearnerSpec> small_specs() {
  ForestParams forest;
  forest.tree_count = 15;
  MlpParams mlp;
  mlp.epochs = 40;
  return {LearnerSpec{TreeParams{}, 1}, LearnerSpec{forest, 2}, LearnerSpec{mlp, 3},
          LearnerSpec{SvmParams{}, 4}, LearnerSpec{LogisticParams{}, 5}};
}

}  // namespace

TEST_CASE("tree finds the gini-optimal cut on the 1-D example") {
  const auto ds = make_dataset({{0}, {1}, {10}, {11}}, {0, 0, 1, 1});
  const auto tree = train_decision_tree(ds, TreeParams{12, 1});
  const auto& root = tree->nodes().front();
  REQUIRE_FALSE(root.is_leaf());
  CHECK(root.threshold > 1.0);
  CHECK(root.threshold < 10.0);
  CHECK(tree->nodes().size() == 3);
  CHECK(training_accuracy(*tree, ds) == 1.0);

  // Exhaustive search over every cut between consecutive values.
  const double values[] = {0, 1, 10, 11};
  const int labels[] = {0, 0, 1, 1};
  double best_impurity = 1e9;
  double best_lo = 0.0;
  for (int cut = 1; cut < 4; ++cut) {
    double impurity = 0.0;
    for (int side = 0; side < 2; ++side) {
      const int lo = side == 0 ? 0 : cut;
      const int hi = side == 0 ? cut : 4;
      double ones = 0;
      for (int i = lo; i < hi; ++i) ones += labels[i];
      const double n = hi - lo;
      const double p = ones / n;
      impurity += n / 4.0 * 2.0 * p * (1.0 - p);
    }
    if (impurity < best_impurity) {
      best_impurity = impurity;
      best_lo = values[cut - 1];
    }
  }
  CHECK(best_lo == 1.0);
}

TEST_CASE("tree degenerate cases") {
  const auto pure = make_dataset({{0}, {3}, {5}}, {1, 1, 1});
  const auto leaf = train_decision_tree(pure);
  CHECK(leaf->nodes().size() == 1);
  CHECK(leaf->predict_proba(std::vector<double>{7}) == 1.0);

  const auto mixed = make_dataset({{0}, {1}, {2}, {3}, {4}}, {0, 1, 1, 1, 0});
  const auto stump = train_decision_tree(mixed, TreeParams{0, 1});
  CHECK(stump->nodes().size() == 1);
  CHECK(stump->predict_proba(std::vector<double>{2}) == doctest::Approx(0.6));
  CHECK(stump->predict(std::vector<double>{0}) == 1);

  const TabularDataset empty(Matrix(0, 1), {}, {"f0"});
  CHECK_THROWS_AS(train_decision_tree(empty), TrainingError);
}

TEST_CASE("tree respects depth, leaf frequencies and monotone invariance") {
  const auto ds = drens::testing::synthetic_messidor(21);
  const auto tree = train_decision_tree(ds, TreeParams{6, 3});
  CHECK(tree->depth() <= 6);
  for (const auto& node : tree->nodes()) {
    if (node.is_leaf()) {
      CHECK(node.proba >= 0.0);
      CHECK(node.proba <= 1.0);
      CHECK(node.samples >= 3);
    } else {
      CHECK(std::isfinite(node.threshold));
    }
  }
  // Leaf output is the training frequency of the rows routed there.
  std::map<const TreeNode*, std::pair<double, double>> tally;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    auto& t = tally[&tree->leaf_for(ds.row(r))];
    t.first += ds.label(r);
    t.second += 1;
  }
  for (const auto& [leaf, t] : tally) {
    CHECK(leaf->proba == doctest::Approx(t.first / t.second).epsilon(1e-12));
    CHECK(leaf->samples == t.second);
  }

  Matrix warped = ds.features();
  for (std::size_t r = 0; r < warped.rows(); ++r) {
    for (std::size_t c = 0; c < warped.cols(); ++c) warped(r, c) = std::exp(warped(r, c) / 50.0) + 2 * warped(r, c);
  }
  const TabularDataset transformed(warped, ds.labels(), ds.feature_names());
  const auto warped_tree = train_decision_tree(transformed, TreeParams{6, 3});
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    CHECK(warped_tree->predict_proba(transformed.row(r)) == tree->predict_proba(ds.row(r)));
  }
}

TEST_CASE("degenerate forest equals a single tree") {
  const auto ds = drens::testing::synthetic_messidor(22);
  ForestParams p;
  p.tree_count = 1;
  p.bootstrap = false;
  p.features_per_split = ds.n_features();
  p.max_depth = 7;
  p.min_leaf = 4;
  const auto forest = train_random_forest(ds, p, 5);
  const auto tree = train_decision_tree(ds, TreeParams{7, 4});
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    CHECK(forest->predict_proba(ds.row(r)) == tree->predict_proba(ds.row(r)));
  }
}

TEST_CASE("forest probability is the mean of its trees") {
  const auto ds = drens::testing::synthetic_messidor(23);
  ForestParams p;
  p.tree_count = 25;
  const auto forest = train_random_forest(ds, p, 8);
  CHECK(forest->trees().size() == 25);
  for (std::size_t r = 0; r < 200; ++r) {
    double sum = 0.0;
    for (const auto& t : forest->trees()) sum += t->predict_proba(ds.row(r));
    CHECK(forest->predict_proba(ds.row(r)) == sum / 25.0);
  }
  const auto again = train_random_forest(ds, p, 8);
  CHECK(again->to_json() == forest->to_json());
  CHECK(train_random_forest(ds, p, 9)->to_json() != forest->to_json());
}

TEST_CASE("mlp analytic gradient matches central differences") {
  Rng rng(99);
  std::size_t checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t inputs = 1 + rng.below(2);
    const std::size_t hidden = 1 + rng.below(2);
    auto net = MlpNetwork::random(inputs, hidden, rng);
    REQUIRE(net.params.size() <= 10);
    for (auto& w : net.params) w *= 4.0;
    const std::size_t n = 3 + rng.below(6);
    Matrix x(n, inputs);
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < inputs; ++c) x(r, c) = 2.0 * rng.normal();
      y[r] = rng.uniform() < 0.5;
    }
    std::vector<double> grad(net.params.size());
    mlp_log_loss(net, x, y, grad);
    for (std::size_t k = 0; k < net.params.size(); ++k) {
      const double h = 1e-5;
      auto plus = net;
      auto minus = net;
      plus.params[k] += h;
      minus.params[k] -= h;
      const double numeric = (mlp_log_loss(plus, x, y) - mlp_log_loss(minus, x, y)) / (2 * h);
      const double denom = std::max({std::abs(numeric), std::abs(grad[k]), 1e-6});
      CHECK(std::abs(numeric - grad[k]) / denom < 1e-4);
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("mlp learns separable blobs") {
  const auto ds = gaussian_blobs(20, 2, 6.0, 4);
  const auto model = train_mlp(ds, {}, 1);
  CHECK(training_accuracy(*model, ds) >= 0.95);
  CHECK(model->network().hidden == 2);  // ceil((2 + 2) / 2)

  MlpParams none;
  none.epochs = 0;
  const auto untrained = train_mlp(ds, none, 1);
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const double p = untrained->predict_proba(ds.row(r));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("mlp reports a diverging loss with its epoch") {
  const auto ds = gaussian_blobs(20, 2, 0.0, 4);
  MlpParams wild;
  wild.learning_rate = 1e308;
  wild.momentum = 0.9;
  try {
    train_mlp(ds, wild, 1);
    FAIL("expected divergence");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("two-point linear svm matches the analytic solution") {
  const auto ds = make_dataset({{-1}, {1}}, {0, 1});
  SvmParams p;
  p.kernel = KernelType::linear;
  p.c = 1e6;
  p.tolerance = 1e-9;
  const auto model = train_svm(ds, p);
  CHECK(model->converged());
  CHECK(model->decision_value(std::vector<double>{-1}) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(model->decision_value(std::vector<double>{1}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(model->decision_value(std::vector<double>{0})) < 1e-6);
  CHECK(std::abs(model->fit().bias) < 1e-6);
  for (double c : model->fit().coefficients) CHECK(std::abs(c) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(model->predict(std::vector<double>{0.3}) == 1);
  CHECK(model->predict(std::vector<double>{-0.3}) == 0);
}

TEST_CASE("smo satisfies the KKT conditions on separable problems") {
  Rng rng(55);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20 + rng.below(40);
    const std::size_t d = 2 + rng.below(3);
    Matrix x(n, d);
    std::vector<int> signs(n);
    for (std::size_t r = 0; r < n; ++r) {
      signs[r] = r % 2 == 0 ? 1 : -1;
      for (std::size_t c = 0; c < d; ++c) x(r, c) = rng.normal() + 2.5 * signs[r];
    }
    const Kernel kernel{trial % 2 == 0 ? KernelType::linear : KernelType::rbf, 1.0 / d};
    const double c = 10.0;
    const auto sol = solve_smo(x, signs, kernel, c, 1e-3, 200 * n);
    REQUIRE(sol.converged);
    for (std::size_t i = 0; i < n; ++i) {
      double f = sol.bias;
      for (std::size_t j = 0; j < n; ++j) f += sol.alpha[j] * signs[j] * kernel(x.row(j), x.row(i));
      const double margin = signs[i] * f;
      double residual = 0.0;
      if (sol.alpha[i] <= 0.0) {
        residual = std::max(0.0, 1.0 - margin);
      } else if (sol.alpha[i] >= c) {
        residual = std::max(0.0, margin - 1.0);
      } else {
        residual = std::abs(margin - 1.0);
      }
      worst = std::max(worst, residual);
      CHECK(sol.alpha[i] >= 0.0);
      CHECK(sol.alpha[i] <= c);
    }
    double balance = 0.0;
    for (std::size_t i = 0; i < n; ++i) balance += sol.alpha[i] * signs[i];
    CHECK(std::abs(balance) < 1e-9);
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("svm one-class degenerate case") {
  const auto ds = make_dataset({{0, 1}, {1, 2}, {3, 3}}, {1, 1, 1});
  const auto model = train_svm(ds);
  REQUIRE(model->constant_label().has_value());
  CHECK(model->predict(std::vector<double>{-100, 5}) == 1);
  CHECK(model->predict_proba(std::vector<double>{4, 4}) == 1.0);
}

TEST_CASE("platt scaling orders probabilities with the margin") {
  const std::vector<double> f{-3, -2, -1.5, -1, -0.2, 0.3, 1, 1.2, 2, 3};
  const std::vector<int> y{0, 0, 0, 1, 0, 1, 0, 1, 1, 1};
  const auto platt = fit_platt(f, y);
  CHECK(platt.a < 0.0);
  CHECK(platt(2.0) > platt(-2.0));
}

TEST_CASE("svm probabilities are calibrated on overlapping blobs") {
  const auto ds = gaussian_blobs(60, 3, 1.5, 17);
  const auto model = train_svm(ds, {}, 3);
  CHECK(model->converged());
  CHECK(training_accuracy(*model, ds) > 0.7);
  double low = 0.0, high = 0.0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    (ds.label(r) == 1 ? high : low) += model->predict_proba(ds.row(r));
  }
  CHECK(high / 60 > low / 60 + 0.2);
}

TEST_CASE("logistic regression examples") {
  const auto ds = make_dataset({{0}, {1}, {0}, {1}, {1}, {0}}, {0, 1, 0, 1, 1, 0});
  const auto model = train_logistic(ds);
  CHECK(model->weights()[0] > 0.0);
  CHECK(training_accuracy(*model, ds) == 1.0);

  LogisticParams heavy;
  heavy.l2 = 1e9;
  const auto flat = train_logistic(ds, heavy);
  CHECK(std::abs(flat->weights()[0]) < 1e-6);
  CHECK(flat->predict_proba(std::vector<double>{1}) == doctest::Approx(0.5).epsilon(1e-6));

  const auto blobs = gaussian_blobs(25, 3, 1.0, 8);
  std::vector<std::size_t> doubled;
  for (std::size_t r = 0; r < blobs.n_rows(); ++r) {
    doubled.push_back(r);
    doubled.push_back(r);
  }
  const auto once = train_logistic(blobs);
  const auto twice = train_logistic(blobs.subset(doubled));
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(twice->weights()[c] == doctest::Approx(once->weights()[c]).epsilon(1e-10));
  }
  CHECK(twice->bias() == doctest::Approx(once->bias()).epsilon(1e-10));
}

TEST_CASE("threshold tie maps to class 1") {
  const LogisticModel zero(Standardizer{{0.0, 0.0}, {1.0, 1.0}}, {0.0, 0.0}, 0.0);
  const std::vector<double> x{3.0, -2.0};
  CHECK(zero.predict_proba(x) == 0.5);
  CHECK(zero.predict(x) == 1);
  CHECK(threshold_label(0.5) == 1);
  CHECK(threshold_label(std::nextafter(0.5, 0.0)) == 0);
}

TEST_CASE("every learner rejects wrong-length instances and stays in [0, 1]") {
  const auto ds = drens::testing::synthetic_messidor(24);
  const std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16,
                                      17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29};
  const auto small = ds.subset(rows);
  for (const auto& spec : small_specs()) {
    const auto model = train_model(small, spec);
    CHECK_THROWS_AS(model->predict_proba(std::vector<double>(5)), DimensionMismatch);
    for (std::size_t r = 0; r < ds.n_rows(); r += 37) {
      const double p = model->predict_proba(ds.row(r));
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      CHECK(model->predict(ds.row(r)) == (p >= 0.5 ? 1 : 0));
    }
  }
}

TEST_CASE("model documents round-trip and reject unknown versions") {
  const auto ds = drens::testing::synthetic_messidor(25);
  for (const auto& spec : small_specs()) {
    const auto model = train_model(ds, spec);
    const auto doc = model->to_json();
    CHECK(doc.at("format_version") == kModelFormatVersion);
    CHECK(doc.at("kind") == model->kind());
    const auto back = model_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back->kind() == model->kind());
    CHECK(back->to_json() == doc);
    for (std::size_t r = 0; r < ds.n_rows(); r += 13) {
      CHECK(back->predict_proba(ds.row(r)) == model->predict_proba(ds.row(r)));
    }
    auto future = doc;
    future["format_version"] = kModelFormatVersion + 1;
    CHECK_THROWS_AS(model_from_json(future), FormatError);
    auto unversioned = doc;
    unversioned.erase("format_version");
    CHECK_THROWS_AS(model_from_json(unversioned), FormatError);
  }
  auto bogus = train_model(ds, small_specs()[0])->to_json();
  bogus["kind"] = "perceptron";
  CHECK_THROWS_AS(model_from_json(bogus), FormatError);
}

TEST_CASE("standardizing learners absorb affine feature changes") {
  const auto ds = gaussian_blobs(30, 3, 2.0, 41);
  const auto moved = affine(ds, 7.5, -120.0);
  MlpParams mlp;
  mlp.epochs = 30;
  // SMO stops anywhere inside its tolerance, so rounding in the standardized
  // inputs can move the default-tolerance solution; a tight solve does not.
  SvmParams svm;
  svm.tolerance = 1e-9;
  svm.max_passes = 100000;
  const std::vector<LearnerSpec> specs{LearnerSpec{mlp, 6}, LearnerSpec{svm, 6},
                                       LearnerSpec{LogisticParams{}, 6}};
  for (const auto& spec : specs) {
    const auto a = train_model(ds, spec);
    const auto b = train_model(moved, spec);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      CHECK(std::abs(b->predict_proba(moved.row(r)) - a->predict_proba(ds.row(r))) < 1e-8);
    }
  }
}

TEST_CASE("training is deterministic across thread counts") {
  const auto ds = drens::testing::synthetic_messidor(26);
  for (const auto& spec : small_specs()) {
    set_thread_count(1);
    const auto a = train_model(ds, spec)->to_json();
    set_thread_count(4);
    const auto b = train_model(ds, spec)->to_json();
    CHECK(a == b);
  }
  set_thread_count(0);
}

TEST_CASE("learner specs") {
  CHECK(learner_kind_from_string("rf") == LearnerKind::forest);
  CHECK(learner_kind_from_string("nn") == LearnerKind::mlp);
  CHECK_THROWS_AS(learner_kind_from_string("knn"), InvalidArgument);

  auto spec = LearnerSpec::defaults(LearnerKind::forest, 3);
  apply_override(spec, "tree_count", "7");
  CHECK(std::get<ForestParams>(spec.params).tree_count == 7);
  apply_override(spec, "seed", "11");
  CHECK(spec.seed == 11);
  CHECK_THROWS_AS(apply_override(spec, "tree_count", "0"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(spec, "tree_count", "7x"), InvalidArgument);
  CHECK_THROWS_AS(apply_override(spec, "learning_rate", "0.1"), InvalidArgument);

  auto svm = LearnerSpec::defaults(LearnerKind::svm);
  apply_override(svm, "kernel", "linear");
  apply_override(svm, "c", "2.5");
  CHECK(std::get<SvmParams>(svm.params).kernel == KernelType::linear);
  CHECK(std::get<SvmParams>(svm.params).c == 2.5);
  CHECK_THROWS_AS(apply_override(svm, "c", "-1"), InvalidArgument);

  const auto mlp = LearnerSpec::defaults(LearnerKind::mlp);
  const auto& p = std::get<MlpParams>(mlp.params);
  CHECK(p.learning_rate == 0.3);
  CHECK(p.momentum == 0.2);
  CHECK(p.epochs == 500);
  CHECK(p.batch_size == 32);
}
