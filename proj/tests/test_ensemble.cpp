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

#include "drens/ensemble.hpp"
#include "drens/model_io.hpp"
#include "spy.hpp"
#include "support.hpp"

using namespace drens;
using drens::testing::gaussian_blobs;
using drens::testing::make_dataset;

namespace {

StackingSpec quick_spec(std::uint64_t seed) {
  auto spec = StackingSpec::defaults(seed);
  std::get<ForestParams>(spec.base_specs[0].params).tree_count = 10;
  std::get<MlpParams>(spec.base_specs[1].params).epochs = 30;
  return spec;
}

// Returns the label stored in feature 1 with certainty.
class LabelEcho final : public Model {
 public:
  explicit LabelEcho(std::size_t d) : d_(d) {}
  std::string kind() const override { return "echo"; }
  std::size_t n_features() const override { return d_; }
  nlohmann::json to_json() const override { return nlohmann::json::object(); }

 protected:
  double proba_unchecked(std::span<const double> x) const override { return x[1]; }

 private:
  std::size_t d_;
};

}  // namespace

TEST_CASE("stacking spec validation") {
  auto spec = StackingSpec::defaults(1);
  CHECK(spec.base_specs.size() == 3);
  CHECK(spec.base_specs[0].kind() == LearnerKind::forest);
  CHECK(spec.base_specs[1].kind() == LearnerKind::mlp);
  CHECK(spec.base_specs[2].kind() == LearnerKind::svm);
  CHECK(spec.meta_spec.kind() == LearnerKind::logistic);
  CHECK(spec.internal_folds == 5);
  spec.base_specs.clear();
  const auto ds = gaussian_blobs(10, 2, 3.0, 1);
  CHECK_THROWS_AS(train_stacking(ds, spec), InvalidArgument);
  auto one_fold = StackingSpec::defaults(1);
  one_fold.internal_folds = 1;
  CHECK_THROWS_AS(one_fold.validate(), InvalidArgument);
}

TEST_CASE("meta features are strictly out of fold") {
  const auto ds = drens::testing::with_row_ids(drens::testing::synthetic_messidor(31));
  auto log = std::make_shared<drens::testing::SpyLog>();
  const std::vector<NamedTrainer> bases{{"spy-a", drens::testing::spy_trainer(log)},
                                        {"spy-b", drens::testing::spy_trainer(log)}};
  const auto model = train_stacking(ds, bases, make_trainer(LearnerSpec::defaults(LearnerKind::logistic)), 5, 9);
  CHECK(log->leaks.load() == 0);
  CHECK(log->predictions.load() == 2 * ds.n_rows());
  // Ten internal fits plus two full refits.
  CHECK(log->training_sets.size() == 12);
  const auto folds = stratified_k_folds(ds, 5, 9);
  std::size_t internal = 0;
  for (const auto& seen : log->training_sets) {
    if (seen.size() == ds.n_rows()) continue;
    ++internal;
    bool matches_a_fold = false;
    for (std::size_t f = 0; f < 5; ++f) {
      const auto train = folds.train_rows(f);
      if (std::set<std::size_t>(train.begin(), train.end()) == seen) matches_a_fold = true;
    }
    CHECK(matches_a_fold);
  }
  CHECK(internal == 10);
  CHECK(model->meta()->n_features() == 2);
}

TEST_CASE("base failures name the learner") {
  const auto ds = gaussian_blobs(20, 2, 3.0, 2);
  const std::vector<NamedTrainer> bases{
      {"fine", make_trainer(LearnerSpec::defaults(LearnerKind::logistic))},
      {"broken", [](const TabularDataset&) -> ModelPtr { throw TrainingError("boom"); }}};
  try {
    train_stacking(ds, bases, make_trainer(LearnerSpec::defaults(LearnerKind::logistic)), 3, 1);
    FAIL("expected failure");
  } catch (const TrainingError& e) {
    const std::string what = e.what();
    CHECK(what.find("broken") != std::string::npos);
    CHECK(what.find("boom") != std::string::npos);
  }
  const TabularDataset empty(Matrix(0, 2), {}, {"a", "b"});
  CHECK_THROWS_AS(train_stacking(empty, bases, bases[0].train, 3, 1), TrainingError);
}

TEST_CASE("single calibrated base: stacked labels follow the base") {
  const auto train = gaussian_blobs(60, 2, 3.0, 11);
  const auto held_out = gaussian_blobs(100, 2, 3.0, 12);
  StackingSpec spec;
  spec.base_specs = {LearnerSpec::defaults(LearnerKind::logistic, 1)};
  spec.meta_spec = LearnerSpec::defaults(LearnerKind::logistic, 1);
  spec.seed = 5;
  const auto stacked = train_stacking(train, spec);
  const auto base = train_model(train, spec.base_specs[0]);
  std::size_t agree = 0;
  for (std::size_t r = 0; r < held_out.n_rows(); ++r) {
    agree += stacked->predict(held_out.row(r)) == base->predict(held_out.row(r));
  }
  CHECK(static_cast<double>(agree) / held_out.n_rows() >= 0.95);
  // The one-input meta model must be increasing in the base probability.
  const auto& meta = dynamic_cast<const LogisticModel&>(*stacked->meta());
  CHECK(meta.weights()[0] > 0.0);
}

TEST_CASE("perfectly correlated meta features give positive weights") {
  Rng rng(4);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    labels.push_back(i % 2);
    rows.push_back({rng.normal(), static_cast<double>(i % 2)});
  }
  const auto ds = make_dataset(rows, labels);
  const Trainer echo = [](const TabularDataset& d) -> ModelPtr {
    return std::make_shared<const LabelEcho>(d.n_features());
  };
  const std::vector<NamedTrainer> bases{{"echo-1", echo}, {"echo-2", echo}};
  const auto model = train_stacking(ds, bases, make_trainer(LearnerSpec::defaults(LearnerKind::logistic)), 4, 3);
  const auto& meta = dynamic_cast<const LogisticModel&>(*model->meta());
  for (double w : meta.weights()) CHECK(w > 0.0);
  const std::vector<double> instance{0.0, 1.0};
  CHECK(model->meta_features(instance) == std::vector<double>{1.0, 1.0});
  const auto prediction = predict_stacking(*model, instance);
  CHECK(prediction.label == 1);
  CHECK(prediction.probability > 0.5);
}

TEST_CASE("zero meta weights give exactly one half") {
  const auto ds = gaussian_blobs(10, 3, 2.0, 6);
  const auto base = train_model(ds, LearnerSpec::defaults(LearnerKind::logistic));
  auto meta = std::make_shared<const LogisticModel>(Standardizer{{0.0, 0.0}, {1.0, 1.0}},
                                                    std::vector<double>{0.0, 0.0}, 0.0);
  const StackedModel model({base, base}, {"a", "b"}, meta);
  const auto p = predict_stacking(model, ds.row(0));
  CHECK(p.probability == 0.5);
  CHECK(p.label == 1);
  CHECK_THROWS_AS(model.predict_proba(std::vector<double>{1.0}), DimensionMismatch);
  CHECK_THROWS_AS(StackedModel({base}, {"a"}, meta), DimensionMismatch);
}

TEST_CASE("permuting base order permutes the meta inputs") {
  const auto ds = drens::testing::synthetic_messidor(32);
  const std::vector<std::size_t> rows = [&] {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < ds.n_rows(); i += 4) r.push_back(i);
    return r;
  }();
  const auto small = ds.subset(rows);
  const auto spec = quick_spec(7);
  auto permuted = spec;
  std::rotate(permuted.base_specs.begin(), permuted.base_specs.begin() + 1, permuted.base_specs.end());
  const auto a = train_stacking(small, spec);
  const auto b = train_stacking(small, permuted);
  const auto& wa = dynamic_cast<const LogisticModel&>(*a->meta()).weights();
  const auto& wb = dynamic_cast<const LogisticModel&>(*b->meta()).weights();
  for (std::size_t i = 0; i < 3; ++i) CHECK(wb[i] == doctest::Approx(wa[(i + 1) % 3]).epsilon(1e-9));
  for (std::size_t r = 0; r < ds.n_rows(); r += 11) {
    CHECK(b->predict_proba(ds.row(r)) == doctest::Approx(a->predict_proba(ds.row(r))).epsilon(1e-9));
  }
}

TEST_CASE("stacking is deterministic across thread counts and round-trips") {
  const auto ds = drens::testing::synthetic_messidor(33);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.n_rows(); i += 3) rows.push_back(i);
  const auto small = ds.subset(rows);
  const auto spec = quick_spec(8);
  set_thread_count(1);
  const auto a = train_stacking(small, spec);
  set_thread_count(3);
  const auto b = train_stacking(small, spec);
  set_thread_count(0);
  CHECK(a->to_json() == b->to_json());

  const auto doc = a->to_json();
  CHECK(doc.at("kind") == "stacking");
  CHECK(doc.at("parameters").at("bases").size() == 3);
  const auto back = model_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back->to_json() == doc);
  for (std::size_t r = 0; r < ds.n_rows(); r += 9) {
    const double p = a->predict_proba(ds.row(r));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(back->predict_proba(ds.row(r)) == p);
  }
  auto future = doc;
  future["parameters"]["bases"][1]["model"]["format_version"] = 99;
  CHECK_THROWS_AS(model_from_json(future), FormatError);
}

TEST_CASE("projected models select their columns") {
  const auto ds = gaussian_blobs(20, 4, 3.0, 9);
  const std::vector<std::size_t> keep{2, 0};
  const auto inner = train_model(project_features(ds, keep), LearnerSpec::defaults(LearnerKind::logistic));
  const ProjectedModel projected(keep, 4, inner);
  const std::vector<double> full{1.0, 9.0, -2.0, 9.0};
  const std::vector<double> narrow{-2.0, 1.0};
  CHECK(projected.predict_proba(full) == inner->predict_proba(narrow));
  CHECK_THROWS_AS(projected.predict_proba(narrow), DimensionMismatch);
  const auto back = model_from_json(projected.to_json());
  CHECK(back->predict_proba(full) == projected.predict_proba(full));
  CHECK_THROWS_AS(ProjectedModel(std::vector<std::size_t>{0, 4}, 4, inner), InvalidArgument);
}
