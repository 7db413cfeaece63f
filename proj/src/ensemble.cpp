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

#include "drens/ensemble.hpp"

#include <exception>

namespace drens {

StackingSpec StackingSpec::defaults(std::uint64_t seed) {
  StackingSpec spec;
  spec.base_specs = {LearnerSpec::defaults(LearnerKind::forest, seed),
                     LearnerSpec::defaults(LearnerKind::mlp, seed),
                     LearnerSpec::defaults(LearnerKind::svm, seed)};
  spec.meta_spec = LearnerSpec::defaults(LearnerKind::logistic, seed);
  spec.seed = seed;
  return spec;
}

void StackingSpec::validate() const {
  if (base_specs.empty()) throw InvalidArgument("stacking needs at least one base learner");
  if (internal_folds < 2) throw InvalidArgument("stacking internal_folds must be at least 2");
  for (const auto& spec : base_specs) spec.validate();
  meta_spec.validate();
}

StackedModel::StackedModel(std::vector<ModelPtr> bases, std::vector<std::string> base_names,
                           ModelPtr meta)
    : bases_(std::move(bases)), base_names_(std::move(base_names)), meta_(std::move(meta)) {
  if (bases_.empty()) throw InvalidArgument("stacked model needs at least one base model");
  if (base_names_.size() != bases_.size()) throw InvalidArgument("one name per base model");
  n_features_ = bases_.front()->n_features();
  for (const auto& base : bases_) {
    if (base->n_features() != n_features_) {
      throw DimensionMismatch("stacked base models disagree on feature count");
    }
  }
  if (meta_->n_features() != bases_.size()) {
    throw DimensionMismatch("meta model expects " + std::to_string(meta_->n_features()) +
                            " inputs but there are " + std::to_string(bases_.size()) +
                            " base models");
  }
}

std::vector<double> StackedModel::meta_features(std::span<const double> instance) const {
  std::vector<double> z(bases_.size());
  for (std::size_t b = 0; b < bases_.size(); ++b) z[b] = bases_[b]->predict_proba(instance);
  return z;
}

double StackedModel::proba_unchecked(std::span<const double> instance) const {
  return meta_->predict_proba(meta_features(instance));
}

nlohmann::json StackedModel::to_json() const {
  nlohmann::json bases = nlohmann::json::array();
  for (std::size_t b = 0; b < bases_.size(); ++b) {
    bases.push_back({{"name", base_names_[b]}, {"model", bases_[b]->to_json()}});
  }
  return model_document(kind(), n_features_, 0, nlohmann::json::object(),
                        {{"bases", std::move(bases)}, {"meta", meta_->to_json()}});
}

StackingPrediction predict_stacking(const StackedModel& model, std::span<const double> instance) {
  const double p = model.predict_proba(instance);
  return {threshold_label(p), p};
}

std::shared_ptr<const StackedModel> train_stacking(const TabularDataset& ds,
                                                   std::span<const NamedTrainer> bases,
                                                   const Trainer& meta,
                                                   std::size_t internal_folds,
                                                   std::uint64_t seed) {
  if (ds.n_rows() == 0) throw TrainingError("cannot train a stacking ensemble on an empty dataset");
  if (bases.empty()) throw InvalidArgument("stacking needs at least one base learner");
  const auto folds = stratified_k_folds(ds, internal_folds, seed);
  const std::size_t n_bases = bases.size();
  const std::size_t k = folds.k;

  auto with_context = [&](std::size_t b, const char* stage, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw TrainingError("stacking base '" + bases[b].name + "' (" + stage + "): " + e.what());
    }
  };

  Matrix meta_x(ds.n_rows(), n_bases);
  parallel_for(n_bases * k, [&](std::size_t job) {
    const std::size_t b = job / k;
    const std::size_t f = job % k;
    const auto model = with_context(b, "internal fold", [&] {
      return bases[b].train(ds.subset(folds.train_rows(f)));
    });
    for (std::size_t r : folds.test_rows(f)) meta_x(r, b) = model->predict_proba(ds.row(r));
  });

  std::vector<std::string> names;
  for (const auto& base : bases) names.push_back(base.name);
  const TabularDataset meta_ds(std::move(meta_x), ds.labels(), names, ds.provenance(),
                               ds.row_ids());
  ModelPtr meta_model = meta(meta_ds);

  std::vector<ModelPtr> fitted(n_bases);
  parallel_for(n_bases, [&](std::size_t b) {
    fitted[b] = with_context(b, "full refit", [&] { return bases[b].train(ds); });
  });
  return std::make_shared<const StackedModel>(std::move(fitted), std::move(names),
                                              std::move(meta_model));
}

std::shared_ptr<const StackedModel> train_stacking(const TabularDataset& ds,
                                                   const StackingSpec& spec) {
  spec.validate();
  std::vector<NamedTrainer> bases;
  for (std::size_t b = 0; b < spec.base_specs.size(); ++b) {
    bases.push_back({std::to_string(b) + ":" + to_string(spec.base_specs[b].kind()),
                     make_trainer(spec.base_specs[b])});
  }
  return train_stacking(ds, bases, make_trainer(spec.meta_spec), spec.internal_folds, spec.seed);
}

ProjectedModel::ProjectedModel(std::vector<std::size_t> indices, std::size_t n_features,
                               ModelPtr inner)
    : indices_(std::move(indices)), n_features_(n_features), inner_(std::move(inner)) {
  if (inner_->n_features() != indices_.size()) {
    throw DimensionMismatch("projected model index count does not match the inner model");
  }
  for (std::size_t i : indices_) {
    if (i >= n_features_) throw InvalidArgument("projected model index out of range");
  }
}

double ProjectedModel::proba_unchecked(std::span<const double> instance) const {
  std::vector<double> x(indices_.size());
  for (std::size_t c = 0; c < indices_.size(); ++c) x[c] = instance[indices_[c]];
  return inner_->predict_proba(x);
}

nlohmann::json ProjectedModel::to_json() const {
  return model_document(kind(), n_features_, 0, nlohmann::json::object(),
                        {{"indices", indices_}, {"inner", inner_->to_json()}});
}

}  // namespace drens
