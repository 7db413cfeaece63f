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

#include "drens/model_io.hpp"

#include <fstream>

namespace drens {

nlohmann::json model_to_json(const Model& model) { return model.to_json(); }

namespace {

ModelPtr dispatch(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) throw ParseError("model document has no kind");
  const auto kind = doc.at("kind").get<std::string>();
  // Version first, so a future document fails on the version, not the kind.
  check_model_document(doc, kind);
  if (kind == "tree") return DecisionTree::from_json(doc);
  if (kind == "forest") return RandomForest::from_json(doc);
  if (kind == "mlp") return MlpModel::from_json(doc);
  if (kind == "svm") return SvmModel::from_json(doc);
  if (kind == "logistic") return LogisticModel::from_json(doc);
  const auto& params = doc.at("parameters");
  if (kind == "stacking") {
    std::vector<ModelPtr> bases;
    std::vector<std::string> names;
    for (const auto& entry : params.at("bases")) {
      names.push_back(entry.at("name").get<std::string>());
      bases.push_back(dispatch(entry.at("model")));
    }
    auto model = std::make_shared<const StackedModel>(std::move(bases), std::move(names),
                                                      dispatch(params.at("meta")));
    if (model->n_features() != doc.at("n_features").get<std::size_t>()) {
      throw ParseError("stacking document n_features disagrees with its base models");
    }
    return model;
  }
  if (kind == "projected") {
    return std::make_shared<const ProjectedModel>(
        params.at("indices").get<std::vector<std::size_t>>(),
        doc.at("n_features").get<std::size_t>(), dispatch(params.at("inner")));
  }
  throw FormatError("unknown model kind '" + kind + "'");
}

}  // namespace

ModelPtr model_from_json(const nlohmann::json& doc) {
  try {
    return dispatch(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

ModelPtr load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace drens
