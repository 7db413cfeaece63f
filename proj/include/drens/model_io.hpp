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

// Reading and writing persisted model documents of any kind.

#ifndef DRENS_MODEL_IO_HPP_
#define DRENS_MODEL_IO_HPP_

#include <filesystem>

#include "drens/ensemble.hpp"

namespace drens {

nlohmann::json model_to_json(const Model& model);

// Dispatches on "kind". Throws FormatError for an unknown format_version or
// kind and ParseError for structurally broken documents.
ModelPtr model_from_json(const nlohmann::json& doc);

void save_model(const Model& model, const std::filesystem::path& path);
ModelPtr load_model(const std::filesystem::path& path);

}  // namespace drens

#endif  // DRENS_MODEL_IO_HPP_
