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

#include "drens/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

namespace drens {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

struct RowReader {
  std::string source;
  std::size_t n_fields = 0;  // 0 until the first data row fixes it
  std::vector<double> values;
  std::vector<int> labels;
  bool labeled = true;

  void add(std::string_view line, std::size_t row_number) {
    const auto fields = split_fields(line);
    if (n_fields == 0) {
      n_fields = fields.size();
      if (labeled && n_fields < 2) {
        throw ParseError(source + ": row " + std::to_string(row_number) +
                         ": need at least one feature and a label");
      }
    } else if (fields.size() != n_fields) {
      throw ParseError(source + ": row " + std::to_string(row_number) + ": ragged row with " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(n_fields));
    }
    const std::size_t n_features = labeled ? n_fields - 1 : n_fields;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_number(fields[c]);
      if (!value || !std::isfinite(*value)) {
        throw ParseError(source + ": row " + std::to_string(row_number) + ", column " +
                         std::to_string(c + 1) + ": non-numeric value '" +
                         std::string(fields[c]) + "'");
      }
      if (c < n_features) {
        values.push_back(*value);
      } else if (*value == 0.0 || *value == 1.0) {
        labels.push_back(static_cast<int>(*value));
      } else {
        throw ParseError(source + ": row " + std::to_string(row_number) + ": label '" +
                         std::string(fields[c]) + "' is not 0 or 1");
      }
    }
  }
};

bool looks_like_header(std::string_view line) {
  for (auto field : split_fields(line)) {
    if (!parse_number(field)) return true;
  }
  return false;
}

TabularDataset finish(RowReader& reader, std::vector<std::string> names) {
  if (reader.labels.empty()) throw ParseError(reader.source + ": empty data section");
  const std::size_t n_features = reader.n_fields - 1;
  if (names.empty()) {
    for (std::size_t c = 0; c < n_features; ++c) names.push_back("f" + std::to_string(c));
  } else if (names.size() != n_features) {
    throw ParseError(reader.source + ": header names " + std::to_string(names.size()) +
                     " features but rows have " + std::to_string(n_features));
  }
  const std::size_t n_rows = reader.labels.size();
  return TabularDataset(Matrix(n_rows, n_features, std::move(reader.values)),
                        std::move(reader.labels), std::move(names),
                        Provenance{reader.source, n_rows});
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

TabularDataset::TabularDataset(Matrix features, std::vector<int> labels,
                               std::vector<std::string> feature_names, Provenance provenance,
                               std::vector<std::size_t> row_ids)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      provenance_(std::move(provenance)),
      row_ids_(std::move(row_ids)) {
  if (features_.rows() != labels_.size()) {
    throw DimensionMismatch("feature rows (" + std::to_string(features_.rows()) +
                            ") != label count (" + std::to_string(labels_.size()) + ")");
  }
  if (feature_names_.size() != features_.cols()) {
    throw DimensionMismatch("feature name count (" + std::to_string(feature_names_.size()) +
                            ") != feature count (" + std::to_string(features_.cols()) + ")");
  }
  for (int y : labels_) {
    if (y != 0 && y != 1) throw InvalidArgument("label " + std::to_string(y) + " is not 0 or 1");
  }
  for (double v : features_.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  }
  std::set<std::string_view> seen;
  for (const auto& name : feature_names_) {
    if (!seen.insert(name).second) throw InvalidArgument("duplicate feature name '" + name + "'");
  }
  if (row_ids_.empty()) {
    row_ids_.resize(labels_.size());
    for (std::size_t i = 0; i < row_ids_.size(); ++i) row_ids_[i] = i;
  } else if (row_ids_.size() != labels_.size()) {
    throw DimensionMismatch("row id count != label count");
  }
}

TabularDataset TabularDataset::subset(std::span<const std::size_t> rows) const {
  Matrix features(rows.size(), n_features());
  std::vector<int> labels(rows.size());
  std::vector<std::size_t> ids(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n_rows()) throw InvalidArgument("row index out of range");
    std::copy_n(row(rows[i]).begin(), n_features(), features.row(i).begin());
    labels[i] = labels_[rows[i]];
    ids[i] = row_ids_[rows[i]];
  }
  return TabularDataset(std::move(features), std::move(labels), feature_names_, provenance_,
                        std::move(ids));
}

TabularDataset load_csv(std::istream& in, bool has_header, const std::string& source) {
  RowReader reader;
  reader.source = source;
  std::vector<std::string> names;
  std::string line;
  std::size_t row_number = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    const auto content = trim(line);
    if (content.empty()) continue;
    if (header_pending) {
      header_pending = false;
      auto fields = split_fields(content);
      if (fields.size() < 2) throw ParseError(source + ": header needs a label column");
      for (std::size_t c = 0; c + 1 < fields.size(); ++c) names.emplace_back(fields[c]);
      continue;
    }
    reader.add(content, ++row_number);
  }
  return finish(reader, std::move(names));
}

TabularDataset load_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  return load_csv(in, has_header, path.string());
}

TabularDataset load_arff(std::istream& in, const std::string& source) {
  RowReader reader;
  reader.source = source;
  std::vector<std::string> names;
  std::vector<std::string> types;
  std::string line;
  bool in_data = false;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    const auto content = trim(line);
    if (content.empty() || content.front() == '%') continue;
    if (in_data) {
      reader.add(content, ++row_number);
      continue;
    }
    std::string lowered(content);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered.starts_with("@relation")) continue;
    if (lowered.starts_with("@data")) {
      in_data = true;
      continue;
    }
    if (!lowered.starts_with("@attribute")) {
      throw ParseError(source + ": unexpected header line '" + std::string(content) + "'");
    }
    auto rest = trim(content.substr(10));
    std::string name;
    if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
      const char quote = rest.front();
      const auto close = rest.find(quote, 1);
      if (close == std::string_view::npos) throw ParseError(source + ": unterminated attribute name");
      name = std::string(rest.substr(1, close - 1));
      rest = trim(rest.substr(close + 1));
    } else {
      const auto space = rest.find_first_of(" \t");
      if (space == std::string_view::npos) throw ParseError(source + ": attribute without type");
      name = std::string(rest.substr(0, space));
      rest = trim(rest.substr(space));
    }
    std::string type(rest);
    type.erase(std::remove_if(type.begin(), type.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               type.end());
    std::transform(type.begin(), type.end(), type.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    names.push_back(std::move(name));
    types.push_back(std::move(type));
  }
  if (names.size() < 2) throw ParseError(source + ": need at least one feature and a class");
  for (std::size_t i = 0; i < types.size(); ++i) {
    const bool numeric = types[i] == "numeric" || types[i] == "real" || types[i] == "integer";
    const bool binary = types[i] == "{0,1}" || types[i] == "{1,0}";
    if (i + 1 == types.size() ? !binary : !(numeric || binary)) {
      throw ParseError(source + ": unsupported attribute type '" + types[i] + "' for '" +
                       names[i] + "'");
    }
  }
  names.pop_back();
  if (reader.n_fields != 0 && reader.n_fields != names.size() + 1) {
    throw ParseError(source + ": data rows have " + std::to_string(reader.n_fields) +
                     " fields but " + std::to_string(names.size() + 1) + " attributes declared");
  }
  return finish(reader, std::move(names));
}

TabularDataset load_arff(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_arff(in, path.string());
}

TabularDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto content = trim(line);
    if (content.empty()) continue;
    in.clear();
    in.seekg(0);
    if (content.front() == '@' || content.front() == '%') return load_arff(in, path.string());
    return load_csv(in, looks_like_header(content), path.string());
  }
  throw ParseError(path.string() + ": empty data section");
}

Matrix load_feature_rows(std::istream& in, const std::string& source) {
  RowReader reader;
  reader.source = source;
  reader.labeled = false;
  std::string line;
  std::size_t row_number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    const auto content = trim(line);
    if (content.empty()) continue;
    if (first) {
      first = false;
      if (looks_like_header(content)) continue;
    }
    reader.add(content, ++row_number);
  }
  const std::size_t rows = row_number;
  return Matrix(rows, rows == 0 ? 0 : reader.n_fields, std::move(reader.values));
}

void write_csv(std::ostream& out, const TabularDataset& ds, bool header) {
  if (header) {
    for (const auto& name : ds.feature_names()) out << name << ',';
    out << "class\n";
  }
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (double v : ds.row(r)) out << format_double(v) << ',';
    out << ds.label(r) << '\n';
  }
}

ClassCounts class_distribution(const TabularDataset& ds) {
  ClassCounts counts{0, 0};
  for (int y : ds.labels()) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

TabularDataset project_features(const TabularDataset& ds, std::span<const std::size_t> indices) {
  std::vector<bool> used(ds.n_features(), false);
  for (std::size_t index : indices) {
    if (index >= ds.n_features()) {
      throw InvalidArgument("feature index " + std::to_string(index) + " out of range [0, " +
                            std::to_string(ds.n_features()) + ")");
    }
    if (used[index]) throw InvalidArgument("duplicate feature index " + std::to_string(index));
    used[index] = true;
  }
  Matrix features(ds.n_rows(), indices.size());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const auto src = ds.row(r);
    auto dst = features.row(r);
    for (std::size_t c = 0; c < indices.size(); ++c) dst[c] = src[indices[c]];
  }
  std::vector<std::string> names;
  names.reserve(indices.size());
  for (std::size_t index : indices) names.push_back(ds.feature_names()[index]);
  return TabularDataset(std::move(features), ds.labels(), std::move(names), ds.provenance(),
                        ds.row_ids());
}

std::vector<std::size_t> FoldAssignment::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldAssignment stratified_k_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("fold count must be at least 2, got " + std::to_string(k));
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < k) {
      throw InvalidArgument("class " + std::to_string(c) + " has " +
                            std::to_string(by_class[c].size()) + " rows, fewer than " +
                            std::to_string(k) + " folds");
    }
  }
  Rng rng(seed);
  FoldAssignment assignment{std::vector<std::size_t>(labels.size()), k, seed};
  std::size_t next_fold = 0;
  for (auto& rows : by_class) {
    rng.shuffle(rows);
    for (std::size_t row : rows) {
      assignment.fold_of_row[row] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return assignment;
}

FoldAssignment stratified_k_folds(const TabularDataset& ds, std::size_t k, std::uint64_t seed) {
  return stratified_k_folds(std::span<const int>(ds.labels()), k, seed);
}

}  // namespace drens
