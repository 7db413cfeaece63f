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

#include "drens/pipeline.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace drens {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return sha256_hex(bytes);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

nlohmann::json ranking_to_json(const FeatureRanking& ranking, const TabularDataset& ds) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t r = 0; r < ranking.ordered.size(); ++r) {
    const auto& s = ranking.ordered[r];
    features.push_back({{"rank", r + 1},
                        {"index", s.feature_index},
                        {"name", ds.feature_names().at(s.feature_index)},
                        {"score", s.score}});
  }
  return {{"method", to_string(ranking.method)},
          {"selector_config", ranking.selector_config},
          {"features", std::move(features)}};
}

Table ranking_table(const FeatureRanking& ranking, const TabularDataset& ds) {
  Table t;
  t.header = {"Rank", "Index", "Feature", "Score"};
  for (std::size_t r = 0; r < ranking.ordered.size(); ++r) {
    const auto& s = ranking.ordered[r];
    t.rows.push_back({std::to_string(r + 1), std::to_string(s.feature_index),
                      ds.feature_names().at(s.feature_index), format_fixed(s.score, 6)});
  }
  return t;
}

FeatureRanking rank_features(const TabularDataset& ds, SelectionMethod method, std::size_t top_k,
                             std::uint64_t seed, const WrapperConfig& wrapper) {
  return method == SelectionMethod::info_gain ? rank_by_information_gain(ds, top_k)
                                              : wrapper_subset_search(ds, top_k, seed, wrapper);
}

Trainer selecting_trainer(SelectionMethod method, std::size_t top_k, std::uint64_t seed,
                          Trainer inner, WrapperConfig wrapper) {
  return [=](const TabularDataset& train) -> ModelPtr {
    auto indices = rank_features(train, method, top_k, seed, wrapper).indices();
    auto model = inner(project_features(train, indices));
    return std::make_shared<const ProjectedModel>(std::move(indices), train.n_features(),
                                                  std::move(model));
  };
}

std::vector<GridModel> default_grid_models(std::uint64_t seed) {
  const auto stacking = StackingSpec::defaults(seed);
  return {
      {"SVM", "svm", make_trainer(LearnerSpec::defaults(LearnerKind::svm, seed))},
      {"NN", "mlp", make_trainer(LearnerSpec::defaults(LearnerKind::mlp, seed))},
      {"RF", "forest", make_trainer(LearnerSpec::defaults(LearnerKind::forest, seed))},
      {kProposedModel, "stacking(forest,mlp,svm -> logistic)",
       [stacking](const TabularDataset& ds) -> ModelPtr { return train_stacking(ds, stacking); }},
  };
}

namespace {

struct Subdataset {
  std::string name;
  SelectionMethod method;
  std::size_t top_k;
};

const std::vector<Subdataset>& reduced_datasets() {
  static const std::vector<Subdataset> kReduced = {
      {"Wrapper top 5", SelectionMethod::wrapper, 5},
      {"Wrapper top 10", SelectionMethod::wrapper, 10},
      {"InfoGain top 5", SelectionMethod::info_gain, 5},
      {"InfoGain top 10", SelectionMethod::info_gain, 10},
  };
  return kReduced;
}

// Runs fn, rethrowing any failure as a StageError for the named stage.
template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void report(const ReproduceConfig& config, const std::string& message) {
  if (config.progress) config.progress(message);
}

std::size_t ranking_depth(const TabularDataset& ds) { return std::min<std::size_t>(10, ds.n_features()); }

void rank_stage(const TabularDataset& ds, const ReproduceConfig& config, ReproduceResult& out) {
  const std::size_t depth = ranking_depth(ds);
  report(config, "ranking features (infogain)");
  out.infogain = in_stage("rank infogain",
                          [&] { return rank_by_information_gain(ds, depth); });
  report(config, "ranking features (wrapper)");
  out.wrapper = in_stage("rank wrapper", [&] {
    return wrapper_subset_search(ds, depth, config.seed, config.wrapper);
  });
}

CvProtocol protocol_for(const ReproduceConfig& config, const std::string& dataset,
                        const std::string& learner) {
  CvProtocol p;
  p.folds = config.folds;
  p.repeats = config.repeats;
  p.seed = config.seed;
  p.dataset = dataset;
  p.learner = learner;
  return p;
}

void evaluate_stage(const TabularDataset& ds, const ReproduceConfig& config,
                    const std::vector<GridModel>& models, ReproduceResult& out) {
  std::vector<std::pair<std::string, TabularDataset>> datasets;
  datasets.emplace_back(kTableDatasets.front(), ds);
  for (const auto& sub : reduced_datasets()) {
    const auto& ranking = sub.method == SelectionMethod::info_gain ? out.infogain : out.wrapper;
    if (sub.top_k > ranking.ordered.size()) {
      throw StageError("subdatasets", "dataset has only " + std::to_string(ds.n_features()) +
                                          " features; " + sub.name + " needs " +
                                          std::to_string(sub.top_k));
    }
    const auto indices = ranking.truncated(sub.top_k).indices();
    datasets.emplace_back(sub.name, project_features(ds, indices));
  }
  for (const auto& [name, data] : datasets) {
    for (const auto& model : models) {
      const std::string stage = "evaluate " + name + " / " + model.name;
      report(config, stage);
      out.cells.push_back({name, model.name, in_stage(stage, [&] {
                             return cross_validate(data, model.trainer,
                                                   protocol_for(config, name, model.description));
                           })});
    }
  }
  if (!config.strict_selection) return;
  // The original-dataset row involves no selection, so it carries over.
  for (std::size_t m = 0; m < models.size(); ++m) out.strict_cells.push_back(out.cells[m]);
  for (const auto& sub : reduced_datasets()) {
    for (const auto& model : models) {
      const std::string stage = "strict " + sub.name + " / " + model.name;
      report(config, stage);
      const auto trainer =
          selecting_trainer(sub.method, sub.top_k, config.seed, model.trainer, config.wrapper);
      out.strict_cells.push_back({sub.name, model.name, in_stage(stage, [&] {
                                    return cross_validate(
                                        ds, trainer,
                                        protocol_for(config, sub.name + " (per-fold selection)",
                                                     model.description));
                                  })});
    }
  }
}

void tables_stage(ReproduceResult& out) {
  out.tables = in_stage("report", [&] { return summarize_tables(out.cells); });
  if (!out.strict_cells.empty()) {
    out.strict_tables = in_stage("report strict", [&] { return summarize_tables(out.strict_cells); });
  }
}

}  // namespace

ReproduceResult run_reproduction(const TabularDataset& ds, const ReproduceConfig& config,
                                 std::vector<GridModel> models) {
  if (models.empty()) models = default_grid_models(config.seed);
  ReproduceResult out;
  rank_stage(ds, config, out);
  evaluate_stage(ds, config, models, out);
  tables_stage(out);
  return out;
}

nlohmann::json run_manifest(const std::string& command, std::uint64_t seed, nlohmann::json config,
                            const std::filesystem::path& data_path, const TabularDataset& ds) {
  const auto counts = class_distribution(ds);
  return {{"tool", "drens"},
          {"version", kVersion},
          {"command", command},
          {"seed", seed},
          {"config", std::move(config)},
          {"dataset",
           {{"path", data_path.string()},
            {"sha256", sha256_file(data_path)},
            {"rows", ds.n_rows()},
            {"features", ds.n_features()},
            {"class_counts", {counts[0], counts[1]}}}}};
}

namespace {

void write_tables(const std::filesystem::path& dir, const std::string& prefix,
                  const ReportTables& tables, std::vector<std::string>& written) {
  const std::pair<std::string, const Table*> files[] = {
      {"accuracy_grid", &tables.accuracy_grid},
      {"best_vs_proposed", &tables.best_vs_proposed},
      {"subdatasets", &tables.subdatasets},
  };
  for (const auto& [stem, table] : files) {
    write_text_file(dir / (prefix + stem + ".md"), table->to_markdown());
    write_text_file(dir / (prefix + stem + ".csv"), table->to_csv());
    written.push_back(prefix + stem + ".md");
    written.push_back(prefix + stem + ".csv");
  }
}

}  // namespace

ReproduceResult reproduce_to_directory(const std::filesystem::path& data_path,
                                       const std::filesystem::path& out_dir,
                                       const ReproduceConfig& config) {
  in_stage("prepare output", [&] {
    std::filesystem::create_directories(out_dir);
    std::filesystem::remove(out_dir / "FAILED");
    return 0;
  });
  try {
    const auto ds = in_stage("load", [&] { return load_dataset(data_path); });
    ReproduceResult out;
    std::vector<std::string> written;
    rank_stage(ds, config, out);
    in_stage("write rankings", [&] {
      for (const auto* ranking : {&out.infogain, &out.wrapper}) {
        const std::string stem = "ranking_" + to_string(ranking->method);
        write_text_file(out_dir / (stem + ".json"), ranking_to_json(*ranking, ds).dump(2) + "\n");
        write_text_file(out_dir / (stem + ".md"), ranking_table(*ranking, ds).to_markdown());
        written.push_back(stem + ".json");
        written.push_back(stem + ".md");
      }
      return 0;
    });
    evaluate_stage(ds, config, default_grid_models(config.seed), out);
    tables_stage(out);
    in_stage("write reports", [&] {
      write_text_file(out_dir / "folds.csv", folds_csv(out.cells));
      written.push_back("folds.csv");
      write_tables(out_dir, "", out.tables, written);
      if (out.strict_tables) {
        write_text_file(out_dir / "strict_folds.csv", folds_csv(out.strict_cells));
        written.push_back("strict_folds.csv");
        write_tables(out_dir, "strict_", *out.strict_tables, written);
      }
      nlohmann::json cfg = {{"folds", config.folds},
                            {"repeats", config.repeats},
                            {"strict_selection", config.strict_selection},
                            {"selection_top_k", {5, 10}},
                            {"wrapper",
                             {{"internal_folds", config.wrapper.internal_folds},
                              {"max_depth", config.wrapper.max_depth},
                              {"min_leaf", config.wrapper.min_leaf}}},
                            {"best_single", out.tables.best_single}};
      nlohmann::json models = nlohmann::json::object();
      for (const auto& m : default_grid_models(config.seed)) models[m.name] = m.description;
      cfg["models"] = std::move(models);
      auto manifest = run_manifest("reproduce", config.seed, std::move(cfg), data_path, ds);
      manifest["outputs"] = written;
      write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
      return 0;
    });
    return out;
  } catch (const StageError& e) {
    try {
      write_text_file(out_dir / "FAILED", std::string(e.what()) + "\n");
    } catch (const std::exception&) {
      // The original failure is the one worth reporting.
    }
    throw;
  }
}

}  // namespace drens
