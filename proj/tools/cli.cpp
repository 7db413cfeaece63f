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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "drens/model_io.hpp"
#include "drens/pipeline.hpp"

namespace drens::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string data;
  std::uint64_t seed = 42;
  std::size_t folds = 10;
  std::size_t repeats = 1;
  std::string method;
  std::size_t top = 0;  // 0: no selection
  std::string model = "stack";
  std::string out;
  bool strict_selection = false;
  unsigned threads = 0;
  std::vector<std::string> params;
  std::string model_file;
  std::string input;
};

// Validates the --top/--method pair against the loaded dataset.
std::optional<SelectionMethod> selection(const Options& o, const TabularDataset& ds,
                                         bool required) {
  if (o.method.empty() && o.top == 0) {
    if (required) throw UsageError("--top is required");
    return std::nullopt;
  }
  const auto method =
      selection_method_from_string(o.method.empty() ? std::string("infogain") : o.method);
  if (o.top < 1 || o.top > ds.n_features()) {
    throw UsageError("--top must be between 1 and " + std::to_string(ds.n_features()) + ", got " +
                     std::to_string(o.top));
  }
  return method;
}

TabularDataset load(const Options& o) {
  if (o.data.empty()) throw UsageError("--data is required");
  if (!fs::exists(o.data)) throw UsageError("dataset not found: " + o.data);
  return load_dataset(o.data);
}

fs::path out_dir(const Options& o, const char* fallback) {
  fs::path dir = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

bool is_stacking(const std::string& name) { return name == "stack" || name == "stacking"; }

LearnerSpec single_spec(const Options& o) {
  LearnerSpec spec = LearnerSpec::defaults(learner_kind_from_string(o.model), o.seed);
  for (const auto& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--param expects key=value, got '" + p + "'");
    }
    try {
      apply_override(spec, p.substr(0, eq), p.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  return spec;
}

// Trainer plus a short description for reports and manifests.
std::pair<Trainer, nlohmann::json> model_trainer(const Options& o) {
  if (is_stacking(o.model)) {
    if (!o.params.empty()) throw UsageError("--param applies to single learners only");
    const auto spec = StackingSpec::defaults(o.seed);
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& b : spec.base_specs) {
      bases.push_back({{"kind", to_string(b.kind())},
                       {"hyperparameters", hyperparameters_to_json(b.params)}});
    }
    nlohmann::json desc = {
        {"kind", "stacking"},
        {"bases", std::move(bases)},
        {"meta", {{"kind", "logistic"}, {"hyperparameters", hyperparameters_to_json(spec.meta_spec.params)}}},
        {"internal_folds", spec.internal_folds}};
    return {[spec](const TabularDataset& ds) -> ModelPtr { return train_stacking(ds, spec); },
            std::move(desc)};
  }
  const auto spec = single_spec(o);
  return {make_trainer(spec),
          {{"kind", to_string(spec.kind())}, {"hyperparameters", hyperparameters_to_json(spec.params)}}};
}

nlohmann::json selection_json(const Options& o, std::optional<SelectionMethod> method) {
  if (!method) return nullptr;
  return {{"method", to_string(*method)}, {"top", o.top}};
}

int cmd_rank(const Options& o, std::ostream& out) {
  const auto ds = load(o);
  const auto method = *selection(o, ds, true);
  const auto ranking = rank_features(ds, method, o.top, o.seed);
  const auto dir = out_dir(o, ".");
  write_text_file(dir / "ranking.json", ranking_to_json(ranking, ds).dump(2) + "\n");
  const auto table = ranking_table(ranking, ds).to_markdown();
  write_text_file(dir / "ranking.md", table);
  std::ostringstream subset;
  write_csv(subset, project_features(ds, ranking.indices()));
  write_text_file(dir / "subset.csv", subset.str());
  auto manifest = run_manifest("rank", o.seed,
                               {{"method", to_string(method)}, {"top", o.top}}, o.data, ds);
  manifest["outputs"] = {"ranking.json", "ranking.md", "subset.csv"};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << table;
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto ds = load(o);
  const auto method = selection(o, ds, false);
  auto [trainer, desc] = model_trainer(o);
  if (method) trainer = selecting_trainer(*method, o.top, o.seed, trainer);
  const auto model = trainer(ds);
  const auto dir = out_dir(o, ".");
  save_model(*model, dir / "model.json");
  auto manifest = run_manifest("train", o.seed,
                               {{"model", std::move(desc)}, {"selection", selection_json(o, method)}},
                               o.data, ds);
  manifest["outputs"] = {"model.json"};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (dir / "model.json").string() << " (" << model->kind() << ", "
      << model->n_features() << " features)\n";
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  if (o.model_file.empty()) throw UsageError("--model-file is required");
  if (o.input.empty()) throw UsageError("--input is required");
  const auto model = load_model(o.model_file);
  std::ifstream in(o.input);
  if (!in) throw UsageError("cannot open input " + o.input);
  const Matrix rows = load_feature_rows(in, o.input);
  if (rows.rows() > 0 && rows.cols() != model->n_features()) {
    throw DimensionMismatch("model expects " + std::to_string(model->n_features()) +
                            " features but the input has " + std::to_string(rows.cols()) +
                            " columns");
  }
  std::ostringstream csv;
  csv << "label,probability\n";
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const double p = model->predict_proba(rows.row(r));
    csv << threshold_label(p) << ',' << format_double(p) << '\n';
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_text_file(o.out, csv.str());
  }
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto ds = load(o);
  const auto method = selection(o, ds, false);
  auto [trainer, desc] = model_trainer(o);
  TabularDataset data = ds;
  std::string dataset_name = "Original";
  if (method && o.strict_selection) {
    trainer = selecting_trainer(*method, o.top, o.seed, trainer);
    dataset_name = to_string(*method) + " top " + std::to_string(o.top) + " (per-fold selection)";
  } else if (method) {
    data = project_features(ds, rank_features(ds, *method, o.top, o.seed).indices());
    dataset_name = to_string(*method) + " top " + std::to_string(o.top);
  }
  CvProtocol protocol;
  protocol.folds = o.folds;
  protocol.repeats = o.repeats;
  protocol.seed = o.seed;
  protocol.dataset = dataset_name;
  protocol.learner = desc["kind"].get<std::string>();
  const CvCell cell{dataset_name, o.model, cross_validate(data, trainer, protocol)};

  Table summary;
  summary.header = {"Metric", "Mean", "Std", "Defined", "Undefined"};
  for (Metric m : kAllMetrics) {
    const auto s = cell.result.summary(m);
    summary.rows.push_back({to_string(m), format_fixed(s.mean), format_fixed(s.std),
                            std::to_string(s.defined), std::to_string(s.undefined)});
  }
  const auto dir = out_dir(o, ".");
  write_text_file(dir / "report.md", "Model: " + o.model + ", dataset: " + dataset_name + ", " +
                                         std::to_string(o.folds) + "-fold CV x " +
                                         std::to_string(o.repeats) + "\n\n" +
                                         summary.to_markdown());
  write_text_file(dir / "report.csv", summary.to_csv());
  write_text_file(dir / "folds.csv", folds_csv(std::span(&cell, 1)));
  auto manifest = run_manifest("evaluate", o.seed,
                               {{"model", std::move(desc)},
                                {"folds", o.folds},
                                {"repeats", o.repeats},
                                {"selection", selection_json(o, method)},
                                {"strict_selection", o.strict_selection}},
                               o.data, ds);
  manifest["outputs"] = {"report.md", "report.csv", "folds.csv"};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << summary.to_markdown();
  return kExitOk;
}

int cmd_reproduce(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.data.empty()) throw UsageError("--data is required");
  if (!fs::exists(o.data)) throw UsageError("dataset not found: " + o.data);
  ReproduceConfig config;
  config.seed = o.seed;
  config.folds = o.folds;
  config.repeats = o.repeats;
  config.strict_selection = o.strict_selection;
  config.progress = [&err](const std::string& stage) { err << "[drens] " << stage << '\n'; };
  const auto dir = out_dir(o, "reproduction");
  const auto result = reproduce_to_directory(o.data, dir, config);
  out << result.tables.accuracy_grid.to_markdown() << '\n'
      << result.tables.best_vs_proposed.to_markdown() << '\n'
      << result.tables.subdatasets.to_markdown();
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "Dataset file (ARFF or CSV, label last)");
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_selection(CLI::App* cmd, Options& o) {
  cmd->add_option("--method", o.method, "Feature selection method")
      ->check(CLI::IsMember({"infogain", "wrapper"}));
  cmd->add_option("--top", o.top, "Number of features to keep");
}

void add_model(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "Model to train")
      ->check(CLI::IsMember({"svm", "nn", "rf", "stack", "tree", "logistic"}))
      ->capture_default_str();
  cmd->add_option("--param", o.params, "Hyperparameter override key=value (single learners)");
}

void add_cv(CLI::App* cmd, Options& o) {
  cmd->add_option("--folds", o.folds, "Cross-validation folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  cmd->add_option("--repeats", o.repeats, "Cross-validation repeats")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  cmd->add_flag("--strict-selection", o.strict_selection,
                "Refit feature selection inside every training fold");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Stacked ensemble screening toolkit", "drens"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* rank = app.add_subcommand("rank", "Rank features and write the reduced dataset");
  add_common(rank, o);
  add_selection(rank, o);

  auto* train = app.add_subcommand("train", "Train a model on the full dataset");
  add_common(train, o);
  add_model(train, o);
  add_selection(train, o);

  auto* predict = app.add_subcommand("predict", "Apply a saved model to unlabeled rows");
  predict->add_option("--model-file", o.model_file, "Model document");
  predict->add_option("--input", o.input, "CSV of feature rows");
  predict->add_option("--out", o.out, "Predictions CSV (default: stdout)");
  predict->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate one model");
  add_common(evaluate, o);
  add_model(evaluate, o);
  add_selection(evaluate, o);
  add_cv(evaluate, o);

  auto* reproduce = app.add_subcommand("reproduce", "Run the full result grid");
  add_common(reproduce, o);
  add_cv(reproduce, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_thread_count(o.threads);
    if (rank->parsed()) return cmd_rank(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (predict->parsed()) return cmd_predict(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    return cmd_reproduce(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace drens::cli
