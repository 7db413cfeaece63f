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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "drens/model_io.hpp"
#include "drens/pipeline.hpp"

namespace py = pybind11;
using namespace drens;

namespace {

using Rows = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Rows& x) {
  if (x.ndim() != 2) throw InvalidArgument("expected a 2-D array of feature rows");
  const auto rows = static_cast<std::size_t>(x.shape(0));
  const auto cols = static_cast<std::size_t>(x.shape(1));
  return Matrix(rows, cols, std::vector<double>(x.data(), x.data() + rows * cols));
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Trainer trainer_for(const std::string& model, std::uint64_t seed,
                    const std::map<std::string, std::string>& params,
                    const std::optional<std::string>& method, std::optional<std::size_t> top) {
  Trainer trainer;
  if (model == "stack" || model == "stacking") {
    if (!params.empty()) throw InvalidArgument("params apply to single learners only");
    const auto spec = StackingSpec::defaults(seed);
    trainer = [spec](const TabularDataset& ds) -> ModelPtr { return train_stacking(ds, spec); };
  } else {
    auto spec = LearnerSpec::defaults(learner_kind_from_string(model), seed);
    for (const auto& [k, v] : params) apply_override(spec, k, v);
    trainer = make_trainer(spec);
  }
  if (method.has_value() != top.has_value()) {
    throw InvalidArgument("method and top must be given together");
  }
  if (method) trainer = selecting_trainer(selection_method_from_string(*method), *top, seed, trainer);
  return trainer;
}

py::dict summary_dict(const MetricSummary& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["std"] = s.std;
  d["defined"] = s.defined;
  d["undefined"] = s.undefined;
  return d;
}

py::object optional_value(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

py::dict cv_dict(const CvResult& result) {
  py::dict summary;
  for (Metric m : kAllMetrics) summary[py::str(to_string(m))] = summary_dict(result.summary(m));
  py::list folds;
  for (const auto& f : result.folds) {
    py::dict d;
    d["repeat"] = f.repeat;
    d["fold"] = f.fold;
    d["train_size"] = f.train_size;
    d["test_size"] = f.test_size;
    for (Metric m : kAllMetrics) d[py::str(to_string(m))] = optional_value(f.metrics.value(m));
    folds.append(d);
  }
  py::dict out;
  out["summary"] = summary;
  out["folds"] = folds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Diabetic retinopathy ensemble classification core";
  m.attr("__version__") = kVersion;

  static py::exception<Error> drens_error(m, "DrensError", PyExc_RuntimeError);
  static py::exception<FormatError> format_error(m, "FormatError", drens_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DimensionMismatch& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const FormatError& e) {
      py::set_error(format_error, e.what());
    } catch (const Error& e) {
      py::set_error(drens_error, e.what());
    }
  });

  py::class_<TabularDataset>(m, "Dataset")
      .def(py::init([](const Rows& x, const std::vector<int>& y,
                       std::optional<std::vector<std::string>> names) {
             auto matrix = to_matrix(x);
             std::vector<std::string> n;
             if (names) {
               n = *names;
             } else {
               for (std::size_t c = 0; c < matrix.cols(); ++c) n.push_back("f" + std::to_string(c));
             }
             return TabularDataset(std::move(matrix), y, std::move(n));
           }),
           py::arg("x"), py::arg("y"), py::arg("feature_names") = py::none())
      .def_static("load", [](const std::filesystem::path& p) { return load_dataset(p); }, py::arg("path"))
      .def_property_readonly("n_rows", &TabularDataset::n_rows)
      .def_property_readonly("n_features", &TabularDataset::n_features)
      .def_property_readonly("feature_names", &TabularDataset::feature_names)
      .def_property_readonly("labels", &TabularDataset::labels)
      .def_property_readonly("features", [](const TabularDataset& ds) { return to_array(ds.features()); })
      .def("class_counts", [](const TabularDataset& ds) { return class_distribution(ds); })
      .def("__len__", &TabularDataset::n_rows);

  py::class_<Model, std::shared_ptr<Model>>(m, "Model")
      .def_property_readonly("kind", &Model::kind)
      .def_property_readonly("n_features", &Model::n_features)
      .def("predict_proba", [](const Model& model, const Rows& x) {
             return model.predict_proba(to_matrix(x));
           }, py::arg("x"))
      .def("predict", [](const Model& model, const Rows& x) {
             std::vector<int> out;
             for (double p : model.predict_proba(to_matrix(x))) out.push_back(threshold_label(p));
             return out;
           }, py::arg("x"))
      .def("to_json", [](const Model& model) { return model.to_json().dump(); })
      .def("save", [](const Model& model, const std::filesystem::path& p) { save_model(model, p); },
           py::arg("path"));

  m.def("load_model", [](const std::filesystem::path& p) {
        return std::const_pointer_cast<Model>(load_model(p));
      }, py::arg("path"));
  m.def("model_from_json", [](const std::string& text) {
        return std::const_pointer_cast<Model>(model_from_json(nlohmann::json::parse(text)));
      }, py::arg("text"));

  m.def("rank", [](const TabularDataset& ds, const std::string& method, std::size_t top,
                   std::uint64_t seed) {
        const auto ranking = rank_features(ds, selection_method_from_string(method), top, seed);
        py::list out;
        std::size_t rank = 1;
        for (const auto& s : ranking.ordered) {
          py::dict d;
          d["rank"] = rank++;
          d["index"] = s.feature_index;
          d["name"] = ds.feature_names()[s.feature_index];
          d["score"] = s.score;
          out.append(d);
        }
        return out;
      }, py::arg("dataset"), py::arg("method") = "infogain", py::arg("top") = 10,
      py::arg("seed") = 42);

  m.def("train", [](const TabularDataset& ds, const std::string& model, std::uint64_t seed,
                    const std::map<std::string, std::string>& params,
                    std::optional<std::string> method, std::optional<std::size_t> top) {
        const auto trainer = trainer_for(model, seed, params, method, top);
        ModelPtr fitted;
        {
          py::gil_scoped_release release;
          fitted = trainer(ds);
        }
        return std::const_pointer_cast<Model>(fitted);
      }, py::arg("dataset"), py::arg("model") = "stack", py::arg("seed") = 42,
      py::arg("params") = std::map<std::string, std::string>{}, py::arg("method") = py::none(),
      py::arg("top") = py::none());

  m.def("cross_validate", [](const TabularDataset& ds, const std::string& model,
                             std::size_t folds, std::size_t repeats, std::uint64_t seed,
                             std::optional<std::string> method, std::optional<std::size_t> top) {
        CvProtocol protocol;
        protocol.folds = folds;
        protocol.repeats = repeats;
        protocol.seed = seed;
        protocol.learner = model;
        const auto trainer = trainer_for(model, seed, {}, method, top);
        std::optional<CvResult> result;
        {
          py::gil_scoped_release release;
          result = cross_validate(ds, trainer, protocol);
        }
        return cv_dict(*result);
      }, py::arg("dataset"), py::arg("model") = "stack", py::arg("folds") = 10,
      py::arg("repeats") = 1, py::arg("seed") = 42, py::arg("method") = py::none(),
      py::arg("top") = py::none());

  m.def("reproduce", [](const std::filesystem::path& data, const std::filesystem::path& out,
                        std::uint64_t seed, std::size_t folds, std::size_t repeats,
                        bool strict_selection) {
        ReproduceConfig config;
        config.seed = seed;
        config.folds = folds;
        config.repeats = repeats;
        config.strict_selection = strict_selection;
        std::optional<ReproduceResult> result;
        {
          py::gil_scoped_release release;
          result = reproduce_to_directory(data, out, config);
        }
        py::dict tables;
        tables["accuracy"] = result->tables.accuracy_grid.to_markdown();
        tables["best_vs_proposed"] = result->tables.best_vs_proposed.to_markdown();
        tables["subdatasets"] = result->tables.subdatasets.to_markdown();
        tables["best_single"] = result->tables.best_single;
        return tables;
      }, py::arg("data"), py::arg("out"), py::arg("seed") = 42, py::arg("folds") = 10,
      py::arg("repeats") = 1, py::arg("strict_selection") = false);

  m.def("set_threads", &set_thread_count, py::arg("count"));
  m.def("sha256_file", [](const std::filesystem::path& p) { return sha256_file(p); }, py::arg("path"));
}
