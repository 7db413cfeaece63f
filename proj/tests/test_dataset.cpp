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
#include <numeric>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace drens;
using drens::testing::make_dataset;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv loading with header") {
  std::istringstream in("a,b,class\n1,2.5,0\n3,-4,1\n");
  const auto ds = load_csv(in, true);
  CHECK(ds.n_rows() == 2);
  CHECK(ds.n_features() == 2);
  CHECK(ds.feature_names() == std::vector<std::string>{"a", "b"});
  CHECK(ds.row(1)[1] == -4.0);
  CHECK(ds.labels() == std::vector<int>{0, 1});
}

TEST_CASE("header-only file is an empty data section") {
  std::istringstream in("a,b,class\n");
  const auto message = error_of([&] { load_csv(in, true); });
  CHECK(message.find("empty data section") != std::string::npos);
}

TEST_CASE("non-numeric cell names its row and column") {
  std::istringstream in("a,b,c,class\n1,2,3,0\n4,5,abc,1\n");
  const auto message = error_of([&] { load_csv(in, true); });
  CHECK(message.find("row 2") != std::string::npos);
  CHECK(message.find("column 3") != std::string::npos);
  CHECK(message.find("abc") != std::string::npos);
}

TEST_CASE("bad labels and ragged rows are rejected") {
  std::istringstream bad_label("1,2,3\n");
  CHECK_THROWS_AS(load_csv(bad_label, false), ParseError);
  std::istringstream ragged("1,2,0\n1,1\n");
  CHECK_THROWS_AS(load_csv(ragged, false), ParseError);
}

TEST_CASE("arff loading") {
  std::istringstream in(
      "% comment\n@relation r\n@attribute q numeric\n@attribute z real\n"
      "@attribute Class {0,1}\n@data\n1,0.25,1\n0,0.5,0\n");
  const auto ds = load_arff(in);
  CHECK(ds.n_rows() == 2);
  CHECK(ds.feature_names() == std::vector<std::string>{"q", "z"});
  CHECK(class_distribution(ds) == ClassCounts{1, 1});
}

TEST_CASE("class distribution") {
  const auto ds = make_dataset({{1}, {2}, {3}, {4}}, {1, 1, 1, 1});
  CHECK(class_distribution(ds) == ClassCounts{0, 4});
}

TEST_CASE("csv round trip is bitwise exact") {
  const auto ds = drens::testing::synthetic_messidor(3);
  std::ostringstream out;
  write_csv(out, ds);
  std::istringstream in(out.str());
  const auto back = load_csv(in, true);
  CHECK(back.features() == ds.features());
  CHECK(back.labels() == ds.labels());
  CHECK(back.feature_names() == ds.feature_names());
}

TEST_CASE("feature rows for prediction") {
  std::istringstream empty("");
  CHECK(load_feature_rows(empty).rows() == 0);
  std::istringstream with_header("a,b\n1,2\n3,4\n");
  const auto m = load_feature_rows(with_header);
  CHECK(m.rows() == 2);
  CHECK(m(1, 1) == 4.0);
}

TEST_CASE("projection") {
  const auto ds = drens::testing::synthetic_messidor(4);
  std::vector<std::size_t> all(ds.n_features());
  std::iota(all.begin(), all.end(), 0);
  const auto same = project_features(ds, all);
  CHECK(same.features() == ds.features());
  CHECK(same.feature_names() == ds.feature_names());

  const std::vector<std::size_t> five{3, 0, 7, 18, 2};
  const auto p = project_features(ds, five);
  CHECK(p.n_rows() == ds.n_rows());
  CHECK(p.n_features() == 5);
  CHECK(p.row(10)[3] == ds.row(10)[18]);
  std::vector<std::size_t> own(5);
  std::iota(own.begin(), own.end(), 0);
  CHECK(project_features(p, own).features() == p.features());

  const std::vector<std::size_t> dup{2, 2};
  CHECK_THROWS_AS(project_features(ds, dup), InvalidArgument);
  const std::vector<std::size_t> out_of_range{19};
  CHECK_THROWS_AS(project_features(ds, out_of_range), InvalidArgument);
}

TEST_CASE("stratified folds on the Messidor class split") {
  std::vector<int> labels(540, 0);
  labels.resize(1151, 1);
  const auto folds = stratified_k_folds(labels, 10, 7);
  std::size_t size_116 = 0;
  for (std::size_t f = 0; f < 10; ++f) {
    const auto rows = folds.test_rows(f);
    std::size_t zeros = 0;
    for (auto r : rows) zeros += labels[r] == 0;
    CHECK(zeros == 54);
    CHECK((rows.size() - zeros == 61 || rows.size() - zeros == 62));
    CHECK((rows.size() == 115 || rows.size() == 116));
    size_116 += rows.size() == 116;
  }
  CHECK(size_116 == 1);
}

TEST_CASE("stratified folds with exact divisibility and determinism") {
  std::vector<int> labels(10, 0);
  labels.resize(20, 1);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto folds = stratified_k_folds(labels, 10, seed);
    for (std::size_t f = 0; f < 10; ++f) {
      const auto rows = folds.test_rows(f);
      REQUIRE(rows.size() == 2);
      CHECK(labels[rows[0]] != labels[rows[1]]);
    }
    CHECK(stratified_k_folds(labels, 10, seed).fold_of_row == folds.fold_of_row);
  }
  CHECK_THROWS_AS(stratified_k_folds(labels, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(stratified_k_folds(labels, 11, 0), InvalidArgument);
}

TEST_CASE("stratification invariant on random datasets") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const std::size_t n0 = k + rng.below(60);
    const std::size_t n1 = k + rng.below(60);
    std::vector<int> labels(n0, 0);
    labels.resize(n0 + n1, 1);
    rng.shuffle(labels);
    const auto folds = stratified_k_folds(labels, k, rng.next());
    std::vector<std::array<std::size_t, 2>> counts(k, {0, 0});
    std::set<std::size_t> seen;
    for (std::size_t f = 0; f < k; ++f) {
      for (auto r : folds.test_rows(f)) {
        CHECK(seen.insert(r).second);
        ++counts[f][labels[r]];
      }
      const auto train = folds.train_rows(f);
      CHECK(train.size() + folds.test_rows(f).size() == labels.size());
    }
    CHECK(seen.size() == labels.size());
    for (int c = 0; c < 2; ++c) {
      std::size_t lo = counts[0][c];
      std::size_t hi = lo;
      for (const auto& fc : counts) {
        lo = std::min(lo, fc[c]);
        hi = std::max(hi, fc[c]);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("subset keeps row identities") {
  const auto ds = make_dataset({{1}, {2}, {3}, {4}}, {0, 1, 0, 1});
  const std::vector<std::size_t> rows{3, 1};
  const auto s = ds.subset(rows);
  CHECK(s.row_ids() == std::vector<std::size_t>{3, 1});
  CHECK(s.row(0)[0] == 4.0);
  const std::vector<std::size_t> again{1};
  CHECK(s.subset(again).row_ids() == std::vector<std::size_t>{1});
}

TEST_CASE("messidor file shape" * doctest::skip(!drens::testing::messidor_path().has_value())) {
  const auto ds = load_dataset(*drens::testing::messidor_path());
  CHECK(ds.n_rows() == 1151);
  CHECK(ds.n_features() == 19);
  CHECK(class_distribution(ds) == ClassCounts{540, 611});
}
