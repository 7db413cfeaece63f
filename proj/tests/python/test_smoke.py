# Copyright 2026 The drens Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os

import numpy as np
import pytest

import drens


def blobs(per_class=40, d=4, shift=2.5, seed=0):
    rng = np.random.default_rng(seed)
    x0 = rng.normal(size=(per_class, d))
    x1 = rng.normal(size=(per_class, d)) + shift
    return np.vstack([x0, x1]), [0] * per_class + [1] * per_class


def test_dataset_roundtrip_shape():
    x, y = blobs()
    ds = drens.Dataset(x, y)
    assert len(ds) == 80
    assert ds.n_features == 4
    assert ds.feature_names == ["f0", "f1", "f2", "f3"]
    assert ds.class_counts() == [40, 40]
    np.testing.assert_array_equal(ds.features, x)


def test_invalid_labels_raise_value_error():
    x, _ = blobs(per_class=2)
    with pytest.raises(ValueError):
        drens.Dataset(x, [0, 1, 2, 0])


def test_rank_orders_by_score():
    x, y = blobs()
    x[:, 2] = 0.0
    ranking = drens.rank(drens.Dataset(x, y), "infogain", 4)
    assert [r["rank"] for r in ranking] == [1, 2, 3, 4]
    scores = [r["score"] for r in ranking]
    assert scores == sorted(scores, reverse=True)
    assert ranking[-1]["index"] == 2


def test_train_predict_and_persist(tmp_path):
    x, y = blobs()
    ds = drens.Dataset(x, y)
    model = drens.train(ds, "logistic", seed=3)
    assert model.kind == "logistic"
    assert np.mean(np.array(model.predict(x)) == np.array(y)) > 0.9
    path = tmp_path / "model.json"
    model.save(path)
    again = drens.load_model(path)
    assert again.predict_proba(x) == model.predict_proba(x)
    doc = json.loads(model.to_json())
    doc["format_version"] = 999
    with pytest.raises(drens.FormatError):
        drens.model_from_json(json.dumps(doc))


def test_dimension_mismatch():
    x, y = blobs()
    model = drens.train(drens.Dataset(x, y), "tree")
    with pytest.raises(ValueError):
        model.predict(x[:, :3])


def test_projected_stacking_model():
    x, y = blobs(per_class=30)
    model = drens.train(drens.Dataset(x, y), "stack", method="infogain", top=2)
    assert model.kind == "projected"
    probs = model.predict_proba(x)
    assert all(0.0 <= p <= 1.0 for p in probs)


def test_cross_validate_summary():
    x, y = blobs()
    result = drens.cross_validate(drens.Dataset(x, y), "svm", folds=4)
    assert len(result["folds"]) == 4
    assert result["summary"]["accuracy"]["defined"] == 4
    assert result["summary"]["accuracy"]["mean"] > 0.85


def test_unknown_learner():
    x, y = blobs()
    with pytest.raises(ValueError):
        drens.train(drens.Dataset(x, y), "knn")


def test_build_tree_module_under_ctest():
    tree = os.environ.get("DRENS_PYTHON_BUILD_TREE")
    if not tree:
        pytest.skip("not running under ctest")
    assert os.path.realpath(drens._core.__file__).startswith(os.path.realpath(tree))
