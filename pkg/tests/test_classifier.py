import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varroles.classifier import (
    ConfigError, Model, ModelFormatError, evaluate_split, eval_table, predict, stratified_split, train,
)
from varroles.engine import RoleId
from varroles.metrics import LabeledExample, RoleVector

BV, CNT, CH = RoleId.BITVECTOR.value, RoleId.COUNTER.value, RoleId.CHAR.value


def ex(label, values, source):
    return LabeledExample(RoleVector.from_percentages(source, 10, values), label)


def clusters(centres, n_per, spread, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for label, centre in centres.items():
        for i in range(n_per):
            v = np.clip(np.asarray(centre, float) + rng.normal(0, spread, 16), 0, 100)
            out.append(ex(label, v, f"{label}/{i:03d}"))
    return out


def centre(**dims):
    v = np.zeros(16)
    for k, val in dims.items():
        v[RoleId[k].value] = val
    return v


def nearest_centroid(train_set, x):
    labels = sorted({e.label for e in train_set})
    cents = {l: np.mean([e.vector.as_array() for e in train_set if e.label == l], axis=0) for l in labels}
    return min(labels, key=lambda l: (np.linalg.norm(x - cents[l]), l))


TWO = {"bits": centre(BITVECTOR=60), "loops": centre(COUNTER=60)}
THREE = {"bits": centre(BITVECTOR=60, USED_IN_ARITHM=20), "loops": centre(COUNTER=60, LINEAR=40),
         "text": centre(CHAR=60, INPUT=30)}


def test_separable_clusters_fit_perfectly():
    data = clusters(TWO, 20, 3.0)
    m = train(data)
    for e in data:
        assert predict(m, e.vector)[0][0] == e.label == nearest_centroid(data, e.vector.as_array())


def test_own_label_ranked_first():
    data = clusters(THREE, 15, 4.0, seed=1)
    m = train(data)
    assert all(predict(m, e.vector)[0][0] == e.label for e in data)


def test_single_label_rejected():
    with pytest.raises(ConfigError):
        train(clusters({"only": centre(CHAR=10)}, 5, 1.0))


def test_conflicting_duplicates_train():
    v = centre(BITVECTOR=50)
    data = [ex("a", v, "x"), ex("b", v, "x"), ex("a", centre(COUNTER=50), "y")]
    m = train(data)
    hits = sum(predict(m, e.vector)[0][0] == e.label for e in data)
    assert hits < len(data)


def test_symmetric_model_is_even_on_origin():
    data = [ex("a", centre(BITVECTOR=d), f"a{d}") for d in (10, 20, 30)]
    data += [ex("b", centre(BITVECTOR=-d), f"b{d}") for d in (10, 20, 30)]
    m = train(data)
    probs = dict(predict(m, np.zeros(16)))
    assert probs["a"] == pytest.approx(0.5, abs=1e-9)


def test_ties_broken_by_label():
    m = Model(["zeta", "alpha", "mid"], np.zeros((3, 16)), np.zeros(3), np.zeros(16), np.ones(16), 0)
    assert [l for l, _ in predict(m, np.ones(16))] == ["alpha", "mid", "zeta"]


@settings(max_examples=50)
@given(st.lists(st.floats(0, 100), min_size=16, max_size=16))
def test_probabilities_are_a_distribution(values):
    m = train(clusters(THREE, 6, 5.0))
    ranking = predict(m, np.array(values))
    probs = [p for _, p in ranking]
    assert abs(sum(probs) - 1) < 1e-9
    assert all(0 < p < 1 for p in probs)
    assert probs == sorted(probs, reverse=True)


def test_scaling_keeps_rankings():
    data = clusters(THREE, 10, 5.0, seed=3)
    scaled = [ex(e.label, e.vector.as_array() * 3.5, e.vector.source) for e in data]
    m1, m2 = train(data), train(scaled)
    for a, b in zip(data, scaled):
        assert predict(m1, a.vector)[0][0] == predict(m2, b.vector)[0][0]


def test_training_is_deterministic_and_order_free():
    data = clusters(THREE, 8, 5.0)
    a = train(data).to_json()
    assert train(list(reversed(data))).to_json() == a


def test_model_json_round_trip():
    m = train(clusters(TWO, 5, 2.0))
    text = m.to_json()
    back = Model.from_json(text)
    assert back.to_json() == text
    doc = json.loads(text)
    assert doc["version"] == 1
    assert doc["hyperparameters"] == {"epochs": 500, "learning_rate": 0.1, "l2": 1e-4}
    assert doc["seed"] == 42


def test_model_json_rejects_bad_input():
    m = json.loads(train(clusters(TWO, 5, 2.0)).to_json())
    with pytest.raises(ModelFormatError):
        Model.from_json(json.dumps({**m, "version": 2}))
    with pytest.raises(ModelFormatError):
        Model.from_json(json.dumps({**m, "weights": [[0.0] * 15] * 2}))
    with pytest.raises(ModelFormatError):
        Model.from_json("not json")


def test_zero_variance_feature_gets_unit_std():
    m = train(clusters(TWO, 5, 0.0))
    assert np.all(m.feature_stds > 0)
    assert m.feature_stds[CH] == 1.0


def test_stratified_split_keeps_every_label():
    labels = ["a"] * 3 + ["b"] * 10 + ["c"] * 1
    tr, te = stratified_split(labels, 0.5, np.random.default_rng(0))
    assert {labels[i] for i in tr} == {"a", "b", "c"}
    assert sorted(tr + te) == list(range(len(labels)))


def test_separable_corpus_split_error():
    data = clusters(THREE, 30, 4.0, seed=5)
    report = evaluate_split(data, 0.9, trials=10, seed=42)
    assert report.top1_mean <= 0.05
    for t1, t2 in zip(report.top1_errors, report.top2_errors):
        assert t2 <= t1


def test_split_reports_are_reproducible():
    data = clusters(THREE, 12, 25.0, seed=2)
    a = evaluate_split(data, 0.7, trials=5, seed=7)
    b = evaluate_split(data, 0.7, trials=5, seed=7)
    assert a.top1_errors == b.top1_errors and a.top2_errors == b.top2_errors
    assert eval_table([a]) == eval_table([b])


@pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5])
def test_bad_fraction(fraction):
    with pytest.raises(ConfigError):
        evaluate_split(clusters(TWO, 4, 1.0), fraction, trials=1, seed=0)


def test_eval_table_shape():
    data = clusters(THREE, 10, 5.0)
    reports = [evaluate_split(data, f, trials=2, seed=1) for f in (0.9, 0.8, 0.7, 0.6, 0.5)]
    rows = eval_table(reports).strip().split("\n")
    assert len(rows) == 6
    assert rows[1].split("\t")[0] == "0.90"
