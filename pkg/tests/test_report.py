"""Report assembly and self-consistency tests."""

import numpy as np
import pytest

from actionrisk.data import ByAttribute, partition
from actionrisk.reasoning import ImpactCosts
from actionrisk.report import build_report, verify_report


@pytest.fixture(scope="module")
def toy_report(toy_training):
    dataset, _, _, trained, _ = toy_training
    return build_report(trained, dataset, costs=ImpactCosts(1.0, 1.0))


class TestBuildReport:
    def test_baseline_sections_present(self, toy_report):
        assert toy_report["schema_version"] == 1
        baseline = toy_report["baseline"]
        assert set(baseline["metrics"]) == {"accuracy", "precision", "sensitivity", "specificity"}
        cm = np.asarray(baseline["confusion_matrix"])
        assert cm.shape == (3, 3)
        assert cm.sum() == baseline["count"] == 72

    def test_cohort_entries_have_bias_fields(self, toy_report):
        for attribute in ("gender", "pose", "view"):
            for value, entry in toy_report["cohorts"][attribute].items():
                if entry.get("absent"):
                    continue
                assert set(entry) >= {
                    "count", "metrics", "risk", "bias_reliability", "bias_risk", "direction",
                }
                assert entry["direction"] in ("positive", "negative", "zero")

    def test_flu_section_uses_baseline_risk(self, toy_report):
        flu = toy_report["flu"]
        assert flu["risk"] == pytest.approx(toy_report["baseline"]["risk"])
        assert flu["p_flu_adjusted"] == pytest.approx(
            flu["p_flu_base"] / (1.0 + flu["risk"]), abs=1e-12
        )

    def test_bias_network_embedded(self, toy_report):
        names = [n["name"] for n in toy_report["bias_network"]["nodes"]]
        assert names == ["gender", "pose", "view", "valid", "match"]

    def test_self_consistent(self, toy_report):
        assert verify_report(toy_report) == []

    def test_json_serializable(self, toy_report):
        import json

        text = json.dumps(toy_report)
        assert json.loads(text)["baseline"]["count"] == 72

    def test_class_mismatch_rejected(self, toy_training):
        dataset, _, _, trained, _ = toy_training
        from dataclasses import replace

        wrong = replace(trained, class_names=("x", "y", "z"))
        with pytest.raises(ValueError, match="classes"):
            build_report(wrong, dataset)


class TestVerifyReport:
    def test_detects_tampered_bias(self, toy_report):
        import copy

        tampered = copy.deepcopy(toy_report)
        entry = tampered["cohorts"]["view"]["left"]
        entry["bias_reliability"] = entry["bias_reliability"] + 0.01
        problems = verify_report(tampered)
        assert any("bias_reliability" in p for p in problems)

    def test_detects_tampered_risk(self, toy_report):
        import copy

        tampered = copy.deepcopy(toy_report)
        tampered["baseline"]["risk"] += 0.05
        assert verify_report(tampered)

    def test_detects_wrong_direction(self, toy_report):
        import copy

        tampered = copy.deepcopy(toy_report)
        for values in tampered["cohorts"].values():
            for entry in values.values():
                if not entry.get("absent"):
                    entry["direction"] = "positive" if entry["direction"] != "positive" else "negative"
                    break
            break
        assert any("direction" in p for p in verify_report(tampered))


def test_perfect_classifier_report(toy_training):
    dataset, _, labels, _, _ = toy_training
    from actionrisk.evaluation import cohort_eval
    from actionrisk.report import report_from_cohorts

    cohorts = cohort_eval(labels, labels, [s.attributes for s in dataset], dataset.n_classes)
    document = report_from_cohorts(cohorts, class_names=dataset.class_names)
    assert document["baseline"]["metrics"]["accuracy"] == 1.0
    assert document["baseline"]["risk"] == 0.0
    for values in document["cohorts"].values():
        for entry in values.values():
            if not entry.get("absent"):
                assert entry["metrics"]["accuracy"] == 1.0
                assert entry["risk"] == 0.0
    assert verify_report(document) == []


def test_absent_cohort_marked(toy_training):
    dataset, _, _, trained, _ = toy_training
    train_side, _ = partition(dataset, ByAttribute("gender", "female"))
    with pytest.warns(RuntimeWarning, match="absent"):
        document = build_report(trained, train_side)
    assert document["cohorts"]["gender"]["female"] == {"absent": True}
    assert verify_report(document) == []
