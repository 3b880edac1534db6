"""Assemble and verify the evaluation report document.

The report is a plain JSON-serializable dict: baseline metrics and
confusion matrix, the per-cohort table with signed bias values and their
direction (positive biases render blue, negative red in the console), risk
profiles, the attribute-bias network, and a risk-penalized flu assessment.
Every derived number stored in the document can be recomputed from the
stored inputs; ``verify_report`` checks exactly that.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import reasoning
from .data import Dataset, to_features
from .evaluation import CohortMetrics, CohortReport, cohort_eval
from .reasoning import ImpactCosts
from .restcn import ResTcnModel, predict

REPORT_SCHEMA_VERSION = 1
DEFAULT_COHORT_ATTRIBUTES = ("gender", "pose", "view")
# Example symptom-detection rates used for the report's flu section when the
# caller does not supply its own; overridable via config/flags/what-if.
DEFAULT_P_COUGH = 0.783
DEFAULT_P_SNEEZE = 0.817


def _direction(bias: float) -> str:
    if bias > 0:
        return "positive"
    if bias < 0:
        return "negative"
    return "zero"


def _metrics_dict(metrics) -> dict:
    return {
        "accuracy": metrics.accuracy,
        "precision": metrics.precision,
        "sensitivity": metrics.sensitivity,
        "specificity": metrics.specificity,
    }


def _cohort_entry(entry: CohortMetrics | None, baseline: CohortMetrics, costs: ImpactCosts):
    if entry is None:
        return {"absent": True}
    base_risk = reasoning.risk_error(costs, baseline.metrics).risk
    risk = reasoning.risk_error(costs, entry.metrics).risk
    rel_bias = reasoning.bias_reliability(entry.metrics.accuracy, baseline.metrics.accuracy)
    return {
        "absent": False,
        "count": entry.count,
        "metrics": _metrics_dict(entry.metrics),
        "risk": risk,
        "bias_reliability": rel_bias,
        "bias_risk": reasoning.bias_risk(base_risk, risk),
        "direction": _direction(rel_bias),
    }


def build_report(
    model: ResTcnModel,
    test_set: Dataset,
    cohort_attributes=DEFAULT_COHORT_ATTRIBUTES,
    costs: ImpactCosts = ImpactCosts(),
    p_cough: float = DEFAULT_P_COUGH,
    p_sneeze: float = DEFAULT_P_SNEEZE,
) -> dict:
    """Evaluate the model on the test set and assemble the report document."""
    if model.class_names and tuple(model.class_names) != tuple(test_set.class_names):
        raise ValueError(
            f"model classes {model.class_names} do not match dataset classes "
            f"{test_set.class_names}"
        )
    x, truths = to_features(test_set, model.config.seq_len)
    prediction = predict(model, x.astype(np.float32))
    attributes = [s.attributes for s in test_set]
    cohort_report = cohort_eval(
        prediction.rank1, truths, attributes, test_set.n_classes, cohort_attributes
    )
    return report_from_cohorts(
        cohort_report,
        class_names=test_set.class_names,
        costs=costs,
        p_cough=p_cough,
        p_sneeze=p_sneeze,
    )


def report_from_cohorts(
    cohort_report: CohortReport,
    class_names,
    costs: ImpactCosts = ImpactCosts(),
    p_cough: float = DEFAULT_P_COUGH,
    p_sneeze: float = DEFAULT_P_SNEEZE,
) -> dict:
    baseline = cohort_report.baseline
    baseline_risk = reasoning.risk_error(costs, baseline.metrics).risk
    flu = reasoning.assess_flu(p_cough, p_sneeze, baseline_risk)
    network = reasoning.build_bias_network(cohort_report)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "class_names": list(class_names),
        "costs": {"alpha": costs.alpha, "beta": costs.beta},
        "baseline": {
            "count": baseline.count,
            "metrics": _metrics_dict(baseline.metrics),
            "confusion_matrix": baseline.cm.counts.tolist(),
            "risk": baseline_risk,
            "trust": reasoning.trust_score(baseline_risk, baseline.metrics.accuracy),
        },
        "cohorts": {
            attribute: {
                value: _cohort_entry(entry, baseline, costs)
                for value, entry in values.items()
            }
            for attribute, values in cohort_report.cohorts.items()
        },
        "flu": {
            "p_cough": flu.p_cough,
            "p_sneeze": flu.p_sneeze,
            "risk": flu.risk,
            "p_flu_base": flu.p_flu_base,
            "p_flu_adjusted": flu.p_flu_adjusted,
        },
        "bias_network": json.loads(reasoning.net_to_json(network)),
    }


def verify_report(report: dict, tolerance: float = 1e-9) -> list[str]:
    """Recompute every derived value from its stored inputs.

    Returns a list of human-readable inconsistencies; an empty list means
    the document is self-consistent.
    """
    problems: list[str] = []

    def check(name: str, stored: float, recomputed: float) -> None:
        if not math.isclose(stored, recomputed, rel_tol=0, abs_tol=tolerance):
            problems.append(f"{name}: stored {stored!r} != recomputed {recomputed!r}")

    costs = ImpactCosts(alpha=report["costs"]["alpha"], beta=report["costs"]["beta"])
    base = report["baseline"]
    base_metrics = base["metrics"]

    cm = np.asarray(base["confusion_matrix"])
    total = cm.sum()
    if total:
        check("baseline.accuracy vs confusion matrix", base_metrics["accuracy"], cm.trace() / total)

    base_risk = reasoning.risk_value(
        costs.alpha, costs.beta, base_metrics["sensitivity"], base_metrics["specificity"]
    )
    check("baseline.risk", base["risk"], base_risk)
    check(
        "baseline.trust",
        base["trust"],
        reasoning.trust_score(base["risk"], base_metrics["accuracy"]),
    )

    for attribute, values in report["cohorts"].items():
        for value, entry in values.items():
            label = f"cohorts.{attribute}.{value}"
            if entry.get("absent"):
                continue
            metrics = entry["metrics"]
            risk = reasoning.risk_value(
                costs.alpha, costs.beta, metrics["sensitivity"], metrics["specificity"]
            )
            check(f"{label}.risk", entry["risk"], risk)
            check(
                f"{label}.bias_reliability",
                entry["bias_reliability"],
                metrics["accuracy"] - base_metrics["accuracy"],
            )
            check(f"{label}.bias_risk", entry["bias_risk"], base["risk"] - entry["risk"])
            expected_direction = _direction(entry["bias_reliability"])
            if entry["direction"] != expected_direction:
                problems.append(
                    f"{label}.direction: stored {entry['direction']!r}, "
                    f"expected {expected_direction!r}"
                )

    flu = report["flu"]
    check("flu.p_flu_base", flu["p_flu_base"], (flu["p_cough"] + flu["p_sneeze"]) / 2.0)
    check("flu.p_flu_adjusted", flu["p_flu_adjusted"], flu["p_flu_base"] / (1.0 + flu["risk"]))
    check("flu.risk", flu["risk"], base["risk"])
    return problems
