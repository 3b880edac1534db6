"""Serve the console against a fixture report with the published baseline.

Builds a throwaway model artifact plus a report whose baseline metrics are
the published fusion row (accuracy 0.825, sensitivity 0.837, specificity
0.852) and whose view cohorts carry the published per-view values, then
starts the HTTP service with the console's static assets.

Usage: python frontend/scripts/serve_fixture.py [port]
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np
import uvicorn

from actionrisk.evaluation import CohortMetrics, CohortReport, ConfusionMatrix, MetricsReport
from actionrisk.report import report_from_cohorts
from actionrisk.restcn import ModelConfig, init_model, save_model
from actionrisk.service import create_app_from_paths

PUBLISHED = {
    "baseline": (0.825, 0.837, 0.852),
    "male": (0.825, 0.837, 0.852),
    "stand": (0.825, 0.848, 0.852),
    "walk": (0.825, 0.825, 0.852),
    "center": (0.794, 0.796, 0.847),
    "left": (0.850, 0.876, 0.856),
    "right": (0.831, 0.850, 0.853),
}


def entry(key):
    accuracy, sensitivity, specificity = PUBLISHED[key]
    return CohortMetrics(
        metrics=MetricsReport(
            accuracy=accuracy,
            precision=accuracy,
            sensitivity=sensitivity,
            specificity=specificity,
        ),
        cm=ConfusionMatrix(np.eye(2, dtype=int)),
        count=100,
    )


def main() -> None:
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8000
    cohorts = CohortReport(
        baseline=entry("baseline"),
        cohorts={
            "gender": {"male": entry("male"), "female": None},
            "pose": {"stand": entry("stand"), "walk": entry("walk")},
            "view": {v: entry(v) for v in ("left", "center", "right")},
        },
    )
    document = report_from_cohorts(cohorts, class_names=["cough", "sneeze", "other"])

    workdir = Path(tempfile.mkdtemp(prefix="actionrisk-fixture-"))
    model_path = workdir / "model.rtcn"
    report_path = workdir / "report.json"
    save_model(init_model(ModelConfig(n_classes=3), seed=0), model_path)
    report_path.write_text(json.dumps(document, indent=2))

    static_dir = Path(__file__).resolve().parents[1] / "public"
    app = create_app_from_paths(model_path, report_path, static_dir=static_dir)
    print(f"console fixture on http://127.0.0.1:{port} (report: published baseline)")
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
