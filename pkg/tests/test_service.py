"""HTTP service endpoint tests via the ASGI test client."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from actionrisk.reasoning import ImpactCosts
from actionrisk.report import build_report
from actionrisk.restcn import save_model
from actionrisk.service import create_app, create_app_from_paths


@pytest.fixture(scope="module")
def client(toy_training):
    dataset, _, _, trained, _ = toy_training
    report = build_report(trained, dataset, costs=ImpactCosts(1.0, 1.0))
    app = create_app(trained, report)
    return TestClient(app)


def frames_payload(n_frames=20, value=1.0):
    rng = np.random.default_rng(0)
    frames = rng.uniform(0.2, value + 1.0, size=(n_frames, 17, 2))
    return frames.tolist()


class TestHealthAndReport:
    def test_health(self, client):
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_report_roundtrip(self, client):
        response = client.get("/api/report")
        assert response.status_code == 200
        body = response.json()
        assert body["baseline"]["count"] == 72
        assert "cohorts" in body

    def test_unknown_route_404(self, client):
        assert client.get("/api/nope").status_code == 404


class TestClassify:
    def test_distributions_sum_to_one(self, client):
        response = client.post("/api/classify", json={"frames": frames_payload()})
        assert response.status_code == 200
        body = response.json()
        assert set(body["heads"]) == {"block_1", "block_2", "block_3", "block_4", "fusion"}
        for probs in body["heads"].values():
            assert abs(sum(probs) - 1.0) < 1e-6
        assert body["rank1"] in {"action00", "action01", "action02"}

    def test_deterministic_responses(self, client):
        payload = {"frames": frames_payload()}
        a = client.post("/api/classify", json=payload).json()
        b = client.post("/api/classify", json=payload).json()
        assert a == b

    def test_wrong_keypoint_count_400(self, client):
        frames = frames_payload(5)
        frames[2] = frames[2][:16]
        response = client.post("/api/classify", json={"frames": frames})
        assert response.status_code == 400
        assert "frame 2" in str(response.json())

    def test_empty_frames_400(self, client):
        assert client.post("/api/classify", json={"frames": []}).status_code == 400

    def test_malformed_body_400(self, client):
        response = client.post("/api/classify", json={"nothing": 1})
        assert response.status_code == 400
        assert "error" in response.json()


class TestWhatIf:
    def test_published_worked_example(self, client):
        response = client.post(
            "/api/whatif",
            json={
                "alpha": 1.0,
                "beta": 1.0,
                "pCough": 0.783,
                "pSneeze": 0.817,
                "sensitivity": 0.837,
                "specificity": 0.852,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["risk"] == pytest.approx(0.311, abs=1e-3)
        assert body["pFluBase"] == pytest.approx(0.800, abs=1e-3)
        assert body["pFluAdjusted"] == pytest.approx(0.610, abs=1e-3)

    def test_zero_risk_override_keeps_base(self, client):
        response = client.post(
            "/api/whatif",
            json={
                "alpha": 1.0,
                "beta": 1.0,
                "pCough": 0.6,
                "pSneeze": 0.8,
                "sensitivity": 1.0,
                "specificity": 1.0,
            },
        )
        body = response.json()
        assert body["risk"] == 0.0
        assert body["pFluAdjusted"] == body["pFluBase"] == pytest.approx(0.7)

    def test_baseline_cohort_default(self, client, toy_training):
        dataset, _, _, trained, _ = toy_training
        report = build_report(trained, dataset)
        metrics = report["baseline"]["metrics"]
        expected_risk = (1 - metrics["sensitivity"]) + (1 - metrics["specificity"])
        response = client.post(
            "/api/whatif",
            json={"alpha": 1.0, "beta": 1.0, "pCough": 0.5, "pSneeze": 0.5},
        )
        body = response.json()
        assert body["risk"] == pytest.approx(expected_risk, abs=1e-12)
        assert body["biasVsBaseline"] == pytest.approx(0.0, abs=1e-12)

    def test_cohort_selection(self, client):
        response = client.post(
            "/api/whatif",
            json={"alpha": 1.0, "beta": 1.0, "pCough": 0.5, "pSneeze": 0.5, "cohort": "left"},
        )
        assert response.status_code == 200
        report = client.get("/api/report").json()
        left = report["cohorts"]["view"]["left"]["metrics"]
        expected = (1 - left["sensitivity"]) + (1 - left["specificity"])
        assert response.json()["risk"] == pytest.approx(expected, abs=1e-12)

    def test_unknown_cohort_400(self, client):
        response = client.post(
            "/api/whatif",
            json={"alpha": 1.0, "beta": 1.0, "pCough": 0.5, "pSneeze": 0.5, "cohort": "upside"},
        )
        assert response.status_code == 400

    def test_out_of_range_values_400(self, client):
        response = client.post(
            "/api/whatif",
            json={"alpha": -1.0, "beta": 1.0, "pCough": 0.5, "pSneeze": 0.5},
        )
        assert response.status_code == 400
        response = client.post(
            "/api/whatif",
            json={"alpha": 1.0, "beta": 1.0, "pCough": 1.5, "pSneeze": 0.5},
        )
        assert response.status_code == 400

    def test_repeated_requests_identical(self, client):
        payload = {"alpha": 2.0, "beta": 0.5, "pCough": 0.3, "pSneeze": 0.9}
        bodies = {client.post("/api/whatif", json=payload).text for _ in range(3)}
        assert len(bodies) == 1


def test_create_app_from_paths(toy_training, tmp_path):
    import json

    dataset, _, _, trained, _ = toy_training
    model_path = tmp_path / "model.rtcn"
    report_path = tmp_path / "report.json"
    save_model(trained, model_path)
    report_path.write_text(json.dumps(build_report(trained, dataset)))
    app = create_app_from_paths(model_path, report_path)
    client = TestClient(app)
    assert client.get("/api/health").json() == {"status": "ok"}
    assert client.get("/api/report").json()["baseline"]["count"] == 72
