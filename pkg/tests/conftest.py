"""Shared fixtures: one small trained model reused across test modules."""

from dataclasses import replace

import numpy as np
import pytest

from actionrisk import data
from actionrisk.restcn import ModelConfig, TrainConfig, init_model, train


@pytest.fixture(scope="session")
def toy_training():
    """Small 3-class training run shared by behavioral and service tests.

    Returns (dataset, features, labels, trained model, history).
    """
    config = data.SynthConfig(
        n_classes=3,
        samples_per_class=24,
        seq_len=32,
        noise_sigma_per_view={"left": 0.05, "center": 0.05, "right": 0.05},
        seed=11,
    )
    dataset = data.generate_synthetic(config)
    x, labels = data.to_features(dataset, 32)
    model = replace(
        init_model(ModelConfig(n_classes=3, seq_len=32), seed=2),
        class_names=dataset.class_names,
    )
    trained, history = train(
        model, x.astype(np.float32), labels, TrainConfig(epochs=200, batch_size=24, seed=2)
    )
    return dataset, x.astype(np.float32), labels, trained, history
