"""Dataset schema, parsing, preprocessing, synthesis, and partitioning tests."""

import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionrisk import data
from actionrisk.data import (
    Attributes,
    ByAttribute,
    BySubjects,
    Dataset,
    DatasetParseError,
    DatasetSchemaError,
    EmptySplitError,
    Keypoint,
    SkeletonSequence,
    SynthConfig,
    generate_synthetic,
    normalize_sequence,
    parse_dataset,
    partition,
    resample_to_length,
    serialize_dataset,
)

RNG = np.random.default_rng(31)


def make_record(seq_len=2, action="cough", subject="s1", view="left", idx=0):
    frames = RNG.uniform(1.0, 5.0, size=(seq_len, 17, 2)).tolist()
    return {
        "id": f"rec-{idx}",
        "subject": subject,
        "gender": "male",
        "pose": "stand",
        "view": view,
        "action": action,
        "frames": frames,
    }


def lines_of(*records):
    return io.StringIO("\n".join(json.dumps(r) for r in records) + "\n")


class TestTypes:
    def test_keypoint_missing_sentinel(self):
        assert Keypoint(0.0, 0.0).is_missing
        assert not Keypoint(0.0, 1.0).is_missing

    def test_keypoint_requires_finite(self):
        with pytest.raises(ValueError):
            Keypoint(float("nan"), 0.0)

    def test_sequence_shape_enforced(self):
        with pytest.raises(DatasetSchemaError):
            SkeletonSequence(frames=np.zeros((2, 16, 2)))
        with pytest.raises(DatasetSchemaError):
            SkeletonSequence(frames=np.zeros((0, 17, 2)))

    def test_attributes_closed_sets(self):
        with pytest.raises(DatasetParseError):
            Attributes(gender="other", pose="stand", view="left", subject_id="s")
        with pytest.raises(DatasetParseError):
            Attributes(gender="male", pose="run", view="left", subject_id="s")


class TestParse:
    def test_single_valid_line(self):
        ds = parse_dataset(lines_of(make_record(seq_len=2)))
        assert len(ds) == 1
        assert ds.samples[0].sequence.n_frames == 2
        assert ds.class_names == ("cough",)

    def test_empty_stream(self):
        ds = parse_dataset(io.StringIO(""))
        assert len(ds) == 0

    def test_malformed_json_names_line(self):
        stream = lines_of(make_record())
        stream = io.StringIO(stream.getvalue() + "not json\n")
        with pytest.raises(DatasetParseError, match="line 2"):
            parse_dataset(stream)

    def test_wrong_keypoint_count_names_frame(self):
        record = make_record(seq_len=3)
        record["frames"][1] = record["frames"][1][:16]
        with pytest.raises(DatasetSchemaError, match="frame 1"):
            parse_dataset(lines_of(record))

    def test_missing_field(self):
        record = make_record()
        del record["action"]
        with pytest.raises(DatasetParseError, match="action"):
            parse_dataset(lines_of(record))

    def test_preserves_order_and_counts(self):
        records = [make_record(action=a, idx=i) for i, a in enumerate(["b", "a", "b"])]
        ds = parse_dataset(lines_of(*records))
        assert [s.id for s in ds] == ["rec-0", "rec-1", "rec-2"]
        assert ds.class_names == ("a", "b")
        assert ds.class_counts() == {"a": 1, "b": 2}
        assert list(ds.labels()) == [1, 0, 1]

    def test_serialize_roundtrip(self):
        records = [make_record(idx=i, action=a) for i, a in enumerate(["x", "y"])]
        ds = parse_dataset(lines_of(*records))
        text = "\n".join(serialize_dataset(ds)) + "\n"
        again = parse_dataset(io.StringIO(text))
        assert len(again) == len(ds)
        for s1, s2 in zip(ds, again):
            assert s1.id == s2.id
            assert s1.action == s2.action
            assert s1.attributes == s2.attributes
            np.testing.assert_allclose(s1.sequence.frames, s2.sequence.frames)


class TestNormalize:
    def test_identity_when_centered_unit_diagonal(self):
        frames = RNG.uniform(-0.4, 0.4, size=(3, 17, 2))
        first = frames[0]
        mid_hip = (first[11] + first[12]) / 2
        frames = frames - mid_hip
        lo, hi = frames[0].min(axis=0), frames[0].max(axis=0)
        diag = np.hypot(*(hi - lo))
        frames = frames / diag
        mid_hip2 = (frames[0, 11] + frames[0, 12]) / 2
        frames = frames - mid_hip2  # recenter after scaling
        seq = SkeletonSequence(frames=frames)
        out = normalize_sequence(seq)
        np.testing.assert_allclose(out.frames, seq.frames, atol=1e-9)

    def test_translation_invariance(self):
        frames = RNG.uniform(1.0, 3.0, size=(4, 17, 2))
        seq = SkeletonSequence(frames=frames)
        shifted = SkeletonSequence(frames=frames + 5.0)
        np.testing.assert_allclose(
            normalize_sequence(seq).frames, normalize_sequence(shifted).frames, atol=1e-9
        )

    def test_first_frame_diagonal_is_one(self):
        frames = RNG.uniform(10.0, 50.0, size=(6, 17, 2))
        out = normalize_sequence(SkeletonSequence(frames=frames))
        lo, hi = out.frames[0].min(axis=0), out.frames[0].max(axis=0)
        assert np.hypot(*(hi - lo)) == pytest.approx(1.0, abs=1e-9)

    def test_idempotent(self):
        frames = RNG.uniform(-2.0, 8.0, size=(5, 17, 2))
        once = normalize_sequence(SkeletonSequence(frames=frames))
        twice = normalize_sequence(once)
        np.testing.assert_allclose(twice.frames, once.frames, atol=1e-9)

    def test_missing_keypoints_stay_sentinel(self):
        frames = RNG.uniform(1.0, 3.0, size=(3, 17, 2))
        frames[:, 4] = 0.0
        out = normalize_sequence(SkeletonSequence(frames=frames))
        np.testing.assert_array_equal(out.frames[:, 4], 0.0)
        assert not np.allclose(out.frames[:, 5], frames[:, 5])

    def test_degenerate_bbox_warns_and_keeps_scale(self):
        frames = np.full((2, 17, 2), 4.0)
        with pytest.warns(RuntimeWarning, match="degenerate"):
            out = normalize_sequence(SkeletonSequence(frames=frames))
        np.testing.assert_allclose(out.frames, 0.0, atol=1e-12)


class TestResample:
    def test_identity(self):
        frames = RNG.standard_normal((64, 17, 2)) + 3
        seq = SkeletonSequence(frames=frames)
        out = resample_to_length(seq, 64)
        np.testing.assert_array_equal(out.frames, frames)

    def test_pad_repeats_last_frame(self):
        frames = np.stack([np.full((17, 2), v) for v in (1.0, 2.0, 3.0)])
        out = resample_to_length(SkeletonSequence(frames=frames), 5)
        expected = [1.0, 2.0, 3.0, 3.0, 3.0]
        np.testing.assert_allclose(out.frames[:, 0, 0], expected)

    def test_center_crop_indices(self):
        frames = np.zeros((100, 17, 2))
        frames[:, 0, 0] = np.arange(100)
        out = resample_to_length(SkeletonSequence(frames=frames), 64)
        np.testing.assert_array_equal(out.frames[:, 0, 0], np.arange(18, 82))

    def test_center_crop_odd_remainder_biases_low(self):
        frames = np.zeros((7, 17, 2))
        frames[:, 0, 0] = np.arange(7)
        out = resample_to_length(SkeletonSequence(frames=frames), 4)
        np.testing.assert_array_equal(out.frames[:, 0, 0], [1, 2, 3, 4])


class TestSynthetic:
    def test_deterministic_for_seed(self):
        config = SynthConfig(n_classes=2, samples_per_class=6, seq_len=8, seed=5)
        a = generate_synthetic(config)
        b = generate_synthetic(config)
        assert len(a) == len(b) == 12
        for s1, s2 in zip(a, b):
            assert s1.id == s2.id and s1.attributes == s2.attributes
            np.testing.assert_array_equal(s1.sequence.frames, s2.sequence.frames)

    def test_zero_noise_same_class_and_view_identical(self):
        config = SynthConfig(
            n_classes=2,
            samples_per_class=24,
            seq_len=8,
            noise_sigma_per_view={"left": 0.0, "center": 0.0, "right": 0.0},
            seed=1,
        )
        ds = generate_synthetic(config)
        by_key = {}
        for s in ds:
            by_key.setdefault((s.action, s.attributes.view), []).append(s)
        for (action, view), samples in by_key.items():
            for other in samples[1:]:
                np.testing.assert_array_equal(
                    samples[0].sequence.frames, other.sequence.frames
                )

    def test_counts_per_class(self):
        ds = generate_synthetic(SynthConfig(n_classes=3, samples_per_class=10, seq_len=4, seed=0))
        assert len(ds) == 30
        assert set(ds.class_counts().values()) == {10}

    def test_attributes_cover_grid(self):
        ds = generate_synthetic(SynthConfig(n_classes=2, samples_per_class=12, seq_len=4, seed=0))
        combos = {(s.attributes.gender, s.attributes.pose, s.attributes.view) for s in ds}
        assert len(combos) == 12

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(n_classes=1, samples_per_class=5)
        with pytest.raises(ValueError):
            SynthConfig(n_classes=2, samples_per_class=0)
        with pytest.raises(ValueError):
            SynthConfig(n_classes=2, samples_per_class=1, noise_sigma_per_view={"left": 0.1})
        with pytest.raises(ValueError):
            SynthConfig(
                n_classes=2,
                samples_per_class=1,
                noise_sigma_per_view={"left": -0.1, "center": 0.1, "right": 0.1},
            )


class TestPartition:
    def _dataset(self):
        return generate_synthetic(SynthConfig(n_classes=2, samples_per_class=36, seq_len=4, seed=3))

    def test_by_attribute_view(self):
        ds = self._dataset()
        train, test = partition(ds, ByAttribute("view", "right"))
        assert all(s.attributes.view == "right" for s in test)
        assert all(s.attributes.view != "right" for s in train)
        assert len(train) + len(test) == len(ds)

    def test_by_subjects(self):
        ds = self._dataset()
        train, test = partition(ds, BySubjects(["s0"]))
        assert all(s.attributes.subject_id == "s0" for s in test)
        assert len(train) + len(test) == len(ds)

    def test_empty_subject_list_is_error(self):
        with pytest.raises(EmptySplitError):
            partition(self._dataset(), BySubjects([]))

    def test_empty_train_side_is_error(self):
        ds = self._dataset()
        male_only = Dataset(
            samples=tuple(s for s in ds if s.attributes.gender == "male"),
            class_names=ds.class_names,
        )
        with pytest.raises(EmptySplitError):
            partition(male_only, ByAttribute("gender", "male"))

    def test_unknown_attribute_rejected(self):
        with pytest.raises(ValueError):
            ByAttribute("height", "tall")

    def test_class_names_shared(self):
        ds = self._dataset()
        train, test = partition(ds, ByAttribute("view", "left"))
        assert train.class_names == ds.class_names
        assert test.class_names == ds.class_names

    @given(seed=st.integers(0, 50), hold=st.sampled_from(["left", "center", "right"]))
    @settings(max_examples=25, deadline=None)
    def test_partition_disjoint_exhaustive(self, seed, hold):
        ds = generate_synthetic(SynthConfig(n_classes=2, samples_per_class=18, seq_len=3, seed=seed))
        train, test = partition(ds, ByAttribute("view", hold))
        train_ids = {s.id for s in train}
        test_ids = {s.id for s in test}
        assert not (train_ids & test_ids)
        assert train_ids | test_ids == {s.id for s in ds}


def test_to_features_shape():
    ds = generate_synthetic(SynthConfig(n_classes=2, samples_per_class=3, seq_len=10, seed=0))
    x, y = data.to_features(ds, 6)
    assert x.shape == (6, 6, 34)
    assert y.shape == (6,)
    assert set(y) == {0, 1}
