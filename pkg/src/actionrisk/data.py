"""Labeled skeleton-sequence datasets: schema, loading, preprocessing, synthesis.

A sample is a sequence of frames, each holding the 17 keypoints of the usual
body-pose convention as (x, y) pixel coordinates, plus subject attributes
(gender, pose, view) and an action label. Datasets are immutable after
construction; every operation here either validates or returns fresh values,
so concurrent use is safe.

The on-disk format is UTF-8 line-delimited JSON, one record per line:
``{"id", "subject", "gender", "pose", "view", "action", "frames"}`` where
``frames`` is a T x 17 x 2 nested float array. The class-name-to-index
mapping is the sorted order of the distinct action strings.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

N_KEYPOINTS = 17
MID_HIP_KEYPOINTS = (11, 12)
GENDERS = ("male", "female")
POSES = ("stand", "walk")
VIEWS = ("left", "center", "right")
ATTRIBUTE_DOMAINS: Mapping[str, tuple[str, ...]] = {
    "gender": GENDERS,
    "pose": POSES,
    "view": VIEWS,
}
DEFAULT_FRAME_RATE = 10.0
# Joints animated by the synthetic motion templates: elbows and wrists.
ARM_KEYPOINTS = (7, 8, 9, 10)


class DatasetParseError(ValueError):
    """A record line is not well-formed (bad JSON, missing fields, bad enums)."""


class DatasetSchemaError(ValueError):
    """A structurally valid record violates the frame/keypoint schema."""


class EmptySplitError(ValueError):
    """A partition produced an empty train or test side."""


@dataclass(frozen=True)
class Keypoint:
    """One 2-D body keypoint; (0, 0) is the reserved missing-point sentinel."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"keypoint coordinates must be finite, got ({self.x}, {self.y})")

    @property
    def is_missing(self) -> bool:
        return self.x == 0.0 and self.y == 0.0


@dataclass(frozen=True)
class SkeletonSequence:
    """T frames of 17 keypoints, stored as a (T, 17, 2) float array."""

    frames: np.ndarray
    frame_rate: float = DEFAULT_FRAME_RATE

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 3 or frames.shape[1] != N_KEYPOINTS or frames.shape[2] != 2:
            raise DatasetSchemaError(
                f"frames must have shape (T, {N_KEYPOINTS}, 2), got {frames.shape}"
            )
        if frames.shape[0] < 1:
            raise DatasetSchemaError("a sequence needs at least one frame")
        if not np.all(np.isfinite(frames)):
            raise DatasetSchemaError("frames contain non-finite coordinates")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def keypoint(self, frame: int, index: int) -> Keypoint:
        x, y = self.frames[frame, index]
        return Keypoint(float(x), float(y))

    def missing_mask(self) -> np.ndarray:
        """Boolean (T, 17) mask of keypoints equal to the (0, 0) sentinel."""
        return np.all(self.frames == 0.0, axis=2)


@dataclass(frozen=True)
class Attributes:
    """Subject attributes; gender/pose/view are drawn from closed sets."""

    gender: str
    pose: str
    view: str
    subject_id: str

    def __post_init__(self):
        for name, domain in ATTRIBUTE_DOMAINS.items():
            value = getattr(self, name)
            if value not in domain:
                raise DatasetParseError(f"{name} must be one of {domain}, got {value!r}")

    def value(self, attribute: str) -> str:
        if attribute not in ATTRIBUTE_DOMAINS:
            raise ValueError(f"unknown attribute {attribute!r}")
        return getattr(self, attribute)


@dataclass(frozen=True)
class LabeledSample:
    id: str
    sequence: SkeletonSequence
    attributes: Attributes
    action: str


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of samples with a stable class-name ordering."""

    samples: tuple[LabeledSample, ...]
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        samples = tuple(self.samples)
        names = tuple(self.class_names) or tuple(sorted({s.action for s in samples}))
        known = set(names)
        for s in samples:
            if s.action not in known:
                raise DatasetSchemaError(f"sample {s.id!r} has unknown action {s.action!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "class_names", names)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[LabeledSample]:
        return iter(self.samples)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def label_index(self, action: str) -> int:
        return self.class_names.index(action)

    def labels(self) -> np.ndarray:
        index = {name: i for i, name in enumerate(self.class_names)}
        return np.array([index[s.action] for s in self.samples], dtype=np.int64)

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in self.class_names}
        for s in self.samples:
            counts[s.action] += 1
        return counts


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

_REQUIRED_FIELDS = ("id", "subject", "gender", "pose", "view", "action", "frames")


def parse_dataset(stream: Iterable[str] | IO[str]) -> Dataset:
    """Parse line-delimited JSON records into a Dataset, preserving order.

    Raises DatasetParseError with the 1-based line number for malformed
    lines, DatasetSchemaError (naming the frame index) for records whose
    frames break the 17-keypoint schema.
    """
    samples = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise DatasetParseError(f"line {lineno}: record must be a JSON object")
        missing = [f for f in _REQUIRED_FIELDS if f not in record]
        if missing:
            raise DatasetParseError(f"line {lineno}: missing fields {missing}")
        try:
            sequence = _sequence_from_record(record["frames"])
            attributes = Attributes(
                gender=record["gender"],
                pose=record["pose"],
                view=record["view"],
                subject_id=str(record["subject"]),
            )
        except DatasetSchemaError as exc:
            raise DatasetSchemaError(f"line {lineno}: {exc}") from exc
        except DatasetParseError as exc:
            raise DatasetParseError(f"line {lineno}: {exc}") from exc
        samples.append(
            LabeledSample(
                id=str(record["id"]),
                sequence=sequence,
                attributes=attributes,
                action=str(record["action"]),
            )
        )
    return Dataset(samples=tuple(samples))


def _sequence_from_record(frames) -> SkeletonSequence:
    if not isinstance(frames, list) or not frames:
        raise DatasetSchemaError("frames must be a non-empty array")
    for t, frame in enumerate(frames):
        if not isinstance(frame, list) or len(frame) != N_KEYPOINTS:
            got = len(frame) if isinstance(frame, list) else type(frame).__name__
            raise DatasetSchemaError(
                f"frame {t} has {got} keypoints, expected {N_KEYPOINTS}"
            )
        for j, pt in enumerate(frame):
            if not isinstance(pt, list) or len(pt) != 2:
                raise DatasetSchemaError(f"frame {t} keypoint {j} is not an [x, y] pair")
    try:
        array = np.asarray(frames, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DatasetSchemaError(f"frames contain non-numeric coordinates: {exc}") from exc
    return SkeletonSequence(frames=array)


def serialize_sample(sample: LabeledSample) -> str:
    record = {
        "id": sample.id,
        "subject": sample.attributes.subject_id,
        "gender": sample.attributes.gender,
        "pose": sample.attributes.pose,
        "view": sample.attributes.view,
        "action": sample.action,
        "frames": sample.sequence.frames.tolist(),
    }
    return json.dumps(record, separators=(",", ":"))


def serialize_dataset(dataset: Dataset) -> Iterator[str]:
    for sample in dataset:
        yield serialize_sample(sample)


def dump_dataset(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in serialize_dataset(dataset):
            fh.write(line + "\n")


def load_dataset(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dataset(fh)


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------

def normalize_sequence(seq: SkeletonSequence) -> SkeletonSequence:
    """Translate the first-frame mid-hip to the origin and rescale.

    All coordinates are divided by the first frame's bounding-box diagonal,
    making the result translation- and scale-invariant. Missing-keypoint
    sentinels are left untouched at (0, 0). A degenerate first frame
    (diagonal 0, or no visible keypoints) keeps scale 1 and emits a warning.
    Idempotent within float tolerance.
    """
    frames = np.array(seq.frames, dtype=float)
    missing = seq.missing_mask()

    first = frames[0]
    hip_points = [first[j] for j in MID_HIP_KEYPOINTS if not missing[0, j]]
    mid_hip = np.mean(hip_points, axis=0) if hip_points else np.zeros(2)

    visible_first = first[~missing[0]]
    if visible_first.size:
        lo = visible_first.min(axis=0)
        hi = visible_first.max(axis=0)
        diagonal = float(np.hypot(*(hi - lo)))
    else:
        diagonal = 0.0
    if diagonal == 0.0:
        warnings.warn(
            "normalize_sequence: degenerate first-frame bounding box, keeping scale 1",
            RuntimeWarning,
            stacklevel=2,
        )
        diagonal = 1.0

    frames[~missing] = (frames[~missing] - mid_hip) / diagonal
    return SkeletonSequence(frames=frames, frame_rate=seq.frame_rate)


def resample_to_length(seq: SkeletonSequence, t_target: int) -> SkeletonSequence:
    """Center-crop longer sequences, pad shorter ones by repeating the last frame."""
    if t_target < 1:
        raise ValueError("target length must be >= 1")
    t = seq.n_frames
    if t == t_target:
        return seq
    if t > t_target:
        start = (t - t_target) // 2
        frames = seq.frames[start : start + t_target]
    else:
        pad = np.repeat(seq.frames[-1:], t_target - t, axis=0)
        frames = np.concatenate([seq.frames, pad], axis=0)
    return SkeletonSequence(frames=np.array(frames), frame_rate=seq.frame_rate)


def sequence_features(seq: SkeletonSequence, t_target: int) -> np.ndarray:
    """Normalized, length-fixed (t_target, 34) feature matrix for one sequence."""
    prepared = resample_to_length(normalize_sequence(seq), t_target)
    return prepared.frames.reshape(t_target, N_KEYPOINTS * 2)


def to_features(dataset: Dataset, t_target: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-sample features: returns (X of shape (n, T, 34), labels (n,))."""
    x = np.stack([sequence_features(s.sequence, t_target) for s in dataset])
    return x, dataset.labels()


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthConfig:
    """Desk-scale synthetic dataset: class-keyed arm motion plus view-keyed noise.

    ``noise_sigma_per_view`` is the per-view Gaussian noise level in
    normalized units; inflating one view's sigma makes that cohort measurably
    harder, which is exactly what the bias-detection tests exploit.
    """

    n_classes: int
    samples_per_class: int
    seq_len: int = 64
    noise_sigma_per_view: Mapping[str, float] = field(
        default_factory=lambda: {"left": 0.05, "center": 0.05, "right": 0.05}
    )
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if self.samples_per_class < 1:
            raise ValueError("samples_per_class must be >= 1")
        if self.seq_len < 1:
            raise ValueError("seq_len must be >= 1")
        sigmas = dict(self.noise_sigma_per_view)
        if set(sigmas) != set(VIEWS):
            raise ValueError(f"noise_sigma_per_view must cover exactly {VIEWS}")
        if any(v < 0 for v in sigmas.values()):
            raise ValueError("noise sigmas must be >= 0")
        object.__setattr__(self, "noise_sigma_per_view", sigmas)


# Rough unit-scale standing figure used as the static base pose
# (nose, eyes, ears, shoulders, elbows, wrists, hips, knees, ankles).
_BASE_POSE = np.array(
    [
        [0.50, 1.80], [0.46, 1.86], [0.54, 1.86], [0.42, 1.84], [0.58, 1.84],
        [0.30, 1.55], [0.70, 1.55], [0.22, 1.25], [0.78, 1.25], [0.18, 0.95],
        [0.82, 0.95], [0.38, 0.95], [0.62, 0.95], [0.36, 0.55], [0.64, 0.55],
        [0.35, 0.12], [0.65, 0.12],
    ]
)

_ATTRIBUTE_GRID = tuple(itertools.product(GENDERS, POSES, VIEWS))
_SYNTH_SUBJECTS = 3


def _class_template(k: int, seq_len: int) -> np.ndarray:
    """Deterministic (T, 17, 2) motion for class k: sinusoidal arm swings."""
    frames = np.broadcast_to(_BASE_POSE, (seq_len, N_KEYPOINTS, 2)).copy()
    t = np.arange(seq_len) / seq_len
    freq = 1.0 + k
    amp = 0.18 + 0.04 * k
    for i, joint in enumerate(ARM_KEYPOINTS):
        phase = i * math.pi / 2
        frames[:, joint, 0] += amp * np.sin(2 * math.pi * freq * t + phase)
        frames[:, joint, 1] += 0.5 * amp * np.cos(2 * math.pi * freq * t + phase)
    return frames


def generate_synthetic(config: SynthConfig) -> Dataset:
    """Deterministically synthesize a labeled dataset from the config seed.

    Class k follows a sinusoidal arm-motion template whose frequency and
    amplitude are keyed by k; per-sample Gaussian noise is scaled by the
    sample's view sigma. Attributes cycle round-robin over the full
    gender x pose x view grid, and subjects rotate per grid sweep so that
    holding one subject out yields an attribute-balanced split.
    """
    rng = np.random.default_rng(config.seed)
    pad = max(2, len(str(config.n_classes - 1)))
    samples = []
    idx = 0
    for k in range(config.n_classes):
        template = _class_template(k, config.seq_len)
        action = f"action{k:0{pad}d}"
        for _ in range(config.samples_per_class):
            gender, pose, view = _ATTRIBUTE_GRID[idx % len(_ATTRIBUTE_GRID)]
            subject = f"s{(idx // len(_ATTRIBUTE_GRID)) % _SYNTH_SUBJECTS}"
            sigma = config.noise_sigma_per_view[view]
            noise = rng.standard_normal(template.shape) * sigma
            samples.append(
                LabeledSample(
                    id=f"sample-{idx:05d}",
                    sequence=SkeletonSequence(frames=template + noise),
                    attributes=Attributes(
                        gender=gender, pose=pose, view=view, subject_id=subject
                    ),
                    action=action,
                )
            )
            idx += 1
    return Dataset(samples=tuple(samples))


# ---------------------------------------------------------------------------
# Partitioning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BySubjects:
    """Hold out every sample whose subject id is in ``test_subjects``."""

    test_subjects: tuple[str, ...]

    def __init__(self, test_subjects: Iterable[str]):
        object.__setattr__(self, "test_subjects", tuple(test_subjects))


@dataclass(frozen=True)
class ByAttribute:
    """Hold out every sample carrying ``held_out`` for ``attribute``."""

    attribute: str
    held_out: str

    def __post_init__(self):
        domain = ATTRIBUTE_DOMAINS.get(self.attribute)
        if domain is None:
            raise ValueError(f"unknown attribute {self.attribute!r}")
        if self.held_out not in domain:
            raise ValueError(f"{self.attribute} has no value {self.held_out!r}")


SplitSpec = BySubjects | ByAttribute


def partition(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Split into (train, test): disjoint, exhaustive, class names shared.

    Raises EmptySplitError if the requested protocol leaves either side
    empty (e.g. the held-out attribute value is absent from the dataset).
    """
    if isinstance(spec, BySubjects):
        held = set(spec.test_subjects)
        in_test = lambda s: s.attributes.subject_id in held
    elif isinstance(spec, ByAttribute):
        in_test = lambda s: s.attributes.value(spec.attribute) == spec.held_out
    else:
        raise TypeError(f"unsupported split spec: {spec!r}")

    test = tuple(s for s in dataset if in_test(s))
    train = tuple(s for s in dataset if not in_test(s))
    if not test:
        raise EmptySplitError(f"protocol {spec!r} selects no test samples")
    if not train:
        raise EmptySplitError(f"protocol {spec!r} leaves no training samples")
    return (
        Dataset(samples=train, class_names=dataset.class_names),
        Dataset(samples=test, class_names=dataset.class_names),
    )
