"""Residual temporal convolutional classifier with fusion distillation.

The network stacks residual blocks of BN -> ReLU -> Conv sub-blocks over the
time axis; each sub-block's output is added to its input through a skip
connection (a strided 1x1 projection whenever width or stride changes).
Every block feeds a classifier head over its globally pooled features, and a
fusion head reads the concatenation of all pooled block features. Training
couples the heads: each block's loss adds a distillation term, the KL
divergence from the fusion head's softened distribution (treated as a fixed
teacher signal) to the block's own softened distribution.

Convolutions are zero-padded so that sub-block outputs align with their skip
inputs; the padding itself goes through the valid-convolution kernel in
``engine`` with the pad/slice handled here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import engine
from .engine import BnState, LrSchedule

DEFAULT_BLOCK_WIDTHS = (32, 64, 128, 256)
DEFAULT_ENTRY_STRIDES = (1, 2, 2, 2)
MODEL_MAGIC = "RESTCN-MODEL v1"


class TrainingDivergedError(RuntimeError):
    """Training hit a non-finite loss; carries the last good checkpoint."""

    def __init__(self, message: str, model: "ResTcnModel", history: list[dict]):
        super().__init__(message)
        self.model = model
        self.history = history


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters; defaults follow the four-block layout."""

    n_classes: int
    input_dim: int = 34
    seq_len: int = 64
    n_blocks: int = 4
    subblocks_per_block: int = 3
    block_widths: tuple[int, ...] | None = None
    block_entry_strides: tuple[int, ...] | None = None
    kernel: int = 8
    distill_temperature: float = 3.0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if self.input_dim < 1 or self.seq_len < 1:
            raise ValueError("input_dim and seq_len must be >= 1")
        if not 1 <= self.n_blocks <= 4:
            raise ValueError("n_blocks must be between 1 and 4")
        if self.subblocks_per_block < 1:
            raise ValueError("subblocks_per_block must be >= 1")
        if self.kernel < 1:
            raise ValueError("kernel must be >= 1")
        if self.distill_temperature <= 0:
            raise ValueError("distill_temperature must be > 0")
        widths = self.block_widths or DEFAULT_BLOCK_WIDTHS[: self.n_blocks]
        strides = self.block_entry_strides or DEFAULT_ENTRY_STRIDES[: self.n_blocks]
        widths, strides = tuple(widths), tuple(strides)
        if len(widths) != self.n_blocks or len(strides) != self.n_blocks:
            raise ValueError("block_widths/block_entry_strides must match n_blocks")
        if any(w < 1 for w in widths) or any(s < 1 for s in strides):
            raise ValueError("widths and strides must be >= 1")
        object.__setattr__(self, "block_widths", widths)
        object.__setattr__(self, "block_entry_strides", strides)

    def to_dict(self) -> dict:
        return {
            "n_classes": self.n_classes,
            "input_dim": self.input_dim,
            "seq_len": self.seq_len,
            "n_blocks": self.n_blocks,
            "subblocks_per_block": self.subblocks_per_block,
            "block_widths": list(self.block_widths),
            "block_entry_strides": list(self.block_entry_strides),
            "kernel": self.kernel,
            "distill_temperature": self.distill_temperature,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        data = dict(data)
        for key in ("block_widths", "block_entry_strides"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(**data)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    base_lr: float = 0.001
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.base_lr <= 0:
            raise ValueError("base_lr must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class ResTcnModel:
    config: ModelConfig
    params: dict[str, np.ndarray]
    bn_state: dict[str, BnState]
    class_names: tuple[str, ...] | None = None


@dataclass(frozen=True)
class HeadOutputs:
    """Per-block logits plus the fusion logits, each of shape (B, N)."""

    block_logits: tuple[np.ndarray, ...]
    fusion_logits: np.ndarray


@dataclass(frozen=True)
class LossBreakdown:
    """Batch-mean loss terms: L_m = CE_m + FKD_m per block, fusion CE only."""

    block_ce: tuple[float, ...]
    block_fkd: tuple[float, ...]
    fusion_ce: float

    @property
    def block_losses(self) -> tuple[float, ...]:
        return tuple(ce + kd for ce, kd in zip(self.block_ce, self.block_fkd))

    @property
    def total(self) -> float:
        return sum(self.block_losses) + self.fusion_ce


@dataclass(frozen=True)
class Prediction:
    block_probs: tuple[np.ndarray, ...]
    fusion_probs: np.ndarray
    rank1: np.ndarray


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _layer_plan(config: ModelConfig):
    """Yield (block, sub, c_in, width, stride, has_projection) in order."""
    c_in = config.input_dim
    for b in range(config.n_blocks):
        width = config.block_widths[b]
        for s in range(config.subblocks_per_block):
            stride = config.block_entry_strides[b] if s == 0 else 1
            has_proj = c_in != width or stride != 1
            yield b, s, c_in, width, stride, has_proj
            c_in = width


def init_model(config: ModelConfig, seed: int = 0, dtype=np.float32) -> ResTcnModel:
    """Kaiming-uniform (fan-in) conv/linear weights, unit-gamma batch norm."""
    rng = np.random.default_rng(seed)

    def kaiming(shape, fan_in):
        bound = np.sqrt(6.0 / fan_in)
        return rng.uniform(-bound, bound, size=shape).astype(dtype)

    params: dict[str, np.ndarray] = {}
    bn_state: dict[str, BnState] = {}
    for b, s, c_in, width, stride, has_proj in _layer_plan(config):
        prefix = f"block{b}.sub{s}"
        params[f"{prefix}.bn.gamma"] = np.ones(c_in, dtype=dtype)
        params[f"{prefix}.bn.beta"] = np.zeros(c_in, dtype=dtype)
        params[f"{prefix}.conv.w"] = kaiming((config.kernel, c_in, width), config.kernel * c_in)
        params[f"{prefix}.conv.b"] = np.zeros(width, dtype=dtype)
        if has_proj:
            params[f"{prefix}.proj.w"] = kaiming((1, c_in, width), c_in)
            params[f"{prefix}.proj.b"] = np.zeros(width, dtype=dtype)
        bn_state[f"{prefix}.bn"] = BnState.initial(c_in, dtype=dtype)
    for b in range(config.n_blocks):
        width = config.block_widths[b]
        params[f"head{b}.w"] = kaiming((width, config.n_classes), width)
        params[f"head{b}.b"] = np.zeros(config.n_classes, dtype=dtype)
    fused = sum(config.block_widths)
    params["fusion.w"] = kaiming((fused, config.n_classes), fused)
    params["fusion.b"] = np.zeros(config.n_classes, dtype=dtype)
    return ResTcnModel(config=config, params=params, bn_state=bn_state)


def _same_padding(t_in: int, kernel: int, stride: int) -> tuple[int, int]:
    t_out = -(-t_in // stride)
    total = max((t_out - 1) * stride + kernel - t_in, 0)
    return total // 2, total - total // 2


# ---------------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------------

def _forward(params, bn_state, config: ModelConfig, x: np.ndarray, train: bool):
    if x.ndim != 3 or x.shape[1:] != (config.seq_len, config.input_dim):
        raise ValueError(
            f"expected input of shape (B, {config.seq_len}, {config.input_dim}), got {x.shape}"
        )
    new_bn_state = dict(bn_state)
    caches = {"subblocks": [], "gap": [], "pooled": []}
    block_outputs = []
    h = x
    for b, s, c_in, width, stride, has_proj in _layer_plan(config):
        prefix = f"block{b}.sub{s}"
        bn_out, bn_cache, state = engine.batchnorm_forward(
            h,
            params[f"{prefix}.bn.gamma"],
            params[f"{prefix}.bn.beta"],
            new_bn_state[f"{prefix}.bn"],
            train,
        )
        new_bn_state[f"{prefix}.bn"] = state
        # ReLU fused into the padded buffer write; only the pad stripes need
        # zeroing since the centre is fully overwritten.
        mask = bn_out > 0
        left, right = _same_padding(bn_out.shape[1], config.kernel, stride)
        B, t_in, c_in_now = bn_out.shape
        padded = np.empty((B, t_in + left + right, c_in_now), dtype=bn_out.dtype)
        padded[:, :left] = 0.0
        padded[:, left + t_in :] = 0.0
        np.maximum(bn_out, 0.0, out=padded[:, left : left + t_in, :])
        pad_cache = (left, t_in)
        conv_out, conv_cache = engine.conv1d_forward(
            padded, params[f"{prefix}.conv.w"], params[f"{prefix}.conv.b"], stride
        )
        if has_proj:
            skip, proj_cache = engine.conv1d_forward(
                h, params[f"{prefix}.proj.w"], params[f"{prefix}.proj.b"], stride
            )
        else:
            skip, proj_cache = h, None
        h = conv_out + skip
        caches["subblocks"].append((prefix, bn_cache, mask, pad_cache, conv_cache, proj_cache))
        if s == config.subblocks_per_block - 1:
            block_outputs.append(h)

    pooled = []
    for out in block_outputs:
        p, gap_cache = engine.global_avg_pool_forward(out)
        pooled.append(p)
        caches["gap"].append(gap_cache)
        caches["pooled"].append(p)
    block_logits = tuple(
        engine.linear_forward(pooled[b], params[f"head{b}.w"], params[f"head{b}.b"])[0]
        for b in range(config.n_blocks)
    )
    fused = np.concatenate(pooled, axis=1)
    caches["fused"] = fused
    fusion_logits, _ = engine.linear_forward(fused, params["fusion.w"], params["fusion.b"])
    outputs = HeadOutputs(block_logits=block_logits, fusion_logits=fusion_logits)
    return outputs, (caches if train else None), new_bn_state


def forward(model: ResTcnModel, x: np.ndarray, train: bool = False):
    """Run the network; returns (HeadOutputs, updated model).

    In train mode batch-norm running statistics advance; the returned model
    carries them. In infer mode the model comes back unchanged.
    """
    outputs, _, bn_state = _forward(model.params, model.bn_state, model.config, x, train)
    return outputs, replace(model, bn_state=bn_state)


def _backward(params, config: ModelConfig, caches, dblock_logits, dfusion_logits):
    grads = {}
    widths = config.block_widths

    dfused, grads["fusion.w"], grads["fusion.b"] = engine.linear_backward(
        dfusion_logits, caches["fused"], params["fusion.w"]
    )
    dpooled_from_fusion = np.split(dfused, np.cumsum(widths)[:-1], axis=1)

    dblock_out = []
    for b in range(config.n_blocks):
        dpooled, grads[f"head{b}.w"], grads[f"head{b}.b"] = engine.linear_backward(
            dblock_logits[b], caches["pooled"][b], params[f"head{b}.w"]
        )
        dpooled = dpooled + dpooled_from_fusion[b]
        dblock_out.append(engine.global_avg_pool_backward(dpooled, caches["gap"][b]))

    sub_caches = list(caches["subblocks"])
    dout = None
    for b in reversed(range(config.n_blocks)):
        dout = dblock_out[b] if dout is None else dblock_out[b] + dout
        for s in reversed(range(config.subblocks_per_block)):
            prefix, bn_cache, mask, pad_cache, conv_cache, proj_cache = sub_caches.pop()
            first_layer = b == 0 and s == 0
            dpadded, dw, db = engine.conv1d_backward(dout, conv_cache)
            grads[f"{prefix}.conv.w"] = dw
            grads[f"{prefix}.conv.b"] = db
            dact = engine.pad_time_backward(dpadded, pad_cache)
            dbn_out = engine.relu_backward(dact, mask)
            dx, dgamma, dbeta = engine.batchnorm_backward(
                dbn_out, bn_cache, need_input_grad=not first_layer
            )
            grads[f"{prefix}.bn.gamma"] = dgamma
            grads[f"{prefix}.bn.beta"] = dbeta
            if proj_cache is not None:
                dskip, dpw, dpb = engine.conv1d_backward(
                    dout, proj_cache, need_input_grad=not first_layer
                )
                grads[f"{prefix}.proj.w"] = dpw
                grads[f"{prefix}.proj.b"] = dpb
                dout = None if first_layer else dx + dskip
            else:
                dout = None if first_layer else dx + dout
    return grads, dout


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

def compute_losses(outputs: HeadOutputs, onehot: np.ndarray, temperature: float):
    """Batch-mean losses and logit gradients for the coupled heads.

    Each block m: L_m = FKD_m + CE_m where FKD_m is the KL divergence from
    the fusion head's softened distribution to block m's softened
    distribution (both at ``temperature``) and CE_m is plain cross-entropy
    at temperature 1. The fusion head: L_f = CE only. The softened fusion
    distribution acts as a constant teacher: no gradient flows into the
    fusion logits through the FKD terms.

    Returns (LossBreakdown, [dlogits per block], dlogits_fusion).
    """
    batch = onehot.shape[0]
    sigma_f = engine.tempered_softmax(outputs.fusion_logits, temperature)
    fusion_probs = engine.tempered_softmax(outputs.fusion_logits, 1.0)
    fusion_ce, dfusion = engine.cross_entropy(fusion_probs, onehot)

    block_ce, block_fkd, dblocks = [], [], []
    for logits in outputs.block_logits:
        sigma_m = engine.tempered_softmax(logits, temperature)
        probs = engine.tempered_softmax(logits, 1.0)
        ce, dce = engine.cross_entropy(probs, onehot)
        fkd = float(np.mean(engine.kl_divergence(sigma_f, sigma_m)))
        dkd = (sigma_m - sigma_f) / (temperature * batch)
        block_ce.append(ce)
        block_fkd.append(fkd)
        dblocks.append(dce + dkd)
    breakdown = LossBreakdown(
        block_ce=tuple(block_ce), block_fkd=tuple(block_fkd), fusion_ce=fusion_ce
    )
    return breakdown, dblocks, dfusion


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------

def _onehot(labels: np.ndarray, n_classes: int, dtype) -> np.ndarray:
    return np.eye(n_classes, dtype=dtype)[labels]


class _FlatAdam:
    """Adam over one flat parameter vector, matching engine.adam_step.

    The training loop owns a single mutable parameter buffer (exposed to the
    forward pass as per-name views), so the inner loop avoids per-array
    bookkeeping. The update sequence mirrors engine.adam_step exactly;
    tests assert bit-identical trajectories.
    """

    def __init__(self, params: dict[str, np.ndarray]):
        self.names = list(params)
        self.shapes = {n: params[n].shape for n in self.names}
        sizes = [params[n].size for n in self.names]
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.theta = np.concatenate([np.ravel(params[n]) for n in self.names])
        self.grad = np.empty_like(self.theta)
        self.m = np.zeros_like(self.theta)
        self.v = np.zeros_like(self.theta)
        self.step_count = 0
        self.views = {
            n: self.theta[offsets[i] : offsets[i + 1]].reshape(self.shapes[n])
            for i, n in enumerate(self.names)
        }
        self.grad_views = {
            n: self.grad[offsets[i] : offsets[i + 1]].reshape(self.shapes[n])
            for i, n in enumerate(self.names)
        }

    def step(self, grads: dict[str, np.ndarray], lr: float,
             beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8) -> None:
        for name in self.names:
            np.copyto(self.grad_views[name], grads[name])
        if not np.all(np.isfinite(self.grad)):
            raise engine.NonFiniteGradientError("non-finite gradient in training step")
        self.step_count += 1
        bc1 = 1.0 - beta1**self.step_count
        bc2 = 1.0 - beta2**self.step_count
        self.m *= beta1
        self.m += (1.0 - beta1) * self.grad
        self.v *= beta2
        self.v += (1.0 - beta2) * (self.grad * self.grad)
        denom = np.sqrt(self.v / bc2)
        denom += epsilon
        update = self.m * (lr / bc1)
        update /= denom
        self.theta -= update

    def snapshot(self) -> dict[str, np.ndarray]:
        return {n: self.views[n].copy() for n in self.names}


def train(
    model: ResTcnModel,
    x: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig,
) -> tuple[ResTcnModel, list[dict]]:
    """Adam + one-cycle cosine annealing over epochs x batches steps.

    Deterministic for a fixed seed (fixed shuffle stream). Returns the
    trained model and a per-epoch history of every loss term and per-head
    training accuracy. A non-finite loss aborts with TrainingDivergedError
    carrying the previous epoch's checkpoint.
    """
    if len(x) == 0:
        raise ValueError("training set is empty")
    if len(x) != len(labels):
        raise ValueError("features and labels disagree in length")
    history: list[dict] = []
    if config.epochs == 0:
        return model, history
    engine.tune_allocator()

    n = len(x)
    n_classes = model.config.n_classes
    dtype = next(iter(model.params.values())).dtype
    x = np.asarray(x, dtype=dtype)
    onehot_all = _onehot(np.asarray(labels), n_classes, dtype)
    labels = np.asarray(labels)

    batches_per_epoch = -(-n // config.batch_size)
    schedule = LrSchedule(total_steps=config.epochs * batches_per_epoch, base_lr=config.base_lr)
    rng = np.random.default_rng(config.seed)

    optimizer = _FlatAdam(model.params)
    params = optimizer.views
    bn_state = dict(model.bn_state)
    checkpoint = (optimizer.snapshot(), dict(bn_state))
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        sums = {
            "block_ce": np.zeros(model.config.n_blocks),
            "block_fkd": np.zeros(model.config.n_blocks),
            "fusion_ce": 0.0,
        }
        correct = np.zeros(model.config.n_blocks + 1)
        lr = config.base_lr
        for start in range(0, n, config.batch_size):
            batch_idx = order[start : start + config.batch_size]
            xb, yb = x[batch_idx], onehot_all[batch_idx]
            outputs, caches, bn_state = _forward(params, bn_state, model.config, xb, train=True)
            finite = np.all(np.isfinite(outputs.fusion_logits)) and all(
                np.all(np.isfinite(l)) for l in outputs.block_logits
            )
            if finite:
                breakdown, dblocks, dfusion = compute_losses(
                    outputs, yb, model.config.distill_temperature
                )
            if not finite or not np.isfinite(breakdown.total):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, step {step}",
                    replace(model, params=checkpoint[0], bn_state=checkpoint[1]),
                    history,
                )
            grads, _ = _backward(params, model.config, caches, dblocks, dfusion)
            lr = engine.cosine_lr(step, schedule)
            try:
                optimizer.step(grads, lr)
            except engine.NonFiniteGradientError as exc:
                raise TrainingDivergedError(
                    f"{exc} at epoch {epoch}, step {step}",
                    replace(model, params=checkpoint[0], bn_state=checkpoint[1]),
                    history,
                ) from exc
            step += 1

            sums["block_ce"] += breakdown.block_ce
            sums["block_fkd"] += breakdown.block_fkd
            sums["fusion_ce"] += breakdown.fusion_ce
            truth = labels[batch_idx]
            for m, logits in enumerate(outputs.block_logits):
                correct[m] += (logits.argmax(axis=1) == truth).sum()
            correct[-1] += (outputs.fusion_logits.argmax(axis=1) == truth).sum()

        block_ce = sums["block_ce"] / batches_per_epoch
        block_fkd = sums["block_fkd"] / batches_per_epoch
        fusion_ce = sums["fusion_ce"] / batches_per_epoch
        history.append(
            {
                "epoch": epoch,
                "lr": lr,
                "block_ce": block_ce.tolist(),
                "block_fkd": block_fkd.tolist(),
                "fusion_ce": float(fusion_ce),
                "block_loss": (block_ce + block_fkd).tolist(),
                "total": float(block_ce.sum() + block_fkd.sum() + fusion_ce),
                "head_accuracy": (correct / n).tolist(),
            }
        )
        checkpoint = (optimizer.snapshot(), dict(bn_state))

    return replace(model, params=optimizer.snapshot(), bn_state=bn_state), history


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------

def predict(model: ResTcnModel, x: np.ndarray) -> Prediction:
    """Infer-mode distributions for every head plus the rank-1 fusion label.

    Accepts a single (T, input_dim) sequence or a (B, T, input_dim) batch;
    results are always batched. Argmax tie-breaks to the lowest class index.
    """
    single = x.ndim == 2
    if single:
        x = x[None]
    outputs, _, _ = _forward(model.params, model.bn_state, model.config, x, train=False)
    # Distributions are reported in double precision so they normalize tightly
    # even when the network runs in single precision.
    block_probs = tuple(
        engine.tempered_softmax(l.astype(np.float64), 1.0) for l in outputs.block_logits
    )
    fusion_probs = engine.tempered_softmax(outputs.fusion_logits.astype(np.float64), 1.0)
    return Prediction(
        block_probs=block_probs,
        fusion_probs=fusion_probs,
        rank1=fusion_probs.argmax(axis=1),
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _array_manifest(model: ResTcnModel) -> list[tuple[str, np.ndarray]]:
    entries = [(name, arr) for name, arr in model.params.items()]
    for name, state in model.bn_state.items():
        entries.append((f"{name}.running_mean", state.mean))
        entries.append((f"{name}.running_var", state.var))
    return entries


def save_model(model: ResTcnModel, path) -> None:
    """Write magic line, JSON header, then raw little-endian float32 arrays."""
    entries = _array_manifest(model)
    header = {
        "format_version": 1,
        "config": model.config.to_dict(),
        "class_names": list(model.class_names) if model.class_names else None,
        "bn_batches": {name: state.batches_tracked for name, state in model.bn_state.items()},
        "arrays": [{"name": name, "shape": list(arr.shape)} for name, arr in entries],
    }
    with open(path, "wb") as fh:
        fh.write((MODEL_MAGIC + "\n").encode("utf-8"))
        fh.write((json.dumps(header, separators=(",", ":")) + "\n").encode("utf-8"))
        for _, arr in entries:
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_model(path) -> ResTcnModel:
    with open(path, "rb") as fh:
        magic = fh.readline().decode("utf-8").rstrip("\n")
        if magic != MODEL_MAGIC:
            raise ValueError(f"not a model artifact (magic {magic!r})")
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("format_version") != 1:
            raise ValueError(f"unsupported format version {header.get('format_version')}")
        config = ModelConfig.from_dict(header["config"])
        arrays = {}
        for entry in header["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(count * 4)
            if len(buf) != count * 4:
                raise ValueError(f"truncated artifact while reading {entry['name']!r}")
            arrays[entry["name"]] = np.frombuffer(buf, dtype="<f4").reshape(shape).copy()

    params, bn_state = {}, {}
    batches = header.get("bn_batches", {})
    for name, arr in arrays.items():
        if name.endswith(".running_mean"):
            key = name[: -len(".running_mean")]
            bn_state.setdefault(key, {})["mean"] = arr
        elif name.endswith(".running_var"):
            key = name[: -len(".running_var")]
            bn_state.setdefault(key, {})["var"] = arr
        else:
            params[name] = arr
    states = {
        key: BnState(mean=parts["mean"], var=parts["var"], batches_tracked=int(batches.get(key, 0)))
        for key, parts in bn_state.items()
    }
    class_names = header.get("class_names")
    return ResTcnModel(
        config=config,
        params=params,
        bn_state=states,
        class_names=tuple(class_names) if class_names else None,
    )
