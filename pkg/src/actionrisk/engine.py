"""Dense numerical kernels for temporal convolutional classifiers.

Forward/backward pairs for 1-D convolution over the time axis, batch
normalization, ReLU, zero padding, global average pooling and linear heads,
plus the tempered softmax / cross-entropy / KL losses and the Adam optimizer
with a one-cycle cosine learning-rate schedule.

Everything operates on plain numpy arrays. Backward passes return exact
analytic gradients; the test suite checks them against central finite
differences in double precision. Training code typically runs in single
precision.
"""

from __future__ import annotations

import ctypes
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

BN_EPSILON = 1e-5
BN_MOMENTUM = 0.9
KL_CLAMP = 1e-12

_M_TRIM_THRESHOLD = -1
_M_MMAP_THRESHOLD = -3
_allocator_tuned = False


def tune_allocator(threshold_bytes: int = 512 << 20) -> bool:
    """Keep large freed buffers on glibc's heap instead of unmapping them.

    Training allocates tens of megabytes of temporaries per step; with the
    default malloc thresholds every reuse page-faults. Raising the mmap and
    trim thresholds removes that churn. No-op (returns False) on platforms
    without glibc's mallopt. Idempotent.
    """
    global _allocator_tuned
    if _allocator_tuned:
        return True
    try:
        libc = ctypes.CDLL("libc.so.6")
        ok = bool(
            libc.mallopt(_M_MMAP_THRESHOLD, threshold_bytes)
            and libc.mallopt(_M_TRIM_THRESHOLD, threshold_bytes)
        )
    except OSError:
        return False
    _allocator_tuned = ok
    return ok


class NonFiniteGradientError(ValueError):
    """Raised when an optimizer step receives NaN or infinite gradients."""


# ---------------------------------------------------------------------------
# 1-D convolution (cross-correlation) over the time axis
# ---------------------------------------------------------------------------

def conv1d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 1):
    """Valid (no-padding) cross-correlation over time.

    Args:
        x: input of shape (B, T, C_in).
        w: filter bank of shape (K, C_in, F).
        b: bias of shape (F,).
        stride: temporal stride, >= 1.

    Returns:
        (y, cache) with y of shape (B, T', F) where T' = (T - K) // stride + 1.
    """
    if x.ndim != 3 or w.ndim != 3 or b.ndim != 1:
        raise ValueError(
            f"conv1d expects x (B,T,C), w (K,C,F), b (F); got {x.shape}, {w.shape}, {b.shape}"
        )
    B, T, C = x.shape
    K, Cw, F = w.shape
    if Cw != C:
        raise ValueError(f"channel mismatch: input has {C}, weights expect {Cw}")
    if b.shape[0] != F:
        raise ValueError(f"bias length {b.shape[0]} != filter count {F}")
    if K > T:
        raise ValueError(f"kernel width {K} exceeds input length {T}")
    if stride < 1:
        raise ValueError("stride must be >= 1")

    if K == 1:
        # Pointwise conv: the column matrix is just the (strided) input rows.
        strided = x[:, ::stride] if stride > 1 else x
        t_out = strided.shape[1]
        cols = np.ascontiguousarray(strided).reshape(B * t_out, C)
    else:
        # im2col: window view (B, T-K+1, C, K) -> strided -> (B, T', K, C)
        windows = np.lib.stride_tricks.sliding_window_view(x, K, axis=1)
        windows = windows[:, ::stride]
        t_out = windows.shape[1]
        cols = np.ascontiguousarray(windows.transpose(0, 1, 3, 2)).reshape(B * t_out, K * C)
    y = (cols @ w.reshape(K * C, F) + b).reshape(B, t_out, F)
    cache = (cols, x.shape, w, stride)
    return y, cache


def conv1d_backward(dy: np.ndarray, cache, need_input_grad: bool = True):
    """Gradients of conv1d_forward w.r.t. input, weights and bias.

    ``need_input_grad=False`` skips the input gradient (returned as None),
    useful for the first layer of a network.
    """
    cols, x_shape, w, stride = cache
    B, T, C = x_shape
    K, _, F = w.shape
    t_out = dy.shape[1]
    dy_flat = dy.reshape(B * t_out, F)

    db = dy_flat.sum(axis=0)
    dw = (cols.T @ dy_flat).reshape(K, C, F)
    if not need_input_grad:
        return None, dw, db

    dcols = (dy_flat @ w.reshape(K * C, F).T).reshape(B, t_out, K, C)
    dx = np.zeros(x_shape, dtype=dy.dtype)
    span = (t_out - 1) * stride + 1
    for k in range(K):
        dx[:, k : k + span : stride, :] += dcols[:, :, k, :]
    return dx, dw, db


def pad_time_forward(x: np.ndarray, left: int, right: int):
    """Zero-pad the time axis of (B, T, C) input."""
    if left < 0 or right < 0:
        raise ValueError("padding must be non-negative")
    if left == 0 and right == 0:
        return x, (left, x.shape[1])
    B, T, C = x.shape
    y = np.zeros((B, T + left + right, C), dtype=x.dtype)
    y[:, left : left + T, :] = x
    return y, (left, x.shape[1])


def pad_time_backward(dy: np.ndarray, cache):
    left, t_in = cache
    return dy[:, left : left + t_in, :]


# ---------------------------------------------------------------------------
# Batch normalization (per channel, statistics over batch x time)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BnState:
    """Running statistics for one batch-norm layer."""

    mean: np.ndarray
    var: np.ndarray
    batches_tracked: int = 0

    @classmethod
    def initial(cls, channels: int, dtype=np.float32) -> "BnState":
        return cls(
            mean=np.zeros(channels, dtype=dtype),
            var=np.ones(channels, dtype=dtype),
            batches_tracked=0,
        )


def batchnorm_forward(
    x: np.ndarray,
    gamma: np.ndarray,
    beta: np.ndarray,
    state: BnState,
    train: bool,
    momentum: float = BN_MOMENTUM,
    eps: float = BN_EPSILON,
):
    """Per-channel batch normalization over the (batch, time) axes.

    Train mode normalizes with batch statistics and blends them into the
    running statistics (running = momentum * running + (1 - momentum) * batch).
    Infer mode uses the running statistics; inferring before any training
    batch falls back to the initialized stats (mean 0, var 1) with a warning.

    Returns (y, cache, new_state); cache is None in infer mode.
    """
    if x.ndim != 3:
        raise ValueError(f"batchnorm expects (B, T, C) input, got shape {x.shape}")
    if train:
        mu = x.mean(axis=(0, 1))
        var = (x * x).mean(axis=(0, 1)) - mu * mu
        np.maximum(var, 0.0, out=var)  # guard fp cancellation for constant channels
        inv_std = 1.0 / np.sqrt(var + eps)
        xhat = (x - mu) * inv_std
        y = gamma * xhat + beta
        new_state = BnState(
            mean=(momentum * state.mean + (1.0 - momentum) * mu).astype(state.mean.dtype),
            var=(momentum * state.var + (1.0 - momentum) * var).astype(state.var.dtype),
            batches_tracked=state.batches_tracked + 1,
        )
        cache = (xhat, inv_std, gamma, x.shape)
        return y, cache, new_state
    if state.batches_tracked == 0:
        warnings.warn(
            "batchnorm inference before any training step: using initialized "
            "running stats (mean 0, var 1)",
            RuntimeWarning,
            stacklevel=2,
        )
    inv_std = 1.0 / np.sqrt(state.var + eps)
    y = (gamma * inv_std) * x + (beta - gamma * inv_std * state.mean)
    return y, None, state


def batchnorm_backward(dy: np.ndarray, cache, need_input_grad: bool = True):
    """Gradients of train-mode batchnorm w.r.t. input, gamma and beta."""
    xhat, inv_std, gamma, x_shape = cache
    B, T, _ = x_shape
    n = B * T
    dgamma = (dy * xhat).sum(axis=(0, 1))
    dbeta = dy.sum(axis=(0, 1))
    if not need_input_grad:
        return None, dgamma, dbeta
    # Backprop through the batch statistics; since gamma is constant per
    # channel, sum(dxhat) = gamma * dbeta and sum(dxhat * xhat) = gamma *
    # dgamma, so the correction terms reuse the reductions above.
    dx = n * dy
    dx -= dbeta
    dx -= xhat * dgamma
    dx *= gamma * (inv_std / n)
    return dx, dgamma, dbeta


def relu_forward(x: np.ndarray):
    mask = x > 0
    return x * mask, mask


def relu_backward(dy: np.ndarray, mask: np.ndarray):
    return dy * mask


def global_avg_pool_forward(x: np.ndarray):
    """Mean over the time axis: (B, T, C) -> (B, C)."""
    return x.mean(axis=1), (x.shape[1], x.dtype)


def global_avg_pool_backward(dy: np.ndarray, cache):
    t, dtype = cache
    return np.repeat(dy[:, None, :] / t, t, axis=1).astype(dtype, copy=False)


def linear_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Affine map (B, C) @ (C, N) + (N,)."""
    if x.shape[1] != w.shape[0]:
        raise ValueError(f"linear shape mismatch: input {x.shape} vs weights {w.shape}")
    return x @ w + b, x


def linear_backward(dy: np.ndarray, cache, w: np.ndarray):
    x = cache
    return dy @ w.T, x.T @ dy, dy.sum(axis=0)


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

def tempered_softmax(logits: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Softmax of logits / temperature, computed with max-subtraction.

    At temperature 1 this is the plain softmax; larger temperatures expose
    inter-class similarity by flattening the distribution. Works on a single
    logit vector or a batch (softmax over the last axis).
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits must be finite")
    z = np.asarray(logits) / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, onehot: np.ndarray):
    """Negative log-likelihood of the true class, with mean reduction.

    Args:
        probs: distribution(s) over classes, shape (N,) or (B, N).
        onehot: matching one-hot label(s).

    Returns:
        (loss, grad_logits). The gradient is stated w.r.t. the logits that
        produced ``probs`` through a temperature-1 softmax, i.e. the
        conventional (probs - onehot) / batch form; no temperature factor
        is applied here.
    """
    p = np.atleast_2d(probs)
    y = np.atleast_2d(onehot)
    if p.shape != y.shape:
        raise ValueError(f"probs shape {p.shape} != labels shape {y.shape}")
    batch = p.shape[0]
    p_true = (p * y).sum(axis=1)
    loss = float(-np.log(np.maximum(p_true, KL_CLAMP)).mean())
    grad = ((p - y) / batch).reshape(np.shape(probs))
    return loss, grad


def kl_divergence(p: np.ndarray, q: np.ndarray):
    """Kullback-Leibler divergence KL(p || q) over the last axis.

    Entries of q below 1e-12 are clamped (with a warning) so that softened
    distributions that underflow to zero do not produce infinities. Returns
    a scalar for vector inputs, a per-row array for batched inputs.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    if np.any(q < KL_CLAMP):
        warnings.warn(
            f"kl_divergence: clamping zero entries of q at {KL_CLAMP}",
            RuntimeWarning,
            stacklevel=2,
        )
        q = np.maximum(q, KL_CLAMP)
    div = (p * (np.log(p) - np.log(q))).sum(axis=-1)
    return float(div) if div.ndim == 0 else div


# ---------------------------------------------------------------------------
# Optimizer and learning-rate schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdamState:
    """Adam moment estimates for a named set of parameter arrays."""

    m: dict = field(repr=False)
    v: dict = field(repr=False)
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def initial(cls, params: dict, **hyper) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            step=0,
            **hyper,
        )


def adam_step(params: dict, grads: dict, state: AdamState, lr: float):
    """One bias-corrected Adam update. Pure: returns (new_params, new_state).

    Rejects the whole update if any gradient entry is NaN or infinite.
    """
    if set(params) != set(grads):
        raise ValueError("parameter and gradient sets differ")
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(f"non-finite gradient for '{name}'")
        if g.shape != params[name].shape:
            raise ValueError(f"gradient shape mismatch for '{name}'")

    t = state.step + 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        m = state.m[name] * b1
        m += (1.0 - b1) * g
        v = state.v[name] * b2
        v += (1.0 - b2) * (g * g)
        denom = np.sqrt(v / bc2)
        denom += eps
        update = m * (lr / bc1)
        update /= denom
        new_params[name] = p - update.astype(p.dtype, copy=False)
        new_m[name] = m
        new_v[name] = v
    return new_params, replace(state, m=new_m, v=new_v, step=t)


@dataclass(frozen=True)
class LrSchedule:
    """One-cycle cosine annealing from base_lr down to zero."""

    total_steps: int
    base_lr: float = 0.001
    kind: str = "cosine-one-cycle"

    def __post_init__(self):
        if self.base_lr <= 0:
            raise ValueError("base_lr must be > 0")
        if self.total_steps < 1:
            raise ValueError("total_steps must be >= 1")
        if self.kind != "cosine-one-cycle":
            raise ValueError(f"unknown schedule kind: {self.kind}")


def cosine_lr(step: int, schedule: LrSchedule) -> float:
    """lr(step) = 0.5 * base_lr * (1 + cos(pi * step / total_steps)).

    Steps past the end of the schedule clamp to the final (zero) value.
    """
    if step < 0:
        raise ValueError("step must be >= 0")
    step = min(step, schedule.total_steps)
    return 0.5 * schedule.base_lr * (1.0 + math.cos(math.pi * step / schedule.total_steps))
