"""Forward and backward passes of the classifier's building blocks.

Forward functions return `(output, cache)`; backward functions consume the cache and accumulate
parameter gradients into a `grads` dict keyed like the parameters.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, pad: int) -> tuple[np.ndarray, tuple]:
    """Stride-1 convolution of `x` (N, C, H, W) with `w` (F, C, k, k) via im2col."""
    n, c, _, _ = x.shape
    f, _, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    ho, wo = windows.shape[2:4]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, c * kh * kw)
    out = cols @ w.reshape(f, -1).T + b
    return out.reshape(n, ho, wo, f).transpose(0, 3, 1, 2), (x.shape, xp.shape, cols, pad)


def conv2d_backward(
    dout: np.ndarray, cache: tuple, w: np.ndarray, need_dx: bool = True
) -> tuple[np.ndarray | None, np.ndarray, np.ndarray]:
    x_shape, xp_shape, cols, pad = cache
    n, f, ho, wo = dout.shape
    _, c, kh, kw = w.shape
    dflat = dout.transpose(0, 2, 3, 1).reshape(-1, f)
    dw = (dflat.T @ cols).reshape(w.shape)
    db = dflat.sum(axis=0)
    if not need_dx:
        return None, dw, db
    dcols = (dflat @ w.reshape(f, -1)).reshape(n, ho, wo, c, kh, kw)
    dxp = np.zeros(xp_shape)
    for i in range(kh):
        for j in range(kw):
            dxp[:, :, i : i + ho, j : j + wo] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    if pad:
        dxp = dxp[:, :, pad : pad + x_shape[2], pad : pad + x_shape[3]]
    return dxp, dw, db


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def gru_forward(p, x: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, tuple]:
    """One gated recurrent step: h' = (1 - z) * h + z * n."""
    z = expit(x @ p["gru_wz"] + h @ p["gru_uz"] + p["gru_bz"])
    r = expit(x @ p["gru_wr"] + h @ p["gru_ur"] + p["gru_br"])
    rh = r * h
    n = np.tanh(x @ p["gru_wn"] + rh @ p["gru_un"] + p["gru_bn"])
    return (1.0 - z) * h + z * n, (x, h, z, r, rh, n)


def gru_backward(dh_new: np.ndarray, cache: tuple, p, grads: dict) -> tuple[np.ndarray, np.ndarray]:
    x, h, z, r, rh, n = cache
    dh = dh_new * (1.0 - z)

    dan = dh_new * z * (1.0 - n**2)
    grads["gru_wn"] += x.T @ dan
    grads["gru_un"] += rh.T @ dan
    grads["gru_bn"] += dan.sum(axis=0)
    drh = dan @ p["gru_un"].T
    dh += drh * r

    daz = dh_new * (n - h) * z * (1.0 - z)
    grads["gru_wz"] += x.T @ daz
    grads["gru_uz"] += h.T @ daz
    grads["gru_bz"] += daz.sum(axis=0)

    dar = drh * h * r * (1.0 - r)
    grads["gru_wr"] += x.T @ dar
    grads["gru_ur"] += h.T @ dar
    grads["gru_br"] += dar.sum(axis=0)

    dx = daz @ p["gru_wz"].T + dar @ p["gru_wr"].T + dan @ p["gru_wn"].T
    dh += daz @ p["gru_uz"].T + dar @ p["gru_ur"].T
    return dx, dh


def encoder_forward(p, obs: np.ndarray) -> tuple[np.ndarray, tuple]:
    """Observations (N, 5, 5, 5) to latents (N, 64)."""
    a1, c1 = conv2d_forward(obs, p["conv1_w"], p["conv1_b"], pad=1)
    r1 = relu(a1)
    a2, c2 = conv2d_forward(r1, p["conv2_w"], p["conv2_b"], pad=0)
    flat = relu(a2).reshape(len(obs), -1)
    a3 = flat @ p["proj_w"] + p["proj_b"]
    return relu(a3), (c1, a1, c2, a2, flat, a3)


def encoder_backward(dlatent: np.ndarray, cache: tuple, p, grads: dict) -> None:
    c1, a1, c2, a2, flat, a3 = cache
    da3 = dlatent * (a3 > 0)
    grads["proj_w"] += flat.T @ da3
    grads["proj_b"] += da3.sum(axis=0)
    da2 = (da3 @ p["proj_w"].T).reshape(a2.shape) * (a2 > 0)
    dr1, dw, db = conv2d_backward(da2, c2, p["conv2_w"])
    grads["conv2_w"] += dw
    grads["conv2_b"] += db
    _, dw, db = conv2d_backward(dr1 * (a1 > 0), c1, p["conv1_w"], need_dx=False)
    grads["conv1_w"] += dw
    grads["conv1_b"] += db


def head_forward(p, hidden: np.ndarray) -> tuple[np.ndarray, tuple]:
    """Hidden states (N, 128) to class logits (N, K)."""
    a1 = hidden @ p["head_w1"] + p["head_b1"]
    r1 = relu(a1)
    a2 = r1 @ p["head_w2"] + p["head_b2"]
    r2 = relu(a2)
    return r2 @ p["head_w3"] + p["head_b3"], (hidden, a1, r1, a2, r2)


def head_backward(dlogits: np.ndarray, cache: tuple, p, grads: dict) -> np.ndarray:
    hidden, a1, r1, a2, r2 = cache
    grads["head_w3"] += r2.T @ dlogits
    grads["head_b3"] += dlogits.sum(axis=0)
    da2 = (dlogits @ p["head_w3"].T) * (a2 > 0)
    grads["head_w2"] += r1.T @ da2
    grads["head_b2"] += da2.sum(axis=0)
    da1 = (da2 @ p["head_w2"].T) * (a1 > 0)
    grads["head_w1"] += hidden.T @ da1
    grads["head_b1"] += da1.sum(axis=0)
    return da1 @ p["head_w1"].T
