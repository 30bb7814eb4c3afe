"""Forward/backward building blocks on top of the recurrence kernels.

Each forward returns (output, cache); the matching backward consumes the
cache, accumulates parameter gradients into a name-keyed dict and
returns the gradient with respect to its inputs.
"""

from __future__ import annotations

import os

import numpy as np

from .backend import kernels

DEBUG_FINITE = bool(os.environ.get("SQPARSER_DEBUG_FINITE"))


def assert_finite(name: str, arr: np.ndarray):
    if DEBUG_FINITE and not np.all(np.isfinite(arr)):
        raise FloatingPointError(f"non-finite values in {name}")


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def log_softmax_pick(logits: np.ndarray, idx: int) -> float:
    m = logits.max()
    return float(logits[idx] - m - np.log(np.exp(logits - m).sum()))


# ---------------------------------------------------------------------------
# Word embedding: x_i = relu(W [pos; fixed; learned] + b)
# ---------------------------------------------------------------------------

def embed_forward(params, word_ids, pos_ids):
    E = np.concatenate([
        params["emb_pos"][pos_ids],
        params["emb_word_fixed"][word_ids],
        params["emb_word"][word_ids],
    ], axis=1)
    pre = E @ params["embed_W"].T + params["embed_b"]
    X = np.maximum(pre, 0.0)
    assert_finite("embed", X)
    return X, (E, pre > 0, word_ids, pos_ids)


def embed_backward(params, cache, dX, grads):
    E, mask, word_ids, pos_ids = cache
    dPre = dX * mask
    grads["embed_W"] += dPre.T @ E
    grads["embed_b"] += dPre.sum(axis=0)
    dE = dPre @ params["embed_W"]
    pos_dim = params["emb_pos"].shape[1]
    fixed_dim = params["emb_word_fixed"].shape[1]
    np.add.at(grads["emb_pos"], pos_ids, dE[:, :pos_dim])
    # the fixed table takes no gradient
    np.add.at(grads["emb_word"], word_ids, dE[:, pos_dim + fixed_dim:])


def embed_word(params, word_id: int, pos_id: int) -> np.ndarray:
    """Single-token embedding, the per-row view of embed_forward."""
    n_words = params["emb_word"].shape[0]
    n_pos = params["emb_pos"].shape[0]
    if not (0 <= word_id < n_words and 0 <= pos_id < n_pos):
        raise IndexError(f"embedding id out of range: word {word_id}, pos {pos_id}")
    X, _ = embed_forward(params, np.array([word_id]), np.array([pos_id]))
    return X[0]


# ---------------------------------------------------------------------------
# LSTM layers
# ---------------------------------------------------------------------------

def lstm_cell(x, h_prev, c_prev, W, R, b, pi, pf, po):
    """One peephole step from an unprojected input; used directly by the
    tests, while the model precomputes the input products in bulk."""
    if W.shape[1] != x.shape[0] or R.shape[1] != h_prev.shape[0] or h_prev.shape != c_prev.shape:
        raise ValueError("lstm_cell: inconsistent dimensions")
    wx = W @ x + b
    h, c, *_ = kernels.lstm_cell_forward(wx, R, pi, pf, po, h_prev, c_prev)
    return h, c


def lstm_layer_forward(params, prefix, X):
    W, R, b = params[f"{prefix}_W"], params[f"{prefix}_R"], params[f"{prefix}_b"]
    pi, pf, po = params[f"{prefix}_pi"], params[f"{prefix}_pf"], params[f"{prefix}_po"]
    h0, c0 = params[f"{prefix}_h0"], params[f"{prefix}_c0"]
    WX = X @ W.T + b
    Hs, Cs, GI, GF, GZ, GO = kernels.lstm_seq_forward(WX, R, pi, pf, po, h0, c0)
    assert_finite(prefix, Hs)
    cache = (X, Hs, Cs, GI, GF, GZ, GO)
    return Hs, cache


def lstm_layer_backward(params, prefix, cache, dH_ext, grads,
                        dh_last=None, dc_last=None):
    X, Hs, Cs, GI, GF, GZ, GO = cache
    W, R = params[f"{prefix}_W"], params[f"{prefix}_R"]
    pi, pf, po = params[f"{prefix}_pi"], params[f"{prefix}_pf"], params[f"{prefix}_po"]
    h0, c0 = params[f"{prefix}_h0"], params[f"{prefix}_c0"]
    H = Hs.shape[1]
    dt = Hs.dtype
    if dh_last is None:
        dh_last = np.zeros(H, dtype=dt)
    if dc_last is None:
        dc_last = np.zeros(H, dtype=dt)
    RT = np.ascontiguousarray(R.T)
    dPre, dh0, dc0, dpi, dpf, dpo = kernels.lstm_seq_backward(
        np.ascontiguousarray(dH_ext), dh_last, dc_last, RT, pi, pf, po,
        Hs, Cs, GI, GF, GZ, GO, h0, c0)
    grads[f"{prefix}_W"] += dPre.T @ X
    Hprev = np.vstack([h0[None, :], Hs[:-1]])
    grads[f"{prefix}_R"] += dPre.T @ Hprev
    grads[f"{prefix}_b"] += dPre.sum(axis=0)
    grads[f"{prefix}_pi"] += dpi
    grads[f"{prefix}_pf"] += dpf
    grads[f"{prefix}_po"] += dpo
    grads[f"{prefix}_h0"] += dh0
    grads[f"{prefix}_c0"] += dc0
    return dPre @ W


# ---------------------------------------------------------------------------
# Attention over an encoder segment
# ---------------------------------------------------------------------------

def attn_precompute(params, prefix, Hs):
    """Per-sentence half of the score network: the encoder-state term
    does not depend on the decoder state, so hoist it out of the step
    loop."""
    h_dim = Hs.shape[1]
    Wh = params[f"{prefix}_W"][:, :h_dim]
    return Hs @ Wh.T


def attn_forward(params, prefix, Hs, A, s_prev, lo, hi):
    """Attention restricted to positions [lo, hi] (1-based, inclusive).
    An empty range (lo > hi) yields a zero context and no weights."""
    h_dim = Hs.shape[1]
    if lo > hi:
        return np.zeros(h_dim, dtype=Hs.dtype), np.zeros(0, dtype=Hs.dtype), None
    if not (1 <= lo <= hi <= Hs.shape[0]):
        raise ValueError(f"attention range [{lo}, {hi}] out of bounds for n={Hs.shape[0]}")
    Ws = params[f"{prefix}_W"][:, h_dim:]
    q = Ws @ s_prev + params[f"{prefix}_b"]
    Tm = np.tanh(A[lo - 1:hi] + q)
    beta = Tm @ params[f"{prefix}_v"]
    alpha = softmax(beta)
    ctx = alpha @ Hs[lo - 1:hi]
    return ctx, alpha, (Tm, alpha, s_prev, lo, hi)


def attn_backward(params, prefix, Hs, cache, dctx, dA, dH, grads):
    """Accumulates into dA / dH (per-sentence buffers) and the parameter
    grads; returns the gradient into s_prev."""
    if cache is None:
        return 0.0
    Tm, alpha, s_prev, lo, hi = cache
    h_dim = Hs.shape[1]
    seg = slice(lo - 1, hi)
    Hseg = Hs[seg]
    dalpha = Hseg @ dctx
    dH[seg] += np.outer(alpha, dctx)
    dbeta = alpha * (dalpha - alpha @ dalpha)
    grads[f"{prefix}_v"] += Tm.T @ dbeta
    dTm = np.outer(dbeta, params[f"{prefix}_v"])
    dPre = dTm * (1.0 - Tm * Tm)
    dA[seg] += dPre
    dq = dPre.sum(axis=0)
    grads[f"{prefix}_b"] += dq
    grads[f"{prefix}_W"][:, h_dim:] += np.outer(dq, s_prev)
    return params[f"{prefix}_W"][:, h_dim:].T @ dq


def attn_finish_backward(params, prefix, Hs, dA, dH, grads):
    """Fold the accumulated dA through the hoisted encoder-state term."""
    h_dim = Hs.shape[1]
    grads[f"{prefix}_W"][:, :h_dim] += dA.T @ Hs
    dH += dA @ params[f"{prefix}_W"][:, :h_dim]


def mean_pool_forward(Hs, lo, hi):
    if lo > hi:
        return np.zeros(Hs.shape[1], dtype=Hs.dtype), None
    return Hs[lo - 1:hi].mean(axis=0), (lo, hi)


def mean_pool_backward(cache, dctx, dH):
    if cache is None:
        return
    lo, hi = cache
    dH[lo - 1:hi] += dctx / (hi - lo + 1)
