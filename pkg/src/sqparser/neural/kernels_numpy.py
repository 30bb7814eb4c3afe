"""Pure-numpy reference kernels for the peephole LSTM recurrences.

These are the fallback implementations; kernels_numba provides jitted
versions with identical signatures.  Gate layout everywhere is four
stacked blocks [input, forget, cell, output], each ``H`` wide.

The input-to-hidden product is not part of the kernels: callers fold
``X @ W.T + b`` into ``WX`` up front (one GEMM) and turn the returned
per-step preactivation gradients back into weight gradients the same
way.  Only the sequential recurrence lives here.
"""

import numpy as np


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def lstm_seq_forward(WX, R, pi, pf, po, h0, c0):
    """Run a unidirectional peephole LSTM over a sequence.

    WX: (T, 4H) precomputed input contribution including the bias.
    Returns per-step hidden states, cell states and gate activations,
    each of shape (T, H).
    """
    T = WX.shape[0]
    H = R.shape[1]
    dt = WX.dtype
    Hs = np.empty((T, H), dtype=dt)
    Cs = np.empty((T, H), dtype=dt)
    GI = np.empty((T, H), dtype=dt)
    GF = np.empty((T, H), dtype=dt)
    GZ = np.empty((T, H), dtype=dt)
    GO = np.empty((T, H), dtype=dt)
    h, c = h0, c0
    for t in range(T):
        pre = WX[t] + R @ h
        i = sigmoid(pre[0:H] + pi * c)
        f = sigmoid(pre[H:2 * H] + pf * c)
        z = np.tanh(pre[2 * H:3 * H])
        c = f * c + i * z
        o = sigmoid(pre[3 * H:4 * H] + po * c)
        h = o * np.tanh(c)
        GI[t], GF[t], GZ[t], GO[t] = i, f, z, o
        Cs[t], Hs[t] = c, h
    return Hs, Cs, GI, GF, GZ, GO


def lstm_seq_backward(dH_ext, dh_last, dc_last, RT, pi, pf, po,
                      Hs, Cs, GI, GF, GZ, GO, h0, c0):
    """Reverse-mode pass matching lstm_seq_forward.

    dH_ext: (T, H) external gradient into each hidden state; dh_last and
    dc_last are extra gradients into the final h/c.  Returns the per-step
    preactivation gradients dPre (T, 4H) plus gradients for the initial
    states and peephole weights.
    """
    T, H = dH_ext.shape
    dt = dH_ext.dtype
    dPre = np.empty((T, 4 * H), dtype=dt)
    dpi = np.zeros(H, dtype=dt)
    dpf = np.zeros(H, dtype=dt)
    dpo = np.zeros(H, dtype=dt)
    dh_rec = dh_last.copy()
    dc = dc_last.copy()
    for t in range(T - 1, -1, -1):
        dh = dH_ext[t] + dh_rec
        i, f, z, o = GI[t], GF[t], GZ[t], GO[t]
        c = Cs[t]
        c_prev = Cs[t - 1] if t > 0 else c0
        tc = np.tanh(c)
        da_o = dh * tc * o * (1.0 - o)
        dc = dh * o * (1.0 - tc * tc) + dc + po * da_o
        da_i = dc * z * i * (1.0 - i)
        da_f = dc * c_prev * f * (1.0 - f)
        da_z = dc * i * (1.0 - z * z)
        dPre[t, 0:H] = da_i
        dPre[t, H:2 * H] = da_f
        dPre[t, 2 * H:3 * H] = da_z
        dPre[t, 3 * H:4 * H] = da_o
        dpi += da_i * c_prev
        dpf += da_f * c_prev
        dpo += da_o * c
        dh_rec = RT @ dPre[t]
        dc = dc * f + pi * da_i + pf * da_f
    return dPre, dh_rec, dc, dpi, dpf, dpo


def lstm_cell_forward(wx, R, pi, pf, po, h_prev, c_prev):
    """Single peephole LSTM step; wx is the (4H,) input contribution
    including the bias."""
    H = R.shape[1]
    pre = wx + R @ h_prev
    i = sigmoid(pre[0:H] + pi * c_prev)
    f = sigmoid(pre[H:2 * H] + pf * c_prev)
    z = np.tanh(pre[2 * H:3 * H])
    c = f * c_prev + i * z
    o = sigmoid(pre[3 * H:4 * H] + po * c)
    h = o * np.tanh(c)
    return h, c, i, f, z, o


def lstm_cell_backward(dh, dc_in, RT, pi, pf, po, i, f, z, o, c, c_prev):
    """Reverse of one cell step.  dh is the total gradient into h, dc_in
    the carry into c from the following step.  Returns (dpre, dh_prev,
    dc_prev)."""
    H = c.shape[0]
    dt = dh.dtype
    tc = np.tanh(c)
    da_o = dh * tc * o * (1.0 - o)
    dc = dh * o * (1.0 - tc * tc) + dc_in + po * da_o
    da_i = dc * z * i * (1.0 - i)
    da_f = dc * c_prev * f * (1.0 - f)
    da_z = dc * i * (1.0 - z * z)
    dpre = np.empty(4 * H, dtype=dt)
    dpre[0:H] = da_i
    dpre[H:2 * H] = da_f
    dpre[2 * H:3 * H] = da_z
    dpre[3 * H:4 * H] = da_o
    dh_prev = RT @ dpre
    dc_prev = dc * f + pi * da_i + pf * da_f
    return dpre, dh_prev, dc_prev
