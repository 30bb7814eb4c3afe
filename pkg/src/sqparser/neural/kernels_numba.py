"""Numba-jitted LSTM kernels, signature-compatible with kernels_numpy.

The sequential recurrence is the one part of the model that cannot be
expressed as a handful of large GEMMs, so it pays to fuse the per-step
gate arithmetic into compiled loops.  fastmath stays off: results must
match the numpy path to rounding order.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def lstm_seq_forward(WX, R, pi, pf, po, h0, c0):
    T = WX.shape[0]
    H = R.shape[1]
    dt = WX.dtype
    Hs = np.empty((T, H), dtype=dt)
    Cs = np.empty((T, H), dtype=dt)
    GI = np.empty((T, H), dtype=dt)
    GF = np.empty((T, H), dtype=dt)
    GZ = np.empty((T, H), dtype=dt)
    GO = np.empty((T, H), dtype=dt)
    h = h0.copy()
    c = c0.copy()
    for t in range(T):
        pre = WX[t] + np.dot(R, h)
        for k in range(H):
            i = 1.0 / (1.0 + np.exp(-(pre[k] + pi[k] * c[k])))
            f = 1.0 / (1.0 + np.exp(-(pre[H + k] + pf[k] * c[k])))
            z = np.tanh(pre[2 * H + k])
            ck = f * c[k] + i * z
            o = 1.0 / (1.0 + np.exp(-(pre[3 * H + k] + po[k] * ck)))
            hk = o * np.tanh(ck)
            GI[t, k] = i
            GF[t, k] = f
            GZ[t, k] = z
            GO[t, k] = o
            Cs[t, k] = ck
            c[k] = ck
            h[k] = hk
        Hs[t] = h
    return Hs, Cs, GI, GF, GZ, GO


@njit(cache=True)
def lstm_seq_backward(dH_ext, dh_last, dc_last, RT, pi, pf, po,
                      Hs, Cs, GI, GF, GZ, GO, h0, c0):
    T, H = dH_ext.shape
    dt = dH_ext.dtype
    dPre = np.empty((T, 4 * H), dtype=dt)
    dpi = np.zeros(H, dtype=dt)
    dpf = np.zeros(H, dtype=dt)
    dpo = np.zeros(H, dtype=dt)
    dh_rec = dh_last.copy()
    dc = dc_last.copy()
    for t in range(T - 1, -1, -1):
        for k in range(H):
            dh = dH_ext[t, k] + dh_rec[k]
            i = GI[t, k]
            f = GF[t, k]
            z = GZ[t, k]
            o = GO[t, k]
            c = Cs[t, k]
            c_prev = Cs[t - 1, k] if t > 0 else c0[k]
            tc = np.tanh(c)
            da_o = dh * tc * o * (1.0 - o)
            dck = dh * o * (1.0 - tc * tc) + dc[k] + po[k] * da_o
            da_i = dck * z * i * (1.0 - i)
            da_f = dck * c_prev * f * (1.0 - f)
            da_z = dck * i * (1.0 - z * z)
            dPre[t, k] = da_i
            dPre[t, H + k] = da_f
            dPre[t, 2 * H + k] = da_z
            dPre[t, 3 * H + k] = da_o
            dpi[k] += da_i * c_prev
            dpf[k] += da_f * c_prev
            dpo[k] += da_o * c
            dc[k] = dck * f + pi[k] * da_i + pf[k] * da_f
        dh_rec = np.dot(RT, dPre[t])
    return dPre, dh_rec, dc, dpi, dpf, dpo


@njit(cache=True)
def lstm_cell_forward(wx, R, pi, pf, po, h_prev, c_prev):
    H = R.shape[1]
    pre = wx + np.dot(R, h_prev)
    h = np.empty(H, dtype=wx.dtype)
    c = np.empty(H, dtype=wx.dtype)
    gi = np.empty(H, dtype=wx.dtype)
    gf = np.empty(H, dtype=wx.dtype)
    gz = np.empty(H, dtype=wx.dtype)
    go = np.empty(H, dtype=wx.dtype)
    for k in range(H):
        i = 1.0 / (1.0 + np.exp(-(pre[k] + pi[k] * c_prev[k])))
        f = 1.0 / (1.0 + np.exp(-(pre[H + k] + pf[k] * c_prev[k])))
        z = np.tanh(pre[2 * H + k])
        ck = f * c_prev[k] + i * z
        o = 1.0 / (1.0 + np.exp(-(pre[3 * H + k] + po[k] * ck)))
        gi[k] = i
        gf[k] = f
        gz[k] = z
        go[k] = o
        c[k] = ck
        h[k] = o * np.tanh(ck)
    return h, c, gi, gf, gz, go


@njit(cache=True)
def lstm_cell_backward(dh, dc_in, RT, pi, pf, po, i, f, z, o, c, c_prev):
    H = c.shape[0]
    dpre = np.empty(4 * H, dtype=dh.dtype)
    dc_prev = np.empty(H, dtype=dh.dtype)
    for k in range(H):
        tc = np.tanh(c[k])
        da_o = dh[k] * tc * o[k] * (1.0 - o[k])
        dck = dh[k] * o[k] * (1.0 - tc * tc) + dc_in[k] + po[k] * da_o
        da_i = dck * z[k] * i[k] * (1.0 - i[k])
        da_f = dck * c_prev[k] * f[k] * (1.0 - f[k])
        da_z = dck * i[k] * (1.0 - z[k] * z[k])
        dpre[k] = da_i
        dpre[H + k] = da_f
        dpre[2 * H + k] = da_z
        dpre[3 * H + k] = da_o
        dc_prev[k] = dck * f[k] + pi[k] * da_i + pf[k] * da_f
    dh_prev = np.dot(RT, dpre)
    return dpre, dh_prev, dc_prev
