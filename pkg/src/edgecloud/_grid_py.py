"""NumPy implementation of the brute-force grid enumeration.

Mirrors ``_grid_core.enumerate_grid`` operation for operation so both
backends agree bit for bit, including the tie-break on the first maximum.
"""

import numpy as np


def _joint(L, S, beta):
    with np.errstate(divide="ignore", invalid="ignore"):
        den = (1.0 - beta) * L + beta * S
        val = np.where(den <= 0.0, 0.0, L * S / den)
    val = np.where(beta >= 1.0, L, val)
    return np.where(beta <= 0.0, S, val)


def enumerate_grid(betas, b_ups, ms, h_vals, levels, g_vals,
                   n_frames, feature_bits, pixels, se_up, se_down, bandwidth):
    betas = np.ascontiguousarray(betas, dtype=float)
    b_ups = np.ascontiguousarray(b_ups, dtype=float)
    ms = np.ascontiguousarray(ms, dtype=float)
    h_vals = np.ascontiguousarray(h_vals, dtype=float)
    levels = np.ascontiguousarray(levels, dtype=float)
    g_vals = np.ascontiguousarray(g_vals, dtype=float)

    up_ok = (b_ups >= 0.0) & (b_ups <= bandwidth)
    cap_up = b_ups * se_up
    cap_down = (bandwidth - b_ups) * se_down
    # (up, m) feasibility of the downlink, shape (nu, nm)
    down_ok = up_ok[:, None] & (ms[None, :] <= cap_down[:, None])

    best, idx = -1.0, (-1, -1, -1, -1)
    for i, beta in enumerate(betas):
        load = beta * n_frames * (feature_bits + pixels * levels)        # (nl,)
        level_ok = load[None, :] <= cap_up[:, None]                      # (nu, nl)
        ok = down_ok[:, :, None] & level_ok[:, None, :]                  # (nu, nm, nl)
        if not ok.any():
            continue
        vals = _joint(g_vals[None, None, :], h_vals[None, :, None], beta)
        vals = np.where(ok, np.broadcast_to(vals, ok.shape), -np.inf)
        flat = int(np.argmax(vals))
        v = float(vals.flat[flat])
        if v > best:
            j, k, l = np.unravel_index(flat, ok.shape)
            best, idx = v, (i, int(j), int(k), int(l))
    return (best,) + idx
