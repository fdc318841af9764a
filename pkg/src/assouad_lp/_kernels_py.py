"""Pure numpy implementation of the ball-mass kernels.

Both kernels return natural logarithms of masses, ``-inf`` for an empty
intersection. They are the reference against which the compiled kernels in
``_kernels.pyx`` are tested.
"""
import numpy as np

LOG2 = np.log(2.0)
# plateaus narrower than this are treated as points (all-or-nothing overlap)
POINT_RADIUS = 2.0 ** -900


def _offsets(xs, offset):
    if offset is None:
        return np.zeros(xs.shape)
    return np.broadcast_to(np.asarray(offset, dtype=float), xs.shape)


def segment_log_ball(xs, r, lo, hi, anchor, sign, logc, alpha, offset=None):
    """Log mass of ``[x - r, x + r]`` under a piecewise power density.

    Segment ``j`` carries density ``exp(logc[j]) * t**alpha[j]`` on
    ``[lo[j], hi[j]]`` where ``t = sign[j] * (y - anchor[j]) >= 0``.
    Widths and distances are formed from differences relative to the
    segment endpoints and anchor, never from ``x + r``, so balls much
    smaller than ``ulp(x)`` keep full relative accuracy. The optional
    ``offset`` moves each centre to ``x + offset`` without rounding the sum,
    so a centre a sub-ulp distance away from a breakpoint stays distinct.
    """
    xs = np.asarray(xs, dtype=float)
    off = _offsets(xs, offset)
    out = np.full(xs.shape, -np.inf)
    for j in range(len(lo)):
        if logc[j] == -np.inf:
            continue
        above, below = (hi[j] - xs) - off, (xs - lo[j]) + off
        # a covered segment keeps its exact length, however far x is
        w = np.where((above <= r) & (below <= r), hi[j] - lo[j],
                     np.minimum(above, r) + np.minimum(below, r))
        if sign[j] > 0:
            t_hi = np.minimum(hi[j] - anchor[j], ((xs - anchor[j]) + off) + r)
        else:
            t_hi = np.minimum(anchor[j] - lo[j], ((anchor[j] - xs) - off) + r)
        ok = (w > 0) & (t_hi > 0)
        if not ok.any():
            continue
        wk = np.minimum(w[ok], t_hi[ok])
        tk = t_hi[ok]
        beta = alpha[j] + 1.0
        frac = wk / tk
        tail = np.zeros_like(frac)
        part = frac < 1.0
        tail[part] = np.log(-np.expm1(beta * np.log1p(-frac[part])))
        val = logc[j] - np.log(beta) + beta * np.log(tk) + tail
        out[ok] = np.logaddexp(out[ok], val)
    return out


def _overlap(d, r, rho):
    """Length of ``[d - r, d + r]`` inside ``[-rho, rho]``.

    Containment in either direction is decided first, so a plateau much
    smaller than ``|d|`` keeps its full length ``2 rho`` and a ball much
    smaller than the plateau keeps ``2 r``. Only a genuine edge crossing uses
    ``r + (rho - |d|)``, where ``rho - |d|`` is exact when the two are close.
    """
    a = np.abs(d)
    edge = np.maximum(r + (rho - a), 0.0)
    return np.where(a + rho <= r, 2.0 * rho, np.where(a + r <= rho, 2.0 * r, edge))


def _plateau_log_overlap(d, r, rho, log_rho):
    """Log length of ``[d - r, d + r]`` intersected with ``[-rho, rho]``."""
    ov = _overlap(d, r, rho)
    with np.errstate(divide="ignore"):
        out = np.where(ov > 0, np.log(np.maximum(ov, 0.0)), -np.inf)
    tiny = rho < POINT_RADIUS
    if np.any(tiny):
        hit = np.abs(d) <= r
        pt = np.where(hit, LOG2 + log_rho, -np.inf)
        out = np.where(tiny, pt, out)
    return out


def block_log_ball(xs, r, center, rho_in, rho_out, log_rho_in, log_rho_out,
                   log_h_in, log_h_out, offset=None):
    """Log mass of ``[x - r, x + r]`` under a family of two-plateau blocks.

    Dense evaluation over every block; O(n * K). Block ``i`` has height
    ``exp(log_h_in[i])`` on ``|y - center[i]| <= rho_in[i]`` and
    ``exp(log_h_out[i])`` on ``rho_in[i] < |y - center[i]| <= rho_out[i]``.
    ``offset`` has the same meaning as in ``segment_log_ball``.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    d = (xs[:, None] - center[None, :]) + _offsets(xs, offset)[:, None]
    l_in = _plateau_log_overlap(d, r, rho_in[None, :], log_rho_in[None, :])
    ann = _overlap(d, r, rho_out[None, :]) - _overlap(d, r, rho_in[None, :])
    with np.errstate(divide="ignore"):
        l_ann = np.where(ann > 0, np.log(np.maximum(ann, 0.0)), -np.inf)
    terms = np.logaddexp(log_h_in[None, :] + l_in, log_h_out[None, :] + l_ann)
    top = terms.max(axis=1)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        total = safe + np.log(np.exp(terms - safe[:, None]).sum(axis=1))
    return np.where(np.isfinite(top), total, -np.inf)
