"""Compiled kernels for ``(M x) mod 1`` with exact-integer matrices.

Entries of ``M`` may be far larger than ``2**53``. Each entry is split into
signed 26-bit limbs; every limb product with a double ``x`` is formed
exactly with a Dekker two-product, scaled by an exact power of two and
reduced mod 1 before accumulation, so the result is accurate to a few ulps
of 1 whatever the size of ``M``.
"""

from __future__ import annotations

import numba as nb
import numpy as np

LIMB_BITS = 26
_SPLIT = 134217729.0  # 2**27 + 1


def to_limbs(rows) -> np.ndarray:
    """Split an integer matrix into limbs, shape ``(d, d, K)``, least significant first."""
    d = len(rows)
    mags = [abs(int(v)) for r in rows for v in r]
    K = max(1, max((m.bit_length() + LIMB_BITS - 1) // LIMB_BITS for m in mags))
    if K * LIMB_BITS > 1000:
        raise OverflowError("matrix entries too large for limb scaling")
    out = np.zeros((d, d, K), dtype=np.float64)
    mask = (1 << LIMB_BITS) - 1
    for i in range(d):
        for j in range(d):
            v = int(rows[i][j])
            s = -1.0 if v < 0 else 1.0
            m = abs(v)
            for k in range(K):
                out[i, j, k] = s * float((m >> (LIMB_BITS * k)) & mask)
    return out


@nb.njit(cache=True, nogil=True, inline="always")
def _two_prod(a, b):
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@nb.njit(cache=True, nogil=True)
def disp_row(limbs, x, y):
    """Write ``(M x) mod 1`` centered into ``[-1/2, 1/2)`` for one point into ``y``."""
    d = x.shape[0]
    K = limbs.shape[2]
    for i in range(d):
        acc = 0.0
        for j in range(d):
            xj = x[j]
            scale = 1.0
            for k in range(K):
                c = limbs[i, j, k]
                if c != 0.0:
                    p, e = _two_prod(c, xj)
                    p *= scale
                    e *= scale
                    p -= np.rint(p)
                    e -= np.rint(e)
                    acc += p + e
                    acc -= np.rint(acc)
                scale *= 67108864.0  # 2**26
        acc -= np.floor(acc + 0.5)
        y[i] = acc


@nb.njit(cache=True, nogil=True)
def displacement(limbs, X):
    """Return ``Y = (M X) mod 1`` centered into ``[-1/2, 1/2)``, row-wise."""
    N, d = X.shape
    Y = np.empty((N, d))
    for t in range(N):
        disp_row(limbs, X[t], Y[t])
    return Y


@nb.njit(cache=True, nogil=True)
def classify_ball(Y, r, guard):
    """1 if ``|y| < r - guard``, 0 if ``|y| > r + guard``, else 2 (uncertain)."""
    N, d = Y.shape
    out = np.empty(N, dtype=np.int8)
    for t in range(N):
        s = 0.0
        for i in range(d):
            s += Y[t, i] * Y[t, i]
        dist = np.sqrt(s)
        if dist < r - guard:
            out[t] = 1
        elif dist > r + guard:
            out[t] = 0
        else:
            out[t] = 2
    return out


@nb.njit(cache=True, nogil=True)
def classify_box(Y, Winv, half, guard):
    """Same codes for ``max_k |(Winv y)_k| / half_k`` against 1."""
    N, d = Y.shape
    out = np.empty(N, dtype=np.int8)
    for t in range(N):
        inside = True
        border = False
        for k in range(d):
            z = 0.0
            for i in range(d):
                z += Winv[k, i] * Y[t, i]
            a = abs(z)
            if a > half[k] + guard:
                inside = False
                border = False
                break
            if a >= half[k] - guard:
                border = True
        if not inside:
            out[t] = 0
        elif border:
            out[t] = 2
        else:
            out[t] = 1
    return out


REL_BITS = 21
REL_BIAS = 1 << (REL_BITS - 1)


@nb.njit(cache=True, nogil=True)
def component_boxes(centers, W, extent, step, limbs, r, guard, j):
    """Dyadic boxes of side ``2^-j`` holding a member probe, component by component.

    Probes sit on the lattice ``c + sum_k t_k step_k W[:, k]`` with
    ``|t_k step_k| <= extent_k``. A probe is a member when its displacement
    norm is below ``r - guard``; probes inside the guard band are tallied
    as uncertain and not counted. Boxes are deduplicated within each
    component; the caller removes duplicates shared by neighbours.

    Returns ``(boxes, n_probes, n_uncertain)`` with ``boxes`` of shape
    ``(B, d)`` holding global box indices in ``[0, 2^j)``.
    """
    H, d = centers.shape
    nk = np.empty(d, dtype=np.int64)
    P = 1
    for k in range(d):
        nk[k] = int(np.floor(extent[k] / step[k]))
        P *= 2 * nk[k] + 1
    scale = 2.0**j
    period = np.int64(1) << np.int64(j)
    buf = np.empty(P, dtype=np.int64)
    cap = max(16, 4 * H)
    out = np.empty((cap, d), dtype=np.int64)
    nout = 0
    x = np.empty(d)
    xw = np.empty(d)
    y = np.empty(d)
    cbox = np.empty(d, dtype=np.int64)
    idx = np.empty(d, dtype=np.int64)
    n_unc = 0
    r_in = r - guard
    r_out = r + guard
    for h in range(H):
        for k in range(d):
            cbox[k] = np.int64(np.floor(centers[h, k] * scale))
        m = 0
        for p in range(P):
            q = p
            for k in range(d):
                idx[k] = q % (2 * nk[k] + 1) - nk[k]
                q //= 2 * nk[k] + 1
            for i in range(d):
                s = centers[h, i]
                for k in range(d):
                    s += idx[k] * step[k] * W[i, k]
                x[i] = s
                xw[i] = s - np.floor(s)
            disp_row(limbs, xw, y)
            nrm = 0.0
            for i in range(d):
                nrm += y[i] * y[i]
            nrm = np.sqrt(nrm)
            if nrm < r_in:
                key = np.int64(0)
                for i in range(d):
                    rel = np.int64(np.floor(x[i] * scale)) - cbox[i] + REL_BIAS
                    key |= rel << np.int64(REL_BITS * i)
                buf[m] = key
                m += 1
            elif nrm <= r_out:
                n_unc += 1
        if m == 0:
            continue
        keys = np.unique(buf[:m])
        if nout + keys.shape[0] > cap:
            while nout + keys.shape[0] > cap:
                cap *= 2
            grown = np.empty((cap, d), dtype=np.int64)
            grown[:nout] = out[:nout]
            out = grown
        mask = (np.int64(1) << np.int64(REL_BITS)) - 1
        for t in range(keys.shape[0]):
            kk = keys[t]
            for i in range(d):
                rel = ((kk >> np.int64(REL_BITS * i)) & mask) - REL_BIAS
                out[nout, i] = (cbox[i] + rel) % period
            nout += 1
    return out[:nout], np.int64(H) * P, n_unc


@nb.njit(cache=True, nogil=True)
def union_box_count(limbs_stack, radii, j, probes, guard):
    """Boxes of side ``2^-j`` with a probe in the union of several level sets.

    Each box of the full ``2^{j d}`` grid is probed on a ``probes^d``
    centered subgrid; ``limbs_stack[l]`` and ``radii[l]`` describe level
    ``l``. Returns ``(occupied, n_uncertain_probes)``.
    """
    nl = limbs_stack.shape[0]
    d = limbs_stack.shape[1]
    side = np.int64(1) << np.int64(j)
    nbox = side**d
    per = probes**d
    delta = 1.0 / side
    x = np.empty(d)
    y = np.empty(d)
    occupied = 0
    n_unc = 0
    for b in range(nbox):
        q = b
        corner = np.empty(d)
        for i in range(d):
            corner[i] = (q % side) * delta
            q //= side
        hit = False
        for p in range(per):
            qq = p
            for i in range(d):
                x[i] = corner[i] + ((qq % probes) + 0.5) * delta / probes
                qq //= probes
            for l in range(nl):
                disp_row(limbs_stack[l], x, y)
                nrm = 0.0
                for i in range(d):
                    nrm += y[i] * y[i]
                nrm = np.sqrt(nrm)
                if nrm < radii[l] - guard:
                    hit = True
                    break
                if nrm <= radii[l] + guard:
                    n_unc += 1
            if hit:
                break
        if hit:
            occupied += 1
    return occupied, n_unc
