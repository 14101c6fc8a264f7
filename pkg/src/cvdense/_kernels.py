"""Per-trial sampling kernels for the quadrature simulator.

Two interchangeable backends produce per-chunk moment summaries of the six
observables recorded each trial::

    0 ax, 1 ap   Alice's transmitted beam before loss
    2 sx, 3 sp   encoded signal
    4 yx, 5 yp   Bob's outcomes (x of one output port, p of the other)

The numba backend is used when numba imports and ``CVDENSE_NUMBA`` is not
set to a false value (``0``, ``false``, ``no``, ``off``).  The numpy backend
is a vectorised transcription of the same per-trial program.

Randomness is counter based: trial ``t`` of seed ``s`` owns the key
``mix(mix(s + g) + (t + 1)*g)`` and its ``j``-th uniform is
``mix(key + (j + 1)*g)``, with ``mix`` the SplitMix64 finaliser and ``g`` the
64-bit golden-ratio increment.  Any trial can be regenerated without
touching its neighbours, so chunking and thread count cannot change a draw.
"""

from __future__ import annotations

import os

import numpy as np

DENSE_CODING, COHERENT_HOMODYNE, COHERENT_HETERODYNE = 0, 1, 2
N_OBS = 6
N_NORMALS = 10
CHUNK = 1 << 16

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_M53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * np.pi


def _env_wants_numba() -> bool:
    return os.environ.get("CVDENSE_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    if not _env_wants_numba():
        raise ImportError("disabled by CVDENSE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def _mix64_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def seed_key(seed: int) -> np.uint64:
    with np.errstate(over="ignore"):
        return _mix64_np(np.uint64(seed % (1 << 64)) + GAMMA)


def _normals_np(key, start, stop):
    """Standard normals for trials ``[start, stop)``, shape ``(n, N_NORMALS)``."""
    t = np.arange(start, stop, dtype=np.uint64)
    out = np.empty((t.size, N_NORMALS))
    with np.errstate(over="ignore"):
        tk = _mix64_np(key + (t + _ONE) * GAMMA)
        for k in range(N_NORMALS // 2):
            b1 = _mix64_np(tk + np.uint64(2 * k + 1) * GAMMA)
            b2 = _mix64_np(tk + np.uint64(2 * k + 2) * GAMMA)
            u1 = ((b1 >> _S11) + _ONE).astype(np.float64) * _TWO_M53
            u2 = (b2 >> _S11).astype(np.float64) * _TWO_M53
            r = np.sqrt(-2.0 * np.log(u1))
            out[:, 2 * k] = r * np.cos(_TWO_PI * u2)
            out[:, 2 * k + 1] = r * np.sin(_TWO_PI * u2)
    return out


def observables_np(scheme, v_ne, b, eta, v_s, key, start, stop):
    """The six per-trial observables, shape ``(n, N_OBS)``."""
    z = _normals_np(key, start, stop)
    obs = np.empty((z.shape[0], N_OBS))
    rs = np.sqrt(v_s)
    ge, gl = np.sqrt(eta), np.sqrt(1.0 - eta)
    h = np.sqrt(0.5)
    sx = rs * z[:, 4]
    sp = rs * z[:, 5] if scheme != COHERENT_HOMODYNE else np.zeros_like(sx)
    if scheme == DENSE_CODING:
        sq, anti = np.sqrt(v_ne), np.sqrt(1.0 / v_ne + b)
        # amplitude-squeezed source a, phase-squeezed source c
        ax0, ap0 = sq * z[:, 0], anti * z[:, 1]
        cx0, cp0 = anti * z[:, 2], sq * z[:, 3]
        ax, ap = h * (ax0 + cx0) + sx, h * (ap0 + cp0) + sp
        ex, ep = h * (ax0 - cx0), h * (ap0 - cp0)
        lx, lp = ge * ax + gl * z[:, 6], ge * ap + gl * z[:, 7]
        ex, ep = ge * ex + gl * z[:, 8], ge * ep + gl * z[:, 9]
        yx, yp = h * (lx + ex), h * (lp - ep)
    else:
        ax, ap = z[:, 0] + sx, z[:, 1] + sp
        lx, lp = ge * ax + gl * z[:, 6], ge * ap + gl * z[:, 7]
        if scheme == COHERENT_HOMODYNE:
            yx, yp = lx, lp
        else:
            yx, yp = h * (lx + z[:, 2]), h * (lp - z[:, 3])
    obs[:, 0], obs[:, 1] = ax, ap
    obs[:, 2], obs[:, 3] = sx, sp
    obs[:, 4], obs[:, 5] = yx, yp
    return obs


def chunk_moments_np(scheme, v_ne, b, eta, v_s, key, trials, c0, c1):
    """Moment summaries for chunks ``[c0, c1)``: ``(counts, means, m2s)``."""
    nc = c1 - c0
    counts = np.zeros(nc, dtype=np.int64)
    means = np.zeros((nc, N_OBS))
    m2s = np.zeros((nc, N_OBS, N_OBS))
    for i in range(nc):
        start = (c0 + i) * CHUNK
        stop = min(start + CHUNK, trials)
        x = observables_np(scheme, v_ne, b, eta, v_s, key, start, stop)
        mu = x.mean(axis=0)
        xc = x - mu
        counts[i], means[i], m2s[i] = x.shape[0], mu, xc.T @ xc
    return counts, means, m2s


if HAVE_NUMBA:

    @njit(inline="always")
    def _mix64_nb(z):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    @njit(nogil=True, cache=True)
    def _fill_normals_nb(key, t, z):
        tk = _mix64_nb(key + (np.uint64(t) + _ONE) * GAMMA)
        for k in range(N_NORMALS // 2):
            b1 = _mix64_nb(tk + np.uint64(2 * k + 1) * GAMMA)
            b2 = _mix64_nb(tk + np.uint64(2 * k + 2) * GAMMA)
            u1 = np.float64((b1 >> _S11) + _ONE) * _TWO_M53
            u2 = np.float64(b2 >> _S11) * _TWO_M53
            r = np.sqrt(-2.0 * np.log(u1))
            z[2 * k] = r * np.cos(_TWO_PI * u2)
            z[2 * k + 1] = r * np.sin(_TWO_PI * u2)

    @njit(nogil=True, cache=True)
    def _trial_nb(scheme, v_ne, b, eta, v_s, z, obs):
        rs = np.sqrt(v_s)
        ge = np.sqrt(eta)
        gl = np.sqrt(1.0 - eta)
        h = np.sqrt(0.5)
        sx = rs * z[4]
        sp = rs * z[5] if scheme != COHERENT_HOMODYNE else 0.0
        if scheme == DENSE_CODING:
            sq = np.sqrt(v_ne)
            anti = np.sqrt(1.0 / v_ne + b)
            ax0 = sq * z[0]
            ap0 = anti * z[1]
            cx0 = anti * z[2]
            cp0 = sq * z[3]
            ax = h * (ax0 + cx0) + sx
            ap = h * (ap0 + cp0) + sp
            ex = h * (ax0 - cx0)
            ep = h * (ap0 - cp0)
            lx = ge * ax + gl * z[6]
            lp = ge * ap + gl * z[7]
            ex = ge * ex + gl * z[8]
            ep = ge * ep + gl * z[9]
            yx = h * (lx + ex)
            yp = h * (lp - ep)
        else:
            ax = z[0] + sx
            ap = z[1] + sp
            lx = ge * ax + gl * z[6]
            lp = ge * ap + gl * z[7]
            if scheme == COHERENT_HOMODYNE:
                yx = lx
                yp = lp
            else:
                yx = h * (lx + z[2])
                yp = h * (lp - z[3])
        obs[0] = ax
        obs[1] = ap
        obs[2] = sx
        obs[3] = sp
        obs[4] = yx
        obs[5] = yp

    @njit(nogil=True, cache=True)
    def normals_nb(key, start, stop):
        out = np.empty((stop - start, N_NORMALS))
        for i in range(stop - start):
            _fill_normals_nb(key, start + i, out[i])
        return out

    @njit(nogil=True, cache=True)
    def observables_nb(scheme, v_ne, b, eta, v_s, key, start, stop):
        out = np.empty((stop - start, N_OBS))
        z = np.empty(N_NORMALS)
        for i in range(stop - start):
            _fill_normals_nb(key, start + i, z)
            _trial_nb(scheme, v_ne, b, eta, v_s, z, out[i])
        return out

    @njit(nogil=True, cache=True)
    def chunk_moments_nb(scheme, v_ne, b, eta, v_s, key, trials, c0, c1):
        nc = c1 - c0
        counts = np.zeros(nc, dtype=np.int64)
        means = np.zeros((nc, N_OBS))
        m2s = np.zeros((nc, N_OBS, N_OBS))
        z = np.empty(N_NORMALS)
        obs = np.empty(N_OBS)
        d = np.empty(N_OBS)
        for c in range(nc):
            start = (c0 + c) * CHUNK
            stop = min(start + CHUNK, trials)
            mean = means[c]
            m2 = m2s[c]
            n = 0
            for t in range(start, stop):
                _fill_normals_nb(key, t, z)
                _trial_nb(scheme, v_ne, b, eta, v_s, z, obs)
                n += 1
                w = (n - 1.0) / n
                for i in range(N_OBS):
                    d[i] = obs[i] - mean[i]
                    mean[i] += d[i] / n
                for i in range(N_OBS):
                    for j in range(i, N_OBS):
                        m2[i, j] += w * d[i] * d[j]
            for i in range(N_OBS):
                for j in range(i):
                    m2[i, j] = m2[j, i]
            counts[c] = n
        return counts, means, m2s

    BACKEND = "numba"
    chunk_moments = chunk_moments_nb
    observables = observables_nb
    normals = normals_nb
else:
    BACKEND = "numpy"
    chunk_moments = chunk_moments_np
    observables = observables_np
    normals = _normals_np
