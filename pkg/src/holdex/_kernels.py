"""Hot loops behind the semi-norm and MPHE computations.

Every kernel exists twice: a numba ``@njit`` loop and a pure-numpy
implementation.  Both agree bit for bit with a plain Python evaluation.  The
numpy side uses ``float_power`` rather than ``**``: on AVX-512 hosts ``power``
dispatches to a vectorised routine that can differ from the C library ``pow``
in the last bit.  The numba path is used when numba imports and
``HOLDEX_DISABLE_JIT`` is not set to a truthy value.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

try:  # pragma: no cover - exercised implicitly by whichever path is installed
    import numba
except ImportError:  # pragma: no cover
    numba = None


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


JIT_DISABLED = _env_flag("HOLDEX_DISABLE_JIT")
USE_NUMBA = numba is not None and not JIT_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"

_CHUNK = 4096


def _jit(func):
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# pair tables
# ---------------------------------------------------------------------------

def pair_table(values: np.ndarray, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Absolute value differences and time gaps for all pairs i < j."""
    i, j = np.triu_indices(values.shape[0], 1)
    return np.abs(values[j] - values[i]), times[j] - times[i]


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

@_jit
def _pairs_nb(values, times):
    m = values.shape[0]
    npairs = m * (m - 1) // 2
    dx = np.empty(npairs)
    gap = np.empty(npairs)
    p = 0
    for i in range(m - 1):
        for j in range(i + 1, m):
            dx[p] = abs(values[j] - values[i])
            gap[p] = times[j] - times[i]
            p += 1
    return dx, gap


@_jit
def _max_ratio_nb(dx, gap, beta):
    best = 0.0
    for p in range(dx.shape[0]):
        r = dx[p] / gap[p] ** beta
        if r > best:
            best = r
    return best


@_jit
def _curve_nb(values, times, betas):
    dx, gap = _pairs_nb(values, times)
    out = np.empty(betas.shape[0])
    for k in range(betas.shape[0]):
        out[k] = _max_ratio_nb(dx, gap, betas[k])
    return out


@_jit
def _reaches_nb(dx, gap, beta, c_ref):
    for p in range(dx.shape[0]):
        if dx[p] / gap[p] ** beta >= c_ref:
            return True
    return False


@_jit
def _first_reach_nb(values, times, betas, c_ref):
    # C(beta) is nondecreasing in beta (gaps <= 1, libm pow is monotone), so
    # bisection finds the same first index as a linear scan.
    dx, gap = _pairs_nb(values, times)
    lo = 0
    hi = betas.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if _reaches_nb(dx, gap, betas[mid], c_ref):
            hi = mid
        else:
            lo = mid + 1
    return lo if lo < betas.shape[0] else -1


@_jit
def _reference_nb(values, times, start, block, n_blocks, alpha):
    acc = 0.0
    for j in range(n_blocks):
        lo = start + j * block
        dx, gap = _pairs_nb(values[lo:lo + block], times[lo:lo + block])
        acc += _max_ratio_nb(dx, gap, alpha)
    return acc / n_blocks


@_jit
def _mphe_nb(values, times, centers, lo_off, width, betas, alpha, block, n_blocks, cap):
    out = np.empty(centers.shape[0])
    span = block * n_blocks
    for c in range(centers.shape[0]):
        lo = centers[c] + lo_off
        c_ref = _reference_nb(values, times, lo - span, block, n_blocks, alpha)
        k = _first_reach_nb(values[lo:lo + width], times[lo:lo + width], betas, c_ref)
        out[c] = cap if k < 0 else betas[k]
    return out


@_jit
def _ema_nb(x, lam):
    out = np.empty(x.shape[0])
    out[0] = x[0]
    keep = 1.0 - lam
    for t in range(1, x.shape[0]):
        out[t] = lam * x[t] + keep * out[t - 1]
    return out


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------

def _curve_np(values, times, betas):
    dx, gap = pair_table(values, times)
    return (dx[None, :] / np.float_power(gap[None, :], betas[:, None])).max(axis=1)


def _first_reach_np(values, times, betas, c_ref):
    dx, gap = pair_table(values, times)
    for k, b in enumerate(betas):
        if (dx / np.float_power(gap, b)).max() >= c_ref:
            return k
    return -1


def _window_pairs(values, times, starts, width):
    """Pair tables for many windows at once, shape (len(starts), npairs)."""
    wv = sliding_window_view(values, width)[starts]
    wt = sliding_window_view(times, width)[starts]
    i, j = np.triu_indices(width, 1)
    return np.abs(wv[:, j] - wv[:, i]), wt[:, j] - wt[:, i]


def _reference_np(values, times, starts, block, n_blocks, alpha):
    acc = np.zeros(len(starts))
    for j in range(n_blocks):
        dx, gap = _window_pairs(values, times, starts + j * block, block)
        acc = acc + (dx / np.float_power(gap, alpha)).max(axis=1)
    return acc / n_blocks


def _mphe_np(values, times, centers, lo_off, width, betas, alpha, block, n_blocks, cap):
    out = np.empty(len(centers))
    span = block * n_blocks
    for c0 in range(0, len(centers), _CHUNK):
        lo = centers[c0:c0 + _CHUNK] + lo_off
        c_ref = _reference_np(values, times, lo - span, block, n_blocks, alpha)
        dx, gap = _window_pairs(values, times, lo, width)
        res = np.full(len(lo), cap)
        open_ = np.ones(len(lo), dtype=bool)
        for b in betas:
            idx = open_.nonzero()[0]
            if idx.size == 0:
                break
            reached = (dx[idx] / np.float_power(gap[idx], b)).max(axis=1) >= c_ref[idx]
            res[idx[reached]] = b
            open_[idx[reached]] = False
        out[c0:c0 + _CHUNK] = res
    return out


def _ema_np(x, lam):
    out = np.empty(x.shape[0])
    out[0] = x[0]
    keep = 1.0 - lam
    for t in range(1, x.shape[0]):
        out[t] = lam * x[t] + keep * out[t - 1]
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

NUMBA_KERNELS = {
    "curve": _curve_nb,
    "first_reach": _first_reach_nb,
    "mphe": _mphe_nb,
    "ema": _ema_nb,
}
NUMPY_KERNELS = {
    "curve": _curve_np,
    "first_reach": _first_reach_np,
    "mphe": _mphe_np,
    "ema": _ema_np,
}
_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS


def curve(values, times, betas):
    return _ACTIVE["curve"](values, times, betas)


def first_reach(values, times, betas, c_ref):
    return int(_ACTIVE["first_reach"](values, times, betas, float(c_ref)))


def reference(values, times, start, block, n_blocks, alpha):
    if USE_NUMBA:
        return float(_reference_nb(values, times, start, block, n_blocks, alpha))
    starts = np.array([start], dtype=np.int64)
    return float(_reference_np(values, times, starts, block, n_blocks, alpha)[0])


def mphe(values, times, centers, lo_off, width, betas, alpha, block, n_blocks, cap):
    return _ACTIVE["mphe"](values, times, centers, int(lo_off), int(width), betas,
                           float(alpha), int(block), int(n_blocks), float(cap))


def ema(x, lam):
    return _ACTIVE["ema"](x, float(lam))
