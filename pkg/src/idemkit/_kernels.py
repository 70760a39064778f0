"""Hot loops for mesh-by-angle sweeps.

Each kernel has a numba version and a vectorised numpy version with the same
signature. The numba path is used when numba imports and the environment
variable ``IDEMKIT_DISABLE_NUMBA`` is unset or ``0``. ``IDEMKIT_THREADS`` caps
the numba thread pool.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("IDEMKIT_DISABLE_NUMBA", "0") in ("", "0")


if HAVE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old for numba and only produces a warning
    numba.config.THREADING_LAYER = "workqueue"


def _apply_thread_cap():
    raw = os.environ.get("IDEMKIT_THREADS")
    if not (HAVE_NUMBA and raw):
        return
    try:
        n = int(raw)
    except ValueError:
        return
    if n >= 1:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


_apply_thread_cap()


def hermitian_parts(blocks):
    """Split stacked 2x2 blocks f into H = Re f and K = Im f, each as (p, s, q).

    Re(e^{-ia} f) = cos(a) H + sin(a) K, and a Hermitian 2x2 [[p, q], [conj q, s]]
    is fully described by the two real diagonals and the complex off-diagonal.
    """
    f = np.asarray(blocks, dtype=complex)
    fh = np.conj(np.swapaxes(f, -1, -2))
    H = 0.5 * (f + fh)
    K = -0.5j * (f - fh)
    return (H[:, 0, 0].real.copy(), H[:, 1, 1].real.copy(), H[:, 0, 1].copy(),
            K[:, 0, 0].real.copy(), K[:, 1, 1].real.copy(), K[:, 0, 1].copy())


# --- top eigenvalue of Re(e^{-ia} f_t), maximised over t --------------------

def grid_support_numpy(hp, hs, hq, kp, ks, kq, angles):
    c = np.cos(angles)[:, None]
    s = np.sin(angles)[:, None]
    p = c * hp[None, :] + s * kp[None, :]
    r = c * hs[None, :] + s * ks[None, :]
    z = c * hq[None, :] + s * kq[None, :]
    lam = 0.5 * (p + r) + np.sqrt(0.25 * (p - r) ** 2 + z.real ** 2 + z.imag ** 2)
    idx = np.argmax(lam, axis=1)
    return lam[np.arange(lam.shape[0]), idx], idx.astype(np.int64)


def _grid_support_loop(hp, hs, hq, kp, ks, kq, angles):
    m = angles.shape[0]
    n = hp.shape[0]
    vals = np.empty(m)
    idx = np.zeros(m, dtype=np.int64)
    for j in _prange(m):
        c = np.cos(angles[j])
        s = np.sin(angles[j])
        best = -np.inf
        bi = 0
        for i in range(n):
            p = c * hp[i] + s * kp[i]
            r = c * hs[i] + s * ks[i]
            zr = c * hq[i].real + s * kq[i].real
            zi = c * hq[i].imag + s * kq[i].imag
            lam = 0.5 * (p + r) + np.sqrt(0.25 * (p - r) ** 2 + zr * zr + zi * zi)
            if lam > best:
                best = lam
                bi = i
        vals[j] = best
        idx[j] = bi
    return vals, idx


# --- per-t support of the S_r blocks, maximised over a t sample ------------

def sr_scan_numpy(d, ts, cos_a):
    t = ts[None, :]
    c = cos_a[:, None]
    rad = np.maximum((t - 1.0) * (d - t), 0.0) + (2.0 * (d - 1.0) * t * c) ** 2
    h = (d * t - 2.0 * d + 1.0) * c + 0.5 * np.sqrt(rad)
    idx = np.argmax(h, axis=1)
    return h[np.arange(h.shape[0]), idx], idx.astype(np.int64)


def _sr_scan_loop(d, ts, cos_a):
    m = cos_a.shape[0]
    n = ts.shape[0]
    vals = np.empty(m)
    idx = np.zeros(m, dtype=np.int64)
    for j in _prange(m):
        c = cos_a[j]
        best = -np.inf
        bi = 0
        for i in range(n):
            t = ts[i]
            g = (t - 1.0) * (d - t)
            if g < 0.0:
                g = 0.0
            w = 2.0 * (d - 1.0) * t * c
            h = (d * t - 2.0 * d + 1.0) * c + 0.5 * np.sqrt(g + w * w)
            if h > best:
                best = h
                bi = i
        vals[j] = best
        idx[j] = bi
    return vals, idx


if HAVE_NUMBA:
    _prange = numba.prange
    grid_support_numba = numba.njit(parallel=True, cache=True)(_grid_support_loop)
    sr_scan_numba = numba.njit(parallel=True, cache=True)(_sr_scan_loop)
else:  # pragma: no cover
    _prange = range
    grid_support_numba = None
    sr_scan_numba = None


def grid_support(blocks, angles):
    """(max_t h_t(a), argmax t) for every angle a, h_t the top eigenvalue of Re(e^{-ia} f_t)."""
    parts = hermitian_parts(blocks)
    angles = np.ascontiguousarray(angles, dtype=float)
    fn = grid_support_numba if USE_NUMBA else grid_support_numpy
    return fn(*parts, angles)


def sr_scan(d, ts, cos_a):
    ts = np.ascontiguousarray(ts, dtype=float)
    cos_a = np.ascontiguousarray(cos_a, dtype=float)
    fn = sr_scan_numba if USE_NUMBA else sr_scan_numpy
    return fn(float(d), ts, cos_a)
