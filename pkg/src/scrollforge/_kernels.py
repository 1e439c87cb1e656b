"""numba kernels over the flat array form of a PWLSystem (``PWLSystem.compiled``).

Arithmetic mirrors the pure-Python reference path expression for expression,
so both routes produce identical floats.
"""
import numpy as np
from numba import njit

OK = 0
NO_REGION = 1
DIVERGED = 2


@njit(cache=True)
def field(x, sysarr, out):
    """Write the field at ``x`` into ``out``; return the piece index or -1."""
    normals, offsets, tols, cplane, cmask, start, a, b = sysarr
    nplanes = offsets.shape[0]
    side = np.empty(nplanes, dtype=np.int64)
    for p in range(nplanes):
        g = normals[p, 0] * x[0] + normals[p, 1] * x[1] + normals[p, 2] * x[2] - offsets[p]
        if abs(g) <= tols[p]:
            side[p] = 2
        elif g > tols[p]:
            side[p] = 4
        else:
            side[p] = 1
    for k in range(start.shape[0] - 1):
        ok = True
        for c in range(start[k], start[k + 1]):
            if (side[cplane[c]] & cmask[c]) == 0:
                ok = False
                break
        if ok:
            for i in range(3):
                out[i] = a[k, i, 0] * x[0] + a[k, i, 1] * x[1] + a[k, i, 2] * x[2] + b[k, i]
            return k
    return -1


@njit(cache=True)
def rk4_step(x, h, sysarr, xn, fail):
    """Classical RK4 step from ``x`` into ``xn``; on dispatch failure the
    offending stage point goes into ``fail`` and NO_REGION is returned."""
    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    y = np.empty(3)
    if field(x, sysarr, k1) < 0:
        fail[:] = x
        return NO_REGION
    for i in range(3):
        y[i] = x[i] + h / 2.0 * k1[i]
    if field(y, sysarr, k2) < 0:
        fail[:] = y
        return NO_REGION
    for i in range(3):
        y[i] = x[i] + h / 2.0 * k2[i]
    if field(y, sysarr, k3) < 0:
        fail[:] = y
        return NO_REGION
    for i in range(3):
        y[i] = x[i] + h * k3[i]
    if field(y, sysarr, k4) < 0:
        fail[:] = y
        return NO_REGION
    for i in range(3):
        xn[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return OK


@njit(cache=True)
def _out_of_bounds(x, bound):
    for i in range(3):
        if not (abs(x[i]) <= bound):
            return True
    return False


@njit(cache=True)
def integrate(x0, n_steps, h, stride, bound, sysarr):
    """Returns (samples, status, failed_step, failed_state)."""
    n_samples = n_steps // stride + 1
    samples = np.empty((n_samples, 3))
    x = x0.copy()
    xn = np.empty(3)
    fail = np.zeros(3)
    samples[0] = x
    j = 1
    for step in range(1, n_steps + 1):
        status = rk4_step(x, h, sysarr, xn, fail)
        if status != OK:
            return samples[:j], status, step, fail
        x[:] = xn
        if _out_of_bounds(x, bound):
            return samples[:j], DIVERGED, step, x
        if step % stride == 0:
            samples[j] = x
            j += 1
    return samples, OK, n_steps, fail


@njit(cache=True)
def benettin(x0, n_transient, n_steps, h, d0, every, direction, bound, sysarr):
    """Two-orbit separation growth with renormalisation every ``every`` steps.

    Returns (log_sum, running, status, failed_step): ``running[i]`` is the
    estimate after the i-th renormalisation.
    """
    x = x0.copy()
    xn = np.empty(3)
    fail = np.zeros(3)
    n_renorm = n_steps // every
    running = np.empty(n_renorm)
    for step in range(n_transient):
        status = rk4_step(x, h, sysarr, xn, fail)
        if status != OK:
            return 0.0, running[:0], status, step + 1
        x[:] = xn
        if _out_of_bounds(x, bound):
            return 0.0, running[:0], DIVERGED, step + 1
    y = x + d0 * direction
    yn = np.empty(3)
    log_sum = 0.0
    r = 0
    for step in range(1, n_renorm * every + 1):
        status = rk4_step(x, h, sysarr, xn, fail)
        if status == OK:
            status = rk4_step(y, h, sysarr, yn, fail)
        if status != OK:
            return log_sum, running[:r], status, n_transient + step
        x[:] = xn
        y[:] = yn
        if _out_of_bounds(x, bound) or _out_of_bounds(y, bound):
            return log_sum, running[:r], DIVERGED, n_transient + step
        if step % every == 0:
            d = np.sqrt((y[0] - x[0]) ** 2 + (y[1] - x[1]) ** 2 + (y[2] - x[2]) ** 2)
            if d == 0.0:
                # orbits merged below float resolution: restart the offset,
                # interval contributes nothing
                for i in range(3):
                    y[i] = x[i] + d0 * direction[i]
            else:
                log_sum += np.log(d / d0)
                for i in range(3):
                    y[i] = x[i] + (y[i] - x[i]) * (d0 / d)
            running[r] = log_sum / (step * h)
            r += 1
    return log_sum, running, OK, n_transient + n_renorm * every


@njit(cache=True)
def dispatch_many(points, sysarr):
    """Piece index (or -1) for each row of ``points``."""
    out = np.empty(points.shape[0], dtype=np.int64)
    buf = np.empty(3)
    for i in range(points.shape[0]):
        out[i] = field(points[i], sysarr, buf)
    return out
