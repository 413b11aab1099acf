"""Central finite differences for scalar and vector maps of flat arrays."""

import numpy as np

DEFAULT_STEP = 1e-6


def gradient(fun, x, step=DEFAULT_STEP):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        out[i] = (fun(x + e) - fun(x - e)) / (2.0 * step)
    return out


def jacobian(fun, x, step=DEFAULT_STEP):
    """Central-difference Jacobian, shape (len(fun(x)), len(x))."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((np.asarray(fun(x + e), float) - np.asarray(fun(x - e), float)) / (2.0 * step))
    if not cols:
        m = np.asarray(fun(x), float).size
        return np.zeros((m, 0))
    return np.column_stack(cols)


def forward_jacobian(fun, x, f0=None, step=1e-7):
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(fun(x), float) if f0 is None else f0
    J = np.empty((f0.size, x.size))
    for i in range(x.size):
        e = np.zeros_like(x)
        # scale with |x_i| so large coordinates keep a usable step
        e[i] = step * max(1.0, abs(x[i]))
        J[:, i] = (np.asarray(fun(x + e), float) - f0) / e[i]
    return J


def directional(fun, x, v, step=DEFAULT_STEP):
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    return (fun(x + step * v) - fun(x - step * v)) / (2.0 * step)
