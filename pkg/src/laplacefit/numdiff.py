"""Central-difference Jacobians with a Richardson-extrapolated variant.

Used for the delta method wherever writing out a Jacobian by hand would be
error-prone; the Richardson variant exists so tests can check the plain
central differences against a higher-order estimate.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

#: cube root of machine epsilon, the standard central-difference step scale
CBRT_EPS = float(np.finfo(float).eps) ** (1.0 / 3.0)

#: coordinates smaller than this still get a step proportional to it
STEP_FLOOR = 1e-3


def _steps(x: np.ndarray, scale: float) -> np.ndarray:
    return np.maximum(np.abs(x), STEP_FLOOR) * scale


def central_diff_jacobian(
    f: Callable[[np.ndarray], Sequence[float] | np.ndarray | float],
    x: Sequence[float] | np.ndarray,
    step_scale: float = CBRT_EPS,
) -> np.ndarray:
    """Jacobian of ``f`` at ``x`` by central differences.

    The step in coordinate j is max(|x_j|, STEP_FLOOR) * step_scale. The
    result has shape (len(f(x)), len(x)); scalar-valued ``f`` gives one row.
    """
    x = np.asarray(x, dtype=float)
    h = _steps(x, step_scale)
    f0 = np.atleast_1d(np.asarray(f(x), dtype=float))
    jac = np.empty((f0.size, x.size))
    for j in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[j] += h[j]
        xm[j] -= h[j]
        fp = np.atleast_1d(np.asarray(f(xp), dtype=float))
        fm = np.atleast_1d(np.asarray(f(xm), dtype=float))
        jac[:, j] = (fp - fm) / (2.0 * h[j])
    return jac


def central_diff_gradient(
    f: Callable[[np.ndarray], float],
    x: Sequence[float] | np.ndarray,
    step_scale: float = CBRT_EPS,
) -> np.ndarray:
    """Gradient of a scalar map as a flat array."""
    return central_diff_jacobian(f, x, step_scale=step_scale)[0]


def richardson_jacobian(
    f: Callable[[np.ndarray], Sequence[float] | np.ndarray | float],
    x: Sequence[float] | np.ndarray,
    step_scale: float = CBRT_EPS,
) -> np.ndarray:
    """Richardson extrapolation of the central difference over steps h and h/2.

    Central differences have error O(h^2), so (4*D(h/2) - D(h)) / 3 cancels
    the leading term and is accurate to O(h^4).
    """
    coarse = central_diff_jacobian(f, x, step_scale=step_scale)
    fine = central_diff_jacobian(f, x, step_scale=0.5 * step_scale)
    return (4.0 * fine - coarse) / 3.0
