"""Reference-element shape functions on the square [-1, 1]^2.

Q1: bilinear nodal basis, node order (-1,-1), (1,-1), (1,1), (-1,1).
BFS: bicubic Hermite basis with four degrees of freedom per node
(value, d/dxi, d/deta, d2/dxi deta), node-major ordering.
"""

from __future__ import annotations

import numpy as np

#: Reference corner coordinates shared by Q1 and BFS, counterclockwise.
CORNERS = ((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0))


def q1_shape(xi: float, eta: float) -> np.ndarray:
    return 0.25 * np.array(
        [(1 - xi) * (1 - eta), (1 + xi) * (1 - eta), (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)]
    )


def q1_grad(xi: float, eta: float) -> np.ndarray:
    """(4, 2) array of d/dxi, d/deta of the bilinear basis."""
    return 0.25 * np.array(
        [
            [-(1 - eta), -(1 - xi)],
            [(1 - eta), -(1 + xi)],
            [(1 + eta), (1 + xi)],
            [-(1 + eta), (1 - xi)],
        ]
    )


def _hermite_1d(x: float):
    """Cubic Hermite basis on [-1, 1] with unit value/derivative DOFs.

    Returns (values, first, second) for the four functions ordered
    [value at -1, slope at -1, value at +1, slope at +1].
    """
    t = 0.5 * (x + 1.0)
    v = np.array(
        [
            2 * t**3 - 3 * t**2 + 1,
            2 * (t**3 - 2 * t**2 + t),
            -2 * t**3 + 3 * t**2,
            2 * (t**3 - t**2),
        ]
    )
    # d/dx = (1/2) d/dt
    d = 0.5 * np.array(
        [6 * t**2 - 6 * t, 2 * (3 * t**2 - 4 * t + 1), -6 * t**2 + 6 * t, 2 * (3 * t**2 - 2 * t)]
    )
    dd = 0.25 * np.array([12 * t - 6, 2 * (6 * t - 4), -12 * t + 6, 2 * (6 * t - 2)])
    return v, d, dd


# Per corner: (index of value fn, index of slope fn) into the 1D Hermite set.
_H_IDX = {-1.0: (0, 1), 1.0: (2, 3)}


def bfs_shape(xi: float, eta: float):
    """Bicubic Hermite basis: values (16,), gradients (16, 2) and second
    derivatives (16, 3) ordered [d2/dxi2, d2/deta2, d2/dxi deta]."""
    vx, dx, ddx = _hermite_1d(xi)
    vy, dy, ddy = _hermite_1d(eta)
    vals = np.empty(16)
    grads = np.empty((16, 2))
    seconds = np.empty((16, 3))
    k = 0
    for cx, cy in CORNERS:
        ivx, idx_ = _H_IDX[cx]
        ivy, idy_ = _H_IDX[cy]
        for fx, fy in ((ivx, ivy), (idx_, ivy), (ivx, idy_), (idx_, idy_)):
            vals[k] = vx[fx] * vy[fy]
            grads[k, 0] = dx[fx] * vy[fy]
            grads[k, 1] = vx[fx] * dy[fy]
            seconds[k, 0] = ddx[fx] * vy[fy]
            seconds[k, 1] = vx[fx] * ddy[fy]
            seconds[k, 2] = dx[fx] * dy[fy]
            k += 1
    return vals, grads, seconds
