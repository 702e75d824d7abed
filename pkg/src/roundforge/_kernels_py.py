"""Numpy implementations of the hot numeric kernels.

Signature-compatible with the compiled module ``roundforge._speedups``; the
active implementation is selected in ``roundforge._core``.  Everything here is
chunked so memory stays bounded on large inputs.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 4096


def distance_field(ox: float, oy: float, cell: float, nx: int, ny: int,
                   segs: np.ndarray, radius: float) -> np.ndarray:
    """Min distance from each grid node to a segment set, windowed per segment.

    Nodes farther than ``radius`` from every segment keep the value +inf.
    Grid node (i, j) sits at (ox + cell*i, oy + cell*j); result is (ny, nx).
    """
    segs = np.asarray(segs, dtype=np.float64)
    field = np.full((ny, nx), np.inf, dtype=np.float32)
    xs = ox + cell * np.arange(nx)
    ys = oy + cell * np.arange(ny)
    for ax, ay, bx, by in segs:
        i0 = max(0, int(np.floor((min(ax, bx) - radius - ox) / cell)))
        i1 = min(nx, int(np.ceil((max(ax, bx) + radius - ox) / cell)) + 1)
        j0 = max(0, int(np.floor((min(ay, by) - radius - oy) / cell)))
        j1 = min(ny, int(np.ceil((max(ay, by) + radius - oy) / cell)) + 1)
        if i0 >= i1 or j0 >= j1:
            continue
        X = xs[i0:i1][None, :] - ax
        Y = ys[j0:j1][:, None] - ay
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        if L2 == 0.0:
            d = np.sqrt(X * X + Y * Y)
        else:
            tp = np.clip((X * dx + Y * dy) / L2, 0.0, 1.0)
            d = np.sqrt((X - tp * dx) ** 2 + (Y - tp * dy) ** 2)
        np.minimum(field[j0:j1, i0:i1], d.astype(np.float32),
                   out=field[j0:j1, i0:i1])
    return field


def polyval2(pa: np.ndarray, pb: np.ndarray, coef: np.ndarray,
             x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Evaluate the sparse bivariate polynomial sum c_k x^pa_k y^pb_k pointwise."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    out = np.zeros_like(x)
    if len(pa) == 0:
        return out
    na = int(pa.max()) + 1
    nb = int(pb.max()) + 1
    xp = np.empty((na,) + x.shape)
    xp[0] = 1.0
    for a in range(1, na):
        xp[a] = xp[a - 1] * x
    yp = np.empty((nb,) + y.shape)
    yp[0] = 1.0
    for b in range(1, nb):
        yp[b] = yp[b - 1] * y
    for a, b, c in zip(pa, pb, coef):
        out += c * xp[a] * yp[b]
    return out


def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """sup over points of a of the distance to the point set b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    worst = 0.0
    for lo in range(0, len(a), _CHUNK):
        ch = a[lo:lo + _CHUNK]
        d2 = ((ch[:, None, :] - b[None, :, :]) ** 2).sum(-1).min(axis=1)
        worst = max(worst, float(d2.max()))
    return float(np.sqrt(worst))


def pointset_min_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Min distance between two point sets (dense-sample proxy for curve gap)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    best = np.inf
    for lo in range(0, len(a), _CHUNK):
        ch = a[lo:lo + _CHUNK]
        d2 = ((ch[:, None, :] - b[None, :, :]) ** 2).sum(-1).min(axis=1)
        best = min(best, float(d2.min()))
    return float(np.sqrt(best))


def self_intersects(pts: np.ndarray) -> int:
    """1 if any two non-adjacent segments of the closed polyline cross properly."""
    p = np.asarray(pts, dtype=np.float64)
    n = len(p)
    if n < 4:
        return 0
    q = np.vstack([p, p[:1]])
    a, b = q[:-1], q[1:]

    def cross(o, u, v):
        return (u[..., 0] - o[..., 0]) * (v[..., 1] - o[..., 1]) - \
               (u[..., 1] - o[..., 1]) * (v[..., 0] - o[..., 0])

    for i in range(n - 2):
        jhi = n if i > 0 else n - 1
        js = np.arange(i + 2, jhi)
        if len(js) == 0:
            continue
        A, B = a[i], b[i]
        C, D = a[js], b[js]
        d1 = cross(A[None, :], B[None, :], C)
        d2 = cross(A[None, :], B[None, :], D)
        d3 = cross(C, D, np.broadcast_to(A, C.shape))
        d4 = cross(C, D, np.broadcast_to(B, C.shape))
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return 1
    return 0
