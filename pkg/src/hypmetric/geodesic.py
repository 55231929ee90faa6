"""Upper approximations of the distance induced by a conformal density.

The discretization is an 8-connected grid graph with edge weight
``lambda(midpoint) * |edge|``; the shortest graph path is then shortened by
one string-pulling pass and measured with :func:`path_length`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .density import Density
from .errors import DomainError, NotConnectedError
from .metric import PathPolyline, path_length

_NEIGHBOURS = ((0, 1), (1, 0), (1, 1), (1, -1))
_GL_T, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_T, _GL_W = 0.5 * (_GL_T + 1), 0.5 * _GL_W


@dataclass
class GeodesicResult:
    distance: float
    graph_distance: float
    path: PathPolyline
    graph_path: PathPolyline


def _box(d: Density, a: complex, b: complex, h: float):
    bbox = d.domain.bbox()
    if bbox is None:
        pad = abs(a - b) + 1.0
        bbox = (min(a.real, b.real) - pad, max(a.real, b.real) + pad,
                min(a.imag, b.imag) - pad, max(a.imag, b.imag) + pad)
    xmin, xmax, ymin, ymax = bbox
    x = h * np.arange(np.floor(xmin / h), np.ceil(xmax / h) + 1)
    y = h * np.arange(np.floor(ymin / h), np.ceil(ymax / h) + 1)
    return x, y


def _segment_length(d: Density, p: complex, q: complex) -> float:
    pts = p + _GL_T * (q - p)
    return float(abs(q - p) * np.dot(_GL_W, d(pts)))


def _segment_inside(d: Density, p: complex, q: complex, n: int) -> bool:
    pts = p + np.linspace(0, 1, n + 1) * (q - p)
    return bool(np.all(d.domain.contains(pts, d.margin)))


def _string_pull(d: Density, v: np.ndarray, h: float) -> np.ndarray:
    """Greedily replace runs of vertices by straight chords that are not longer."""
    seg = np.array([_segment_length(d, v[k], v[k + 1]) for k in range(v.size - 1)])
    cum = np.concatenate([[0.0], np.cumsum(seg)])

    def better(i, j):
        n = max(2, int(np.ceil(abs(v[j] - v[i]) / (0.25 * h))))
        if not _segment_inside(d, v[i], v[j], n):
            return False
        return _segment_length(d, v[i], v[j]) <= (cum[j] - cum[i]) * (1 + 1e-12)

    out = [v[0]]
    i, last = 0, v.size - 1
    while i < last:
        best, step = i + 1, 1
        while best + step <= last and better(i, best + step):
            best += step
            step *= 2
        while step > 1:
            step //= 2
            if best + step <= last and better(i, best + step):
                best += step
        out.append(v[best])
        i = best
    return np.array(out)


def geodesic_path(
    d: Density, a: complex, b: complex, resolution: float, smooth: bool = True
) -> GeodesicResult:
    """Shortest 8-connected grid path from ``a`` to ``b`` and its shortened version."""
    a, b = complex(a), complex(b)
    if not np.all(d.domain.contains(np.array([a, b]), d.margin)):
        raise DomainError("endpoints must lie in the domain")
    h = float(resolution)
    x, y = _box(d, a, b, h)
    ny, nx = y.size, x.size
    z = x[None, :] + 1j * y[:, None]
    valid = d.domain.contains(z, d.margin)
    for p in d.domain.punctures:
        valid &= np.abs(z - p) > h
    idx = np.full((ny, nx), -1, dtype=np.int64)
    idx[valid] = np.arange(int(valid.sum()))
    nodes = z[valid]

    rows, cols, wts = [], [], []
    for di, dj in _NEIGHBOURS:
        i0, i1 = max(0, -di), ny - max(0, di)
        j0, j1 = max(0, -dj), nx - max(0, dj)
        src = idx[i0:i1, j0:j1]
        dst = idx[i0 + di:i1 + di, j0 + dj:j1 + dj]
        ok = (src >= 0) & (dst >= 0)
        s, t = src[ok], dst[ok]
        mid = 0.5 * (nodes[s] + nodes[t])
        inside = d.domain.contains(mid, d.margin)
        s, t, mid = s[inside], t[inside], mid[inside]
        w = d(mid) * abs(dj * h + 1j * di * h)
        rows.append(s)
        cols.append(t)
        wts.append(w)
    rows, cols, wts = map(np.concatenate, (rows, cols, wts))
    n = nodes.size
    graph = coo_matrix((wts, (rows, cols)), shape=(n, n)).tocsr()

    def nearest(p):
        k = int(np.argmin(np.abs(nodes - p)))
        return k

    ka, kb = nearest(a), nearest(b)
    dist, pred = dijkstra(graph, directed=False, indices=ka, return_predecessors=True)
    if not np.isfinite(dist[kb]):
        raise NotConnectedError("points-not-connected-at-this-resolution")
    chain = [kb]
    while chain[-1] != ka:
        chain.append(int(pred[chain[-1]]))
    verts = nodes[np.array(chain[::-1])]
    head = [a] if abs(verts[0] - a) > 0 else []
    tail = [b] if abs(verts[-1] - b) > 0 else []
    verts = np.array(head + list(verts) + tail)
    if verts.size == 1:
        verts = np.array([a, b])
    connectors = 0.0
    if head:
        connectors += path_length(d, PathPolyline.segment(a, nodes[ka]))
    if tail:
        connectors += path_length(d, PathPolyline.segment(nodes[kb], b))
    graph_distance = float(dist[kb]) + connectors
    graph_path = PathPolyline(verts)
    if not smooth or a == b:
        return GeodesicResult(graph_distance, graph_distance, graph_path, graph_path)
    pulled = PathPolyline(_string_pull(d, verts, h))
    return GeodesicResult(path_length(d, pulled), graph_distance, pulled, graph_path)


def geodesic_distance(
    d: Density, a: complex, b: complex, resolution: float, smooth: bool = True
) -> float:
    """Upper approximation of the induced distance between ``a`` and ``b``.

    With ``smooth=False`` the plain graph distance is returned, which obeys
    the triangle inequality exactly.
    """
    if complex(a) == complex(b):
        return 0.0
    return geodesic_path(d, a, b, resolution, smooth).distance
