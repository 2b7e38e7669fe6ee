"""Gauss-Legendre quadrature helpers used by assembly, oracles and checks."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ResolutionError

# Hard cap on composite subintervals; beyond this the oscillation is declared
# unresolvable rather than silently under-integrated.
MAX_SUBINTERVALS = 2_000_000


@lru_cache(maxsize=None)
def gauss_legendre_01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the `order`-point Gauss-Legendre rule on [0, 1]."""
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def subintervals_for(total: float, angular_freq: float, order: int,
                     points_per_period: int = 10, max_width: float | None = None) -> int:
    """Number of equal subintervals needed so a composite `order`-point rule
    places at least `points_per_period` points per period of an oscillation
    with the given angular frequency over a span `total`."""
    n = 1
    if angular_freq > 0.0 and total > 0.0:
        periods = total * angular_freq / (2.0 * np.pi)
        n = max(n, int(np.ceil(points_per_period * periods / order)))
    if max_width is not None and total > 0.0:
        n = max(n, int(np.ceil(total / max_width - 1e-12)))
    if n > MAX_SUBINTERVALS:
        raise ResolutionError(
            f"resolving the declared oscillation needs {n} subintervals "
            f"(cap {MAX_SUBINTERVALS})")
    return n


def composite_points(a: float, b: float, order: int, n_sub: int,
                     breakpoints: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Points/weights of a composite Gauss-Legendre rule on [a, b].

    The interval is cut at `breakpoints` (if any fall strictly inside) and
    each resulting piece is split into enough equal parts that none exceeds
    (b - a)/n_sub.
    """
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    edges = [a, b]
    if breakpoints is not None:
        inside = breakpoints[(breakpoints > a) & (breakpoints < b)]
        edges.extend(inside.tolist())
    edges = np.unique(np.asarray(edges, dtype=float))
    width = (b - a) / n_sub
    x01, w01 = gauss_legendre_01(order)
    pts, wts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        k = max(1, int(np.ceil((hi - lo) / width - 1e-12)))
        if k * order > 64 * MAX_SUBINTERVALS:
            raise ResolutionError("composite rule exceeds the point cap")
        sub = lo + (hi - lo) / k * np.arange(k)[:, None]
        pts.append((sub + (hi - lo) / k * x01[None, :]).ravel())
        wts.append(np.broadcast_to((hi - lo) / k * w01, (k, order)).ravel())
    return np.concatenate(pts), np.concatenate(wts)
