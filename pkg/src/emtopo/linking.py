"""Gauss linking numbers of closed polylines.

Midpoint-rule double sum over segment pairs. The reduction uses an
exactly rounded float sum, so swapping the curves reproduces the value
bit for bit and reversing one orientation flips the sign exactly.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import backend

FOUR_PI = 4.0 * math.pi
MIN_SEPARATION = 1e-6


class ProximityError(ValueError):
    """Curves approach closer than the guard distance; the integrand is
    near-singular and the quadrature cannot be trusted."""

    def __init__(self, dist):
        super().__init__(
            "curves come within %.3e of each other (guard %.0e)" % (dist, MIN_SEPARATION)
        )
        self.min_distance = dist


def _segments(poly):
    pts = np.asarray(poly.points, dtype=float)
    nxt = np.roll(pts, -1, axis=0)
    d = nxt - pts
    mid = pts + 0.5 * d
    return mid, d


def _segment_pair_min_dist(p1, d1, p2, d2):
    """Exact minimum distance between two segments (clamped closest points)."""
    r = p1 - p2
    a = float(np.dot(d1, d1))
    e = float(np.dot(d2, d2))
    f = float(np.dot(d2, r))
    if a <= 1e-300 and e <= 1e-300:
        return float(np.linalg.norm(r))
    if a <= 1e-300:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = float(np.dot(d1, r))
        if e <= 1e-300:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = float(np.dot(d1, d2))
            den = a * e - b * b
            s = min(1.0, max(0.0, (b * f - c * e) / den)) if den > 0 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    closest1 = p1 + s * d1
    closest2 = p2 + t * d2
    return float(np.linalg.norm(closest1 - closest2))


def _check_separation(m1, d1, m2, d2):
    l1 = np.linalg.norm(d1, axis=1)
    l2 = np.linalg.norm(d2, axis=1)
    gap = np.linalg.norm(m1[:, None, :] - m2[None, :, :], axis=2)
    lower = gap - 0.5 * (l1[:, None] + l2[None, :])
    near = np.argwhere(lower <= MIN_SEPARATION)
    worst = np.inf
    for i, j in near:
        p1 = m1[i] - 0.5 * d1[i]
        p2 = m2[j] - 0.5 * d2[j]
        dist = _segment_pair_min_dist(p1, d1[i], p2, d2[j])
        worst = min(worst, dist)
    if worst <= MIN_SEPARATION:
        raise ProximityError(worst)


def gauss_linking(a, b):
    """Gauss double integral of two closed polylines, midpoint rule.

    Raises ProximityError when the curves pass within 1e-6 of each other
    and ValueError when either curve is open or too short.
    """
    if not a.closed or not b.closed:
        raise ValueError("gauss_linking needs closed curves")
    if len(a.points) < 3 or len(b.points) < 3:
        raise ValueError("closed curves need at least 3 points")
    m1, d1 = _segments(a)
    m2, d2 = _segments(b)
    _check_separation(m1, d1, m2, d2)
    terms = backend.kernels().gauss_terms(m1, d1, m2, d2)
    return math.fsum(terms.ravel().tolist()) / FOUR_PI


@dataclass
class LinkReport:
    """Pairwise linking summary of the closed curves in a collection."""

    curve_count: int
    open_count: int
    pairs: list  # (i, j, value, rounded, residual) over closed-curve pairs
    total_linkage: int
    max_residual: float


def link_report(curves):
    """Pairwise Gauss linking of all closed curves; open curves are only
    counted. total_linkage sums |rounded| over pairs."""
    closed = [c for c in curves if c.closed and len(c.points) >= 3]
    open_count = sum(1 for c in curves if not (c.closed and len(c.points) >= 3))
    pairs = []
    total = 0
    max_res = 0.0
    for i in range(len(closed)):
        for j in range(i + 1, len(closed)):
            val = gauss_linking(closed[i], closed[j])
            rnd = int(round(val))
            res = abs(val - rnd)
            pairs.append((i, j, val, rnd, res))
            total += abs(rnd)
            max_res = max(max_res, res)
    return LinkReport(len(closed), open_count, pairs, total, max_res)
