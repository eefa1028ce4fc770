"""Points, rectangles, grid snapping, and the instance transform.

Coordinates are millimeters with y increasing downward (KiCad screen
convention). The instance transform applies mirror before rotation;
rotation by +90 degrees maps local (x, y) to (y, -x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

GRID = 1.27
COORD_EPS = 1e-6


class Point(NamedTuple):
    x: float
    y: float

    def translated(self, dx: float, dy: float) -> "Point":
        return Point(round(self.x + dx, 4), round(self.y + dy, 4))


def snap(value: float, pitch: float = GRID) -> float:
    """Round to the nearest grid multiple, half away from zero upward."""
    return round(math.floor(value / pitch + 0.5) * pitch, 4)


def snap_point(p: Point) -> Point:
    return Point(snap(p.x), snap(p.y))


def quantize(p: Point) -> tuple:
    """Key that identifies coincident points within COORD_EPS."""
    return (round(p.x * 1e6), round(p.y * 1e6))


def transform_offset(dx: float, dy: float, rotation: int, mirror: str) -> Point:
    """Apply mirror (first) then rotation to a local offset."""
    if mirror == "x":
        dy = -dy
    elif mirror == "y":
        dx = -dx
    for _ in range((rotation // 90) % 4):
        dx, dy = dy, -dx
    return Point(round(dx, 4), round(dy, 4))


def inverse_transform_offset(dx: float, dy: float, rotation: int,
                             mirror: str) -> Point:
    """Invert transform_offset: rotate back, then un-mirror."""
    for _ in range((rotation // 90) % 4):
        dx, dy = -dy, dx
    if mirror == "x":
        dy = -dy
    elif mirror == "y":
        dx = -dx
    return Point(round(dx, 4), round(dy, 4))


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box; degenerate (zero width/height) boxes allowed."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @staticmethod
    def from_points(points) -> "Rect":
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return Rect(min(xs), min(ys), max(xs), max(ys))

    def translated(self, dx: float, dy: float) -> "Rect":
        return Rect(self.min_x + dx, self.min_y + dy,
                    self.max_x + dx, self.max_y + dy)

    def union(self, other: "Rect") -> "Rect":
        return Rect(min(self.min_x, other.min_x), min(self.min_y, other.min_y),
                    max(self.max_x, other.max_x), max(self.max_y, other.max_y))

    def expanded(self, margin: float) -> "Rect":
        return Rect(self.min_x - margin, self.min_y - margin,
                    self.max_x + margin, self.max_y + margin)

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    def contains(self, p: Point) -> bool:
        return (self.min_x - COORD_EPS <= p.x <= self.max_x + COORD_EPS
                and self.min_y - COORD_EPS <= p.y <= self.max_y + COORD_EPS)

    def overlap_area(self, other: "Rect") -> float:
        w = min(self.max_x, other.max_x) - max(self.min_x, other.min_x)
        h = min(self.max_y, other.max_y) - max(self.min_y, other.min_y)
        if w <= 0 or h <= 0:
            return 0.0
        return w * h


def points_coincide(a: Point, b: Point) -> bool:
    return abs(a.x - b.x) <= COORD_EPS and abs(a.y - b.y) <= COORD_EPS


def point_on_segment(p: Point, a: Point, b: Point) -> bool:
    """True when p lies on segment ab (endpoints included)."""
    cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
    seg_len = math.hypot(b.x - a.x, b.y - a.y)
    if seg_len == 0:
        return points_coincide(p, a)
    if abs(cross) / seg_len > COORD_EPS:
        return False
    dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)
    return -COORD_EPS * seg_len <= dot <= seg_len * seg_len + COORD_EPS * seg_len


def point_inside_segment(p: Point, a: Point, b: Point) -> bool:
    """True when p lies strictly inside segment ab (not at an endpoint)."""
    return (point_on_segment(p, a, b)
            and not points_coincide(p, a) and not points_coincide(p, b))


def collinear_overlap_length(a1: Point, a2: Point,
                             b1: Point, b2: Point) -> float:
    """Shared length of two collinear segments (0 when not collinear)."""
    va = (a2.x - a1.x, a2.y - a1.y)
    vb = (b2.x - b1.x, b2.y - b1.y)
    cross_dir = va[0] * vb[1] - va[1] * vb[0]
    len_a = math.hypot(*va)
    len_b = math.hypot(*vb)
    if len_a == 0 or len_b == 0:
        return 0.0
    if abs(cross_dir) / (len_a * len_b) > COORD_EPS:
        return 0.0
    # Same line check: b1 must lie on the carrier of a.
    cross_pt = va[0] * (b1.y - a1.y) - va[1] * (b1.x - a1.x)
    if abs(cross_pt) / len_a > COORD_EPS:
        return 0.0
    # Project all endpoints on a's direction.
    t_a1, t_a2 = 0.0, len_a
    t_b1 = ((b1.x - a1.x) * va[0] + (b1.y - a1.y) * va[1]) / len_a
    t_b2 = ((b2.x - a1.x) * va[0] + (b2.y - a1.y) * va[1]) / len_a
    lo = max(min(t_a1, t_a2), min(t_b1, t_b2))
    hi = min(max(t_a1, t_a2), max(t_b1, t_b2))
    return max(0.0, hi - lo)


def segment_length_inside_rect(a: Point, b: Point, rect: Rect) -> float:
    """Length of segment ab lying strictly inside rect's interior.

    "Strictly inside" means deeper than COORD_EPS, so a wire lying exactly
    on a boundary edge measures zero regardless of float noise in how the
    rect or the wire was computed.
    """
    dx, dy = b.x - a.x, b.y - a.y
    t_lo, t_hi = 0.0, 1.0
    for delta, lo_bound, hi_bound, origin in (
            (dx, rect.min_x, rect.max_x, a.x),
            (dy, rect.min_y, rect.max_y, a.y)):
        if abs(delta) < 1e-12:
            # Constant on this axis: on or outside the boundary line means
            # no interior run at all.
            if not (lo_bound + COORD_EPS < origin < hi_bound - COORD_EPS):
                return 0.0
            continue
        t1 = (lo_bound + COORD_EPS - origin) / delta
        t2 = (hi_bound - COORD_EPS - origin) / delta
        if t1 > t2:
            t1, t2 = t2, t1
        t_lo = max(t_lo, t1)
        t_hi = min(t_hi, t2)
    if t_hi <= t_lo:
        return 0.0
    return (t_hi - t_lo) * math.hypot(dx, dy)


def l_route(p: Point, q: Point, prefer_first: bool = True) -> list:
    """Segments of a two-bend Manhattan route from p to q.

    The preferred elbow is (q.x, p.y); the alternative is (p.x, q.y).
    Returns [] when p == q and a single segment when axis-aligned.
    """
    if points_coincide(p, q):
        return []
    if abs(p.x - q.x) <= COORD_EPS or abs(p.y - q.y) <= COORD_EPS:
        return [(p, q)]
    elbow = Point(q.x, p.y) if prefer_first else Point(p.x, q.y)
    return [(p, elbow), (elbow, q)]
