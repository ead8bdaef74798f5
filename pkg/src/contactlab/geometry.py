"""Exact contact-state classification between convex polygonal blocks.

The classifier answers one question about a pair of blocks: are they apart,
touching vertex-to-vertex, vertex-to-edge, or edge-to-edge.  Touching means
the closest feature pair sits within a caller-supplied tolerance; interiors
overlapping deeper than that tolerance are an invalid scene, not a contact.

When several feature pairs are equally close the highest code wins: a shared
edge implies shared vertices, so the most specific description is the
maximal one.
"""

import math
from enum import IntEnum

import numpy as np

from .errors import DimensionMismatch, OverlapError

# Default contact distance threshold, metres.
DEFAULT_TOL = 1e-6
# Edges count as a candidate edge-edge pair when their directions are within
# this angle (radians) of pointing exactly opposite ways.
EDGE_ANGLE_TOL = 1e-6

_MIN_VERTEX_GAP = 1e-12
_TURN_CLOSURE_TOL = 1e-9


class ContactState(IntEnum):
    """Four-valued contact code for a block pair."""

    NONE = 0
    VERTEX_VERTEX = 1
    VERTEX_EDGE = 2
    EDGE_EDGE = 3


class Block:
    """Closed convex polygon with an integer id.

    Vertices are normalized on construction: counter-clockwise order,
    starting at the lexicographically smallest vertex (smallest x, then
    smallest y).  The stored array is read-only; motion produces new blocks
    via :meth:`translated`.
    """

    __slots__ = ("id", "vertices")

    def __init__(self, block_id: int, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise DimensionMismatch(f"vertices must be (V, 2), got {verts.shape}")
        if verts.shape[0] < 3:
            raise ValueError(f"a polygon needs at least 3 vertices, got {verts.shape[0]}")
        if not np.all(np.isfinite(verts)):
            raise ValueError("vertices must be finite")
        gaps = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
        if np.any(gaps <= _MIN_VERTEX_GAP):
            raise ValueError("consecutive vertices coincide")
        verts = _orient_ccw(verts)
        _require_convex(verts)
        start = _lexicographic_min_index(verts)
        verts = np.roll(verts, -start, axis=0)
        verts.setflags(write=False)
        self.id = int(block_id)
        self.vertices = verts

    def __repr__(self):
        return f"Block(id={self.id}, vertices={self.vertices.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, Block):
            return NotImplemented
        return (
            self.id == other.id
            and self.vertices.shape == other.vertices.shape
            and bool(np.all(self.vertices == other.vertices))
        )

    def edges(self):
        """Yield (start, end) vertex pairs for each edge in stored order."""
        verts = self.vertices
        for i in range(len(verts)):
            yield verts[i], verts[(i + 1) % len(verts)]

    def translated(self, offset) -> "Block":
        return Block(self.id, self.vertices + np.asarray(offset, dtype=float))

    def centroid(self) -> np.ndarray:
        """Area centroid (gravity center for a uniform block)."""
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        cross = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
        area6 = 3.0 * np.sum(cross)  # 6 * signed area, positive for CCW
        cx = np.sum((v[:, 0] + nxt[:, 0]) * cross) / area6
        cy = np.sum((v[:, 1] + nxt[:, 1]) * cross) / area6
        return np.array([cx, cy])

    def bounds(self):
        """Axis-aligned bounding box as (xmin, ymin, xmax, ymax)."""
        v = self.vertices
        return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())

    def to_dict(self) -> dict:
        return {"id": self.id, "vertices": [[float(x), float(y)] for x, y in self.vertices]}

    @classmethod
    def from_dict(cls, obj: dict) -> "Block":
        return cls(obj["id"], obj["vertices"])


def _orient_ccw(verts: np.ndarray) -> np.ndarray:
    nxt = np.roll(verts, -1, axis=0)
    doubled_area = np.sum(verts[:, 0] * nxt[:, 1] - nxt[:, 0] * verts[:, 1])
    if doubled_area == 0.0:
        raise ValueError("polygon is degenerate (zero area)")
    if doubled_area < 0.0:
        verts = verts[::-1].copy()
    return verts


def _require_convex(verts: np.ndarray):
    """Reject non-convex or self-intersecting rings.

    For a simple convex CCW polygon every turn angle is in (0, pi) and the
    turns sum to exactly 2*pi; a same-sign star polygon sums to a larger
    multiple, so checking the sum rules those out too.
    """
    edges = np.roll(verts, -1, axis=0) - verts
    prev = np.roll(edges, 1, axis=0)
    cross = prev[:, 0] * edges[:, 1] - prev[:, 1] * edges[:, 0]
    if np.any(cross <= 0.0):
        raise ValueError("polygon is not strictly convex")
    dot = np.sum(prev * edges, axis=1)
    turning = float(np.sum(np.arctan2(cross, dot)))
    if abs(turning - 2.0 * math.pi) > _TURN_CLOSURE_TOL:
        raise ValueError("polygon ring is self-intersecting")


def _lexicographic_min_index(verts: np.ndarray) -> int:
    best = 0
    for i in range(1, len(verts)):
        if (verts[i, 0], verts[i, 1]) < (verts[best, 0], verts[best, 1]):
            best = i
    return best


def polygon_area(block: Block) -> float:
    """Unsigned shoelace area in square metres."""
    v = block.vertices
    nxt = np.roll(v, -1, axis=0)
    return 0.5 * abs(float(np.sum(v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1])))


def _point_segment_distance(p, s0, s1):
    """Distance from p to segment [s0, s1] and the projection parameter t.

    t is reported unclamped so callers can tell interior hits (0 < t < 1)
    from hits that clamp to an endpoint.
    """
    d = s1 - s0
    t = float(np.dot(p - s0, d) / np.dot(d, d))
    tc = min(1.0, max(0.0, t))
    closest = s0 + tc * d
    return float(np.hypot(p[0] - closest[0], p[1] - closest[1])), t


def _sat_penetration(a: Block, b: Block):
    """Overlap depth along the least-overlapping edge normal.

    Returns None when a separating axis exists (the closed sets are
    disjoint).  Edge normals of both polygons are a complete axis set for
    convex polygons, so the minimum is the exact penetration depth.
    """
    best = math.inf
    for poly in (a, b):
        verts = poly.vertices
        edges = np.roll(verts, -1, axis=0) - verts
        for k in range(len(verts)):
            ex, ey = edges[k]
            norm = math.hypot(ex, ey)
            axis = np.array([-ey / norm, ex / norm])
            pa = a.vertices @ axis
            pb = b.vertices @ axis
            overlap = min(pa.max(), pb.max()) - max(pa.min(), pb.min())
            if overlap < 0.0:
                return None
            if overlap < best:
                best = overlap
    return best


def min_separation(a: Block, b: Block) -> float:
    """Euclidean distance between the closed point sets; 0 iff they touch.

    For disjoint convex polygons the closest pair of boundary points always
    includes a vertex of one polygon, so scanning vertex-to-segment pairs in
    both directions is exact.
    """
    if _sat_penetration(a, b) is not None:
        return 0.0
    best = math.inf
    for p, q in ((a, b), (b, a)):
        for v in p.vertices:
            for s0, s1 in q.edges():
                dist, _ = _point_segment_distance(v, s0, s1)
                if dist < best:
                    best = dist
    return best


def _vertex_vertex_min(a: Block, b: Block) -> float:
    diff = a.vertices[:, None, :] - b.vertices[None, :, :]
    return float(np.sqrt(np.sum(diff * diff, axis=2).min()))


def _vertex_edge_min(a: Block, b: Block) -> float:
    """Closest vertex-to-edge-interior distance in either direction."""
    best = math.inf
    for p, q in ((a, b), (b, a)):
        for v in p.vertices:
            for s0, s1 in q.edges():
                dist, t = _point_segment_distance(v, s0, s1)
                if 0.0 < t < 1.0 and dist < best:
                    best = dist
    return best


def _edge_pair_distance(a0, a1, b0, b1) -> float:
    best = math.inf
    for p, (s0, s1) in ((a0, (b0, b1)), (a1, (b0, b1)), (b0, (a0, a1)), (b1, (a0, a1))):
        dist, _ = _point_segment_distance(p, s0, s1)
        if dist < best:
            best = dist
    return best


def _edge_edge_min(a: Block, b: Block) -> float:
    """Closest qualifying edge-edge distance.

    A pair qualifies only if the edges are antiparallel within
    EDGE_ANGLE_TOL and their projections onto the shared direction overlap
    by a positive length; anything else degrades to vertex-edge or
    vertex-vertex.
    """
    best = math.inf
    for a0, a1 in a.edges():
        da = a1 - a0
        ua = da / math.hypot(da[0], da[1])
        for b0, b1 in b.edges():
            db = b1 - b0
            ub = db / math.hypot(db[0], db[1])
            cross = ua[0] * ub[1] - ua[1] * ub[0]
            dot = ua[0] * ub[0] + ua[1] * ub[1]
            # Angle between ua and -ub; CCW rings face each other reversed.
            if math.atan2(abs(cross), -dot) > EDGE_ANGLE_TOL:
                continue
            ta = sorted((float(a0 @ ua), float(a1 @ ua)))
            tb = sorted((float(b0 @ ua), float(b1 @ ua)))
            if min(ta[1], tb[1]) - max(ta[0], tb[0]) <= 0.0:
                continue
            dist = _edge_pair_distance(a0, a1, b0, b1)
            if dist < best:
                best = dist
    return best


def classify_contact(a: Block, b: Block, tol: float = DEFAULT_TOL) -> ContactState:
    """Classify the contact between two blocks.

    Returns NONE when the sets are more than tol apart, otherwise the code
    of the closest feature pair with ties resolved toward the highest code.
    Raises OverlapError when the interiors interpenetrate deeper than tol.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    penetration = _sat_penetration(a, b)
    if penetration is not None and penetration > tol:
        raise OverlapError(
            f"blocks {a.id} and {b.id} interpenetrate by {penetration:.3e} (tol {tol:.1e})"
        )
    if penetration is None:
        if min_separation(a, b) > tol:
            return ContactState.NONE
    vv = _vertex_vertex_min(a, b)
    ve = _vertex_edge_min(a, b)
    ee = _edge_edge_min(a, b)
    if ee <= tol:
        return ContactState.EDGE_EDGE
    if ve <= tol:
        return ContactState.VERTEX_EDGE
    if vv <= tol:
        return ContactState.VERTEX_VERTEX
    # Shallow interpenetration can leave every feature distance slightly
    # above tol; fall back to the nearest feature, highest code on ties.
    best = min(vv, ve, ee)
    if ee == best:
        return ContactState.EDGE_EDGE
    if ve == best:
        return ContactState.VERTEX_EDGE
    return ContactState.VERTEX_VERTEX
