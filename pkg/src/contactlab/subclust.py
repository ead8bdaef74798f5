"""Subtractive clustering for rule-base initialization.

Every data point starts with a potential measuring local density; the
highest-potential point becomes a cluster center, its neighborhood's
potential is subtracted away, and the process repeats until the remaining
potential falls below a fraction of the first center's.  Centers are always
members of the data, so each one seeds a fuzzy rule whose memberships peak
at real observations.

Clustering is meant to run in standardized feature space: a single radius
is meaningless across mixed units.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .anfis import GaussianMf, TskModel, TskRule, fit_consequents
from .errors import EmptyData


@dataclass(frozen=True)
class SubclustParams:
    """Knobs of the potential iteration.

    radius is the neighborhood scale; squash widens the subtraction
    neighborhood to keep centers apart; points are accepted outright above
    accept_ratio times the first potential and discarded below
    reject_ratio; between the two a distance-plus-potential compromise
    decides.
    """

    radius: float
    squash: float = 1.25
    accept_ratio: float = 0.5
    reject_ratio: float = 0.15

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not self.squash >= 1.0:
            raise ValueError(f"squash must be >= 1, got {self.squash}")
        if not 0.0 < self.reject_ratio < self.accept_ratio <= 1.0:
            raise ValueError(
                f"need 0 < reject_ratio < accept_ratio <= 1, got "
                f"{self.reject_ratio} and {self.accept_ratio}"
            )


def subtractive_cluster(data, params: SubclustParams) -> np.ndarray:
    """Select cluster centers from the data by potential subtraction.

    Returns a (k, n) array of selected points in selection order, which is
    also decreasing-potential order.  Ties go to the lowest index.
    """
    pts = np.ascontiguousarray(np.asarray(data, dtype=float))
    if pts.size == 0:
        raise EmptyData("cannot cluster an empty data set")
    if pts.ndim == 1:
        pts = pts[:, None]
    alpha = 4.0 / (params.radius * params.radius)
    beta = 4.0 / (params.squash * params.radius) ** 2

    potential = _backend.subclust_potentials(pts, alpha)
    first = int(np.argmax(potential))
    first_potential = float(potential[first])
    selected = [first]
    last_potential = first_potential
    while True:
        diff = pts - pts[selected[-1]]
        potential = potential - last_potential * np.exp(-beta * np.sum(diff * diff, axis=1))
        while True:
            candidate = int(np.argmax(potential))
            value = float(potential[candidate])
            if value >= params.accept_ratio * first_potential:
                break
            if value < params.reject_ratio * first_potential:
                return pts[selected].copy()
            dmin = math.sqrt(
                min(float(np.sum((pts[candidate] - pts[s]) ** 2)) for s in selected)
            )
            if dmin / params.radius + value / first_potential >= 1.0:
                break
            # Compromise failed: this point neither stands alone nor adds
            # density; knock it out and look at the next best.
            potential[candidate] = 0.0
        selected.append(candidate)
        last_potential = value


def rules_from_clusters(centers, features, targets, radius: float, standardization=None) -> TskModel:
    """Build a TSK model with one rule per cluster center.

    centers live in standardized feature space (the space clustering ran
    in); features and targets are raw training data.  Each membership gets
    width radius/sqrt(8), so it decays to e^-4 at one radius from its
    center.  Consequents start at zero and are set by one least-squares
    pass.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    n = centers.shape[1]
    sigma = radius / math.sqrt(8.0)
    rules = [
        TskRule(
            antecedents=tuple(GaussianMf(float(c), sigma) for c in center),
            consequent=(0.0,) * (n + 1),
        )
        for center in centers
    ]
    model = TskModel(n, rules, standardization=standardization)
    fit_consequents(model, features, targets)
    return model


def calibrate_radius(data, target: int, params: SubclustParams = None,
                     lo: float = 0.05, hi: float = 4.0, iters: int = 60):
    """Find a radius that yields exactly `target` centers, by bisection.

    The center count is (weakly) decreasing in the radius, so bisection
    closes in on the target.  When no radius hits it exactly (the count
    jumps past it), the smallest-count radius still >= target is used and
    the center list truncated to the strongest `target` entries, which is a
    prefix because centers come out in decreasing-potential order.

    Returns (radius, centers).
    """
    if target < 1:
        raise ValueError(f"target must be >= 1, got {target}")
    base = params if params is not None else SubclustParams(radius=1.0)

    def run(radius):
        return subtractive_cluster(
            data,
            SubclustParams(
                radius=radius,
                squash=base.squash,
                accept_ratio=base.accept_ratio,
                reject_ratio=base.reject_ratio,
            ),
        )

    lo_centers = run(lo)
    grow = 0
    while len(lo_centers) < target and grow < 12:
        lo /= 2.0
        lo_centers = run(lo)
        grow += 1
    if len(lo_centers) < target:
        raise ValueError(f"cannot reach {target} centers even at radius {lo}")
    hi_centers = run(hi)
    grow = 0
    while len(hi_centers) > target and grow < 12:
        hi *= 2.0
        hi_centers = run(hi)
        grow += 1
    if len(lo_centers) == target:
        return lo, lo_centers
    if len(hi_centers) == target:
        return hi, hi_centers

    best = (lo, lo_centers)  # smallest over-count seen
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        centers = run(mid)
        count = len(centers)
        if count == target:
            return mid, centers
        if count > target:
            lo = mid
            if count < len(best[1]):
                best = (mid, centers)
        else:
            hi = mid
    return best[0], best[1][:target].copy()
