"""Kohonen self-organizing map with winner-take-all training and labeling.

Neurons sit on an nx-by-ny grid, stored row-major (index = i*ny + j).  Each
presentation of a sample pulls every neuron toward it, weighted by a
Gaussian of the grid distance to the winning neuron; learning rate and
neighborhood radius decay geometrically across epochs.  After training,
neurons take the majority label of the samples they win, which turns the
map into a classifier.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DimensionMismatch, EmptyData, UnlabeledGrid
from .geometry import ContactState

# Radii at or below this are treated as winner-only updates; the Gaussian
# neighborhood underflows to zero for every non-winner.
_RADIUS_FLOOR = 1e-9


@dataclass
class SomGrid:
    nx: int
    ny: int
    weights: np.ndarray
    labels: np.ndarray = None

    def __post_init__(self):
        self.weights = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.nx}x{self.ny}")
        if self.weights.ndim != 2 or self.weights.shape[0] != self.nx * self.ny:
            raise DimensionMismatch(
                f"weights must be ({self.nx * self.ny}, d), got {self.weights.shape}"
            )
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.nx * self.ny,):
                raise DimensionMismatch("labels must have one entry per neuron")

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    def position(self, flat: int):
        return flat // self.ny, flat % self.ny

    def flat(self, i: int, j: int) -> int:
        return i * self.ny + j


@dataclass(frozen=True)
class SomSchedule:
    """Epoch count plus geometric decay endpoints for rate and radius."""

    epochs: int
    lr0: float = 0.5
    lr_end: float = 0.01
    radius0: float = 1.5
    radius_end: float = 0.5

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if not (self.lr0 >= self.lr_end > 0.0):
            raise ValueError(f"need lr0 >= lr_end > 0, got {self.lr0}, {self.lr_end}")
        if not (self.radius0 >= self.radius_end >= 0.0):
            raise ValueError(
                f"need radius0 >= radius_end >= 0, got {self.radius0}, {self.radius_end}"
            )


def default_schedule(nx: int, ny: int, epochs: int = 300) -> SomSchedule:
    return SomSchedule(epochs=epochs, radius0=max(nx, ny) / 2.0)


def _decay(start: float, end: float, epochs: int) -> np.ndarray:
    if epochs == 1:
        return np.array([start])
    t = np.arange(epochs) / (epochs - 1)
    return start * (end / start) ** t


def initialize_grid(nx: int, ny: int, data, seed: int) -> SomGrid:
    """Seeded uniform-random weights within the per-dimension data range."""
    pts = np.atleast_2d(np.asarray(data, dtype=float))
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    rng = np.random.default_rng(seed)
    weights = lo + rng.random((nx * ny, pts.shape[1])) * (hi - lo)
    return SomGrid(nx, ny, weights)


def find_winner(grid: SomGrid, x):
    """Grid position of the closest neuron; ties go to the lowest row, then column."""
    x = np.asarray(x, dtype=float)
    if x.shape != (grid.d,):
        raise DimensionMismatch(f"input has shape {x.shape}, grid expects ({grid.d},)")
    diff = grid.weights - x
    flat = int(np.argmin(np.sum(diff * diff, axis=1)))
    return grid.position(flat)


def train_som(grid: SomGrid, data, schedule: SomSchedule, seed: int) -> SomGrid:
    """Train a copy of the grid; the input grid is left untouched.

    Samples are presented in a freshly shuffled order each epoch (one RNG
    seeded once drives all epochs), so the result is a pure function of
    (grid, data, schedule, seed).  Labels do not survive training.
    """
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(data, dtype=float)))
    if pts.shape[0] == 0:
        raise EmptyData("cannot train on an empty data set")
    if pts.shape[1] != grid.d:
        raise DimensionMismatch(f"data has {pts.shape[1]} columns, grid expects {grid.d}")
    weights = grid.weights.copy()
    epochs = schedule.epochs
    if epochs == 0:
        return SomGrid(grid.nx, grid.ny, weights)
    rng = np.random.default_rng(seed)
    orders = np.stack([rng.permutation(pts.shape[0]) for _ in range(epochs)]).astype(np.int64)
    lrs = _decay(schedule.lr0, schedule.lr_end, epochs)
    radii = _decay(
        max(schedule.radius0, _RADIUS_FLOOR), max(schedule.radius_end, _RADIUS_FLOOR), epochs
    )
    flat = np.arange(grid.nx * grid.ny)
    gi = (flat // grid.ny).astype(float)
    gj = (flat % grid.ny).astype(float)
    _backend.som_train(weights, pts, orders, lrs, radii, gi, gj)
    return SomGrid(grid.nx, grid.ny, weights)


def winner_histogram(grid: SomGrid, features) -> np.ndarray:
    """Number of samples won by each neuron, indexed flat."""
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(features, dtype=float)))
    winners = _backend.batch_winner(grid.weights, pts)
    return np.bincount(winners, minlength=grid.nx * grid.ny)


def label_neurons(grid: SomGrid, features, labels) -> SomGrid:
    """Assign each neuron the majority label of the samples it wins.

    Neurons that win nothing inherit the label of the nearest labeled
    neuron in grid distance, row-major order breaking ties.  Majority ties
    go to the lowest code.
    """
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(features, dtype=float)))
    codes = np.asarray(labels, dtype=np.int64)
    if pts.shape[0] == 0:
        raise EmptyData("cannot label from an empty data set")
    if codes.shape != (pts.shape[0],):
        raise DimensionMismatch("features and labels disagree on sample count")
    if pts.shape[1] != grid.d:
        raise DimensionMismatch(f"data has {pts.shape[1]} columns, grid expects {grid.d}")
    n_neurons = grid.nx * grid.ny
    winners = _backend.batch_winner(grid.weights, pts)
    out = np.full(n_neurons, -1, dtype=np.int64)
    for q in range(n_neurons):
        won = codes[winners == q]
        if won.size:
            # bincount argmax returns the first maximum, so ties resolve
            # toward the lowest code.
            out[q] = int(np.argmax(np.bincount(won, minlength=4)))
    silent = np.flatnonzero(out < 0)
    labeled = np.flatnonzero(out >= 0)
    for q in silent:
        qi, qj = grid.position(int(q))
        best, best_d2 = -1, math.inf
        for p in labeled:
            pi, pj = grid.position(int(p))
            d2 = (qi - pi) ** 2 + (qj - pj) ** 2
            if d2 < best_d2:
                best, best_d2 = p, d2
        out[q] = out[best]
    return SomGrid(grid.nx, grid.ny, grid.weights.copy(), out)


def som_classify(grid: SomGrid, x) -> ContactState:
    """Label of the winning neuron."""
    if grid.labels is None:
        raise UnlabeledGrid("grid has no labels; run label_neurons first")
    i, j = find_winner(grid, x)
    return ContactState(int(grid.labels[grid.flat(i, j)]))


def classify_batch(grid: SomGrid, features) -> np.ndarray:
    if grid.labels is None:
        raise UnlabeledGrid("grid has no labels; run label_neurons first")
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(features, dtype=float)))
    winners = _backend.batch_winner(grid.weights, pts)
    return grid.labels[winners]


def save_grid(grid: SomGrid, path):
    payload = {
        "nx": grid.nx,
        "ny": grid.ny,
        "d": grid.d,
        "weights": [[float(v) for v in row] for row in grid.weights],
        "labels": None if grid.labels is None else [int(v) for v in grid.labels],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_grid(path) -> SomGrid:
    with open(path) as fh:
        payload = json.load(fh)
    weights = np.asarray(payload["weights"], dtype=float)
    if weights.shape[1] != payload["d"]:
        raise DimensionMismatch("stored d disagrees with the weight rows")
    return SomGrid(payload["nx"], payload["ny"], weights, payload["labels"])
