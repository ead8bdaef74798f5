"""Scene simulation, feature extraction, datasets, and window fusion.

A Scene moves convex blocks at constant velocities and classifies every
block pair at every step with the exact geometric oracle, producing the
labeled series everything downstream learns from.  Samples pair an 18-wide
feature vector (two quads: 8 vertex coordinates plus area each) with the
oracle's code.  Scenes with more than one pair cycle through the pairs
step by step, so one series can exercise every contact class.

The fusion step scans rectangular windows over the block domain, asks both
trained classifiers about the two blocks nearest each window center, and
reports the fuzzy model's answer flagged with whether the map agreed.
"""

import csv
import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .anfis import TskModel, predict_contact_state
from .errors import (
    EmptyData,
    InsufficientData,
    OverlapError,
    SizeTooLarge,
    WrongVertexCount,
)
from .geometry import (
    DEFAULT_TOL,
    Block,
    ContactState,
    _point_segment_distance,
    _sat_penetration,
    classify_contact,
    polygon_area,
)
from .som import SomGrid, som_classify

N_FEATURES = 18


@dataclass
class Scene:
    blocks: list
    velocities: np.ndarray
    steps: int
    dt: float

    def __post_init__(self):
        self.velocities = np.asarray(self.velocities, dtype=float)
        if len(self.blocks) < 2:
            raise ValueError("a scene needs at least 2 blocks")
        if self.velocities.shape != (len(self.blocks), 2):
            raise ValueError(
                f"velocities must be ({len(self.blocks)}, 2), got {self.velocities.shape}"
            )
        if self.steps < 1:
            raise ValueError(f"steps must be positive, got {self.steps}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    def pairs(self):
        return list(combinations(range(len(self.blocks)), 2))


@dataclass(eq=False)
class StepState:
    step: int
    time: float
    blocks: list
    states: dict


@dataclass(eq=False)
class Sample:
    features: np.ndarray
    label: ContactState
    step: int


@dataclass(eq=False)
class Dataset:
    train: list
    check: list


@dataclass(frozen=True)
class Window:
    x: float
    y: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0.0 and self.height > 0.0):
            raise ValueError("window sides must be positive")

    def center(self):
        return np.array([self.x + 0.5 * self.width, self.y + 0.5 * self.height])

    def as_block(self) -> Block:
        return Block(
            -1,
            [
                (self.x, self.y),
                (self.x + self.width, self.y),
                (self.x + self.width, self.y + self.height),
                (self.x, self.y + self.height),
            ],
        )


@dataclass(frozen=True)
class WindowReport:
    window: Window
    som: ContactState
    nfis: ContactState
    fused: ContactState
    disagree: bool


def simulate(scene: Scene, tol: float = DEFAULT_TOL):
    """Advance the scene step by step, classifying every pair at every step.

    Returns steps+1 entries (the initial placement is step 0).  Raises
    OverlapError as soon as any pair interpenetrates beyond tol, including
    at step 0.
    """
    series = []
    pair_list = scene.pairs()
    for t in range(scene.steps + 1):
        offset_scale = scene.dt * t
        blocks = [
            block.translated(v * offset_scale)
            for block, v in zip(scene.blocks, scene.velocities)
        ]
        states = {}
        for i, j in pair_list:
            states[(i, j)] = classify_contact(blocks[i], blocks[j], tol)
        series.append(StepState(step=t, time=scene.dt * t, blocks=blocks, states=states))
    return series


def extract_features(a: Block, b: Block) -> np.ndarray:
    """18 features for a quad pair: 8 vertex coordinates plus area, per block.

    Vertex order is each block's stored canonical order, so two samples of
    the same geometry always produce identical vectors.
    """
    for block in (a, b):
        if block.vertices.shape[0] != 4:
            raise WrongVertexCount(
                f"block {block.id} has {block.vertices.shape[0]} vertices, need exactly 4"
            )
    return np.concatenate(
        [
            a.vertices.ravel(),
            [polygon_area(a)],
            b.vertices.ravel(),
            [polygon_area(b)],
        ]
    )


def gravity_features(a: Block, b: Block) -> np.ndarray:
    """Gravity centers of both blocks, concatenated: (ax, ay, bx, by)."""
    return np.concatenate([a.centroid(), b.centroid()])


def _quad_centroid(coords: np.ndarray) -> np.ndarray:
    v = coords.reshape(4, 2)
    nxt = np.roll(v, -1, axis=0)
    cross = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
    area6 = 3.0 * np.sum(cross)
    return np.array(
        [
            np.sum((v[:, 0] + nxt[:, 0]) * cross) / area6,
            np.sum((v[:, 1] + nxt[:, 1]) * cross) / area6,
        ]
    )


def gravity_from_features(features: np.ndarray) -> np.ndarray:
    """Recover the two gravity centers from an 18-wide sample vector."""
    f = np.asarray(features, dtype=float)
    if f.shape != (N_FEATURES,):
        raise ValueError(f"expected {N_FEATURES} features, got shape {f.shape}")
    return np.concatenate([_quad_centroid(f[0:8]), _quad_centroid(f[9:17])])


def samples_from_series(series) -> list:
    """One labeled sample per step, cycling through the block pairs.

    Step t samples pair t mod P, so a three-block scene interleaves all
    three pairings across the series.
    """
    if not series:
        raise EmptyData("empty series")
    pair_list = sorted(series[0].states.keys())
    samples = []
    for entry in series:
        i, j = pair_list[entry.step % len(pair_list)]
        samples.append(
            Sample(
                features=extract_features(entry.blocks[i], entry.blocks[j]),
                label=entry.states[(i, j)],
                step=entry.step,
            )
        )
    return samples


def build_dataset(samples, n_train: int = 100, n_check: int = 50, seed: int = 0) -> Dataset:
    """Draw a seeded train/check split over distinct steps.

    Every contact code present in the series gets at least one training
    sample (a classifier cannot learn a code it never sees); the rest of
    the draw is uniform without replacement.  Rows come out sorted by step
    within each split.
    """
    total = n_train + n_check
    if len(samples) < total:
        raise InsufficientData(f"need {total} samples, series has {len(samples)}")
    rng = np.random.default_rng(seed)
    labels = np.array([int(s.label) for s in samples])
    reserved = []
    for code in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == code)
        reserved.append(int(idx[rng.integers(len(idx))]))
    pool = np.setdiff1d(np.arange(len(samples)), np.array(reserved, dtype=int))
    drawn = rng.choice(pool, size=total - len(reserved), replace=False)
    train_idx = sorted(reserved + drawn[: n_train - len(reserved)].tolist())
    check_idx = sorted(drawn[n_train - len(reserved):].tolist())
    return Dataset(
        train=[samples[i] for i in train_idx],
        check=[samples[i] for i in check_idx],
    )


def evaluate(predict, samples):
    """Accuracy and 4x4 confusion matrix of a classifier over samples.

    predict maps an 18-wide feature vector to a contact code; confusion
    rows index the true code, columns the predicted one.
    """
    if not samples:
        raise EmptyData("cannot evaluate on an empty sample list")
    confusion = np.zeros((4, 4), dtype=int)
    hits = 0
    for s in samples:
        pred = min(3, max(0, int(predict(s.features))))
        confusion[int(s.label), pred] += 1
        hits += int(pred == int(s.label))
    return hits / len(samples), confusion


def nfis_predictor(model: TskModel):
    return lambda features: int(predict_contact_state(model, features))


def som_predictor(grid: SomGrid, transform=None):
    """Adapter from 18-wide samples to the map's gravity-center inputs."""

    def predict(features):
        g = gravity_from_features(features)
        if transform is not None:
            g = transform(g)
        return int(som_classify(grid, g))

    return predict


def _point_block_distance(p: np.ndarray, block: Block) -> float:
    verts = block.vertices
    nxt = np.roll(verts, -1, axis=0)
    cross = (nxt[:, 0] - verts[:, 0]) * (p[1] - verts[:, 1]) - (nxt[:, 1] - verts[:, 1]) * (
        p[0] - verts[:, 0]
    )
    if np.all(cross >= 0.0):
        return 0.0
    best = np.inf
    for s0, s1 in block.edges():
        dist, _ = _point_segment_distance(p, s0, s1)
        best = min(best, dist)
    return float(best)


def domain_bounds(blocks) -> tuple:
    """Union bounding box (xmin, ymin, xmax, ymax) of the blocks."""
    boxes = np.array([b.bounds() for b in blocks])
    return (
        float(boxes[:, 0].min()),
        float(boxes[:, 1].min()),
        float(boxes[:, 2].max()),
        float(boxes[:, 3].max()),
    )


def random_windows(domain, count: int, size, seed: int) -> list:
    """Seeded uniform placement of count windows fully inside the domain."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    xmin, ymin, xmax, ymax = domain
    w, h = float(size[0]), float(size[1])
    if w > xmax - xmin or h > ymax - ymin:
        raise SizeTooLarge(
            f"window {w}x{h} does not fit the domain {xmax - xmin}x{ymax - ymin}"
        )
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        u, v = rng.random(2)
        out.append(Window(xmin + u * (xmax - xmin - w), ymin + v * (ymax - ymin - h), w, h))
    return out


def scan_windows(domain, windows, grid: SomGrid, model: TskModel, blocks,
                 som_transform=None) -> list:
    """Classify the contact inside each window with both models and fuse.

    A window needs at least two intersecting blocks to say anything; it
    then takes the two closest to its center.  The fused answer is the
    fuzzy model's, with a disagree flag raised whenever the map differs.
    Windows with fewer than two blocks report code 0.
    """
    xmin, ymin, xmax, ymax = domain
    reports = []
    for window in windows:
        if not (
            xmin <= window.x
            and ymin <= window.y
            and window.x + window.width <= xmax + 1e-9
            and window.y + window.height <= ymax + 1e-9
        ):
            raise ValueError(f"window {window} lies outside the domain")
        rect = window.as_block()
        inside = [b for b in blocks if _sat_penetration(rect, b) is not None]
        if len(inside) < 2:
            reports.append(
                WindowReport(window, ContactState.NONE, ContactState.NONE,
                             ContactState.NONE, False)
            )
            continue
        center = window.center()
        ranked = sorted(
            inside, key=lambda blk: (_point_block_distance(center, blk), blk.id)
        )
        a, b = sorted(ranked[:2], key=lambda blk: blk.id)
        nfis_code = predict_contact_state(model, extract_features(a, b))
        g = gravity_features(a, b)
        if som_transform is not None:
            g = som_transform(g)
        som_code = som_classify(grid, g)
        reports.append(
            WindowReport(window, som_code, nfis_code, nfis_code, som_code != nfis_code)
        )
    return reports


def scan_grid(domain, size, shape, grid: SomGrid, model: TskModel, blocks,
              som_transform=None) -> list:
    """Fused classification over a regular probe grid; rows of (x, y, code).

    Each probe centers a window of the given size on a lattice point,
    clamped to stay inside the domain.  Output is ordered x-major for
    plotting tools that expect blank-line-separated scan columns.
    """
    xmin, ymin, xmax, ymax = domain
    nx, ny = shape
    w, h = float(size[0]), float(size[1])
    if w > xmax - xmin or h > ymax - ymin:
        raise SizeTooLarge(
            f"window {w}x{h} does not fit the domain {xmax - xmin}x{ymax - ymin}"
        )
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    rows = []
    for x in xs:
        for y in ys:
            ox = min(max(x - 0.5 * w, xmin), xmax - w)
            oy = min(max(y - 0.5 * h, ymin), ymax - h)
            report = scan_windows(
                domain, [Window(ox, oy, w, h)], grid, model, blocks, som_transform
            )[0]
            rows.append((float(x), float(y), int(report.fused)))
    return rows


def default_scene() -> Scene:
    """Three blocks whose pair cycle visits every contact code.

    A static slab spans x in [0, 8] below y = 1.  A unit square slides
    along the slab's top face (edge-edge while their x-spans overlap,
    vertex-vertex exactly at the slab corner).  A diamond rides next to
    the square with its lowest vertex on the slab's top face (vertex-edge
    across the interior) and its left vertex welded to the square's
    top-right corner (vertex-vertex at every step).  All coordinates and
    speeds are binary fractions, so contact instants land exactly on
    integer steps, and the run ends while both slab contacts are still
    live so the no-contact samples all come from the compact approach
    phase.
    """
    slab = Block(0, [(0.0, 0.0), (8.0, 0.0), (8.0, 1.0), (0.0, 1.0)])
    square = Block(1, [(-6.125, 1.0), (-5.125, 1.0), (-5.125, 2.0), (-6.125, 2.0)])
    diamond = Block(2, [(-4.125, 1.0), (-3.125, 2.0), (-4.125, 3.0), (-5.125, 2.0)])
    velocities = np.array([[0.0, 0.0], [0.0625, 0.0], [0.0625, 0.0]])
    return Scene(blocks=[slab, square, diamond], velocities=velocities, steps=150, dt=1.0)


def save_scene(scene: Scene, path):
    payload = {
        "blocks": [b.to_dict() for b in scene.blocks],
        "velocities": [[float(vx), float(vy)] for vx, vy in scene.velocities],
        "steps": scene.steps,
        "dt": scene.dt,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_scene(path) -> Scene:
    with open(path) as fh:
        payload = json.load(fh)
    return Scene(
        blocks=[Block.from_dict(b) for b in payload["blocks"]],
        velocities=np.asarray(payload["velocities"], dtype=float),
        steps=int(payload["steps"]),
        dt=float(payload["dt"]),
    )


def save_dataset(dataset: Dataset, path):
    """Write train rows then check rows; the row order encodes the split."""
    header = [f"f{i + 1}" for i in range(N_FEATURES)] + ["label", "step"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for sample in list(dataset.train) + list(dataset.check):
            writer.writerow(
                [repr(float(v)) for v in sample.features]
                + [int(sample.label), sample.step]
            )


def load_dataset(path, n_train: int = 100) -> Dataset:
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) != N_FEATURES + 2:
            raise ValueError(f"expected {N_FEATURES + 2} columns, got {len(header)}")
        for row in reader:
            samples.append(
                Sample(
                    features=np.array([float(v) for v in row[:N_FEATURES]]),
                    label=ContactState(int(row[N_FEATURES])),
                    step=int(row[N_FEATURES + 1]),
                )
            )
    return Dataset(train=samples[:n_train], check=samples[n_train:])


def save_trace(samples, dt: float, path):
    """Per-step contact trace of the sampled pair: step, time, state."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "t", "state"])
        for s in samples:
            writer.writerow([s.step, repr(float(s.step * dt)), int(s.label)])


def save_window_report(reports, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["wx", "wy", "ww", "wh", "som", "nfis", "fused", "disagree"])
        for r in reports:
            writer.writerow(
                [
                    repr(float(r.window.x)),
                    repr(float(r.window.y)),
                    repr(float(r.window.width)),
                    repr(float(r.window.height)),
                    int(r.som),
                    int(r.nfis),
                    int(r.fused),
                    int(r.disagree),
                ]
            )
