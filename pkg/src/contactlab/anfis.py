"""Takagi-Sugeno fuzzy inference with Gaussian memberships and hybrid training.

A model is M rules over n inputs.  Rule k carries one Gaussian membership
per input (center c, width sigma) and a linear consequent with n+1 weights.
The model output is the firing-strength-weighted average of the rule
consequents, where a rule's firing strength is the product of its
memberships.

Training alternates a global ridge least-squares solve for every consequent
weight (premises frozen) with one batch gradient step on the centers and
widths (consequents frozen).  A gradient step that fails to improve the fit
is rolled back and the learning rate halved, so the RMSE recorded after
each least-squares solve never increases.

Inputs are standardized (zero mean, unit variance) with parameters stored
in the model, so models built on mixed-unit features stay well conditioned.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DegenerateFiring, DimensionMismatch, NonFinite, SingularSystem
from .geometry import ContactState

# Raw firing-strength sums below this count as fully underflowed; inference
# then falls back to the consequent of the strongest rule.
_LOG_TINY = math.log(1e-300)
# Lower bound applied to widths after each gradient step (sigma > 0 invariant).
_SIGMA_FLOOR = 1e-6
_RIDGE = 1e-8


@dataclass(frozen=True)
class GaussianMf:
    """Gaussian membership: peak 1 at c, width sigma."""

    c: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class TskRule:
    antecedents: tuple
    consequent: tuple

    def __post_init__(self):
        object.__setattr__(self, "antecedents", tuple(self.antecedents))
        object.__setattr__(self, "consequent", tuple(float(p) for p in self.consequent))
        if len(self.consequent) != len(self.antecedents) + 1:
            raise ValueError(
                f"consequent needs {len(self.antecedents) + 1} weights, got {len(self.consequent)}"
            )


class TskModel:
    """M rules of shared input dimension n plus the input standardization."""

    def __init__(self, n: int, rules, standardization=None):
        rules = list(rules)
        if n < 1:
            raise ValueError(f"input dimension must be >= 1, got {n}")
        if not rules:
            raise ValueError("a model needs at least one rule")
        for rule in rules:
            if len(rule.antecedents) != n:
                raise DimensionMismatch(
                    f"rule has {len(rule.antecedents)} antecedents, model dimension is {n}"
                )
        self.n = int(n)
        self.rules = rules
        if standardization is None:
            means = np.zeros(n)
            stds = np.ones(n)
        else:
            means = np.asarray(standardization[0], dtype=float).copy()
            stds = np.asarray(standardization[1], dtype=float).copy()
            if means.shape != (n,) or stds.shape != (n,):
                raise DimensionMismatch("standardization arrays must have length n")
            if np.any(stds <= 0.0):
                raise ValueError("standardization stds must be positive")
        self.means = means
        self.stds = stds

    @property
    def m(self) -> int:
        return len(self.rules)

    def standardize(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.means) / self.stds

    def premise_arrays(self):
        centers = np.array([[mf.c for mf in r.antecedents] for r in self.rules])
        sigmas = np.array([[mf.sigma for mf in r.antecedents] for r in self.rules])
        return centers, sigmas

    def consequent_array(self) -> np.ndarray:
        return np.array([r.consequent for r in self.rules])


def compute_standardization(features: np.ndarray):
    """Per-column mean and std of a training matrix; constant columns get std 1."""
    x = np.asarray(features, dtype=float)
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds[stds == 0.0] = 1.0
    return means, stds


def mf_eval(mf: GaussianMf, x: float) -> float:
    """exp(-(x - c)^2 / (2 sigma^2)); 1 exactly at the center."""
    d = (x - mf.c) / mf.sigma
    return math.exp(-0.5 * d * d)


def firing_strength(rule: TskRule, x) -> float:
    """Product of the rule's membership values at x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(rule.antecedents),):
        raise DimensionMismatch(
            f"input has shape {x.shape}, rule expects ({len(rule.antecedents)},)"
        )
    w = 1.0
    for mf, xj in zip(rule.antecedents, x):
        w *= mf_eval(mf, float(xj))
    return w


def consequent_eval(rule: TskRule, x) -> float:
    """Linear consequent p0 + sum_j p_j x_j."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(rule.antecedents),):
        raise DimensionMismatch(
            f"input has shape {x.shape}, rule expects ({len(rule.antecedents)},)"
        )
    p = rule.consequent
    acc = p[0]
    for j in range(x.shape[0]):
        acc += p[j + 1] * float(x[j])
    return acc


def _log_strength(rule: TskRule, z: np.ndarray) -> float:
    acc = 0.0
    for mf, zj in zip(rule.antecedents, z):
        d = (float(zj) - mf.c) / mf.sigma
        acc -= 0.5 * d * d
    return acc


def infer(model: TskModel, x) -> float:
    """Normalized weighted sum of rule consequents at one input point.

    The weights are computed through a max-shifted exponential so that far
    inputs degrade gracefully: if every strength underflows (raw sum below
    1e-300) the strongest rule's consequent is returned outright.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise DimensionMismatch(f"input has shape {x.shape}, model expects ({model.n},)")
    z = model.standardize(x)
    logs = [_log_strength(rule, z) for rule in model.rules]
    top = max(logs)
    if math.isnan(top):
        raise DegenerateFiring("firing strengths are not finite")
    shifted = [math.exp(lw - top) for lw in logs] if top > -math.inf else None
    if shifted is None or top + math.log(sum(shifted)) < _LOG_TINY:
        best = max(range(len(logs)), key=lambda k: (logs[k], -k))
        return consequent_eval(model.rules[best], z)
    total = sum(shifted)
    y = 0.0
    for wk, rule in zip(shifted, model.rules):
        y += (wk / total) * consequent_eval(rule, z)
    return y


def predict_contact_state(model: TskModel, x) -> ContactState:
    """Round the crisp output to the nearest code and clamp into {0..3}."""
    y = infer(model, x)
    code = int(math.floor(y + 0.5))
    return ContactState(min(3, max(0, code)))


def _forward_batch(centers, sigmas, consequents, z):
    """Batch inference internals: output, normalized firings, rule outputs.

    Rows whose raw firing sum underflows get a one-hot weight on their
    strongest rule, which reproduces the scalar fallback and zeroes those
    rows' premise gradients.
    """
    exponents = _backend.firing_exponents(z, centers, sigmas)
    top = exponents.max(axis=1)
    if np.isnan(top).any():
        raise DegenerateFiring("firing strengths are not finite")
    degenerate = top < _LOG_TINY
    shifted = np.exp(exponents - np.maximum(top, _LOG_TINY)[:, None])
    sums = shifted.sum(axis=1)
    if degenerate.any():
        rows = np.flatnonzero(degenerate)
        shifted[rows] = 0.0
        shifted[rows, np.argmax(exponents[rows], axis=1)] = 1.0
        sums[rows] = 1.0
    wbar = shifted / sums[:, None]
    rule_out = z @ consequents[:, 1:].T + consequents[:, 0]
    y = np.sum(wbar * rule_out, axis=1)
    return y, wbar, rule_out


def infer_batch(model: TskModel, features) -> np.ndarray:
    """Vectorized infer over the rows of a feature matrix."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[1] != model.n:
        raise DimensionMismatch(f"features have {x.shape[1]} columns, model expects {model.n}")
    z = np.ascontiguousarray(model.standardize(x))
    centers, sigmas = model.premise_arrays()
    y, _, _ = _forward_batch(centers, sigmas, model.consequent_array(), z)
    return y


def predict_batch(model: TskModel, features) -> np.ndarray:
    y = infer_batch(model, features)
    return np.clip(np.floor(y + 0.5).astype(int), 0, 3)


def _normalized_firing(centers, sigmas, z):
    exponents = _backend.firing_exponents(z, centers, sigmas)
    top = exponents.max(axis=1)
    if np.isnan(top).any():
        raise DegenerateFiring("firing strengths are not finite")
    degenerate = top < _LOG_TINY
    shifted = np.exp(exponents - np.maximum(top, _LOG_TINY)[:, None])
    sums = shifted.sum(axis=1)
    if degenerate.any():
        rows = np.flatnonzero(degenerate)
        shifted[rows] = 0.0
        shifted[rows, np.argmax(exponents[rows], axis=1)] = 1.0
        sums[rows] = 1.0
    return shifted / sums[:, None]


def _solve_consequents(centers, sigmas, z, targets, ridge=_RIDGE):
    """Global ridge least squares for all consequents with premises frozen.

    Returns (consequents (M, n+1), rmse).  The design matrix couples every
    rule through the shared normalization, so all M consequents are solved
    in one system.
    """
    n_pts, n = z.shape
    m = centers.shape[0]
    wbar = _normalized_firing(centers, sigmas, z)
    ones = np.ones((n_pts, 1))
    design = (wbar[:, :, None] * np.concatenate([ones, z], axis=1)[:, None, :]).reshape(
        n_pts, m * (n + 1)
    )
    gram = design.T @ design
    gram[np.diag_indices_from(gram)] += ridge
    try:
        theta = np.linalg.solve(gram, design.T @ targets)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"consequent solve failed: {exc}") from exc
    if not np.all(np.isfinite(theta)):
        raise SingularSystem("consequent solve produced non-finite weights")
    resid = design @ theta - targets
    rmse = float(np.sqrt(np.mean(resid * resid)))
    return theta.reshape(m, n + 1), rmse


def _rmse_at(centers, sigmas, consequents, z, targets) -> float:
    y, _, _ = _forward_batch(centers, sigmas, consequents, z)
    return float(np.sqrt(np.mean((y - targets) ** 2)))


def _model_from_arrays(n, centers, sigmas, consequents, means, stds) -> TskModel:
    rules = [
        TskRule(
            antecedents=tuple(GaussianMf(float(c), float(s)) for c, s in zip(ck, sk)),
            consequent=tuple(float(p) for p in pk),
        )
        for ck, sk, pk in zip(centers, sigmas, consequents)
    ]
    return TskModel(n, rules, standardization=(means, stds))


def fit_consequents(model: TskModel, features, targets) -> float:
    """One least-squares pass setting the model's consequents in place.

    Premises stay frozen.  Returns the training RMSE after the solve.
    """
    x = np.asarray(features, dtype=float)
    t = np.asarray(targets, dtype=float)
    z = np.ascontiguousarray(model.standardize(x))
    centers, sigmas = model.premise_arrays()
    consequents, rmse = _solve_consequents(centers, sigmas, z, t)
    model.rules = [
        TskRule(antecedents=rule.antecedents, consequent=tuple(float(p) for p in pk))
        for rule, pk in zip(model.rules, consequents)
    ]
    return rmse


def train_hybrid(model: TskModel, features, targets, epochs: int = 10, lr: float = 0.01):
    """Hybrid least-squares plus gradient training.

    Each epoch solves the consequents by ridge least squares, records the
    training RMSE, then takes one gradient step on the centers and widths.
    A step that raises the RMSE (including through the ridge term on the
    next solve) is rolled back and the learning rate halved, which makes
    the recorded trace non-increasing by construction.

    Returns (trained model, trace).  The trained model is the recorded
    state with the lowest RMSE; the input model is left untouched.
    """
    if epochs < 0:
        raise ValueError(f"epochs must be >= 0, got {epochs}")
    if lr <= 0.0:
        raise ValueError(f"lr must be positive, got {lr}")
    x = np.atleast_2d(np.asarray(features, dtype=float))
    t = np.asarray(targets, dtype=float).ravel()
    if x.shape[0] == 0:
        raise ValueError("training data is empty")
    if x.shape[1] != model.n:
        raise DimensionMismatch(f"features have {x.shape[1]} columns, model expects {model.n}")
    if t.shape[0] != x.shape[0]:
        raise DimensionMismatch("features and targets disagree on sample count")
    if epochs == 0:
        return model, []

    z = np.ascontiguousarray(model.standardize(x))
    centers, sigmas = model.premise_arrays()
    consequents = model.consequent_array()
    n_pts = z.shape[0]

    trace: list = []
    best = None
    prev = None
    step = lr
    solved_rmse = None  # set when the premises are unchanged since the last solve
    for _ in range(epochs):
        if solved_rmse is None:
            consequents, rmse = _solve_consequents(centers, sigmas, z, t)
            if prev is not None and rmse > prev[3]:
                # The ridge penalty let the re-solve land slightly above the
                # previous optimum; undo the gradient step that caused it.
                centers, sigmas, consequents, rmse = prev
                step *= 0.5
        else:
            rmse = solved_rmse
        trace.append(rmse)
        prev = (centers.copy(), sigmas.copy(), consequents.copy(), rmse)
        if best is None or rmse < best[3]:
            best = prev

        y, wbar, rule_out = _forward_batch(centers, sigmas, consequents, z)
        resid = (y - t) / n_pts
        grad_c, grad_s = _backend.premise_grad_sums(z, centers, sigmas, wbar, rule_out, y, resid)
        cand_c = centers - step * grad_c
        cand_s = np.maximum(sigmas - step * grad_s, _SIGMA_FLOOR)
        if not (np.all(np.isfinite(cand_c)) and np.all(np.isfinite(cand_s))):
            raise NonFinite("premise parameters left the finite range; lower the learning rate")
        if _rmse_at(cand_c, cand_s, consequents, z, t) > rmse:
            step *= 0.5
            solved_rmse = rmse
        else:
            centers, sigmas = cand_c, cand_s
            solved_rmse = None

    out = _model_from_arrays(model.n, best[0], best[1], best[2], model.means, model.stds)
    return out, trace


def save_model(model: TskModel, path):
    payload = {
        "n": model.n,
        "standardization": {
            "means": [float(v) for v in model.means],
            "stds": [float(v) for v in model.stds],
        },
        "rules": [
            {
                "mf": [{"c": mf.c, "sigma": mf.sigma} for mf in rule.antecedents],
                "p": list(rule.consequent),
            }
            for rule in model.rules
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_model(path) -> TskModel:
    with open(path) as fh:
        payload = json.load(fh)
    rules = [
        TskRule(
            antecedents=tuple(GaussianMf(mf["c"], mf["sigma"]) for mf in entry["mf"]),
            consequent=tuple(entry["p"]),
        )
        for entry in payload["rules"]
    ]
    std = payload["standardization"]
    return TskModel(payload["n"], rules, standardization=(std["means"], std["stds"]))
