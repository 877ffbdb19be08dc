"""Linear SVM trained by dual coordinate descent.

Solves the L2-regularized hinge-loss problem

    min_w  1/2 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)

through its dual

    min_a  1/2 a'Qa - sum_i a_i,   0 <= a_i <= C,   Q_ij = y_i y_j x_i.x_j

updating one dual variable at a time in a seeded random order. The bias is
learned as the weight of a constant feature (value ``bias_scale``), so it is
regularized along with ``w``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureMatrix, SparseVector

log = logging.getLogger(__name__)

SCHEMA_MODEL = "stylometer.linear-model/1"
LABEL_MAP = {1: "fake", -1: "legitimate"}


class SVMError(ValueError):
    pass


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    C: float
    seed: int
    space_id: str | None = None
    converged: bool = True
    violation: float = 0.0
    iterations: int = 0
    dual_coef: np.ndarray | None = field(default=None, repr=False)
    dual_objective: float | None = None

    @property
    def dim(self):
        return len(self.weights)

    def decision_function(self, X):
        X = _as_array(X)
        if X.shape[-1] != self.dim:
            raise SVMError(f"input has {X.shape[-1]} features, model expects {self.dim}")
        return X @ self.weights + self.bias

    def to_json(self):
        return {
            "schema": SCHEMA_MODEL,
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "C": self.C,
            "seed": self.seed,
            "space_id": self.space_id,
            "label_map": {str(k): v for k, v in LABEL_MAP.items()},
            "convergence": {
                "converged": self.converged,
                "violation": self.violation,
                "iterations": self.iterations,
            },
        }

    @classmethod
    def from_json(cls, d):
        if d.get("schema") != SCHEMA_MODEL:
            raise SVMError(f"not a model document (schema {d.get('schema')!r})")
        conv = d.get("convergence", {})
        return cls(
            weights=np.array(d["weights"], dtype=float),
            bias=float(d["bias"]),
            C=float(d["C"]),
            seed=int(d["seed"]),
            space_id=d.get("space_id"),
            converged=conv.get("converged", True),
            violation=conv.get("violation", 0.0),
            iterations=conv.get("iterations", 0),
        )


def _as_array(X):
    if isinstance(X, FeatureMatrix):
        return X.toarray()
    if isinstance(X, SparseVector):
        return X.to_dense()
    if hasattr(X, "toarray"):
        return X.toarray()
    return np.asarray(X, dtype=float)


def encode_labels(y):
    """Map labels to +1 (fake) / -1 (legitimate)."""
    out = []
    for v in y:
        if v in ("fake", 1, 1.0, True):
            out.append(1.0)
        elif v in ("legitimate", -1, -1.0):
            out.append(-1.0)
        else:
            raise SVMError(f"unknown label {v!r}")
    return np.array(out)


def train_svm(X, y, C=1.0, seed=0, tol=1e-4, max_iter=1000, space_id=None, bias_scale=1.0):
    """Fit a linear SVM. ``X`` should already be standardized."""
    X = _as_array(X)
    y = encode_labels(y)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise SVMError(f"X has shape {X.shape} but there are {len(y)} labels")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise SVMError("training data must contain both classes")
    if C <= 0:
        raise SVMError("C must be positive")
    if not np.all(np.isfinite(X)):
        raise SVMError("X contains non-finite values")

    n = X.shape[0]
    Xa = np.hstack([X, np.full((n, 1), float(bias_scale))])
    Yx = y[:, None] * Xa
    Q = Yx @ Yx.T
    diag = np.diag(Q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # Q @ alpha - 1
    rng = np.random.default_rng(seed)

    violation = np.inf
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        violation = 0.0
        for i in rng.permutation(n):
            g = grad[i]
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if abs(pg) > violation:
                violation = abs(pg)
            if pg != 0.0 and diag[i] > 0.0:
                new = min(max(a - g / diag[i], 0.0), C)
                d = new - a
                if d != 0.0:
                    alpha[i] = new
                    grad += d * Q[i]
        if violation < tol:
            break
    converged = violation < tol
    if not converged:
        log.warning("SVM did not converge in %d sweeps (violation %.3g)", max_iter, violation)

    w = Yx.T @ alpha
    return LinearModel(
        weights=w[:-1].copy(),
        bias=float(w[-1] * bias_scale),
        C=float(C),
        seed=int(seed),
        space_id=space_id,
        converged=bool(converged),
        violation=float(violation),
        iterations=sweeps,
        dual_coef=alpha,
        dual_objective=float(0.5 * alpha @ Q @ alpha - alpha.sum()),
    )


def predict(model, x):
    """Return ``(label, score)``; a score of exactly zero predicts legitimate."""
    score = float(model.decision_function(_as_array(x)))
    return ("fake" if score > 0 else "legitimate"), score


def predict_many(model, X):
    scores = model.decision_function(X)
    labels = ["fake" if s > 0 else "legitimate" for s in scores]
    return labels, scores
