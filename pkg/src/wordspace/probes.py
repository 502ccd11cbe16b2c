"""Linear probes: word identification and context retrieval.

Both probes are one-vs-rest L2-regularized logistic regression trained
from scratch with a deterministic full-batch solver (gradient descent
with Armijo backtracking). One training example per class, ten test
examples per class is the canonical layout; the solver itself is layout
agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError
from .formats import FIRST_TOKEN_CATEGORIES, EmbeddingRecord, LexiconEntry
from .stats import log_bin

DEFAULT_L2 = 1.0
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 1000

# Bin layouts for the error-rate breakdowns.
FREQUENCY_EDGES = (1e2, 1e3, 1e4, 1e5, 1e6, 1e7)
SENSE_BINS = ((1, 1), (2, 3), (4, 10), (11, None))
TOKEN_BINS = ((1, 1), (2, 2), (3, 3), (4, None))


@dataclass(frozen=True)
class ProbeDataset:
    """One-shot training set plus a labeled test set.

    ``train_x[i]`` is the single training example for ``classes[i]``;
    ``test_y`` holds indices into ``classes``.
    """

    classes: tuple[str, ...]
    train_x: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "train_x", np.asarray(self.train_x, dtype=np.float64))
        object.__setattr__(self, "test_x", np.asarray(self.test_x, dtype=np.float64))
        object.__setattr__(self, "test_y", np.asarray(self.test_y, dtype=np.int64))
        if len(self.classes) != self.train_x.shape[0]:
            raise InputError("need exactly one training example per class")
        if len(set(self.classes)) != len(self.classes):
            raise InputError("duplicate class labels")
        if self.test_x.shape[0] != self.test_y.shape[0]:
            raise InputError("test examples and labels must align")
        if self.test_x.shape[0] and self.test_x.shape[1] != self.dim:
            raise InputError("train/test dimension mismatch")
        if self.test_y.size and (self.test_y.min() < 0 or self.test_y.max() >= len(self.classes)):
            raise InputError("test label outside the class list")

    @property
    def dim(self) -> int:
        return self.train_x.shape[1]


@dataclass(frozen=True)
class TrainingMeta:
    iterations: np.ndarray  # per-class iteration counts
    final_loss: np.ndarray  # per-class regularized NLL at the solution


@dataclass(frozen=True)
class LinearClassifier:
    """Per-class weight rows with the bias in the last column."""

    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, d + 1)
    l2_strength: float
    meta: TrainingMeta

    @property
    def dim(self) -> int:
        return self.weights.shape[1] - 1


@dataclass(frozen=True)
class ProbeReport:
    per_class_errors: dict[str, int]
    per_class_totals: dict[str, int]
    overall_accuracy: float


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_grad(w, X, y, l2_strength, sample_weight=None):
    """Regularized negative log-likelihood and its gradient.

    The bias (last component of ``w``) is not regularized. Uses the
    log1p-stable form of the per-sample loss.
    """
    w = np.asarray(w, dtype=np.float64)
    z = X @ w
    per = np.logaddexp(0.0, z) - y * z
    if sample_weight is not None:
        per = per * sample_weight
    reg = w.copy()
    reg[-1] = 0.0
    loss = float(per.sum() + 0.5 * l2_strength * (reg @ reg))
    residual = _sigmoid(z) - y
    if sample_weight is not None:
        residual = residual * sample_weight
    grad = X.T @ residual + l2_strength * reg
    return loss, grad


def _fit_binary(X, y, l2_strength, tol, max_iter, sample_weight=None):
    w = np.zeros(X.shape[1])
    loss, grad = logistic_loss_grad(w, X, y, l2_strength, sample_weight)
    step = 1.0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        gnorm2 = float(grad @ grad)
        if np.sqrt(gnorm2) < tol:
            iterations -= 1
            break
        while True:
            w_new = w - step * grad
            loss_new, grad_new = logistic_loss_grad(w_new, X, y, l2_strength, sample_weight)
            if loss_new <= loss - 1e-4 * step * gnorm2 or step < 1e-16:
                break
            step *= 0.5
        w, loss, grad = w_new, loss_new, grad_new
        step = min(step * 2.0, 1e8)
    return w, iterations, loss


def train_ovr_logistic(
    dataset: ProbeDataset,
    l2_strength: float = DEFAULT_L2,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int = 0,
    balance_classes: bool = False,
) -> LinearClassifier:
    """Fit one regularized binary logistic model per class (one-vs-rest).

    The solver is deterministic (zero initialization, full-batch descent
    with backtracking); ``seed`` is accepted for interface stability and
    reserved for stochastic solver variants. ``balance_classes`` weights
    the single positive example by the number of negatives, compensating
    the heavy one-vs-rest imbalance of one-shot training.
    """
    del seed  # deterministic solver; kept in the signature for reproducibility contracts
    if l2_strength < 0:
        raise InputError("l2_strength must be nonnegative")
    if tol <= 0:
        raise InputError("tol must be positive")
    k = len(dataset.classes)
    if k < 2:
        raise InputError("need >=2 classes")
    if not np.all(np.isfinite(dataset.train_x)):
        raise InputError("non-finite training features")
    X = np.hstack([dataset.train_x, np.ones((k, 1))])
    weights = np.empty((k, dataset.dim + 1))
    iterations = np.empty(k, dtype=np.int64)
    final_loss = np.empty(k)
    for c in range(k):
        y = np.zeros(k)
        y[c] = 1.0
        sw = None
        if balance_classes:
            sw = np.ones(k)
            sw[c] = float(k - 1)
        weights[c], iterations[c], final_loss[c] = _fit_binary(
            X, y, l2_strength, tol, max_iter, sw
        )
    return LinearClassifier(
        classes=tuple(dataset.classes),
        weights=weights,
        l2_strength=l2_strength,
        meta=TrainingMeta(iterations=iterations, final_loss=final_loss),
    )


def decision_scores(model: LinearClassifier, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != model.dim:
        raise InputError(f"point dimension {pts.shape[1]} != model dimension {model.dim}")
    return pts @ model.weights[:, :-1].T + model.weights[:, -1]


def predict(model: LinearClassifier, point) -> str:
    """Argmax class for one point; exact ties go to the lowest class index."""
    scores = decision_scores(model, np.asarray(point))[0]
    return model.classes[int(np.argmax(scores))]


def evaluate(model: LinearClassifier, dataset: ProbeDataset) -> ProbeReport:
    """Per-class error counts and overall accuracy on the test split."""
    if dataset.test_x.shape[0] == 0:
        raise InputError("empty test set")
    if dataset.classes != model.classes:
        raise InputError("dataset classes do not match the model")
    pred = np.argmax(decision_scores(model, dataset.test_x), axis=1)
    errors = {c: 0 for c in model.classes}
    totals = {c: 0 for c in model.classes}
    for yhat, y in zip(pred, dataset.test_y):
        label = model.classes[int(y)]
        totals[label] += 1
        if int(yhat) != int(y):
            errors[label] += 1
    accuracy = 1.0 - sum(errors.values()) / dataset.test_y.shape[0]
    return ProbeReport(errors, totals, float(accuracy))


def partition_classes(
    words: Sequence[str], models: int, classes_per_model: int, seed: int = 0
) -> list[list[str]]:
    """Seeded shuffle, then disjoint consecutive slices of class lists."""
    needed = models * classes_per_model
    if len(words) < needed:
        raise InputError(f"need {needed} words for {models} models x {classes_per_model} classes, got {len(words)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(words))
    picked = [words[i] for i in order[:needed]]
    return [picked[m * classes_per_model : (m + 1) * classes_per_model] for m in range(models)]


def _sense_label(lo, hi):
    if hi is None:
        return f">{lo - 1}"
    if lo == hi:
        return str(lo)
    return f"{lo}-{hi}"


def bin_error_rates(
    reports: Sequence[ProbeReport],
    lexicon: Mapping[str, LexiconEntry],
    by: str = "frequency",
    frequency_edges: Sequence[float] = FREQUENCY_EDGES,
) -> list[tuple[str, float, int]]:
    """Aggregate per-word error rates into labeled bins.

    ``by`` selects the word characteristic: "frequency" (log bins),
    "senses", "tokens", or "first_token". Returns (bin label, error
    percent, instance count) rows; the percent is instance weighted.
    Words lacking a sense count are left out of the sense breakdown only.
    """
    errors: dict[str, int] = {}
    totals: dict[str, int] = {}
    for report in reports:
        for word, err in report.per_class_errors.items():
            if word not in lexicon:
                raise InputError(f"no lexicon entry for word '{word}'")
            errors[word] = errors.get(word, 0) + err
            totals[word] = totals.get(word, 0) + report.per_class_totals[word]
    words = sorted(totals)

    def ranged_bins(bins, value_of):
        labels = [_sense_label(lo, hi) for lo, hi in bins]
        agg = {label: [0, 0] for label in labels}
        for w in words:
            v = value_of(lexicon[w])
            if v is None:
                continue
            for (lo, hi), label in zip(bins, labels):
                if v >= lo and (hi is None or v <= hi):
                    agg[label][0] += errors[w]
                    agg[label][1] += totals[w]
                    break
        return agg

    if by == "frequency":
        edges = list(frequency_edges)
        labels = [f"{edges[i]:g}-{edges[i + 1]:g}" for i in range(len(edges) - 1)]
        labels.append(f"{edges[-1]:g}+")
        agg = {label: [0, 0] for label in labels}
        freqs = [lexicon[w].frequency for w in words]
        if words:
            for w, b in zip(words, log_bin(freqs, edges)):
                agg[labels[int(b)]][0] += errors[w]
                agg[labels[int(b)]][1] += totals[w]
    elif by == "senses":
        agg = ranged_bins(SENSE_BINS, lambda e: e.sense_count)
    elif by == "tokens":
        agg = ranged_bins(TOKEN_BINS, lambda e: e.token_count)
    elif by == "first_token":
        agg = {label: [0, 0] for label in FIRST_TOKEN_CATEGORIES}
        for w in words:
            cat = lexicon[w].first_token_category
            agg[cat][0] += errors[w]
            agg[cat][1] += totals[w]
    else:
        raise InputError(f"unknown binning '{by}'")

    return [
        (label, 100.0 * err / total if total else 0.0, total)
        for label, (err, total) in agg.items()
    ]


def build_context_retrieval_dataset(
    records: Sequence[EmbeddingRecord], word: str, templates: int = 30
) -> ProbeDataset:
    """Dataset for recovering a context id from a word's embedding.

    Training rows are the mask-token embeddings of each template context;
    test rows are the word's embeddings in those same contexts. Context
    ids become the class labels.
    """
    masks = {r.context_id: r for r in records if r.is_mask}
    word_rows = {r.context_id: r for r in records if not r.is_mask and r.token == word}
    if not word_rows:
        raise InputError(f"no embeddings for word '{word}'")
    context_ids = sorted(word_rows)
    if len(context_ids) != templates:
        raise InputError(
            f"word '{word}' covers {len(context_ids)} contexts, expected {templates}"
        )
    missing = [c for c in context_ids if c not in masks]
    if missing:
        raise InputError(f"missing mask embedding for context {missing[0]}")
    classes = [str(c) for c in context_ids]
    train_x = np.asarray([masks[c].vector for c in context_ids])
    test_x = np.asarray([word_rows[c].vector for c in context_ids])
    test_y = np.arange(len(context_ids))
    return ProbeDataset(classes=classes, train_x=train_x, test_x=test_x, test_y=test_y)
