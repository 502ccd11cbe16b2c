"""Minimum enclosing balls and size measures for embedding clouds.

Two solvers cover the two regimes we care about. ``meb_exact_small`` is a
randomized exact solver (recursion over boundary support sets, at most
d+1 of them) usable up to d=10; it exists mainly as an oracle.
``meb_coreset`` is the workhorse for real embedding dimensions: the
classic core-set iteration that walks the candidate center a 1/(i+1)
fraction toward the current farthest point. Its (1+eps) guarantee needs
ceil(1/eps^2) iterations in the worst case, but we certify optimality on
the fly with a dual lower bound (the weighted variance of any convex
combination of the points never exceeds the squared optimal radius), so
in practice the loop exits after a few hundred steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvariantError

DEFAULT_EPSILON = 1e-3

# Exact solver is only meant as a low-dimensional oracle.
EXACT_MAX_DIM = 10
EXACT_MAX_POINTS = 1000


def as_points(points) -> np.ndarray:
    """Validate and stack a point collection into an (n, d) float64 array."""
    if isinstance(points, np.ndarray) and points.ndim == 2:
        pts = points.astype(np.float64, copy=False)
    else:
        seq = [np.asarray(p, dtype=np.float64) for p in points]
        if len(seq) == 0:
            raise InputError("empty cohort")
        if any(p.ndim != 1 for p in seq):
            raise InputError("points must be an (n, d) array or a sequence of d-vectors")
        dims = {p.shape[0] for p in seq}
        if len(dims) != 1:
            raise InputError(f"points have mixed dimensions: {sorted(dims)}")
        pts = np.asarray(seq, dtype=np.float64)
    if pts.shape[0] == 0:
        raise InputError("empty cohort")
    if pts.shape[1] < 1:
        raise InputError("points must have dimension >= 1")
    if not np.all(np.isfinite(pts)):
        raise InputError("non-finite coordinate in point set")
    return pts


@dataclass(frozen=True)
class SiblingCohort:
    """All contextualized vectors for one word from one source."""

    word: str
    source: str
    points: np.ndarray  # (n, d)

    def __post_init__(self):
        if not self.word:
            raise InputError("cohort word must be nonempty")
        object.__setattr__(self, "points", as_points(self.points))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Ball:
    """An enclosing ball with its approximation tolerance.

    ``support_size`` counts the points that determined the solution: the
    boundary support set for the exact solver, the distinct farthest
    points visited for the core-set iteration.
    """

    center: np.ndarray
    radius: float
    epsilon: float = 0.0
    support_size: int = field(default=0)

    def contains(self, point, slack: float = 0.0) -> bool:
        d = np.asarray(point, dtype=np.float64) - self.center
        return math.sqrt(d @ d) <= self.radius * (1.0 + self.epsilon) + slack


def meb_coreset(points, epsilon: float = DEFAULT_EPSILON) -> Ball:
    """(1+epsilon)-approximate minimum enclosing ball via core-set iteration.

    The returned radius is the exact maximum distance from the final
    center, so the ball always encloses every input point; epsilon only
    bounds how far that radius can sit above the optimum.
    """
    if not 0.0 < epsilon <= 0.5:
        raise InputError(f"epsilon must be in (0, 0.5], got {epsilon}")
    pts = as_points(points)
    n = pts.shape[0]
    if n == 1:
        return Ball(pts[0].copy(), 0.0, epsilon, support_size=1)

    sq = np.einsum("ij,ij->i", pts, pts)
    # Start at the input point farthest from the first one.
    j = int(np.argmax(sq - 2.0 * (pts @ pts[0])))
    center = pts[j].copy()
    weighted_sq = sq[j]  # sum_i u_i ||x_i||^2 for the implicit weights u
    visited = {j}

    cap = math.ceil(1.0 / (epsilon * epsilon))
    quality = (1.0 + epsilon) ** 2
    best_r2 = math.inf
    best_center = center.copy()
    best_phi = 0.0

    for i in range(1, cap + 1):
        cc = center @ center
        dist2 = sq - 2.0 * (pts @ center) + cc
        k = int(np.argmax(dist2))
        r2 = dist2[k]
        if r2 < best_r2:
            best_r2 = r2
            best_center = center.copy()
        # Dual bound: phi = sum_i u_i ||x_i - c||^2 <= r_opt^2.
        best_phi = max(best_phi, weighted_sq - cc)
        if best_r2 <= quality * best_phi or r2 <= 0.0:
            break
        visited.add(k)
        step = 1.0 / (i + 1.0)
        center += step * (pts[k] - center)
        weighted_sq += step * (sq[k] - weighted_sq)

    radius = math.sqrt(max(best_r2, 0.0))
    ball = Ball(best_center, radius, epsilon, support_size=len(visited))
    _check_certificate(ball, pts)
    return ball


def _check_certificate(ball: Ball, pts: np.ndarray) -> None:
    diff = pts - ball.center
    max_d = math.sqrt(np.max(np.einsum("ij,ij->i", diff, diff)))
    if max_d > ball.radius * (1.0 + ball.epsilon) + 1e-9:
        raise InvariantError(
            f"enclosing certificate failed: max distance {max_d} > "
            f"{ball.radius} * (1 + {ball.epsilon})"
        )


def _circumball(support: np.ndarray) -> tuple[np.ndarray, float]:
    # Smallest ball with all support points on its boundary: center lies in
    # their affine hull, solved from the normal equations.
    q0 = support[0]
    if support.shape[0] == 1:
        return q0.copy(), 0.0
    A = support[1:] - q0
    b = np.einsum("ij,ij->i", A, A)
    lam, *_ = np.linalg.lstsq(2.0 * (A @ A.T), b, rcond=None)
    center = q0 + A.T @ lam
    diff = support - center
    radius = math.sqrt(max(float(np.max(np.einsum("ij,ij->i", diff, diff))), 0.0))
    return center, radius


def meb_exact_small(points, seed: int = 0) -> Ball:
    """Exact minimum enclosing ball for low dimension (oracle grade).

    Randomized incremental construction over boundary support sets;
    deterministic for a fixed shuffle seed. Restricted to d <= 10 and
    n <= 1000 where the recursion is cheap.
    """
    pts = as_points(points)
    n, d = pts.shape
    if d > EXACT_MAX_DIM:
        raise InputError(f"dimension {d} too large for exact solver; use meb_coreset")
    if n > EXACT_MAX_POINTS:
        raise InputError(f"{n} points too many for exact solver; use meb_coreset")

    # Exact duplicates never affect the ball; dropping them keeps the
    # support-set recursion away from degenerate affine hulls.
    pts = np.unique(pts, axis=0)
    rng = np.random.default_rng(seed)
    pts = pts[rng.permutation(pts.shape[0])]

    def outside(center, r2, p):
        diff = p - center
        return diff @ diff > r2 * (1.0 + 1e-12) + 1e-14

    def ball_with_boundary(prefix: int, support: list[np.ndarray]):
        center, radius = _circumball(np.asarray(support))
        size = len(support)
        if size == d + 1:
            return center, radius, size
        r2 = radius * radius
        for i in range(prefix):
            if outside(center, r2, pts[i]):
                center, radius, size = ball_with_boundary(i, support + [pts[i]])
                r2 = radius * radius
        return center, radius, size

    center, radius, support_n = pts[0].copy(), 0.0, 1
    for i in range(1, pts.shape[0]):
        if outside(center, radius * radius, pts[i]):
            center, radius, support_n = ball_with_boundary(i, [pts[i]])
    return Ball(center, float(radius), 0.0, support_size=support_n)


def cohort_radius(
    cohort: SiblingCohort,
    sample_size: int = 10,
    trials: int = 5,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
) -> float:
    """Mean enclosing-ball radius over seeded subsamples of the cohort.

    Each trial draws ``sample_size`` points without replacement and
    computes the approximate enclosing ball; the mean radius over trials
    is returned. Deterministic for a fixed seed.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    n = len(cohort)
    if n < sample_size:
        raise InputError(
            f"cohort '{cohort.word}' has {n} points, fewer than sample_size={sample_size}"
        )
    rng = np.random.default_rng(seed)
    radii = np.empty(trials)
    for t in range(trials):
        idx = rng.choice(n, size=sample_size, replace=False)
        radii[t] = meb_coreset(cohort.points[idx], epsilon).radius
    return float(radii.mean())


def pairwise_mean_distance(points) -> float:
    """Mean Euclidean distance over all unordered pairs."""
    pts = as_points(points)
    n = pts.shape[0]
    if n < 2:
        raise InputError("need at least 2 points for pairwise distances")
    sq = np.einsum("ij,ij->i", pts, pts)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    iu = np.triu_indices(n, k=1)
    return float(np.sqrt(np.maximum(d2[iu], 0.0)).mean())


def volume_ratio(radius_factor: float, dim: int) -> float:
    """Volume ratio of two same-dimension balls whose radii differ by a factor."""
    if radius_factor <= 0:
        raise InputError("radius_factor must be positive")
    if dim < 1:
        raise InputError("dim must be >= 1")
    return float(radius_factor) ** int(dim)
