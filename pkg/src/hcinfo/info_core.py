"""Discrete information-theoretic primitives.

Everything is measured in bits. Distributions are immutable; operations are
pure functions of their arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import AlignmentError, DomainError, ValidationError

SUM_TOL = 1e-9
CELL_TOL = 1e-9
DEFAULT_EPSILON = 0.006299


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Labelled letters with probabilities.

    Probabilities within ``SUM_TOL`` of summing to one are renormalised
    exactly on construction.
    """

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or len(labels) != len(probs):
            raise ValidationError(
                f"need one probability per label ({len(labels)} labels, {probs.size} probabilities)"
            )
        if not labels:
            raise ValidationError("distribution has no letters")
        if any(not label for label in labels):
            raise ValidationError("labels must be non-empty")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise ValidationError(f"labels must be unique; repeated: {dupes}")
        if not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must be finite")
        if np.any(probs < 0):
            raise ValidationError("every probability must be >= 0")
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"probabilities must sum to 1 (got {total!r})")
        probs = probs / total
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, float]]) -> "ProbabilityDistribution":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "ProbabilityDistribution":
        return cls(tuple(mapping), tuple(mapping.values()))

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "ProbabilityDistribution":
        n = len(labels)
        return cls(tuple(labels), (1.0 / n,) * n if n else ())

    @classmethod
    def one_hot(cls, labels: Sequence[str], chosen: str) -> "ProbabilityDistribution":
        if chosen not in labels:
            raise AlignmentError(f"label {chosen!r} is not in the alphabet")
        return cls(tuple(labels), tuple(1.0 if x == chosen else 0.0 for x in labels))

    @classmethod
    def from_counts(cls, labels: Sequence[str], counts: Mapping[str, float]) -> "ProbabilityDistribution":
        """Relative frequencies over ``labels``; unseen labels get 0."""
        unknown = set(counts) - set(labels)
        if unknown:
            raise AlignmentError(f"counts for unknown labels: {sorted(unknown)}")
        values = np.array([float(counts.get(x, 0.0)) for x in labels])
        if np.any(values < 0) or values.sum() <= 0:
            raise ValidationError("counts must be non-negative with a positive total")
        return cls(tuple(labels), tuple(values / values.sum()))

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.probs, dtype=float)
        a.flags.writeable = False
        return a

    def __len__(self):
        return len(self.labels)

    def prob(self, label: str) -> float:
        try:
            return self.probs[self.labels.index(label)]
        except ValueError:
            raise AlignmentError(f"label {label!r} is not in the alphabet") from None

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.probs))

    def reordered(self, labels: Sequence[str]) -> "ProbabilityDistribution":
        """The same distribution with letters listed in ``labels`` order."""
        if tuple(labels) == self.labels:
            return self
        if set(labels) != set(self.labels) or len(labels) != len(self.labels):
            raise AlignmentError(
                f"label sets differ: {sorted(self.labels)} vs {sorted(labels)}"
            )
        lookup = self.as_dict()
        return ProbabilityDistribution(tuple(labels), tuple(lookup[x] for x in labels))

    def is_close(self, other: "ProbabilityDistribution", tol: float = CELL_TOL) -> bool:
        try:
            other = other.reordered(self.labels)
        except AlignmentError:
            return False
        return bool(np.all(np.abs(self.array - other.array) <= tol))

    def is_degenerate(self) -> bool:
        return max(self.probs) == 1.0


@dataclass(frozen=True)
class JointDistribution:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=float)
        rows, cols = tuple(self.row_labels), tuple(self.col_labels)
        if cells.ndim != 2 or cells.shape != (len(rows), len(cols)):
            raise ValidationError(
                f"cells shape {cells.shape} does not match {len(rows)}x{len(cols)} labels"
            )
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValidationError("row and column labels must be unique")
        if not np.all(np.isfinite(cells)) or np.any(cells < 0):
            raise ValidationError("all cells must be finite and >= 0")
        total = float(cells.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"cells must sum to 1 (got {total!r})")
        cells = cells / total
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)
        object.__setattr__(self, "cells", tuple(tuple(float(c) for c in r) for r in cells))

    @classmethod
    def from_array(cls, cells, row_labels=None, col_labels=None) -> "JointDistribution":
        cells = np.asarray(cells, dtype=float)
        if cells.ndim != 2:
            raise ValidationError("joint distribution needs a 2-d array")
        rows = row_labels or [f"x{i}" for i in range(cells.shape[0])]
        cols = col_labels or [f"y{j}" for j in range(cells.shape[1])]
        return cls(tuple(rows), tuple(cols), tuple(map(tuple, cells)))

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.cells, dtype=float)
        a.flags.writeable = False
        return a

    def row_marginal(self) -> ProbabilityDistribution:
        return ProbabilityDistribution(self.row_labels, tuple(self.array.sum(axis=1)))

    def col_marginal(self) -> ProbabilityDistribution:
        return ProbabilityDistribution(self.col_labels, tuple(self.array.sum(axis=0)))


@dataclass(frozen=True)
class EpsilonPolicy:
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        eps = float(self.epsilon)
        if not 0.0 < eps < 0.5:
            raise ValidationError(f"epsilon must lie in (0, 0.5), got {eps!r}")
        object.__setattr__(self, "epsilon", eps)


DEFAULT_POLICY = EpsilonPolicy()


def _entropy_of(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def entropy(d: ProbabilityDistribution) -> float:
    """Shannon entropy in bits, with 0*log(0) taken as 0."""
    return _entropy_of(d.array)


def max_entropy(n: int) -> float:
    if int(n) != n or n < 1:
        raise DomainError(f"alphabet size must be a positive integer, got {n!r}")
    return math.log2(int(n))


def epsilon_adjust(d: ProbabilityDistribution, policy: EpsilonPolicy = DEFAULT_POLICY) -> ProbabilityDistribution:
    """Replace zero cells by eps/(n-1) and shrink the rest to keep the sum at 1.

    A one-hot distribution becomes 1-eps on its letter and eps/(n-1)
    everywhere else. Strictly positive inputs come back unchanged.
    """
    n = len(d)
    if n < 2:
        raise DomainError("epsilon adjustment needs at least two letters")
    p = d.array
    zeros = p == 0
    z = int(zeros.sum())
    if z == 0:
        return d
    fill = policy.epsilon / (n - 1)
    out = np.where(zeros, fill, p * (1.0 - z * fill))
    return ProbabilityDistribution(d.labels, tuple(out))


def _kl_of(q: np.ndarray, p: np.ndarray) -> float:
    mask = q > 0
    return float(np.sum(q[mask] * (np.log2(q[mask]) - np.log2(p[mask]))))


def kl_divergence(
    q: ProbabilityDistribution,
    p: ProbabilityDistribution,
    policy: EpsilonPolicy = DEFAULT_POLICY,
) -> float:
    """KL(q || p) in bits after epsilon-capping both arguments."""
    p = p.reordered(q.labels)
    if len(q) == 1:
        return 0.0
    qa = epsilon_adjust(q, policy).array
    pa = epsilon_adjust(p, policy).array
    # clamp float noise; the true value is non-negative
    return max(_kl_of(qa, pa), 0.0)


def mutual_information(j: JointDistribution) -> float:
    cells = j.array
    mask = cells > 0
    rows, cols = np.nonzero(mask)
    # subtract logs rather than dividing by px*py, which can underflow
    with np.errstate(divide="ignore"):
        log_px = np.log2(cells.sum(axis=1))[rows]
        log_py = np.log2(cells.sum(axis=0))[cols]
    c = cells[mask]
    mi = float(np.sum(c * (np.log2(c) - log_px - log_py)))
    return max(mi, 0.0)


def _stochastic(matrix, name: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise AlignmentError(f"{name} must be a non-empty 2-d matrix")
    if np.any(m < 0) or not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has negative or non-finite entries")
    bad = np.flatnonzero(np.abs(m.sum(axis=1) - 1.0) > SUM_TOL)
    if bad.size:
        raise ValidationError(f"{name} row {int(bad[0])} does not sum to 1")
    return m


class DPIResult(NamedTuple):
    i12: float
    i13: float
    holds: bool


def dpi_check(source: ProbabilityDistribution, channel1, channel2) -> DPIResult:
    """Mutual information along the chain Z1 -> Z2 -> Z3.

    ``channel1[i, j]`` is p(z2=j | z1=i); ``channel2`` likewise maps Z2 to Z3.
    """
    c1 = _stochastic(channel1, "channel1")
    c2 = _stochastic(channel2, "channel2")
    if c1.shape[0] != len(source):
        raise AlignmentError(
            f"channel1 has {c1.shape[0]} rows but the source has {len(source)} letters"
        )
    if c2.shape[0] != c1.shape[1]:
        raise AlignmentError(
            f"channel2 has {c2.shape[0]} rows but channel1 has {c1.shape[1]} outputs"
        )
    j12 = source.array[:, None] * c1
    j13 = j12 @ c2
    i12 = mutual_information(JointDistribution.from_array(j12 / j12.sum()))
    i13 = mutual_information(JointDistribution.from_array(j13 / j13.sum()))
    return DPIResult(i12, i13, i13 <= i12 + 1e-9)


def random_chain(rng: np.random.Generator, sizes: Sequence[int] | None = None, max_size: int = 8):
    """A random source and pair of channels for DPI experiments.

    Some rows are made sparse so zero cells get exercised too.
    """
    if sizes is None:
        sizes = rng.integers(1, max_size + 1, size=3)
    a, b, c = (int(s) for s in sizes)

    def simplex(n, rows=None):
        shape = (n,) if rows is None else (rows, n)
        x = rng.dirichlet(np.full(n, 0.5), size=rows) if rows else rng.dirichlet(np.full(n, 0.5))
        if rng.random() < 0.3:
            x = np.where(rng.random(shape) < 0.3, 0.0, x)
            x = np.atleast_2d(x)
            for row in x:
                if row.sum() == 0:
                    row[rng.integers(n)] = 1.0
            x = x / x.sum(axis=-1, keepdims=True)
            if rows is None:
                x = x[0]
        return x

    src = simplex(a)
    source = ProbabilityDistribution(tuple(f"z{i}" for i in range(a)), tuple(src))
    return source, simplex(b, a), simplex(c, b)
