"""Device utilization and the (compression - distortion) / cost metric.

Costs are in seconds. Potential distortion is KL(reconstructed || intended),
so a mistake model that moves probability mass between letters shows up as
a positive distortion.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .action_model import ActionAlphabet, AlphabetKind, KnowledgeLedger, ledger_total
from .device_model import InputDeviceSpec, bandwidth
from .errors import AlignmentError, DomainError, ValidationError
from .info_core import DEFAULT_POLICY, EpsilonPolicy, ProbabilityDistribution, entropy, kl_divergence

THRESHOLD_TOL = 1e-6


@dataclass(frozen=True)
class CostModel:
    per_letter_steps: Mapping[str, int]
    unit_step_seconds: float
    fixed_overhead_seconds: float = 0.0

    def __post_init__(self):
        steps = dict(self.per_letter_steps)
        for label, n in steps.items():
            if isinstance(n, bool) or int(n) != n or n < 1:
                raise ValidationError(f"steps for {label!r} must be a positive integer, got {n!r}")
        unit = float(self.unit_step_seconds)
        if not (unit > 0 and math.isfinite(unit)):
            raise ValidationError(f"unit_step_seconds must be > 0, got {unit!r}")
        overhead = float(self.fixed_overhead_seconds)
        if not (overhead >= 0 and math.isfinite(overhead)):
            raise ValidationError(f"fixed_overhead_seconds must be >= 0, got {overhead!r}")
        object.__setattr__(self, "per_letter_steps", {k: int(v) for k, v in steps.items()})
        object.__setattr__(self, "unit_step_seconds", unit)
        object.__setattr__(self, "fixed_overhead_seconds", overhead)

    def __hash__(self):
        return hash((tuple(sorted(self.per_letter_steps.items())), self.unit_step_seconds, self.fixed_overhead_seconds))

    def check_against(self, alphabet: ActionAlphabet):
        labels = set(alphabet.labels)
        extra = set(self.per_letter_steps) - labels
        if extra:
            raise AlignmentError(f"cost model names unknown letters: {sorted(extra)}")
        missing = labels - set(self.per_letter_steps)
        if missing:
            raise AlignmentError(f"cost model has no steps for letters: {sorted(missing)}")

    def expected_seconds(self, dist: ProbabilityDistribution) -> float:
        steps = np.array([self.per_letter_steps[x] for x in dist.labels], dtype=float)
        return self.unit_step_seconds * float(dist.array @ steps) + self.fixed_overhead_seconds


@dataclass(frozen=True)
class MistakeModel:
    """``mass`` of probability intended for ``from_label`` lands on ``to_label``."""

    from_label: str
    to_label: str
    mass: float
    extra_cost_seconds: float = 0.0

    def __post_init__(self):
        if self.from_label == self.to_label:
            raise ValidationError("mistake must move mass between two different letters")
        mass = float(self.mass)
        if not 0.0 <= mass < 1.0:
            raise ValidationError(f"mistake mass must lie in [0, 1), got {mass!r}")
        extra = float(self.extra_cost_seconds)
        if not (extra >= 0 and math.isfinite(extra)):
            raise ValidationError(f"extra_cost_seconds must be >= 0, got {extra!r}")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "extra_cost_seconds", extra)


@dataclass(frozen=True)
class TaskEvaluation:
    action_capacity: float
    alphabet_compression: float
    potential_distortion: float
    expected_cost_seconds: float
    cost_benefit: float
    du: float | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)

    @property
    def benefit(self) -> float:
        return self.alphabet_compression - self.potential_distortion


def device_utilization(action_capacity: float, task_seconds: float, dev_bandwidth: float) -> float:
    if not task_seconds > 0:
        raise DomainError(f"task time must be > 0, got {task_seconds!r}")
    if not dev_bandwidth > 0:
        raise DomainError(f"device bandwidth must be > 0, got {dev_bandwidth!r}")
    return action_capacity / (task_seconds * dev_bandwidth)


def alphabet_compression(input: ProbabilityDistribution, output: ProbabilityDistribution) -> float:
    return entropy(input) - entropy(output)


def apply_mistake_shift(d: ProbabilityDistribution, m: MistakeModel) -> ProbabilityDistribution:
    src = d.prob(m.from_label)
    d.prob(m.to_label)
    if m.mass > src + 1e-12:
        raise DomainError(
            f"cannot move {m.mass} from {m.from_label!r}, which only has probability {src}"
        )
    mass = min(m.mass, src)
    probs = list(d.probs)
    i, j = d.labels.index(m.from_label), d.labels.index(m.to_label)
    # keep the moved mass bit-identical on both sides so the sum is preserved
    probs[i] = 0.0 if mass == src else src - mass
    probs[j] = probs[j] + mass
    return ProbabilityDistribution(d.labels, tuple(probs))


def _checkbox_note(alphabet: ActionAlphabet, task_seconds, dev_bw) -> str:
    k = int(round(math.log2(len(alphabet.labels))))
    text = (
        f"checkbox capacity counts {k} bits for 2^{k} combinations (entropy); "
        f"the 2^k-bits convention would claim {2**k} bits"
    )
    if task_seconds is not None and dev_bw is not None:
        text += f" and DU {100 * device_utilization(2**k, task_seconds, dev_bw):.4g}%"
    return text


def evaluate_task(
    alphabet: ActionAlphabet,
    cost: CostModel,
    mistake: MistakeModel | None = None,
    device: InputDeviceSpec | None = None,
    task_seconds: float | None = None,
    policy: EpsilonPolicy = DEFAULT_POLICY,
) -> TaskEvaluation:
    """Evaluate one task assuming it ends with a single selected letter.

    Alphabet compression equals the action capacity because the output
    alphabet has one letter. Expected cost uses the intended probabilities;
    a mistake adds ``mass * extra_cost_seconds`` on top.
    """
    cost.check_against(alphabet)
    dist = alphabet.distribution
    capacity = alphabet.capacity
    seconds = cost.expected_seconds(dist)
    distortion = 0.0
    if mistake is not None:
        shifted = apply_mistake_shift(dist, mistake)
        distortion = kl_divergence(shifted, dist, policy)
        seconds += mistake.mass * mistake.extra_cost_seconds
    if not seconds > 0:
        raise DomainError("expected cost must be > 0")
    du = None
    dev_bw = None
    if device is not None and task_seconds is not None:
        dev_bw = bandwidth(device)
        du = device_utilization(capacity, task_seconds, dev_bw)
    notes = ()
    if alphabet.kind is AlphabetKind.CHECKBOX:
        notes = (_checkbox_note(alphabet, task_seconds if du is not None else None, dev_bw),)
    return TaskEvaluation(
        action_capacity=capacity,
        alphabet_compression=capacity,
        potential_distortion=distortion,
        expected_cost_seconds=seconds,
        cost_benefit=(capacity - distortion) / seconds,
        du=du,
        notes=notes,
    )


def shifted_benefit(d: ProbabilityDistribution, from_label: str, to_label: str, mass: float,
                    policy: EpsilonPolicy = DEFAULT_POLICY) -> float:
    """H(d) - KL(shift(d, mass) || d)."""
    shifted = apply_mistake_shift(d, MistakeModel(from_label, to_label, mass))
    return entropy(d) - kl_divergence(shifted, d, policy)


def negative_threshold(d: ProbabilityDistribution, from_label: str, to_label: str,
                       policy: EpsilonPolicy = DEFAULT_POLICY, tol: float = THRESHOLD_TOL) -> float | None:
    """Smallest mistake mass that drives the benefit below zero, or None.

    The interval [0, p(from)] is first split into 64 pieces to bracket the
    first sign change, then that bracket is bisected to ``tol``.
    """
    d.prob(to_label)
    top = min(d.prob(from_label), np.nextafter(1.0, 0.0))
    if top <= 0:
        return None

    def benefit(s):
        return shifted_benefit(d, from_label, to_label, min(s, top), policy)

    grid = np.linspace(0.0, top, 65)
    lo = None
    for a, b in zip(grid[:-1], grid[1:]):
        if benefit(b) < 0:
            lo, hi = float(a), float(b)
            break
    if lo is None:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if benefit(mid) < 0:
            hi = mid
        else:
            lo = mid
    return hi


def reassign_steps(alphabet: ActionAlphabet, cost: CostModel, permutation: Mapping[str, str],
                   **kwargs) -> TaskEvaluation:
    """Evaluate a redesign where letter ``a`` now costs what ``permutation[a]`` used to.

    Labels missing from ``permutation`` map to themselves.
    """
    cost.check_against(alphabet)
    labels = set(alphabet.labels)
    full = {x: permutation.get(x, x) for x in alphabet.labels}
    unknown = (set(permutation) | set(permutation.values())) - labels
    if unknown:
        raise ValidationError(f"permutation names unknown letters: {sorted(unknown)}")
    if set(full.values()) != labels:
        raise ValidationError("permutation is not a bijection on the alphabet")
    steps = {x: cost.per_letter_steps[full[x]] for x in alphabet.labels}
    return evaluate_task(alphabet, replace(cost, per_letter_steps=steps), **kwargs)


def swap(a: str, b: str) -> dict[str, str]:
    return {a: b, b: a}


@dataclass(frozen=True)
class RateEstimate:
    f1_compression: float
    f2_compression: float
    total_benefit: float
    task_seconds: float
    rate: float
    warning: str | None = None


def estimate_f1_f2_rate(ledger: KnowledgeLedger, f2: ActionAlphabet, task_seconds: float) -> RateEstimate:
    """Knowledge rate of a two-stage interaction (context -> choice -> input).

    The choice stage compresses ``entropy(f2)`` bits; the context stage
    compresses whatever the ledger holds beyond that. A ledger smaller than
    the choice alphabet gives a negative first-stage figure, which is
    reported as-is with a warning and contributes nothing to the total.
    """
    if not task_seconds > 0:
        raise DomainError(f"task time must be > 0, got {task_seconds!r}")
    total_knowledge = ledger_total(ledger)
    f2_bits = f2.capacity
    f1_bits = total_knowledge - f2_bits
    message = None
    if f1_bits < 0:
        message = (
            f"ledger holds {total_knowledge:.3f} bits, less than the {f2_bits:.3f}-bit "
            f"choice alphabet; first-stage compression is negative"
        )
        warnings.warn(message, RuntimeWarning, stacklevel=2)
    total = f2_bits + max(f1_bits, 0.0)
    return RateEstimate(f1_bits, f2_bits, total, float(task_seconds), total / task_seconds, message)
