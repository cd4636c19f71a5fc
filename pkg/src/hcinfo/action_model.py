"""Input action alphabets for common interaction widgets and study designs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ContractError, DomainError, SizeError, ValidationError
from .info_core import ProbabilityDistribution, entropy

MAX_ENUM_BITS = 24
MAX_ENUM_LETTERS = 2**MAX_ENUM_BITS

# bits of information per English letter, used by knowledge ledgers
ENGLISH_LETTER_BITS = 4.7


class AlphabetKind(str, Enum):
    RADIO = "radio"
    CHECKBOX = "checkbox"
    FREEHAND = "freehand"
    GESTURE = "gesture"
    COMPOSITE = "composite"
    CUSTOM = "custom"


class KnowledgeCategory(str, Enum):
    EXPLICIT_PROMPT = "explicit_prompt"
    SITUATIONAL = "situational"
    SOFT_ALPHABET = "soft_alphabet"
    SOFT_MODEL = "soft_model"


@dataclass(frozen=True)
class ActionAlphabet:
    distribution: ProbabilityDistribution
    kind: AlphabetKind = AlphabetKind.CUSTOM
    codewords: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AlphabetKind(self.kind))
        if self.codewords is None:
            return
        words = tuple(self.codewords)
        if len(words) != len(self.distribution):
            raise ValidationError(
                f"{len(words)} codewords for {len(self.distribution)} letters"
            )
        if len({len(w) for w in words}) != 1:
            raise ValidationError("codewords must all have the same length")
        if any(set(w) - {"0", "1"} for w in words):
            raise ValidationError("codewords must be bit strings")
        if len(set(words)) != len(words):
            raise ValidationError("codewords must be distinct")
        object.__setattr__(self, "codewords", words)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.distribution.labels

    @property
    def capacity(self) -> float:
        """Action capacity: the entropy of the alphabet in bits."""
        return entropy(self.distribution)

    def codeword(self, label: str) -> str:
        if self.codewords is None:
            raise ContractError("alphabet has no codewords")
        return self.codewords[self.labels.index(label)]


@dataclass(frozen=True)
class LedgerEntry:
    name: str
    category: KnowledgeCategory
    bits: float

    def __post_init__(self):
        object.__setattr__(self, "category", KnowledgeCategory(self.category))
        bits = float(self.bits)
        if not (bits >= 0 and math.isfinite(bits)):
            raise ValidationError(f"ledger entry {self.name!r} needs bits >= 0, got {bits!r}")
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class KnowledgeLedger:
    entries: tuple[LedgerEntry, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))


def ledger_total(ledger: KnowledgeLedger) -> float:
    return math.fsum(e.bits for e in ledger.entries)


def bit_labels(k: int) -> tuple[str, ...]:
    """All k-bit strings in ascending binary order."""
    if k > MAX_ENUM_BITS:
        raise SizeError(f"refusing to enumerate 2^{k} letters (limit 2^{MAX_ENUM_BITS})")
    return tuple(format(i, f"0{k}b") for i in range(2**k)) if k else ("",)


def radio_alphabet(probs: Sequence[tuple[str, float]] | Mapping[str, float]) -> ActionAlphabet:
    """One-of-k choice; codewords are one-hot over the k options."""
    if isinstance(probs, Mapping):
        probs = list(probs.items())
    dist = ProbabilityDistribution.from_pairs(probs)
    k = len(dist)
    words = tuple("".join("1" if j == i else "0" for j in range(k)) for i in range(k))
    return ActionAlphabet(dist, AlphabetKind.RADIO, words)


def _box_probs(k: int, per_box_probs: Sequence[float] | None) -> list[float]:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"checkbox count must be a positive integer, got {k!r}")
    if per_box_probs is None:
        return [0.5] * int(k)
    probs = [float(p) for p in per_box_probs]
    if len(probs) != k:
        raise ValidationError(f"expected {k} per-box probabilities, got {len(probs)}")
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValidationError("per-box probabilities must lie in [0, 1]")
    return probs


def _binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def checkbox_capacity(k: int, per_box_probs: Sequence[float] | None = None) -> float:
    """Analytic capacity of k independent checkboxes (no enumeration)."""
    return math.fsum(_binary_entropy(p) for p in _box_probs(k, per_box_probs))


def checkbox_alphabet(k: int, per_box_probs: Sequence[float] | None = None) -> ActionAlphabet:
    """All 2^k on/off combinations, labelled by their k-bit codeword.

    Bit i is 1 when box i is ticked; boxes are independent.
    """
    probs = _box_probs(k, per_box_probs)
    if k > MAX_ENUM_BITS:
        raise SizeError(
            f"refusing to enumerate 2^{k} checkbox combinations; "
            f"analytic capacity is {checkbox_capacity(k, probs):.6g} bits"
        )
    labels = bit_labels(k)
    cells = np.ones(1)
    for p in probs:
        cells = np.outer(cells, [1.0 - p, p]).ravel()
    return ActionAlphabet(ProbabilityDistribution(labels, tuple(cells)), AlphabetKind.CHECKBOX, labels)


class FreehandCapacity(NamedTuple):
    per_point_bits: float
    total_bits: float


def freehand_capacity(width: int, height: int, max_points: int) -> FreehandCapacity:
    """Capacity of drawing a path of 1..max_points points on a width x height canvas.

    The number of paths is sum_{k=1..m} A^k with A = width*height, i.e.
    A (A^m - 1) / (A - 1); its log is taken without forming the count.
    """
    for name, v in (("width", width), ("height", height), ("max_points", max_points)):
        if isinstance(v, bool) or int(v) != v or v < 1:
            raise DomainError(f"{name} must be a positive integer, got {v!r}")
    a = int(width) * int(height)
    m = int(max_points)
    if a < 2:
        raise DomainError("canvas needs at least two distinguishable points")
    log_a = math.log2(a)
    ln_a = math.log(a)
    # A(A^m - 1)/(A - 1) = A^m * (1 - A^-m) / (1 - A^-1)
    ratio = math.expm1(-m * ln_a) / math.expm1(-ln_a)
    return FreehandCapacity(log_a, m * log_a + math.log2(ratio))


def gesture_alphabet(n_elementary: int, composite: bool = False) -> ActionAlphabet:
    """Uniform gesture vocabulary; composite pairs every gesture with every other (n^2 letters)."""
    if isinstance(n_elementary, bool) or int(n_elementary) != n_elementary or n_elementary < 2:
        raise DomainError(f"need at least two elementary gestures, got {n_elementary!r}")
    n = int(n_elementary)
    base = [f"g{i + 1}" for i in range(n)]
    if composite:
        if n * n > MAX_ENUM_LETTERS:
            raise SizeError(f"refusing to enumerate {n * n} composite gestures")
        labels = [f"{a}+{b}" for a in base for b in base]
    else:
        labels = base
    return ActionAlphabet(ProbabilityDistribution.uniform(labels), AlphabetKind.GESTURE)


def submodel_alphabet(bits: int) -> ActionAlphabet:
    """Uniform alphabet over all ``bits``-bit answers, labelled by codeword."""
    labels = bit_labels(bits)
    return ActionAlphabet(ProbabilityDistribution.uniform(labels), AlphabetKind.CUSTOM, labels)


def concat_submodels(parts: Sequence[ActionAlphabet]) -> ActionAlphabet:
    """Cross product of independent alphabets with concatenated codewords.

    The first part supplies the most significant bits.
    """
    parts = list(parts)
    if not parts:
        raise ContractError("need at least one part")
    for i, part in enumerate(parts):
        if part.codewords is None:
            raise ContractError(f"part {i} has no codewords")
    if len(parts) == 1:
        return parts[0]
    count = math.prod(len(p.labels) for p in parts)
    if count > MAX_ENUM_LETTERS:
        raise SizeError(f"refusing to enumerate {count} composite letters")
    labels, words, probs = [], [], []
    for combo in itertools.product(*(range(len(p.labels)) for p in parts)):
        labels.append("/".join(p.labels[i] for p, i in zip(parts, combo)))
        words.append("".join(p.codewords[i] for p, i in zip(parts, combo)))
        probs.append(math.prod(p.distribution.probs[i] for p, i in zip(parts, combo)))
    return ActionAlphabet(
        ProbabilityDistribution(tuple(labels), tuple(probs)), AlphabetKind.COMPOSITE, tuple(words)
    )
