"""Turn controlled-study trials (answers and response times) into benefit/cost.

Each trial answer is a k-bit codeword made of the concatenated bit slices of
the sub-models under test. Four distributions over the 2^k answers are used:

a1  ground truth, softened by epsilon
a2  the question: every answer equally likely
a3  one participant's decision, softened by epsilon
a4  observed answer frequencies

benefit = H(a2) - H(a3 or a4) - KL(a4 || a1), and the ratio divides by the
mean response time in seconds.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .action_model import MAX_ENUM_BITS, bit_labels
from .errors import DomainError, FormatError, ValidationError
from .info_core import DEFAULT_POLICY, EpsilonPolicy, ProbabilityDistribution, entropy, epsilon_adjust, kl_divergence

CSV_HEADER = ("participant", "trial", "ground_truth", "response", "response_time_ms")


class AggregationMode(str, Enum):
    CONSISTENT_INDIVIDUAL = "consistent_individual"
    RANDOM_TEAM_OR_SINGLE_PARTICIPANT = "random_team_or_single_participant"

    @classmethod
    def parse(cls, value) -> "AggregationMode":
        aliases = {"consistent": cls.CONSISTENT_INDIVIDUAL, "aggregate": cls.RANDOM_TEAM_OR_SINGLE_PARTICIPANT}
        if isinstance(value, str) and value in aliases:
            return aliases[value]
        return cls(value)


def _is_bits(s) -> bool:
    return isinstance(s, str) and bool(s) and set(s) <= {"0", "1"}


@dataclass(frozen=True)
class SubModelSpec:
    name: str
    bits: int

    def __post_init__(self):
        if not self.name:
            raise ValidationError("sub-model needs a name")
        if isinstance(self.bits, bool) or int(self.bits) != self.bits or self.bits < 1:
            raise ValidationError(f"sub-model {self.name!r} needs bits >= 1, got {self.bits!r}")
        object.__setattr__(self, "bits", int(self.bits))


@dataclass(frozen=True)
class StudyDesign:
    submodels: tuple[SubModelSpec, ...]
    ground_truth: str
    epsilon: EpsilonPolicy = DEFAULT_POLICY
    aggregation_mode: AggregationMode = AggregationMode.CONSISTENT_INDIVIDUAL
    stimulus_space_size: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        subs = tuple(self.submodels)
        if not subs:
            raise ValidationError("study design needs at least one sub-model")
        names = [s.name for s in subs]
        if len(set(names)) != len(names):
            raise ValidationError("sub-model names must be unique")
        k = sum(s.bits for s in subs)
        if k > MAX_ENUM_BITS:
            raise ValidationError(f"design uses {k} bits; at most {MAX_ENUM_BITS} are supported")
        if not _is_bits(self.ground_truth) or len(self.ground_truth) != k:
            raise ValidationError(f"ground truth must be a {k}-bit string, got {self.ground_truth!r}")
        if self.stimulus_space_size is not None and (
            int(self.stimulus_space_size) != self.stimulus_space_size or self.stimulus_space_size < 1
        ):
            raise ValidationError("stimulus_space_size must be a positive integer")
        object.__setattr__(self, "submodels", subs)
        object.__setattr__(self, "aggregation_mode", AggregationMode.parse(self.aggregation_mode))
        if not isinstance(self.epsilon, EpsilonPolicy):
            object.__setattr__(self, "epsilon", EpsilonPolicy(self.epsilon))

    @property
    def k(self) -> int:
        return sum(s.bits for s in self.submodels)

    @property
    def labels(self) -> tuple[str, ...]:
        return bit_labels(self.k)

    def slices(self) -> dict[str, slice]:
        out, start = {}, 0
        for s in self.submodels:
            out[s.name] = slice(start, start + s.bits)
            start += s.bits
        return out

    def stimulus_bits(self) -> float | None:
        if self.stimulus_space_size is None:
            return None
        return math.log2(self.stimulus_space_size)


@dataclass(frozen=True)
class TrialRecord:
    participant_id: str
    trial_id: str
    ground_truth: str
    response: str
    response_time_ms: float

    def __post_init__(self):
        for what in ("ground_truth", "response"):
            if not _is_bits(getattr(self, what)):
                raise FormatError(f"{what} must be a bit string, got {getattr(self, what)!r}")
        if len(self.ground_truth) != len(self.response):
            raise FormatError(
                f"response has {len(self.response)} bits but ground truth has {len(self.ground_truth)}"
            )
        rt = float(self.response_time_ms)
        if not (rt > 0 and math.isfinite(rt)):
            raise ValidationError(f"response time must be > 0 ms, got {self.response_time_ms!r}")
        object.__setattr__(self, "response_time_ms", rt)

    @property
    def response_time_s(self) -> float:
        return self.response_time_ms / 1000.0


@dataclass(frozen=True)
class StageAlphabets:
    a1: ProbabilityDistribution
    a2: ProbabilityDistribution
    a3: ProbabilityDistribution
    a4: ProbabilityDistribution


@dataclass(frozen=True)
class StudyResult:
    alphabet_compression: float
    potential_distortion: float
    benefit: float
    mean_response_time_s: float
    cost_benefit: float
    per_submodel_accuracy: Mapping[str, float]
    question_entropy: float = 0.0
    decision_entropy: float = 0.0
    median_response_time_s: float = 0.0
    n_records: int = 0
    n_groups: int = 0
    stimulus_bits: float | None = None


def _softened_one_hot(labels, chosen, policy):
    return epsilon_adjust(ProbabilityDistribution.one_hot(labels, chosen), policy)


def build_stage_alphabets(design: StudyDesign, decision: str, responses: Mapping[str, float],
                          truth: str | None = None) -> StageAlphabets:
    """The four stage distributions for one ground truth (default: the design's)."""
    truth = design.ground_truth if truth is None else truth
    k = design.k
    bad = [s for s in (truth, decision, *responses) if not (_is_bits(s) and len(s) == k)]
    if bad:
        raise FormatError(f"not {k}-bit strings: {bad}")
    labels = design.labels
    policy = design.epsilon
    return StageAlphabets(
        a1=_softened_one_hot(labels, truth, policy),
        a2=ProbabilityDistribution.uniform(labels),
        a3=_softened_one_hot(labels, decision, policy),
        a4=ProbabilityDistribution.from_counts(labels, responses),
    )


def _check_records(design: StudyDesign, records: Sequence[TrialRecord]):
    if not records:
        raise DomainError("no records")
    k = design.k
    bad = [f"{r.participant_id}/{r.trial_id}" for r in records if len(r.response) != k]
    if bad:
        raise FormatError(f"records do not match the {k}-bit design", bad)


def per_submodel_accuracy(design: StudyDesign, records: Sequence[TrialRecord]) -> dict[str, float]:
    """Fraction of trials whose answer bits for each sub-model match the truth."""
    _check_records(design, records)
    out = {}
    for name, sl in design.slices().items():
        hits = sum(r.response[sl] == r.ground_truth[sl] for r in records)
        out[name] = hits / len(records)
    return out


def study_cost_benefit(design: StudyDesign, records: Sequence[TrialRecord],
                       mode: AggregationMode | str | None = None) -> StudyResult:
    """Benefit per second of a study's answers.

    Records with different ground truths are analysed per truth and the
    compression and distortion are averaged weighted by group size.
    """
    _check_records(design, records)
    mode = design.aggregation_mode if mode is None else AggregationMode.parse(mode)
    groups: dict[str, list[TrialRecord]] = defaultdict(list)
    for r in records:
        groups[r.ground_truth].append(r)

    n = len(records)
    ac = pd = h3 = 0.0
    h2 = float(design.k)
    for truth in sorted(groups):
        group = groups[truth]
        counts = Counter(r.response for r in group)
        # the decision letter only matters through H(a3), which is the same for any letter
        decision = min(counts, key=lambda x: (-counts[x], x))
        stages = build_stage_alphabets(design, decision, counts, truth=truth)
        h2 = entropy(stages.a2)
        spent = entropy(stages.a3) if mode is AggregationMode.CONSISTENT_INDIVIDUAL else entropy(stages.a4)
        w = len(group) / n
        h3 += w * spent
        ac += w * (h2 - spent)
        pd += w * kl_divergence(stages.a4, stages.a1, design.epsilon)

    times = [r.response_time_s for r in records]
    mean_rt = math.fsum(times) / n
    benefit = ac - pd
    return StudyResult(
        alphabet_compression=ac,
        potential_distortion=pd,
        benefit=benefit,
        mean_response_time_s=mean_rt,
        cost_benefit=benefit / mean_rt,
        per_submodel_accuracy=per_submodel_accuracy(design, records),
        question_entropy=h2,
        decision_entropy=h3,
        median_response_time_s=statistics.median(times),
        n_records=n,
        n_groups=len(groups),
        stimulus_bits=design.stimulus_bits(),
    )


def ingest_trials(csv_bytes: bytes | str, expected_bits: int | None = None) -> list[TrialRecord]:
    """Parse the trial CSV. Every bad row is reported, each with its line number."""
    text = csv_bytes.decode("utf-8-sig") if isinstance(csv_bytes, (bytes, bytearray)) else csv_bytes
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None or not any(cell.strip() for cell in header):
        raise DomainError("no records")
    header = [h.strip() for h in header]
    missing = [c for c in CSV_HEADER if c not in header]
    if missing:
        raise FormatError(f"missing column(s): {', '.join(missing)}")
    idx = {c: header.index(c) for c in CSV_HEADER}

    records, problems = [], []
    width = expected_bits
    for rowno, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            problems.append(f"row {rowno}: expected {len(header)} fields, got {len(row)}")
            continue
        get = {c: row[i].strip() for c, i in idx.items()}
        try:
            rt = float(get["response_time_ms"])
        except ValueError:
            problems.append(f"row {rowno}: response_time_ms {get['response_time_ms']!r} is not a number")
            continue
        try:
            rec = TrialRecord(get["participant"], get["trial"], get["ground_truth"], get["response"], rt)
        except (FormatError, ValidationError) as exc:
            problems.append(f"row {rowno}: {exc}")
            continue
        if width is None:
            width = len(rec.response)
        if len(rec.response) != width:
            problems.append(f"row {rowno}: expected {width}-bit strings, got {len(rec.response)} bits")
            continue
        records.append(rec)
    if problems:
        raise FormatError(f"{len(problems)} invalid row(s) in trial CSV", problems)
    if not records:
        raise DomainError("no records")
    return records


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.participant_id, r.trial_id, r.ground_truth, r.response, f"{r.response_time_ms:g}"])
    return buf.getvalue()
