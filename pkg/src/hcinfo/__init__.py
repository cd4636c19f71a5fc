"""Measure the information a computer receives from human input."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlignmentError,
    ContractError,
    DomainError,
    FormatError,
    HcinfoError,
    SizeError,
    ValidationError,
)
from .info_core import (  # noqa: E402
    DEFAULT_EPSILON,
    EpsilonPolicy,
    JointDistribution,
    ProbabilityDistribution,
    dpi_check,
    entropy,
    epsilon_adjust,
    kl_divergence,
    max_entropy,
    mutual_information,
)
from .device_model import DeviceVariable, InputDeviceSpec, bandwidth, instantaneous_capacity  # noqa: E402
from .action_model import (  # noqa: E402
    ActionAlphabet,
    KnowledgeLedger,
    LedgerEntry,
    checkbox_alphabet,
    concat_submodels,
    freehand_capacity,
    gesture_alphabet,
    ledger_total,
    radio_alphabet,
)
from .cost_benefit import (  # noqa: E402
    CostModel,
    MistakeModel,
    TaskEvaluation,
    alphabet_compression,
    apply_mistake_shift,
    device_utilization,
    estimate_f1_f2_rate,
    evaluate_task,
    negative_threshold,
    reassign_steps,
)
from .study_analyzer import (  # noqa: E402
    StudyDesign,
    StudyResult,
    SubModelSpec,
    TrialRecord,
    build_stage_alphabets,
    ingest_trials,
    per_submodel_accuracy,
    study_cost_benefit,
)
