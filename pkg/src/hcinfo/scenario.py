"""Scenario and study-design JSON documents.

Structure is checked with a JSON Schema first (errors carry JSON paths),
then names and cross references are resolved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

from .action_model import (
    ActionAlphabet,
    AlphabetKind,
    KnowledgeLedger,
    LedgerEntry,
    checkbox_alphabet,
    concat_submodels,
    gesture_alphabet,
    radio_alphabet,
    submodel_alphabet,
)
from .cost_benefit import CostModel, MistakeModel
from .device_model import DeviceVariable, InputDeviceSpec
from .errors import FormatError, HcinfoError
from .info_core import DEFAULT_EPSILON, EpsilonPolicy, ProbabilityDistribution
from .study_analyzer import StudyDesign, SubModelSpec

SCHEMA_VERSION = 1

_name = {"type": "string", "minLength": 1}
_pos_num = {"type": "number", "exclusiveMinimum": 0}
_pos_int = {"type": "integer", "minimum": 1}
_prob = {"type": "number", "minimum": 0, "maximum": 1}

_letters = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "required": ["label", "p"],
        "properties": {"label": _name, "p": _prob},
        "additionalProperties": False,
    },
}

ALPHABET_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["radio", "custom", "checkbox", "gesture", "composite"]}},
    "allOf": [
        {
            "if": {"properties": {"kind": {"enum": ["radio", "custom"]}}},
            "then": {
                "properties": {"kind": True, "letters": _letters, "options": _pos_int},
                "oneOf": [{"required": ["letters"]}, {"required": ["options"]}],
                "additionalProperties": False,
            },
        },
        {
            "if": {"properties": {"kind": {"const": "checkbox"}}},
            "then": {
                "required": ["boxes"],
                "properties": {
                    "kind": True,
                    "boxes": _pos_int,
                    "per_box_probs": {"type": "array", "items": _prob},
                },
                "additionalProperties": False,
            },
        },
        {
            "if": {"properties": {"kind": {"const": "gesture"}}},
            "then": {
                "required": ["n_elementary"],
                "properties": {
                    "kind": True,
                    "n_elementary": {"type": "integer", "minimum": 2},
                    "composite": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
        {
            "if": {"properties": {"kind": {"const": "composite"}}},
            "then": {
                "required": ["submodel_bits"],
                "properties": {
                    "kind": True,
                    "submodel_bits": {"type": "array", "minItems": 1, "items": _pos_int},
                },
                "additionalProperties": False,
            },
        },
    ],
}

DESIGN_FIELDS = {
    "name": _name,
    "submodels": {
        "type": "array",
        "minItems": 1,
        "items": {
            "type": "object",
            "required": ["name", "bits"],
            "properties": {"name": _name, "bits": _pos_int},
            "additionalProperties": False,
        },
    },
    "ground_truth": {"type": "string", "pattern": "^[01]+$"},
    "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
    "aggregation_mode": {"enum": ["consistent_individual", "random_team_or_single_participant"]},
    "stimulus_space_size": _pos_int,
}

DESIGN_SCHEMA = {
    "type": "object",
    "required": ["submodels", "ground_truth"],
    "properties": dict(DESIGN_FIELDS),
    "additionalProperties": False,
}

STUDY_DESIGN_FILE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "submodels", "ground_truth"],
    "properties": {"schema_version": {"const": SCHEMA_VERSION}, **DESIGN_FIELDS},
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
        "devices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "sampling_rate_hz", "variables"],
                "properties": {
                    "name": _name,
                    "sampling_rate_hz": _pos_num,
                    "variables": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["name", "cardinality"],
                            "properties": {"name": _name, "cardinality": _pos_int},
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "alphabet", "cost"],
                "properties": {
                    "name": _name,
                    "alphabet": ALPHABET_SCHEMA,
                    "cost": {
                        "type": "object",
                        "required": ["steps", "unit_step_seconds"],
                        "properties": {
                            "steps": {
                                "oneOf": [_pos_int, {"type": "object", "additionalProperties": _pos_int}]
                            },
                            "unit_step_seconds": _pos_num,
                            "fixed_overhead_seconds": {"type": "number", "minimum": 0},
                        },
                        "additionalProperties": False,
                    },
                    "mistake": {
                        "type": "object",
                        "required": ["from", "to", "mass"],
                        "properties": {
                            "from": _name,
                            "to": _name,
                            "mass": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                            "extra_cost_seconds": {"type": "number", "minimum": 0},
                        },
                        "additionalProperties": False,
                    },
                    "device": _name,
                    "task_seconds": _pos_num,
                },
                "additionalProperties": False,
            },
        },
        "ledgers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "entries"],
                "properties": {
                    "name": _name,
                    "entries": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["name", "category", "bits"],
                            "properties": {
                                "name": _name,
                                "category": {
                                    "enum": ["explicit_prompt", "situational", "soft_alphabet", "soft_model"]
                                },
                                "bits": {"type": "number", "minimum": 0},
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
        "studies": {"type": "array", "items": {**DESIGN_SCHEMA, "required": ["name", "submodels", "ground_truth"]}},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class TaskSpec:
    name: str
    alphabet: ActionAlphabet
    cost: CostModel
    mistake: MistakeModel | None = None
    device: InputDeviceSpec | None = None
    task_seconds: float | None = None


@dataclass(frozen=True)
class ScenarioFile:
    devices: dict[str, InputDeviceSpec] = field(default_factory=dict)
    tasks: dict[str, TaskSpec] = field(default_factory=dict)
    ledgers: dict[str, KnowledgeLedger] = field(default_factory=dict)
    studies: dict[str, StudyDesign] = field(default_factory=dict)
    epsilon: EpsilonPolicy = field(default_factory=EpsilonPolicy)


def _load(data: bytes | str, what: str):
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{what} is not UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what} is not valid JSON: {exc}") from None


def _validate(doc, schema, what: str):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        problems = [f"{e.json_path}: {e.message}" for e in errors]
        raise FormatError(f"{what} does not match the schema", problems)


def _unique(items, path: str) -> None:
    seen = set()
    for i, item in enumerate(items):
        if item["name"] in seen:
            raise FormatError(f"{path}[{i}]: duplicate name {item['name']!r}")
        seen.add(item["name"])


def _alphabet(spec: dict) -> ActionAlphabet:
    kind = spec["kind"]
    if kind in ("radio", "custom"):
        if "letters" in spec:
            pairs = [(x["label"], x["p"]) for x in spec["letters"]]
        else:
            n = spec["options"]
            pairs = [(f"a{i + 1}", 1.0 / n) for i in range(n)]
        if kind == "radio":
            return radio_alphabet(pairs)
        return ActionAlphabet(ProbabilityDistribution.from_pairs(pairs), AlphabetKind.CUSTOM)
    if kind == "checkbox":
        return checkbox_alphabet(spec["boxes"], spec.get("per_box_probs"))
    if kind == "gesture":
        return gesture_alphabet(spec["n_elementary"], spec.get("composite", False))
    return concat_submodels([submodel_alphabet(b) for b in spec["submodel_bits"]])


def _design(d: dict, epsilon: float, name: str = "") -> StudyDesign:
    return StudyDesign(
        submodels=tuple(SubModelSpec(s["name"], s["bits"]) for s in d["submodels"]),
        ground_truth=d["ground_truth"],
        epsilon=EpsilonPolicy(epsilon),
        aggregation_mode=d.get("aggregation_mode", "consistent_individual"),
        stimulus_space_size=d.get("stimulus_space_size"),
        name=d.get("name", name),
    )


def parse_scenario(data: bytes | str, epsilon: float | None = None) -> ScenarioFile:
    """Parse and validate a scenario document.

    ``epsilon`` overrides any value in the file.
    """
    doc = _load(data, "scenario")
    _validate(doc, SCENARIO_SCHEMA, "scenario")
    for section in ("devices", "tasks", "ledgers", "studies"):
        _unique(doc.get(section, []), f"$.{section}")
    eps = epsilon if epsilon is not None else doc.get("epsilon", DEFAULT_EPSILON)
    policy = EpsilonPolicy(eps)

    def located(path):
        def wrap(fn, *args):
            try:
                return fn(*args)
            except FormatError:
                raise
            except HcinfoError as exc:
                raise FormatError(f"{path}: {exc}") from None
        return wrap

    devices = {}
    for i, d in enumerate(doc.get("devices", [])):
        devices[d["name"]] = located(f"$.devices[{i}]")(
            InputDeviceSpec,
            d["name"],
            tuple(DeviceVariable(v["name"], v["cardinality"]) for v in d["variables"]),
            d["sampling_rate_hz"],
        )

    tasks = {}
    for i, t in enumerate(doc.get("tasks", [])):
        path = f"$.tasks[{i}]"
        if "device" in t and t["device"] not in devices:
            raise FormatError(f"{path}.device: task {t['name']!r} references unknown device {t['device']!r}")
        alphabet = located(f"{path}.alphabet")(_alphabet, t["alphabet"])
        c = t["cost"]
        steps = c["steps"]
        if isinstance(steps, int):
            steps = {label: steps for label in alphabet.labels}
        cost = located(f"{path}.cost")(
            CostModel, steps, c["unit_step_seconds"], c.get("fixed_overhead_seconds", 0.0)
        )
        located(f"{path}.cost.steps")(cost.check_against, alphabet)
        mistake = None
        if "mistake" in t:
            m = t["mistake"]
            mistake = located(f"{path}.mistake")(
                MistakeModel, m["from"], m["to"], m["mass"], m.get("extra_cost_seconds", 0.0)
            )
            for end in ("from", "to"):
                if m[end] not in alphabet.labels:
                    raise FormatError(f"{path}.mistake.{end}: unknown letter {m[end]!r}")
            if mistake.mass > alphabet.distribution.prob(mistake.from_label) + 1e-12:
                raise FormatError(f"{path}.mistake.mass: exceeds p({mistake.from_label})")
        tasks[t["name"]] = TaskSpec(
            t["name"], alphabet, cost, mistake, devices.get(t.get("device")), t.get("task_seconds")
        )

    ledgers = {}
    for i, lg in enumerate(doc.get("ledgers", [])):
        entries = tuple(LedgerEntry(e["name"], e["category"], e["bits"]) for e in lg["entries"])
        ledgers[lg["name"]] = KnowledgeLedger(entries, lg["name"])

    studies = {}
    for i, s in enumerate(doc.get("studies", [])):
        study_eps = epsilon if epsilon is not None else s.get("epsilon", eps)
        studies[s["name"]] = located(f"$.studies[{i}]")(_design, s, study_eps)

    return ScenarioFile(devices, tasks, ledgers, studies, policy)


def parse_study_design(data: bytes | str, epsilon: float | None = None) -> StudyDesign:
    """Parse a standalone study-design document; ``epsilon`` overrides the file."""
    doc = _load(data, "study design")
    _validate(doc, STUDY_DESIGN_FILE_SCHEMA, "study design")
    eps = epsilon if epsilon is not None else doc.get("epsilon", DEFAULT_EPSILON)
    try:
        return _design(doc, eps)
    except FormatError:
        raise
    except HcinfoError as exc:
        raise FormatError(f"$: {exc}") from None
