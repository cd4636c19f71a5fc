"""Command-line front end.

Reports go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 validation or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .action_model import ledger_total
from .cost_benefit import evaluate_task, estimate_f1_f2_rate, negative_threshold, reassign_steps, swap
from .device_model import bandwidth, instantaneous_capacity
from .errors import HcinfoError
from .info_core import dpi_check, random_chain
from .report import FORMATS, Report
from .scenario import parse_scenario, parse_study_design
from .study_analyzer import AggregationMode, ingest_trials, study_cost_benefit


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


@dataclass
class CommandResult:
    code: int
    report: Report | None = None
    output: str = ""


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS if suppress else "text")
    parser.add_argument("--epsilon", type=float, default=default,
                        help="epsilon for KL capping (overrides the file value)")
    parser.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="append a metadata footer")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hcinfo", description="Information-theoretic measures of human input.")
    _global_options(parser, suppress=False)
    parser.add_argument("--version", action="version", version=f"hcinfo {__version__}")
    groups = parser.add_subparsers(dest="group", metavar="COMMAND", parser_class=_Parser)
    groups.required = True

    def sub(group, name, help):
        p = group.add_parser(name, help=help)
        _global_options(p, suppress=True)
        return p

    dev = groups.add_parser("device", help="input devices").add_subparsers(dest="action", parser_class=_Parser)
    dev.required = True
    p = sub(dev, "cap", "capacity and bandwidth of a device")
    p.add_argument("file")
    p.add_argument("--device", required=True)

    task = groups.add_parser("task", help="interaction tasks").add_subparsers(dest="action", parser_class=_Parser)
    task.required = True
    p = sub(task, "eval", "evaluate the cost-benefit of a task")
    p.add_argument("file")
    p.add_argument("--task", required=True)
    p.add_argument("--swap", metavar="A,B", help="swap the step counts of letters A and B")
    p = sub(task, "threshold", "mistake mass at which the benefit turns negative")
    p.add_argument("file")
    p.add_argument("--task", required=True)
    p.add_argument("--from", dest="from_label", required=True)
    p.add_argument("--to", dest="to_label", required=True)

    ledger = groups.add_parser("ledger", help="knowledge ledgers").add_subparsers(dest="action", parser_class=_Parser)
    ledger.required = True
    p = sub(ledger, "rate", "knowledge rate of a ledger plus a choice task")
    p.add_argument("file")
    p.add_argument("--ledger", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--seconds", type=float, required=True)

    study = groups.add_parser("study", help="empirical studies").add_subparsers(dest="action", parser_class=_Parser)
    study.required = True
    p = sub(study, "analyze", "benefit/cost from trial data")
    p.add_argument("design")
    p.add_argument("responses")
    p.add_argument("--mode", choices=["consistent", "aggregate"])

    dpi = groups.add_parser("dpi", help="data processing inequality").add_subparsers(dest="action", parser_class=_Parser)
    dpi.required = True
    p = sub(dpi, "demo", "check the inequality on random Markov chains")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", metavar="A,B,C")
    p.add_argument("--trials", type=int, default=100)
    return parser


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise HcinfoError(f"cannot read {path}: {exc.strerror}") from None


def _lookup(table: dict, name: str, what: str):
    if name not in table:
        known = ", ".join(sorted(table)) or "none"
        raise HcinfoError(f"unknown {what} {name!r} (known: {known})")
    return table[name]


def _device_cap(args) -> Report:
    sc = parse_scenario(_read(args.file), args.epsilon)
    dev = _lookup(sc.devices, args.device, "device")
    report = Report()
    report.add(f"device {dev.name}", [
        ("instantaneous_capacity", instantaneous_capacity(dev), "bits"),
        ("sampling_rate", dev.sampling_rate_hz, "Hz"),
        ("bandwidth", bandwidth(dev), "bits/s"),
    ])
    return report


def _evaluation_rows(ev):
    rows = [
        ("action_capacity", ev.action_capacity, "bits"),
        ("alphabet_compression", ev.alphabet_compression, "bits"),
        ("potential_distortion", ev.potential_distortion, "bits"),
        ("benefit", ev.benefit, "bits"),
        ("expected_cost", ev.expected_cost_seconds, "s"),
        ("cost_benefit", ev.cost_benefit, "bits/s"),
    ]
    if ev.du is not None:
        rows.append(("device_utilization", ev.du, "ratio"))
    rows.extend(("note", n, "text") for n in ev.notes)
    return rows


def _task_eval(args) -> Report:
    sc = parse_scenario(_read(args.file), args.epsilon)
    t = _lookup(sc.tasks, args.task, "task")
    kwargs = dict(mistake=t.mistake, device=t.device, task_seconds=t.task_seconds, policy=sc.epsilon)
    title = f"task {t.name}"
    if args.swap:
        parts = [x.strip() for x in args.swap.split(",")]
        if len(parts) != 2:
            raise UsageError("--swap expects two letters separated by a comma")
        ev = reassign_steps(t.alphabet, t.cost, swap(*parts), **kwargs)
        title += f" (swap {parts[0]}<->{parts[1]})"
    else:
        ev = evaluate_task(t.alphabet, t.cost, **kwargs)
    report = Report()
    report.add(title, _evaluation_rows(ev))
    return report


def _task_threshold(args) -> Report:
    sc = parse_scenario(_read(args.file), args.epsilon)
    t = _lookup(sc.tasks, args.task, "task")
    s = negative_threshold(t.alphabet.distribution, args.from_label, args.to_label, sc.epsilon)
    report = Report()
    report.add(f"task {t.name} mistake {args.from_label}->{args.to_label}", [
        ("negative_threshold", s if s is not None else "none", "ratio" if s is not None else "text"),
    ])
    return report


def _ledger_rate(args) -> Report:
    sc = parse_scenario(_read(args.file), args.epsilon)
    lg = _lookup(sc.ledgers, args.ledger, "ledger")
    t = _lookup(sc.tasks, args.task, "task")
    est = estimate_f1_f2_rate(lg, t.alphabet, args.seconds)
    rows = [
        ("ledger_total", ledger_total(lg), "bits"),
        ("f1_compression", est.f1_compression, "bits"),
        ("f2_compression", est.f2_compression, "bits"),
        ("total_benefit", est.total_benefit, "bits"),
        ("task_time", est.task_seconds, "s"),
        ("rate", est.rate, "bits/s"),
    ]
    if est.warning:
        rows.append(("warning", est.warning, "text"))
    report = Report()
    report.add(f"ledger {lg.name} with task {t.name}", rows)
    return report


def _study_analyze(args) -> Report:
    design = parse_study_design(_read(args.design), args.epsilon)
    records = ingest_trials(_read(args.responses), expected_bits=design.k)
    mode = AggregationMode.parse(args.mode) if args.mode else None
    res = study_cost_benefit(design, records, mode)
    mode = mode or design.aggregation_mode
    rows = [
        ("records", res.n_records, "count"),
        ("ground_truth_groups", res.n_groups, "count"),
        ("mode", mode.value, "text"),
        ("epsilon", design.epsilon.epsilon, "ratio"),
        ("question_entropy", res.question_entropy, "bits"),
        ("decision_entropy" if mode is AggregationMode.CONSISTENT_INDIVIDUAL else "response_entropy",
         res.decision_entropy, "bits"),
        ("alphabet_compression", res.alphabet_compression, "bits"),
        ("potential_distortion", res.potential_distortion, "bits"),
        ("benefit", res.benefit, "bits"),
        ("mean_response_time", res.mean_response_time_s, "s"),
        ("median_response_time", res.median_response_time_s, "s"),
        ("cost_benefit", res.cost_benefit, "bits/s"),
    ]
    if res.stimulus_bits is not None:
        rows.append(("stimulus_entropy_bound", res.stimulus_bits, "bits"))
    report = Report()
    report.add(f"study {design.name or Path(args.design).stem}", rows)
    report.add("per-submodel accuracy", [(k, v, "ratio") for k, v in res.per_submodel_accuracy.items()])
    return report


def _dpi_demo(args) -> Report:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    sizes = None
    if args.sizes:
        try:
            sizes = [int(x) for x in args.sizes.split(",")]
        except ValueError:
            raise UsageError("--sizes expects three integers, e.g. 3,4,2") from None
        if len(sizes) != 3 or min(sizes) < 1:
            raise UsageError("--sizes expects three positive integers")
    rng = np.random.default_rng(args.seed)
    holds = 0
    min_gap = np.inf
    for _ in range(args.trials):
        res = dpi_check(*random_chain(rng, sizes))
        holds += res.holds
        min_gap = min(min_gap, res.i12 - res.i13)
    report = Report()
    report.add("data processing inequality", [
        ("trials", args.trials, "count"),
        ("holds", f"{holds}/{args.trials}", "text"),
        ("min_gap", float(min_gap), "bits"),
    ])
    return report


COMMANDS = {
    ("device", "cap"): _device_cap,
    ("task", "eval"): _task_eval,
    ("task", "threshold"): _task_threshold,
    ("ledger", "rate"): _ledger_rate,
    ("study", "analyze"): _study_analyze,
    ("dpi", "demo"): _dpi_demo,
}


def run_command(argv, stdout=None, stderr=None) -> CommandResult:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        report = COMMANDS[(args.group, args.action)](args)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(exc, file=stderr)
        return CommandResult(2)
    except SystemExit as exc:  # --help / --version
        return CommandResult(int(exc.code or 0))
    except HcinfoError as exc:
        print(f"hcinfo: error: {exc}", file=stderr)
        return CommandResult(1)
    if args.verbose:
        report.add("metadata", [("version", __version__, "text"), ("command", " ".join(argv), "text")])
    text = report.render(args.format)
    stdout.write(text)
    return CommandResult(0, report, text)


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv).code


if __name__ == "__main__":
    sys.exit(main())
