"""Batch experiment harness.

Runs the seeded scenario set across the preservation-configuration and
pursuit-mode matrix, classifies outcomes, aggregates the outcome and
trigger tables, and owns the records file format (JSON lines) and the
trajectory CSV export.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
import os
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, episode_config
from .episode import EpisodeOutcome, EpisodeRecord, generate_scenario, run_episode
from .errors import ContractViolation, RecordFormatError

_RECORD_FIELDS = (
    "seed",
    "config",
    "mode",
    "outcome",
    "t_end",
    "d_initial",
    "d_final",
    "triggered",
    "trigger_counts",
)
_BEHAVIOR_NAMES = ("flee", "protean", "refuge")
_TRACE_HEADER = ("t", "rover_x", "rover_y", "drone_x", "drone_y", "drone_z", "d", "r_total")


def derive_scenario_seed(master_seed: int, index: int) -> int:
    """Scenario seed for one index, splittably hashed from the master seed."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class RunMatrix:
    """The scenario x configuration x pursuit-mode grid for one batch."""

    master_seed: int
    n_scenarios: int = 150
    preservations: tuple[str, ...] = ("A", "B", "C")
    modes: tuple[str, ...] = ("persistent", "cautious")

    def __post_init__(self) -> None:
        if self.master_seed < 0:
            raise ValueError("master_seed must be >= 0")
        if self.n_scenarios <= 0:
            raise ValueError("n_scenarios must be positive")
        if not self.preservations or any(p not in ("A", "B", "C") for p in self.preservations):
            raise ValueError("preservations must be a non-empty subset of A, B, C")
        if not self.modes or any(m not in ("persistent", "cautious") for m in self.modes):
            raise ValueError("modes must be a non-empty subset of persistent, cautious")


def _run_cell(task) -> EpisodeRecord:
    seed, preservation, mode, run = task
    scenario = generate_scenario(
        seed,
        arena_side=run.arena.side,
        min_separation=run.arena.min_separation,
        min_goal_distance=run.arena.min_goal_distance,
    )
    return run_episode(scenario, episode_config(run, preservation, mode))


def run_batch(matrix: RunMatrix, run: RunConfig | None = None, jobs: int = 1) -> list[EpisodeRecord]:
    """Run every cell of the matrix; output order is (scenario index,
    configuration, mode) regardless of how many worker processes run it.
    """
    run = run or RunConfig()
    tasks = [
        (derive_scenario_seed(matrix.master_seed, index), preservation, mode, run)
        for index in range(matrix.n_scenarios)
        for preservation in matrix.preservations
        for mode in matrix.modes
    ]
    if jobs <= 1:
        return [_run_cell(task) for task in tasks]
    chunksize = max(1, len(tasks) // (jobs * 8))
    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(_run_cell, tasks, chunksize=chunksize)


@dataclass(frozen=True)
class OutcomeClass:
    """Success flags for one record; relative flags need the paired C record."""

    strong_success: bool
    strong_failure: bool
    inconclusive: bool
    success: bool | None
    relative_success: bool | None
    relative_failure: bool | None


def classify(record: EpisodeRecord, paired_c: EpisodeRecord | None = None) -> OutcomeClass:
    """Flag one record per the outcome taxonomy.

    `paired_c` must be the configuration-C record for the same scenario
    seed and pursuit mode; when given it defines the relative flags.
    Distance-increased success is undefined for captured episodes.
    """
    if paired_c is not None:
        if paired_c.preservation != "C" or paired_c.seed != record.seed or paired_c.mode != record.mode:
            raise ContractViolation("paired record must be configuration C of the same scenario and mode")
    captured = record.outcome is EpisodeOutcome.CAPTURED
    strong_success = record.outcome in (EpisodeOutcome.GOAL_REACHED, EpisodeOutcome.HIDDEN)
    relative_success = None
    relative_failure = None
    if paired_c is not None:
        relative_success = strong_success and paired_c.outcome is EpisodeOutcome.CAPTURED
        relative_failure = captured and paired_c.outcome is EpisodeOutcome.GOAL_REACHED
    return OutcomeClass(
        strong_success=strong_success,
        strong_failure=captured,
        inconclusive=record.outcome is EpisodeOutcome.TIMEOUT,
        success=None if captured else record.d_final > record.d_initial,
        relative_success=relative_success,
        relative_failure=relative_failure,
    )


@dataclass(frozen=True)
class SummaryCell:
    """Outcome counts for one (configuration, mode) cell."""

    n: int
    strong_success: int
    strong_failure: int
    inconclusive: int
    success: int
    non_captured: int
    relative_success: int | None
    c_captured: int | None
    relative_failure: int | None
    c_goal_reached: int | None


@dataclass(frozen=True)
class TriggerCell:
    """Episode counts per behavior; None marks structurally absent entries."""

    flee: int
    protean: int | None
    refuge: int | None
    none_triggered: int


@dataclass(frozen=True)
class SummaryTable:
    n_scenarios: int
    cells: dict[tuple[str, str], SummaryCell]


@dataclass(frozen=True)
class TriggerTable:
    n_scenarios: int
    cells: dict[tuple[str, str], TriggerCell]


def aggregate(records) -> tuple[SummaryTable, TriggerTable]:
    """Aggregate a complete record matrix into the outcome and trigger tables.

    The matrix must contain every (scenario seed, configuration, mode)
    combination exactly once across the configurations and modes present;
    missing cells are reported by seed.
    """
    by_cell: dict[tuple[str, str], dict[int, EpisodeRecord]] = {}
    for record in records:
        cell = by_cell.setdefault((record.preservation, record.mode), {})
        if record.seed in cell:
            raise ContractViolation(
                f"duplicate record for seed {record.seed}, configuration {record.preservation}, {record.mode}"
            )
        cell[record.seed] = record
    if not by_cell:
        return SummaryTable(0, {}), TriggerTable(0, {})

    seeds = sorted({seed for cell in by_cell.values() for seed in cell})
    missing = [
        (seed, preservation, mode)
        for (preservation, mode), cell in sorted(by_cell.items())
        for seed in seeds
        if seed not in cell
    ]
    if missing:
        preview = ", ".join(f"(seed {s}, {p}, {m})" for s, p, m in missing[:5])
        more = "" if len(missing) <= 5 else f" and {len(missing) - 5} more"
        raise ContractViolation(f"incomplete record matrix; missing cells: {preview}{more}")

    n = len(seeds)
    summary_cells: dict[tuple[str, str], SummaryCell] = {}
    trigger_cells: dict[tuple[str, str], TriggerCell] = {}
    for (preservation, mode), cell in by_cell.items():
        paired_cell = by_cell.get(("C", mode)) if preservation != "C" else None
        strong_success = strong_failure = inconclusive = success = non_captured = 0
        relative_success = relative_failure = 0
        for seed in seeds:
            record = cell[seed]
            paired = paired_cell[seed] if paired_cell is not None else None
            flags = classify(record, paired)
            strong_success += flags.strong_success
            strong_failure += flags.strong_failure
            inconclusive += flags.inconclusive
            if flags.success is not None:
                non_captured += 1
                success += flags.success
            if paired is not None:
                relative_success += bool(flags.relative_success)
                relative_failure += bool(flags.relative_failure)
        if paired_cell is not None:
            c_captured = sum(r.outcome is EpisodeOutcome.CAPTURED for r in paired_cell.values())
            c_goal_reached = sum(r.outcome is EpisodeOutcome.GOAL_REACHED for r in paired_cell.values())
            relative = (relative_success, c_captured, relative_failure, c_goal_reached)
        else:
            relative = (None, None, None, None)
        summary_cells[(preservation, mode)] = SummaryCell(
            n=n,
            strong_success=strong_success,
            strong_failure=strong_failure,
            inconclusive=inconclusive,
            success=success,
            non_captured=non_captured,
            relative_success=relative[0],
            c_captured=relative[1],
            relative_failure=relative[2],
            c_goal_reached=relative[3],
        )
        counts = {
            name: sum(name in record.triggered for record in cell.values())
            for name in _BEHAVIOR_NAMES
        }
        trigger_cells[(preservation, mode)] = TriggerCell(
            flee=counts["flee"],
            protean=None if preservation == "B" else counts["protean"],
            refuge=None if preservation == "B" else counts["refuge"],
            none_triggered=sum(not record.triggered for record in cell.values()),
        )
    return SummaryTable(n, summary_cells), TriggerTable(n, trigger_cells)


# Reference counts shown beside measured values in reports, for
# qualitative comparison only; this simulator uses a different physics
# substrate and seed set, so numeric equality is not expected.
REFERENCE_SUMMARY: dict[tuple[str, str], dict[str, tuple[int, int]]] = {
    ("A", "persistent"): {
        "strong_success": (116, 150), "success": (97, 118), "strong_failure": (32, 150),
        "inconclusive": (2, 150), "relative_success": (8, 11), "relative_failure": (29, 138),
    },
    ("B", "persistent"): {
        "strong_success": (138, 150), "success": (114, 138), "strong_failure": (12, 150),
        "inconclusive": (0, 150), "relative_success": (6, 11), "relative_failure": (7, 138),
    },
    ("C", "persistent"): {
        "strong_success": (138, 150), "strong_failure": (11, 150), "inconclusive": (1, 150),
    },
    ("A", "cautious"): {
        "strong_success": (143, 150), "success": (87, 144), "strong_failure": (6, 150),
        "inconclusive": (1, 150), "relative_success": (5, 5), "relative_failure": (6, 145),
    },
    ("B", "cautious"): {
        "strong_success": (145, 150), "success": (60, 148), "strong_failure": (2, 150),
        "inconclusive": (3, 150), "relative_success": (5, 5), "relative_failure": (2, 145),
    },
    ("C", "cautious"): {
        "strong_success": (145, 150), "strong_failure": (5, 150), "inconclusive": (0, 150),
    },
}

REFERENCE_TRIGGERS: dict[tuple[str, str], dict[str, tuple[int, int]]] = {
    ("A", "persistent"): {"flee": (148, 150), "protean": (59, 150), "refuge": (25, 150), "none": (2, 150)},
    ("B", "persistent"): {"flee": (148, 150), "none": (2, 150)},
    ("A", "cautious"): {"flee": (141, 150), "protean": (41, 150), "refuge": (2, 150), "none": (9, 150)},
    ("B", "cautious"): {"flee": (142, 150), "none": (8, 150)},
}

_SUMMARY_ROWS = (
    ("strong_success", "Goal or refuge reached (strong success)"),
    ("success", "Distance increased (success)"),
    ("strong_failure", "Rover was captured (strong failure)"),
    ("inconclusive", "Not captured, goal not reached (inconclusive)"),
    ("relative_success", "Goal reached where C was captured (rel. success)"),
    ("relative_failure", "Captured where C reached goal (rel. failure)"),
)
_TRIGGER_ROWS = (
    ("flee", "Use of simple fleeing"),
    ("protean", "Use of fleeing with proteanism"),
    ("refuge", "Use of refuge seeking"),
    ("none", "No behaviors triggered"),
)


def _ratio(count, denominator) -> str:
    if count is None or denominator is None:
        return "-"
    if denominator == 0:
        return "0/0 -"
    return f"{count}/{denominator}"


def _summary_cell_ratios(cell: SummaryCell) -> dict[str, str]:
    return {
        "strong_success": _ratio(cell.strong_success, cell.n),
        "success": _ratio(cell.success, cell.non_captured),
        "strong_failure": _ratio(cell.strong_failure, cell.n),
        "inconclusive": _ratio(cell.inconclusive, cell.n),
        "relative_success": _ratio(cell.relative_success, cell.c_captured),
        "relative_failure": _ratio(cell.relative_failure, cell.c_goal_reached),
    }


def _render_table(title, mode_blocks, columns, rows, measured, reference) -> list[str]:
    lines = [title]
    label_width = max(len(label) for _, label in rows)
    for mode in mode_blocks:
        block = [column for column in columns if (column, mode) in measured]
        if not block:
            continue
        cell_texts = {}
        widths = {}
        for column in block:
            texts = {}
            for key, _ in rows:
                shown = measured[(column, mode)].get(key, "-")
                ref = reference.get((column, mode), {}).get(key)
                if ref is not None:
                    shown = f"{shown} [{ref[0]}/{ref[1]}]"
                texts[key] = shown
            cell_texts[column] = texts
            widths[column] = max(len(column), max(len(t) for t in texts.values()))
        lines.append(f"{mode.capitalize()} pursuit mode")
        header = " ".join(f"{column:>{widths[column]}}" for column in block)
        lines.append(f"  {'':<{label_width}}  {header}")
        for key, label in rows:
            body = " ".join(f"{cell_texts[column][key]:>{widths[column]}}" for column in block)
            lines.append(f"  {label:<{label_width}}  {body}")
    return lines


def render_summary(table: SummaryTable, reference=None) -> str:
    """Outcome table as aligned text; reference counts shown in brackets."""
    reference = REFERENCE_SUMMARY if reference is None else reference
    measured = {key: _summary_cell_ratios(cell) for key, cell in table.cells.items()}
    lines = _render_table(
        f"Encounter outcomes over {table.n_scenarios} scenarios (measured [reference])",
        ("persistent", "cautious"),
        ("A", "B", "C"),
        _SUMMARY_ROWS,
        measured,
        reference,
    )
    return "\n".join(lines)


def render_triggers(table: TriggerTable, reference=None) -> str:
    """Trigger table as aligned text; reference counts shown in brackets."""
    reference = REFERENCE_TRIGGERS if reference is None else reference
    measured = {}
    for key, cell in table.cells.items():
        measured[key] = {
            "flee": str(cell.flee),
            "protean": "-" if cell.protean is None else str(cell.protean),
            "refuge": "-" if cell.refuge is None else str(cell.refuge),
            "none": str(cell.none_triggered),
        }
    lines = _render_table(
        f"Self-preservation triggers over {table.n_scenarios} scenarios (measured [reference])",
        ("persistent", "cautious"),
        ("A", "B", "C"),
        _TRIGGER_ROWS,
        measured,
        reference,
    )
    return "\n".join(lines)


def tables_to_dict(summary: SummaryTable, triggers: TriggerTable) -> dict:
    """Machine-readable form of both tables."""
    def cell_key(preservation, mode):
        return f"{preservation}/{mode}"

    summary_out = {}
    for (preservation, mode), cell in sorted(summary.cells.items()):
        summary_out[cell_key(preservation, mode)] = {
            "n": cell.n,
            "strong_success": cell.strong_success,
            "strong_failure": cell.strong_failure,
            "inconclusive": cell.inconclusive,
            "success": cell.success,
            "non_captured": cell.non_captured,
            "relative_success": cell.relative_success,
            "c_captured": cell.c_captured,
            "relative_failure": cell.relative_failure,
            "c_goal_reached": cell.c_goal_reached,
        }
    trigger_out = {}
    for (preservation, mode), cell in sorted(triggers.cells.items()):
        trigger_out[cell_key(preservation, mode)] = {
            "flee": cell.flee,
            "protean": cell.protean,
            "refuge": cell.refuge,
            "none_triggered": cell.none_triggered,
        }
    return {
        "n_scenarios": summary.n_scenarios,
        "summary": summary_out,
        "triggers": trigger_out,
    }


def record_payload(record: EpisodeRecord) -> dict:
    """Wire form of one record, with a fixed field order."""
    return {
        "seed": record.seed,
        "config": record.preservation,
        "mode": record.mode,
        "outcome": record.outcome.value,
        "t_end": record.t_end,
        "d_initial": record.d_initial,
        "d_final": record.d_final,
        "triggered": list(record.triggered),
        "trigger_counts": {name: record.trigger_counts[name] for name in _BEHAVIOR_NAMES},
    }


def write_records(records, path) -> None:
    """Write records as JSON lines, one record per line, atomically.

    Lines are staged to `<path>.partial` and renamed into place only
    after every record is written, so an interrupted write never leaves
    a file that looks complete.
    """
    path = os.fspath(path)
    staging = path + ".partial"
    with open(staging, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_payload(record)) + "\n")
    os.replace(staging, path)


def _record_from_payload(payload, path, lineno) -> EpisodeRecord:
    def fail(message):
        raise RecordFormatError(f"{path}: line {lineno}: {message}")

    if not isinstance(payload, dict):
        fail("expected a JSON object")
    if set(payload) != set(_RECORD_FIELDS):
        fail(f"expected exactly the fields {', '.join(_RECORD_FIELDS)}")
    if not isinstance(payload["seed"], int) or isinstance(payload["seed"], bool) or payload["seed"] < 0:
        fail("seed must be a non-negative integer")
    if payload["config"] not in ("A", "B", "C"):
        fail("config must be A, B or C")
    if payload["mode"] not in ("persistent", "cautious"):
        fail("mode must be persistent or cautious")
    try:
        outcome = EpisodeOutcome(payload["outcome"])
    except ValueError:
        fail(f"unknown outcome {payload['outcome']!r}")
    for key in ("t_end", "d_initial", "d_final"):
        if isinstance(payload[key], bool) or not isinstance(payload[key], (int, float)):
            fail(f"{key} must be a number")
    triggered = payload["triggered"]
    if not isinstance(triggered, list) or any(name not in _BEHAVIOR_NAMES for name in triggered):
        fail("triggered must list behavior names")
    counts = payload["trigger_counts"]
    if (
        not isinstance(counts, dict)
        or set(counts) != set(_BEHAVIOR_NAMES)
        or any(isinstance(v, bool) or not isinstance(v, int) or v < 0 for v in counts.values())
    ):
        fail("trigger_counts must map each behavior to a count")
    return EpisodeRecord(
        seed=payload["seed"],
        preservation=payload["config"],
        mode=payload["mode"],
        outcome=outcome,
        t_end=float(payload["t_end"]),
        d_initial=float(payload["d_initial"]),
        d_final=float(payload["d_final"]),
        triggered=tuple(triggered),
        trigger_counts={name: counts[name] for name in _BEHAVIOR_NAMES},
    )


def read_records(path) -> list[EpisodeRecord]:
    """Read a JSON-lines record file produced by write_records."""
    path = os.fspath(path)
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordFormatError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            records.append(_record_from_payload(payload, path, lineno))
    return records


def export_trajectory(record: EpisodeRecord, path) -> None:
    """Write a record's trajectory trace as CSV.

    The risk column is empty until the first breakdown and for episodes
    run without a trigger mechanism.
    """
    if record.trace is None:
        raise ValueError("record has no trajectory trace; rerun with record_trace")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_TRACE_HEADER)
        for row in record.trace:
            writer.writerow([*row[:7], "" if row[7] is None else row[7]])
