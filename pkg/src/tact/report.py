"""Run reports and the result tables printed by ``tact report``."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from .patterns.params import EQUAL_DELAYS, PER_PATTERN_DELAYS, PRIORITIZED
from .scenarios.library import REGISTRY, builtin
from .semantics.explore import BFTTS_RELAXED, BFTTS_SHIFT, DEFAULT_MAX_STATES, explore
from .verify.assertions import verify

CONFIG_NOTE = (
    "State counts and percentages depend on the delay sets and client periods "
    "chosen for each scenario; they are not comparable with counts from other tools."
)


def ordering_note(jobs):
    if not jobs or jobs <= 1:
        return "deterministic order (single worker)"
    return f"frontier-ordered merge over {jobs} workers (counts independent of scheduling)"


@dataclass
class RunReport:
    scenario: str
    mode: str
    explored: int
    retained: int
    merged: int
    merges_by_shift: int = 0
    merges_by_relaxation: int = 0
    complete: bool = True
    verdicts: list = field(default_factory=list)
    wall_time: float = 0.0
    jobs: int = 1
    cycle: Optional[bool] = None
    poisoned: int = 0
    explorations: int = 1

    @classmethod
    def from_runs(cls, scenario, mode, runs, verdicts=(), wall_time=0.0, jobs=1, cycle=None):
        runs = list(runs)
        explored = sum(ts.stats.states_explored for ts in runs)
        retained = sum(len(ts.states) for ts in runs)
        return cls(
            scenario,
            mode,
            explored,
            retained,
            explored - retained,
            sum(ts.stats.merges_by_shift for ts in runs),
            sum(ts.stats.merges_by_relaxation for ts in runs),
            all(ts.complete for ts in runs),
            list(verdicts),
            wall_time,
            jobs,
            cycle,
            sum(1 for ts in runs for s in ts.states if s.error is not None),
            len(runs),
        )

    @property
    def reduction_pct(self):
        """Merged states as a percentage of explored states."""
        return 100.0 * self.merged / self.explored if self.explored else 0.0

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    def as_dict(self, timing=False):
        d = {
            "scenario": self.scenario,
            "mode": self.mode,
            "statesExplored": self.explored,
            "statesRetained": self.retained,
            "statesMerged": self.merged,
            "mergesByShift": self.merges_by_shift,
            "mergesByRelaxation": self.merges_by_relaxation,
            "reductionPercent": round(self.reduction_pct, 2),
            "complete": self.complete,
            "poisonedStates": self.poisoned,
            "explorations": self.explorations,
            "ordering": ordering_note(self.jobs),
            "verdicts": [v.as_dict() for v in self.verdicts],
        }
        if self.cycle is not None:
            d["cycle"] = self.cycle
        if timing:
            d["wallTime"] = round(self.wall_time, 3)
        return d

    def to_json(self, timing=False):
        return json.dumps(self.as_dict(timing), indent=1, sort_keys=True)

    def format_text(self, timing=False):
        lines = [
            f"scenario: {self.scenario}",
            f"mode: {self.mode}",
            f"ordering: {ordering_note(self.jobs)}",
            format_table(
                ["explored", "retained", "merged", "by shift", "by relaxation", "reduction"],
                [[self.explored, self.retained, self.merged, self.merges_by_shift,
                  self.merges_by_relaxation, f"{self.reduction_pct:.2f}%"]],
            ),
        ]
        if self.explorations > 1:
            lines.append(f"explorations: {self.explorations} (counts are summed)")
        if not self.complete:
            lines.append("LIMIT EXCEEDED: the state space was truncated, verdicts are qualified")
        if self.poisoned:
            lines.append(f"poisoned states: {self.poisoned}")
        if self.cycle is not None:
            lines.append("cycle: yes" if self.cycle else "cycle: no")
        if self.verdicts:
            lines.append(format_verdicts(self.verdicts))
        if timing:
            lines.append(f"wall time: {self.wall_time:.3f}s")
        return "\n".join(lines)


def format_table(headers, rows, title=None):
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    out = []
    if title:
        out.append(title)
    out.append(fmt.format(*cells[0]).rstrip())
    out.append("  ".join("-" * w for w in widths))
    out.extend(fmt.format(*r).rstrip() for r in cells[1:])
    return "\n".join(out)


def format_verdicts(verdicts):
    rows = []
    for v in verdicts:
        status = "pass" if v.passed else "FAIL"
        if not v.complete:
            status += " (truncated)"
        bound = "" if v.bound is None else v.bound
        rows.append([v.name, v.text, bound, status, len(v.witness) if not v.passed else ""])
    text = format_table(["assertion", "check", "bound", "verdict", "trace length"], rows)
    diags = [v.diagnostic for v in verdicts if v.diagnostic]
    if diags:
        text += "\n" + "\n".join(f"diagnostic: {d}" for d in diags)
    return text


# ------------------------------------------------------------- tables

PATTERN_ROWS = [n for n in REGISTRY if "row" in REGISTRY[n].get("tags", ())]
REDUCTION_MODELS = ["pubsub-row1", "reqres-row1", "iniexe-row1", "senrec-row1", "pca", "xray-vent"]
SUBSTRATE_MODELS = [("pca", EQUAL_DELAYS), ("pca-per-pattern", PER_PATTERN_DELAYS), ("pca-prioritized", PRIORITIZED)]


def _selected(name, only):
    if not only:
        return True
    tags = REGISTRY[name].get("tags", ())
    return any(o == name or o in tags for o in only)


class _Runs:
    """Caches full explorations so a model is explored once per mode."""

    def __init__(self, max_states, jobs):
        self.max_states = max_states
        self.jobs = jobs
        self.cache = {}

    def get(self, name, mode):
        k = (name, mode)
        if k not in self.cache:
            self.cache[k] = explore(builtin(name).model, mode, self.max_states, jobs=self.jobs)
        return self.cache[k]


def _params_text(data):
    return ", ".join(f"{k}={v}" for k, v in data["patterns"][0]["params"].items())


def report_tables(only=None, max_states=DEFAULT_MAX_STATES, jobs=1, timing=False):
    """The three result tables as text. ``only`` filters by scenario name or tag."""
    start = time.perf_counter()
    runs = _Runs(max_states, jobs)
    parts = [CONFIG_NOTE, f"ordering: {ordering_note(jobs)}"]

    rows = []
    for name in PATTERN_ROWS:
        if not _selected(name, only):
            continue
        sc = builtin(name)
        res = verify(sc.model, sc.assertions, BFTTS_RELAXED, max_states, jobs=jobs)
        rep = RunReport.from_runs(name, BFTTS_RELAXED, res.explorations, res.verdicts)
        v = res.verdicts[0]
        expected = sc.expected.get(v.name)
        rows.append([
            REGISTRY[name]["patterns"][0]["kind"], name, _params_text(REGISTRY[name]), v.bound,
            "satisfied" if v.passed else "violated",
            "" if expected is None else ("ok" if expected == v.passed else "UNEXPECTED"),
            rep.retained, rep.explored,
        ])
    if rows:
        parts.append(format_table(
            ["pattern", "scenario", "parameters", "budget", "requirement", "expected", "states", "explored"],
            rows, "Pattern analysis (bftts-relaxed, stops at the first violation)"))

    rows = []
    for name in REDUCTION_MODELS:
        if not _selected(name, only):
            continue
        rows.append(_reduction_row(name, name, runs))
    if rows:
        parts.append(format_table(_REDUCTION_HEADERS, rows, "Reduction in patterns and their composition"))

    rows = []
    for name, variant in SUBSTRATE_MODELS:
        if not _selected(name, only):
            continue
        rows.append(_reduction_row(variant, name, runs))
    if rows:
        parts.append(format_table(_REDUCTION_HEADERS, rows, "PCA monitoring application by substrate variant"))

    if timing:
        parts.append(f"wall time: {time.perf_counter() - start:.1f}s")
    return "\n\n".join(parts) + "\n"


_REDUCTION_HEADERS = ["model", "explored", "shift states", "relaxed states", "relaxation gain",
                      "merged/explored"]


def _reduction_row(label, name, runs):
    shift = runs.get(name, BFTTS_SHIFT)
    relaxed = runs.get(name, BFTTS_RELAXED)
    rep = RunReport.from_runs(name, BFTTS_RELAXED, [relaxed])
    gain = 100.0 * (len(shift) - len(relaxed)) / len(shift) if len(shift) else 0.0
    flag = "" if shift.complete and relaxed.complete else " (truncated)"
    return [label + flag, rep.explored, len(shift), len(relaxed), f"{gain:.1f}%", f"{rep.reduction_pct:.1f}%"]
