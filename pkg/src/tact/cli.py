"""Command-line front end.

Exit codes: 0 when everything passes, 1 when an assertion fails, 2 for
usage, input or parse errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .lang.check import static_check
from .lang.errors import ParseError, StaticCheckError, TactError
from .lang.parser import parse_model
from .report import RunReport, report_tables
from .scenarios.build import ScenarioError
from .scenarios.library import REGISTRY, builtin
from .scenarios.loader import load_scenario
from .semantics.explore import BFTTS_RELAXED, DEFAULT_MAX_STATES, MODES, explore
from .semantics.export import EXPORTERS, to_dot
from .verify.assertions import AssertionSyntaxError, verify
from .verify.traces import trace_document, write_trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SCENARIO_SUFFIXES = (".tam-scn", ".yaml", ".yml")


class UsageError(Exception):
    pass


def _is_scenario_path(path: Path):
    return path.name.endswith(SCENARIO_SUFFIXES)


def load_target(target):
    """``(name, model, scenario or None)`` for a model file, scenario file or built-in name."""
    path = Path(target)
    if not path.exists():
        if target in REGISTRY:
            sc = builtin(target)
            return sc.name, sc.model, sc
        raise UsageError(f"{target}: no such file or built-in scenario")
    try:
        if _is_scenario_path(path):
            sc = load_scenario(path)
            return sc.name, sc.model, sc
        model = parse_model(path.read_text())
    except OSError as exc:
        raise UsageError(f"{target}: {exc.strerror or exc}") from None
    except (TactError, ScenarioError) as exc:
        raise UsageError(f"{target}: {exc}") from None
    diags = static_check(model)
    if diags:
        raise UsageError("\n".join(f"{target}: {d}" for d in diags))
    return path.stem, model, None


def cmd_check(file, err=None) -> int:
    """Parse and statically check a model or scenario file."""
    err = err or sys.stderr
    path = Path(file)
    if not path.exists():
        print(f"{file}: no such file", file=err)
        return EXIT_USAGE
    try:
        if _is_scenario_path(path):
            load_scenario(path)
            return EXIT_OK
        model = parse_model(path.read_text())
    except StaticCheckError as exc:
        for d in exc.diagnostics:
            print(f"{file}: {d}", file=err)
        return EXIT_USAGE
    except (ParseError, TactError, ScenarioError, OSError) as exc:
        print(f"{file}: {exc}", file=err)
        return EXIT_USAGE
    diags = static_check(model)
    for d in diags:
        print(f"{file}: {d}", file=err)
    return EXIT_USAGE if diags else EXIT_OK


def cmd_explore(file, mode=BFTTS_RELAXED, max_states=DEFAULT_MAX_STATES, export=None, out=None,
                full_dump=False, jobs=1) -> RunReport:
    """Explore a model; optionally write the transition system as DOT or JSONL."""
    name, model, _ = load_target(file)
    start = time.perf_counter()
    ts = explore(model, mode, max_states, jobs=jobs)
    wall = time.perf_counter() - start
    if export:
        target = Path(out) if out else Path(f"{name}.{mode}.{export}")
        if export == "dot":
            text = to_dot(ts, model, full=full_dump)
        else:
            text = EXPORTERS[export](ts, model)
        target.write_text(text)
    return RunReport.from_runs(name, mode, [ts], wall_time=wall, jobs=jobs, cycle=ts.has_cycle())


def cmd_verify(file, mode=BFTTS_RELAXED, max_states=None, full_scan=False, jobs=1, out_dir=None):
    """Check every assertion of a scenario; returns ``(exit code, RunReport, trace paths)``.

    Counterexamples go next to the scenario file, or to ``out_dir``.
    """
    path = Path(file)
    name, model, sc = load_target(file)
    if sc is None:
        raise UsageError(f"{file}: not a scenario (no assertions to verify)")
    limit = max_states or sc.max_states or DEFAULT_MAX_STATES
    start = time.perf_counter()
    res = verify(model, sc.assertions, mode, limit, full_scan=full_scan, jobs=jobs)
    wall = time.perf_counter() - start
    report = RunReport.from_runs(name, mode, res.explorations, res.verdicts, wall, jobs)
    if out_dir is not None:
        folder = Path(out_dir)
    elif path.exists():
        folder = path.parent
    else:
        folder = Path(".")
    written = []
    by_name = {a.name: a for a in sc.assertions}
    for v in res.verdicts:
        if v.passed or not v.counterexample:
            continue
        ts = _run_for(res, v)
        doc = trace_document(model, ts, v, by_name[v.name], scenario=name)
        folder.mkdir(parents=True, exist_ok=True)
        target = folder / f"{name}.{v.name}.trace.json"
        write_trace(target, doc)
        written.append(target)
    code = EXIT_OK if res.passed else EXIT_FAIL
    return code, report, written


def _run_for(res, verdict):
    """The exploration whose graph the counterexample indexes into."""
    if len(res.explorations) == 1:
        return res.explorations[0]
    for ts in res.explorations:
        if ts.violation is not None and ts.states[ts.violation] is verdict.final_state:
            return ts
    return res.explorations[-1]


def cmd_report_tables(only=None, max_states=DEFAULT_MAX_STATES, jobs=1, timing=False) -> str:
    return report_tables(only, max_states, jobs, timing)


def _jobs(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--jobs must be at least 1")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="tact", description="Explicit-state checker for timed actor models.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and statically check model or scenario files")
    c.add_argument("files", nargs="+")

    def common(sp):
        sp.add_argument("--mode", choices=MODES, default=BFTTS_RELAXED)
        sp.add_argument("--max-states", type=int, default=None)
        sp.add_argument("--jobs", type=_jobs, default=1)
        sp.add_argument("--json", action="store_true", help="print the report as JSON")
        sp.add_argument("--timing", action="store_true", help="include wall time in the report")

    e = sub.add_parser("explore", help="generate a state space and print its statistics")
    e.add_argument("file", help="model (.tam), scenario (.tam-scn) or built-in scenario name")
    common(e)
    e.add_argument("--export", choices=sorted(EXPORTERS))
    e.add_argument("--out", help="export file (default <name>.<mode>.<format>)")
    e.add_argument("--full-dump", action="store_true", help="dump full states into DOT labels")

    v = sub.add_parser("verify", help="check the assertions of a scenario")
    v.add_argument("file", help="scenario file or built-in scenario name")
    common(v)
    v.add_argument("--full-scan", action="store_true", help="explore everything before checking")
    v.add_argument("--out-dir", help="where counterexample traces go (default: next to the scenario)")

    r = sub.add_parser("report", help="run the scenario suite and print the result tables")
    r.add_argument("--only", action="append", help="scenario name or tag (repeatable)")
    r.add_argument("--max-states", type=int, default=None)
    r.add_argument("--jobs", type=_jobs, default=1)
    r.add_argument("--timing", action="store_true")

    sub.add_parser("list", help="list the built-in scenarios")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = sys.stdout
    try:
        if args.command == "check":
            return max(cmd_check(f) for f in args.files)
        if args.command == "list":
            for n in REGISTRY:
                print(f"{n}  {REGISTRY[n].get('description', '')}", file=out)
            return EXIT_OK
        if args.command == "report":
            out.write(cmd_report_tables(args.only, args.max_states or DEFAULT_MAX_STATES, args.jobs, args.timing))
            return EXIT_OK
        if args.command == "explore":
            rep = cmd_explore(args.file, args.mode, args.max_states or DEFAULT_MAX_STATES, args.export,
                              args.out, args.full_dump, args.jobs)
            print(rep.to_json(args.timing) if args.json else rep.format_text(args.timing), file=out)
            return EXIT_OK
        code, rep, written = cmd_verify(args.file, args.mode, args.max_states, args.full_scan, args.jobs,
                                        args.out_dir)
        print(rep.to_json(args.timing) if args.json else rep.format_text(args.timing), file=out)
        for w in written:
            print(f"counterexample: {w}", file=sys.stderr)
        return code
    except UsageError as exc:
        print(f"tact: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionSyntaxError, ScenarioError, TactError) as exc:
        print(f"tact: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
