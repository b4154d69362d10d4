"""Command-line front end.

Subcommands::

    strictlin list
    strictlin reproduce NAME [--json FILE]
    strictlin explore --program FILE --model NAME[,P=4] [--bound N]
                      [--mode strict|general|impl] [--spec NAME] [--adt NAME]
                      [--af NAME] [--rename A=B,...] [--json FILE]
                      [--histories DIR]
    strictlin compare --program FILE --model NAME [--spec NAME] [--bound N]
    strictlin check-history --file FILE --mode strict|general
                      (--spec NAME | --adt NAME) [--af NAME]
                      [--rename A=B,...] [--json FILE]

Exit status: 0 all checks passed, 1 a check failed (counterexample printed),
2 usage or input error.  Reports are deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import checker, explorer, models, reproductions, specs
from .history import parse_history, serialize_history
from .programs import parse_program

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


def _load_program(path: str):
    try:
        return parse_program(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"program file not found: {path}") from None


def _resolve_adt(name: str) -> specs.Adt:
    spec = specs.get_spec(name)
    if not isinstance(spec, specs.Adt):
        raise UsageError(f"{name!r} is not an abstract data type")
    return spec


def _parse_init(arg: str, model) -> object:
    """Initial object contents: comma-separated value tokens, front first."""
    if not arg.strip():
        return model.initial_state
    from .values import parse_value

    try:
        values = tuple(parse_value(tok.strip()) for tok in arg.split(","))
        return model.seed_state(values)
    except ValueError as exc:
        raise UsageError(f"bad --init: {exc}") from None


def _parse_rename(arg: Optional[str], concrete: tuple[str, ...]) -> specs.RenamingFunction:
    if not arg:
        return specs.RenamingFunction.identity(concrete)
    pairs = {}
    for part in arg.split(","):
        if "=" not in part:
            raise UsageError(f"bad rename entry {part!r}")
        a, b = part.split("=", 1)
        pairs[a.strip()] = b.strip()
    return specs.RenamingFunction.of(pairs)


def _write_json(path: Optional[str], payload) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _report_payload(report: checker.CheckReport) -> dict:
    records = []
    for e in report.entries:
        records.append(
            {
                "verdict": "pass" if e.ok else "fail",
                "terminated": e.execution.terminated,
                "history": serialize_history(e.execution.history),
                "witness": serialize_history(e.witness) if e.witness else None,
                "completion": serialize_history(e.completion) if e.completion else None,
                "detail": e.detail,
            }
        )
    return {"mode": report.mode, "passed": report.passed, "executions": records}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_list(_: argparse.Namespace) -> int:
    for name in sorted(reproductions.CATALOG):
        print(name)
    print(f"models: {', '.join(models.model_names())}")
    print(f"specs: {', '.join(specs.spec_names())}")
    print(f"abstraction functions: {', '.join(specs.af_names())}")
    return EXIT_OK


def _cmd_reproduce(args: argparse.Namespace) -> int:
    rep = reproductions.run(args.name)
    print(rep.text())
    _write_json(args.json, {"name": rep.name, "ok": rep.ok, "lines": list(rep.lines)})
    return EXIT_OK if rep.ok else EXIT_CHECK_FAILED


def _run_checks(args: argparse.Namespace, ex: explorer.Exploration, model) -> tuple[int, dict]:
    recs = checker.recorded_executions(ex)
    if args.mode == "strict":
        spec = specs.get_spec(args.spec) if args.spec else model.seq_spec
        report = checker.check_strict(recs, spec)
        render = spec.render_state
    else:
        if not args.adt:
            raise UsageError(f"--mode {args.mode} requires --adt")
        adt = _resolve_adt(args.adt)
        af = specs.get_af(args.af) if args.af else None
        if af is None:
            raise UsageError(f"--mode {args.mode} requires --af for model states")
        rf = _parse_rename(args.rename, model.method_names())
        if args.mode == "general":
            report = checker.check_general(recs, adt, af, rf)
        else:
            states = list(model.enumerate_states(("a", "b")))
            spec = specs.get_spec(args.spec) if args.spec else model.seq_spec
            report = checker.check_concurrent_implementation(
                recs, spec, adt, af, rf, states
            )
        render = adt.render_state
    for line in report.lines(render):
        print(line)
    return (EXIT_OK if report.passed else EXIT_CHECK_FAILED), _report_payload(report)


def _cmd_explore(args: argparse.Namespace) -> int:
    prog = _load_program(args.program)
    model = models.parse_model_ref(args.model)
    init = _parse_init(args.init, model)
    ex = explorer.explore(prog, model, init_obj=init, bound=args.bound)
    fs = explorer.final_states(ex)
    print(f"configurations: {len(ex.order)}  transitions: {ex.transitions_explored}")
    if ex.truncated:
        print(f"budget exhausted at {len(ex.truncated)} frontier configurations "
              f"(unknown entries reported)")
    print("final states:")
    for line in fs.renderings:
        print(f"  {line}")
    kinds = sorted(k.value for k in ex.divergence_kinds())
    print("divergence: " + (", ".join(kinds) if kinds else "none"))
    payload: dict = {
        "final_states": list(fs.renderings),
        "divergence": kinds,
        "truncated": bool(ex.truncated),
    }
    if args.histories:
        outdir = Path(args.histories)
        outdir.mkdir(parents=True, exist_ok=True)
        recs = checker.recorded_executions(ex)
        for i, rec in enumerate(recs):
            text = f"# execution {i}: " + (
                "terminated\n" if rec.terminated else "incomplete\n"
            )
            (outdir / f"exec-{i:04d}.txt").write_text(
                text + serialize_history(rec.history)
            )
        print(f"wrote {len(recs)} history files to {outdir}")
    status = EXIT_OK
    if args.mode:
        status, check_payload = _run_checks(args, ex, model)
        payload["check"] = check_payload
    _write_json(args.json, payload)
    return status


def _cmd_compare(args: argparse.Namespace) -> int:
    prog = _load_program(args.program)
    model = models.parse_model_ref(args.model)
    spec = specs.get_spec(args.spec) if args.spec else model.seq_spec
    init = _parse_init(args.init, model)
    init_atomic = None
    if args.spec and spec.name != model.seq_spec.name:
        # a foreign spec has its own state domain: seed it from contents
        from .values import parse_value

        contents = tuple(
            parse_value(tok.strip()) for tok in args.init.split(",") if tok.strip()
        )
        init_atomic = spec.seed_state(contents)
    obs = explorer.compare_observables(
        prog, model, spec, init_obj=init, bound=args.bound, init_obj_atomic=init_atomic
    )
    div = explorer.compare_divergence(
        prog, model, spec, init_obj=init, bound=args.bound, init_obj_atomic=init_atomic
    )
    print(f"client traces equal: {'yes' if obs.traces_equal else 'no'}")
    if not obs.traces_equal:
        for t in obs.trace_diff_model[:5]:
            print(f"  only fine-grained: {t}")
        for t in obs.trace_diff_atomic[:5]:
            print(f"  only atomic: {t}")
    print(f"final states equal: {'yes' if obs.states_equal else 'no'}")
    print("  fine-grained:")
    for line in obs.state_lines_model:
        print(f"    {line}")
    print("  atomic:")
    for line in obs.state_lines_atomic:
        print(f"    {line}")
    print(
        "divergence: fine-grained="
        + (", ".join(div.model_kinds) or "none")
        + " atomic="
        + (", ".join(div.atomic_kinds) or "none")
    )
    if obs.unknown_present:
        print("warning: budget exhausted; sets are lower bounds")
    _write_json(
        args.json,
        {
            "traces_equal": obs.traces_equal,
            "states_equal": obs.states_equal,
            "model_divergence": list(div.model_kinds),
            "atomic_divergence": list(div.atomic_kinds),
        },
    )
    agree = obs.equal and div.model_diverges == div.atomic_diverges
    return EXIT_OK if agree else EXIT_CHECK_FAILED


def _cmd_check_history(args: argparse.Namespace) -> int:
    try:
        text = Path(args.file).read_text()
    except FileNotFoundError:
        raise UsageError(f"history file not found: {args.file}") from None
    h = parse_history(text)
    if args.mode == "strict":
        if not args.spec:
            raise UsageError("--mode strict requires --spec")
        spec = specs.get_spec(args.spec)
        # a history file carries no final state: check linearizability from
        # the spec's initial state and report the witness's legal finals
        rec = checker.RecordedExecution(spec.initial_states[0], h, False)
        lin = checker.find_linearization(rec, spec)
        ok = lin is not None
        report = checker.CheckReport(
            "strict",
            ok,
            (
                checker.ExecutionVerdict(
                    rec,
                    ok,
                    witness=lin.witness if lin else None,
                    completion=lin.completion if lin else None,
                    detail="" if ok else "no completion linearizes",
                ),
            ),
        )
        if ok:
            finals = sorted(spec.render_state(s) for s in lin.final_states)
            print(f"legal final states of the witness: {finals}")
        render = spec.render_state
    elif args.mode == "general":
        if not args.adt:
            raise UsageError("--mode general requires --adt")
        adt = _resolve_adt(args.adt)
        rf = _parse_rename(args.rename, _history_methods(h))
        rec = checker.RecordedExecution(adt.initial_state, h, False)
        af = specs.AbstractionFunction("identity", lambda s: s)
        report = checker.check_general([rec], adt, af, rf)
        render = adt.render_state
    else:
        raise UsageError("check-history supports --mode strict|general; "
                         "impl mode needs explored executions (use explore)")
    for line in report.lines(render):
        print(line)
    for e in report.entries:
        if e.ok and e.witness is not None:
            print("witness:")
            for line in serialize_history(e.witness).splitlines():
                print(f"  {line}")
    _write_json(args.json, _report_payload(report))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _history_methods(h) -> tuple[str, ...]:
    from .history import Inv

    return tuple(sorted({e.label.method for e in h if isinstance(e.label, Inv)}))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="strictlin",
        description="bounded interleaving exploration and linearizability checking",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list reproductions, models, specs")

    rp = sub.add_parser("reproduce", help="run a named reproduction")
    rp.add_argument("name")
    rp.add_argument("--json", help="write a machine-readable report")

    def common(p, program=True):
        if program:
            p.add_argument("--program", required=True, help="program file")
            p.add_argument("--model", required=True, help="model NAME[,param=val]")
            p.add_argument("--bound", type=int, default=explorer.DEFAULT_BOUND,
                           help="transition budget (default %(default)s)")
            p.add_argument("--init", default="",
                           help="initial object contents, e.g. \"'a','b'\"")
        p.add_argument("--spec", help="sequential spec name")
        p.add_argument("--json", help="write a machine-readable report")

    ep = sub.add_parser("explore", help="explore a program over a model")
    common(ep)
    ep.add_argument("--mode", choices=["strict", "general", "impl"],
                    help="also check the explored executions")
    ep.add_argument("--adt", help="abstract data type name")
    ep.add_argument("--af", help="abstraction function name")
    ep.add_argument("--rename", help="method renaming A=B,C=D")
    ep.add_argument("--histories", help="directory for emitted history files")

    cp = sub.add_parser("compare", help="compare a model against its atomic version")
    common(cp)

    hp = sub.add_parser("check-history", help="check a recorded history file")
    hp.add_argument("--file", required=True, help="history file")
    hp.add_argument("--mode", choices=["strict", "general", "impl"], required=True)
    hp.add_argument("--spec", help="sequential spec name")
    hp.add_argument("--adt", help="abstract data type name")
    hp.add_argument("--af", help="abstraction function name")
    hp.add_argument("--rename", help="method renaming A=B,C=D")
    hp.add_argument("--json", help="write a machine-readable report")
    return ap


_COMMANDS = {
    "list": _cmd_list,
    "reproduce": _cmd_reproduce,
    "explore": _cmd_explore,
    "compare": _cmd_compare,
    "check-history": _cmd_check_history,
}


def main(argv: Optional[list[str]] = None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
