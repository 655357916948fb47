"""Command-line front end.

Exit codes: 0 on success, 1 on a type error, a runtime error, fuel
exhaustion or a failed check, and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dynstate import dyn_check, dyn_run
from .eval import DEFAULT_FUEL, FuelExhausted, Terminal, run
from .fixtures import FIXTURE_NAMES, fixture, fixture_source
from .harness import THEOREMS, fuzz
from .infer import Typing, infer_closed, show_typing
from .parser import ParseError, Program, elaborate, parse
from .pretty import format_trace, pretty
from .translate import COARSE, GROUND, NonGroundSignature, translate_program
from .types import MODES, TypeCheckError, canonical, sig_to_json, type_to_json


def _load(path: str) -> Program:
    return parse(Path(path).read_text(encoding="utf-8"))


def _mode(prog: Program, override: str | None) -> str:
    if prog.is_dyn:
        return "dyn"
    return override or prog.mode


def _typecheck(prog: Program, mode: str) -> Typing:
    body = elaborate(prog.body)
    if mode == "dyn":
        return dyn_check(prog.params, body)
    return infer_closed(body, mode, prog.global_signature if mode != "local" else None)


def _display_mode(mode: str) -> str:
    return mode if mode in ("local", "coarse") else "none"


def cmd_check(args) -> int:
    prog = _load(args.file)
    mode = _mode(prog, args.mode)
    typing = _typecheck(prog, mode)
    shown = [(name, sch, eff) for name, sch, eff in typing.bindings if "'" not in name]
    if args.json:
        out = {
            "mode": mode,
            "bindings": [{"name": n, "scheme": _scheme_json(sch), "effects": sig_to_json(e)}
                         for n, sch, e in shown],
            "type": _scheme_json(typing.scheme),
            "effects": sig_to_json(typing.effects),
            "text": typing.show(),
        }
        print(json.dumps(out, ensure_ascii=False, indent=2))
        return 0
    for name, sch, eff in shown:
        print(f"val {name} : {show_typing(sch, eff, _display_mode(mode))}")
    print(f"- : {typing.show()}")
    return 0


def _scheme_json(sch):
    c = canonical(sch)
    return {"forall": list(c.quantified), "body": type_to_json(c.body)}


def _execute(prog: Program, mode: str, fuel: int, check: bool):
    if check:
        _typecheck(prog, mode)
    body = elaborate(prog.body)
    if mode == "dyn":
        return dyn_run(body, fuel, detect_cycles=True)
    return run(body, fuel, detect_cycles=True)


def _outcome_json(outcome) -> dict:
    match outcome:
        case Terminal(c):
            return {"tag": "Terminal", "term": pretty(c)}
        case FuelExhausted(last, rep):
            return {"tag": "FuelExhausted", "last": pretty(last),
                    "repeated": list(rep) if rep else None}
    tag = type(outcome).__name__
    return {"tag": tag, "description": outcome.describe()}


def cmd_run(args) -> int:
    prog = _load(args.file)
    mode = _mode(prog, args.mode)
    trace = _execute(prog, mode, args.fuel, not args.no_check)
    ok = isinstance(trace.outcome, Terminal)
    if args.json:
        print(json.dumps({"outcome": _outcome_json(trace.outcome), "steps": trace.fuel_used},
                         ensure_ascii=False, indent=2))
    else:
        print(trace.outcome.describe())
        if not ok:
            print(f"after {trace.fuel_used} steps", file=sys.stderr)
    return 0 if ok else 1


def cmd_trace(args) -> int:
    prog = _load(args.file)
    mode = _mode(prog, args.mode)
    trace = _execute(prog, mode, args.fuel, not args.no_check)
    if args.json:
        steps = [{"index": i, "term": None if c is None else pretty(c)}
                 for i, c in trace.numbered()]
        if args.limit is not None:
            steps = steps[:args.limit]
        print(json.dumps({"steps": steps, "outcome": _outcome_json(trace.outcome)},
                         ensure_ascii=False, indent=2))
    else:
        print(format_trace(trace, args.limit))
    return 0 if isinstance(trace.outcome, Terminal) else 1


def cmd_translate(args) -> int:
    prog = _load(args.file)
    if not prog.is_dyn:
        print("error: translate expects a program with a params header", file=sys.stderr)
        return 1
    text = translate_program(elaborate(prog.body), prog.params, args.to)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_fuzz(args) -> int:
    report = fuzz(args.theorem, args.seeds, args.depth, args.mode or "local")
    if args.json:
        print(json.dumps({"summary": report.summary(),
                          "results": [{"seed": seed, "passed": v.passed, "steps": v.steps,
                                       "note": v.note, "witness": v.witness}
                                      for seed, v in report.results]},
                         ensure_ascii=False, indent=2))
    else:
        for line in report.lines():
            print(line)
        sm = report.summary()
        print(f"{sm['theorem']} ({sm['mode']}): {sm['passed']}/{sm['runs']} passed")
    return 0 if not report.failed else 1


def cmd_fixture(args) -> int:
    text = fixture_source(args.name)
    if args.json:
        print(json.dumps({"name": args.name, "source": text, "core": pretty(fixture(args.name))},
                         ensure_ascii=False, indent=2))
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hmeff", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fuel: bool = False):
        p.add_argument("--json", action="store_true", help="structured output")
        if fuel:
            p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
            p.add_argument("--no-check", action="store_true", help="skip type checking")

    p = sub.add_parser("check", help="infer types and signatures")
    p.add_argument("file")
    p.add_argument("--mode", choices=MODES)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="evaluate to a terminal form")
    p.add_argument("file")
    p.add_argument("--mode", choices=MODES)
    common(p, fuel=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("trace", help="print every evaluation step")
    p.add_argument("file")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--limit", type=int)
    common(p, fuel=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("translate", help="translate a dynamic-scope program into handlers")
    p.add_argument("file")
    p.add_argument("--to", choices=(GROUND, COARSE), default=GROUND)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_translate, json=False)

    p = sub.add_parser("fuzz", help="check a theorem on generated programs")
    p.add_argument("theorem", choices=THEOREMS)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--mode", choices=MODES)
    common(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("fixture", help="print a named example program")
    p.add_argument("name", choices=FIXTURE_NAMES)
    common(p)
    p.set_defaults(func=cmd_fixture)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("fuel", "seeds", "depth", "limit"):
        value = getattr(args, name, None)
        if value is not None and value <= 0:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return 1
    except NonGroundSignature as exc:
        print(f"translation error: {exc}", file=sys.stderr)
        return 1
    except TypeCheckError as exc:
        print(f"type error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
