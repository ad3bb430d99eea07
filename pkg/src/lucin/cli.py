"""Command line front: serve, run, repl, check."""

import argparse
import json
import sys
from pathlib import Path

from .calculation import render_text, start_calculation
from .interpreter import EndProgram, Helpless, NextStep, advance
from .knowledge import Knowledge, KnowledgeError, default_knowledge
from .parsing import ParseError, parse_formula, parse_theory, print_term
from .service import Service, ServiceError, handle_message, stdio_loop


def _load_kb(args) -> Knowledge:
    if getattr(args, "theories", None):
        kb = Knowledge()
        kb.load_dir(Path(args.theories))
        return kb
    return default_knowledge()


def _parse_key(text: str) -> tuple[str, ...]:
    return tuple(p for p in text.split(".") if p)


def _parse_model(pairs: list[str]) -> dict[str, str]:
    model = {}
    for pair in pairs:
        if "=" not in pair:
            raise SystemExit(f"model argument {pair!r} is not name=formula")
        k, v = pair.split("=", 1)
        model[k.strip()] = v.strip()
    return model


def cmd_run(args) -> int:
    kb = _load_kb(args)
    model = {k: parse_formula(v) for k, v in _parse_model(args.model).items()}
    calc = start_calculation(kb, _parse_key(args.problem),
                             _parse_key(args.method), model)
    while True:
        out = advance(calc)
        if isinstance(out, NextStep):
            continue
        print(render_text(calc))
        for w in calc.warnings:
            print(f"warning: {w}", file=sys.stderr)
        if isinstance(out, Helpless):
            print("no applicable step; stopped", file=sys.stderr)
            return 1
        return 0


def cmd_check(args) -> int:
    kb = Knowledge()
    status = 0
    for name in args.files:
        try:
            kb.add_theory(parse_theory(Path(name).read_text(), name))
            print(f"{name}: ok")
        except (ParseError, KnowledgeError, OSError) as e:
            print(f"{name}: {e}", file=sys.stderr)
            status = 1
    if not status:
        print(f"{len(kb.rules)} rules, {len(kb.rule_sets)} rule sets, "
              f"{len(kb.problems)} problems, {len(kb.methods)} methods")
    return status


def cmd_serve(args) -> int:
    kb = _load_kb(args)
    if args.stdio:
        stdio_loop(Service(kb), sys.stdin, sys.stdout)
        return 0
    import uvicorn

    from .server import create_app
    uvicorn.run(create_app(kb), host=args.host, port=args.port,
                log_level="warning")
    return 0


def cmd_repl(args) -> int:
    service = Service(_load_kb(args))
    try:
        session = service.start_session(list(_parse_key(args.problem)),
                                        list(_parse_key(args.method)),
                                        _parse_model(args.model))
    except ServiceError as e:
        print(f"cannot start: {e}", file=sys.stderr)
        return 1
    print(render_text(session.calc))
    print("enter a formula, or: :tactic T | :hint | :auto | :undo | :state | :quit")
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            return 0
        if not line:
            continue
        try:
            if line == ":quit":
                return 0
            if line == ":state":
                print(render_text(session.calc))
                continue
            if line == ":hint":
                res = session.hint()
            elif line == ":auto":
                res = session.auto()
            elif line == ":undo":
                res = session.undo()
            elif line.startswith(":tactic"):
                res = session.input_tactic(line[len(":tactic"):].strip())
            elif line.startswith(":"):
                print(f"unknown command {line.split()[0]}")
                continue
            else:
                res = session.input_term(line)
        except ServiceError as e:
            print(f"error: {e}")
            continue
        print(json.dumps(res))
        if res.get("kind") in ("found", "safe", "unsafe", "end", "stepped"):
            print(render_text(session.calc))
        if session.calc.finished:
            print("finished.")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lucin",
        description="step-wise calculations driven by tactic programs")
    parser.add_argument("--theories", metavar="DIR",
                        help="load knowledge from DIR instead of the "
                             "built-in theories")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve a problem and print the steps")
    p.add_argument("problem", help="problem key, dot separated")
    p.add_argument("method", help="method key, dot separated")
    p.add_argument("model", nargs="*", help="name=formula bindings")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("repl", help="interactive session")
    p.add_argument("problem")
    p.add_argument("method")
    p.add_argument("model", nargs="*")
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("serve", help="serve sessions over HTTP or stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--stdio", action="store_true",
                   help="JSON-lines on stdin/stdout instead of HTTP")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("check", help="parse and validate theory files")
    p.add_argument("files", nargs="+")
    p.set_defaults(fn=cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, KnowledgeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
