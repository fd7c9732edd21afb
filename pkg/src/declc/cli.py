"""Command line driver.

Exit codes: 0 success, 1 source errors (lexing/parsing/checking),
2 runtime fault, 3 differential divergence found by `check`.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import trace as tr
from .checker import check
from .errors import CheckError, LexError, ParseError, RuntimeFault

EXIT_OK = 0
EXIT_SOURCE_ERROR = 1
EXIT_RUNTIME_FAULT = 2
EXIT_DIVERGENCE = 3


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _frontend(source: str, filename: str):
    from .parser import parse_source

    unit = parse_source(source)
    info, diags = check(unit)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        for d in errors:
            print(d.render(filename), file=sys.stderr)
        raise CheckError(errors)
    return unit, info


def cmd_parse(args) -> int:
    from .printer import unit_str

    unit, _ = _frontend(_read(args.file), args.file)
    sys.stdout.write(unit_str(unit))
    return EXIT_OK


def cmd_graph(args) -> int:
    from .lvgraph import build_graph, check_acyclic, to_dot

    unit, _ = _frontend(_read(args.file), args.file)
    graph = build_graph(unit)
    cycle = check_acyclic(graph)
    if cycle is not None:
        chain = " -> ".join(n.str for n in cycle)
        print(f"{args.file}: error: redefinition graph has a cycle: {chain}",
              file=sys.stderr)
        return EXIT_SOURCE_ERROR
    if args.dot:
        sys.stdout.write(to_dot(graph))
    else:
        for src, dst in graph.edges():
            print(f"{src.str} -> {dst.str}")
    return EXIT_OK


def cmd_emit(args) -> int:
    from .codegen import lower
    from .lvgraph import build_graph
    from .render import render

    unit, _ = _frontend(_read(args.file), args.file)
    text = render(lower(unit, build_graph(unit)))
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _make_sink(trace_arg) -> tuple[tr.TraceSink, object]:
    buffer_size = int(os.environ.get("DECLC_TRACE_BUFFER", "0"))
    stream = None
    close = None
    if trace_arg is not None:
        if trace_arg == "-":
            stream = sys.stdout
        else:
            stream = close = open(trace_arg, "w", encoding="utf-8")
    return tr.TraceSink(stream=stream, buffer_size=buffer_size), close


def cmd_run(args) -> int:
    from .codegen import lower
    from .lvgraph import build_graph
    from .vm import Machine

    unit, info = _frontend(_read(args.file), args.file)
    gen = lower(unit, build_graph(unit))
    sink, close = _make_sink(args.trace)
    try:
        machine = Machine(gen, info, sink)
        machine.run()
        for name, value in sorted(machine.memory_snapshot().items()):
            print(f"{name} = {value}")
        return EXIT_OK
    except RuntimeFault as f:
        print(f"{args.file}: runtime fault: {f}", file=sys.stderr)
        return EXIT_RUNTIME_FAULT
    finally:
        if close is not None:
            close.close()


def cmd_check(args) -> int:
    from .oracle import Oracle, diff_memory, diff_traces
    from .randgen import generate
    from .vm import load_source

    failures = 0
    for k in range(args.count):
        seed = args.seed + k
        source = generate(seed)
        try:
            m = load_source(source)
            m.call_function("main", [])
            unit, info = _frontend(source, f"<seed {seed}>")
            o = Oracle(unit, info)
            o.load()
            o.run()
        except RuntimeFault as f:
            print(f"seed {seed}: runtime fault: {f}", file=sys.stderr)
            failures += 1
            continue
        dt = diff_traces(m.trace.events, o.trace.events)
        dm = diff_memory(m.memory_snapshot(), o.memory_snapshot())
        if not dt.ok or not dm.ok:
            failures += 1
            print(f"seed {seed}: DIVERGENCE")
            for r in (dt, dm):
                if not r.ok:
                    print("  " + r.message)
            for a, b in zip(dt.left, dt.right):
                print(f"    compiled: {a.to_json()}")
                print(f"    reference: {b.to_json()}")
            if args.save_dir:
                os.makedirs(args.save_dir, exist_ok=True)
                path = os.path.join(args.save_dir, f"seed{seed}.hc")
                with open(path, "w", encoding="utf-8") as f:
                    f.write(source)
                print(f"  program saved to {path}")
        elif args.verbose:
            print(f"seed {seed}: ok "
                  f"({len(tr.filtered(m.trace.events))} visible events)")
    total = args.count
    print(f"{total - failures}/{total} seeds agree")
    return EXIT_OK if failures == 0 else EXIT_DIVERGENCE


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="declc",
        description="Compiler and runtime for a C-like language with "
                    "declarative constructs (constraints, monitors, "
                    "preconditional statements).")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a program")
    p.add_argument("file")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("graph", help="print the l-value redefinition graph")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="Graphviz output")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("emit", help="print the lowered pseudo-C++ functions")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="output file ('-' = stdout)")
    p.set_defaults(fn=cmd_emit)

    p = sub.add_parser("run", help="compile and execute a program")
    p.add_argument("file")
    p.add_argument("--trace", metavar="FILE",
                   help="write the JSON-lines event trace ('-' = stdout)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser(
        "check", help="differential testing against the reference interpreter")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--count", type=int, default=50, help="number of seeds")
    p.add_argument("--save-dir", help="save diverging programs here")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fn=cmd_check)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (LexError, ParseError) as e:
        print(f"{getattr(args, 'file', '<input>')}: {e}", file=sys.stderr)
        return EXIT_SOURCE_ERROR
    except CheckError:
        return EXIT_SOURCE_ERROR
    except RuntimeFault as f:
        print(f"runtime fault: {f}", file=sys.stderr)
        return EXIT_RUNTIME_FAULT
    except OSError as e:
        print(str(e), file=sys.stderr)
        return EXIT_SOURCE_ERROR


if __name__ == "__main__":
    sys.exit(main())
