"""Deterministic pseudo-C++ rendering of lowered units.

The output shows what the compiler generates for each declarative construct:
registration calls on the affected l-values plus the action functions, in a
readable C-like surface.  It is documentation/debug output; execution
interprets the GenUnit directly.
"""

from __future__ import annotations

from . import ast, codegen
from .codegen import (
    ApplyOnInstall, CallGen, GenFunction, GenUnit, RegConstraint,
    RegDependency, RegMonitor, RegPrecondition, RegRedefinition,
)
from .printer import construct_lines, expr_str, stmt_lines


def _lv(node) -> str:
    return node.str


def _reg_line(fn: GenFunction, ins, plan) -> str:
    if isinstance(ins, RegRedefinition):
        return f"({_lv(ins.lv)}).HandleRedefinition({ins.fn}, b, owner);"
    if isinstance(ins, RegConstraint):
        return f"({_lv(ins.lv)}).HandleConstraint({plan.assign_fn}, b, owner);"
    if isinstance(ins, RegDependency):
        return f"({_lv(ins.constrained)}).HandleDependency(&({_lv(ins.from_lv)}), b, owner);"
    if isinstance(ins, RegMonitor):
        return f"({_lv(ins.lv)}).HandleMonitor({plan.monitor_fn}, b, owner);"
    if isinstance(ins, RegPrecondition):
        return f"({_lv(ins.lv)}).HandlePrecondition({plan.tester_fn}, b, owner);"
    raise TypeError(type(ins).__name__)


def _fn_lines(gen: GenUnit, fn: GenFunction) -> list[str]:
    plan = gen.plans.get(fn.construct)
    if fn.kind == codegen.ASSIGN:
        return [f"void {fn.name}(void* owner) {{",
                f"    {_lv(fn.lhs)} = {expr_str(fn.expr)};",
                "}"]
    if fn.kind == codegen.GUARD_TESTER:
        return [f"bool {fn.name}(void* owner) {{",
                f"    return {expr_str(fn.expr)};",
                "}"]
    if fn.kind == codegen.MONITOR_BODY:
        lines = [f"void {fn.name}(void* owner)"]
        lines.extend(stmt_lines(fn.stmts))
        return lines
    if fn.kind == codegen.PRECOND_TESTER:
        lines = [f"void {fn.name}(void* owner) {{",
                 f"    if ({expr_str(fn.expr)})"]
        lines.extend("    " + ln for ln in stmt_lines(fn.stmts, 1))
        lines.append("}")
        return lines
    # Init / Redef / UnitInit bodies
    lines = [f"void {fn.name}(bool b, void* owner) {{"]
    for ins in fn.instrs:
        if isinstance(ins, CallGen):
            lines.append(f"    {ins.fn}(b, owner);")
        elif isinstance(ins, ApplyOnInstall):
            if plan is not None and plan.guard_fn:
                lines.append(f"    if (b && {plan.guard_fn}(owner)) "
                             f"{plan.assign_fn}(owner);")
            else:
                lines.append(f"    if (b) {plan.assign_fn}(owner);")
        else:
            lines.append("    " + _reg_line(fn, ins, plan))
    lines.append("}")
    return lines


def render(gen: GenUnit) -> str:
    """Full lowered-unit listing, grouped per construct, then per scope."""
    out: list[str] = []

    def emit_fn(name: str):
        out.extend(_fn_lines(gen, gen.functions[name]))
        out.append("")

    for ordinal in sorted(gen.plans):
        plan = gen.plans[ordinal]
        c = gen.graph.constructs[ordinal].construct
        header = construct_lines(c)
        out.append(f"// construct {ordinal}"
                   + (f" (class {c.scope})" if c.scope else ""))
        out.extend("// " + ln for ln in header)
        for fname in [plan.assign_fn, plan.guard_fn, plan.monitor_fn,
                      plan.tester_fn]:
            if fname:
                emit_fn(fname)
        for fname in plan.init_fns:
            emit_fn(fname)
        for fname in sorted(set(_redefs_of(gen, plan))):
            emit_fn(fname)

    for cls_name in sorted(gen.classes):
        out.append(f"// class {cls_name} unit init")
        emit_fn(gen.classes[cls_name].unit_init)
    out.append("// file scope unit init")
    emit_fn(gen.unit_init)
    return "\n".join(out).rstrip() + "\n"


def _redefs_of(gen: GenUnit, plan) -> list[str]:
    return [name for name, fn in gen.functions.items()
            if fn.kind == codegen.REDEF and fn.construct == plan.ordinal]
