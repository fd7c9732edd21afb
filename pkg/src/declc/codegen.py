"""Lowering: from a checked unit plus its redefinition graph to a GenUnit.

Per declarative construct the generator produces (mirroring the init_/redef_/
assign_ function families):
  - one init function per distinct l-value of the construct, managing its
    involvement (constraint/monitor/precondition registration, dependency
    edges, redefinition registration);
  - one redef function per redefining, assignable l-value, re-running the
    init functions of everything it rebinds;
  - the construct's action function(s) (assign / monitor body / tester /
    guard);
plus one unit init function per scope that installs every construct in
declaration order.

Dependency edges are registered inside the *constraining* l-value's init
function, so rebinding the constraining side re-registers the edge at its
new storage (the constrained side is re-resolved lazily at fire time).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import ast
from .lvgraph import Analyzer, LvNode, RedefGraph

# --------------------------------------------------------------- instructions


@dataclass
class RegRedefinition:
    lv: LvNode
    fn: str


@dataclass
class RegConstraint:
    lv: LvNode


@dataclass
class RegDependency:
    constrained: LvNode
    from_lv: LvNode
    lv_ordinal: int


@dataclass
class RegMonitor:
    lv: LvNode


@dataclass
class RegPrecondition:
    lv: LvNode


@dataclass
class CallGen:
    fn: str


@dataclass
class ApplyOnInstall:
    pass


# ------------------------------------------------------------------ functions

INIT = "Init"
REDEF = "Redef"
ASSIGN = "Assign"
MONITOR_BODY = "MonitorBody"
PRECOND_TESTER = "PrecondTester"
GUARD_TESTER = "GuardTester"
UNIT_INIT = "UnitInit"


@dataclass
class GenFunction:
    name: str
    kind: str
    construct: int             # owning construct ordinal, -1 for unit init
    instrs: list = field(default_factory=list)   # Init / Redef / UnitInit bodies
    lhs: LvNode | None = None  # Assign target
    expr: ast.Expr | None = None     # Assign rhs / GuardTester expr / tester cond
    stmts: ast.Block | None = None   # MonitorBody / PrecondTester body


@dataclass
class ConstructPlan:
    ordinal: int
    kind: str                  # "constraint" | "monitor" | "precond"
    scope: str | None
    lhs: LvNode | None
    rhs_lvs: list[LvNode]
    assign_fn: str | None = None
    guard_fn: str | None = None
    monitor_fn: str | None = None
    tester_fn: str | None = None
    init_fns: list[str] = field(default_factory=list)  # install order


@dataclass
class ClassPlan:
    name: str
    members: list[str]
    member_classes: dict[str, str]  # member name -> class name, for class-typed members
    unit_init: str
    construct_ordinals: list[int]


@dataclass
class GenUnit:
    unit: ast.Unit
    graph: RedefGraph
    functions: dict[str, GenFunction]
    unit_init: str
    plans: dict[int, ConstructPlan]
    classes: dict[str, ClassPlan]


# -------------------------------------------------------------------- mangler

def _sanitize(s: str) -> str:
    s = re.sub(r"[^0-9A-Za-z_]+", "_", s).strip("_")
    return s or "e"


def mangle_expr(e: ast.Expr) -> str:
    if isinstance(e, ast.Name):
        return e.name
    if isinstance(e, ast.Deref):
        return "ptr_" + mangle_expr(e.operand)
    if isinstance(e, ast.Index):
        return mangle_expr(e.base) + "_arr_" + mangle_expr(e.index)
    if isinstance(e, (ast.Dot, ast.Arrow)):
        return mangle_expr(e.obj) + "_mem_" + e.member
    if isinstance(e, (ast.DotStar, ast.ArrowStar)):
        return mangle_expr(e.obj) + "_memptr_" + mangle_expr(e.ptr)
    if isinstance(e, ast.Binary):
        return mangle_expr(e.left) + "_" + mangle_expr(e.right)
    if isinstance(e, ast.Call):
        parts = [mangle_expr(e.callee)] + [mangle_expr(a) for a in e.args]
        return "_".join(parts)
    if isinstance(e, (ast.Unary, ast.AddrOf)):
        return mangle_expr(e.operand)
    if isinstance(e, ast.IntLit):
        return str(e.value)
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.NullLit):
        return "null"
    return _sanitize(type(e).__name__.lower())


def mangle(lv: LvNode) -> str:
    """Identifier-safe name for an l-value: x -> sim_x, **x -> ptr_ptr_x,
    p[i] -> p_arr_i."""
    if isinstance(lv.expr, ast.Name):
        return "sim_" + lv.expr.name
    return _sanitize(mangle_expr(lv.expr))


class NameRegistry:
    def __init__(self):
        self.used: set[str] = set()

    def fresh(self, base: str) -> str:
        name = base
        k = 0
        while name in self.used:
            k += 1
            name = f"{base}_{k}"
        self.used.add(name)
        return name


# ------------------------------------------------------------------- emission

class Emitter:
    def __init__(self, unit: ast.Unit, graph: RedefGraph):
        self.unit = unit
        self.graph = graph
        self.names = NameRegistry()
        self.functions: dict[str, GenFunction] = {}
        self.plans: dict[int, ConstructPlan] = {}

    def add(self, fn: GenFunction) -> GenFunction:
        self.functions[fn.name] = fn
        return fn

    def emit_unit(self) -> GenUnit:
        for c in self.unit.constructs:
            self.emit_construct(c)
        classes = {}
        for cls in self.unit.classes:
            classes[cls.name] = self.emit_class(cls)
        unit_init = self.emit_scope_init(None, "init_0")
        return GenUnit(self.unit, self.graph, self.functions, unit_init.name,
                       self.plans, classes)

    # ---------------------------------------------------------- per-construct

    def emit_construct(self, c: ast.Construct):
        info = self.graph.constructs[c.ordinal]
        if isinstance(c, ast.Constraint):
            plan = ConstructPlan(c.ordinal, "constraint", c.scope, info.lhs,
                                 list(info.rhs_lvs))
            plan.assign_fn = self.names.fresh(f"assign_{c.ordinal}")
            self.add(GenFunction(plan.assign_fn, ASSIGN, c.ordinal,
                                 lhs=info.lhs, expr=c.rhs))
            if c.guard is not None:
                plan.guard_fn = self.names.fresh(f"guard_{c.ordinal}")
                self.add(GenFunction(plan.guard_fn, GUARD_TESTER, c.ordinal,
                                     expr=c.guard))
            roots = [info.lhs] + info.rhs_lvs
        elif isinstance(c, ast.Monitor):
            plan = ConstructPlan(c.ordinal, "monitor", c.scope, info.lhs, [])
            plan.monitor_fn = self.names.fresh(f"monitor_{c.ordinal}")
            self.add(GenFunction(plan.monitor_fn, MONITOR_BODY, c.ordinal,
                                 stmts=c.body))
            roots = [info.lhs]
        elif isinstance(c, ast.Precond):
            plan = ConstructPlan(c.ordinal, "precond", c.scope, None,
                                 list(info.cond_lvs))
            plan.tester_fn = self.names.fresh(f"tester_{c.ordinal}")
            self.add(GenFunction(plan.tester_fn, PRECOND_TESTER, c.ordinal,
                                 expr=c.cond, stmts=c.body))
            roots = list(info.cond_lvs)
        else:
            raise TypeError(type(c).__name__)
        self.plans[c.ordinal] = plan

        # distinct l-values of the construct, innermost redefining ones first
        nodes: list[LvNode] = []

        def collect(n: LvNode):
            if n in nodes:
                return
            for r in n.redef:
                collect(r)
            nodes.append(n)

        for root in roots:
            collect(root)
        node_set = set(map(id, nodes))

        def redefines_in_construct(n: LvNode) -> list[LvNode]:
            return [d for d in n.dependents if id(d) in node_set]

        init_name = {id(n): None for n in nodes}
        redef_name = {}
        for n in nodes:
            if n.assignable and redefines_in_construct(n):
                redef_name[id(n)] = self.names.fresh("redef_" + mangle(n))

        # init functions, one per distinct l-value that has any registration
        for n in nodes:
            instrs = []
            if plan.kind == "constraint" and n is plan.lhs:
                instrs.append(RegConstraint(n))
            if plan.kind == "monitor" and n is plan.lhs:
                instrs.append(RegMonitor(n))
            if plan.kind == "precond" and n in plan.rhs_lvs:
                instrs.append(RegPrecondition(n))
            if plan.kind == "constraint":
                for k, x in enumerate(plan.rhs_lvs):
                    if x is n:
                        instrs.append(RegDependency(plan.lhs, x, k))
            if id(n) in redef_name:
                instrs.append(RegRedefinition(n, redef_name[id(n)]))
            if plan.kind == "constraint" and n is plan.lhs:
                instrs.append(ApplyOnInstall())
            if instrs:
                name = self.names.fresh("init_" + mangle(n))
                init_name[id(n)] = name
                self.add(GenFunction(name, INIT, c.ordinal, instrs=instrs))
                plan.init_fns.append(name)

        # redef functions: re-run the inits of everything this l-value rebinds
        for n in nodes:
            rn = redef_name.get(id(n))
            if rn is None:
                continue
            instrs = []
            for d in redefines_in_construct(n):
                if init_name.get(id(d)):
                    instrs.append(CallGen(init_name[id(d)]))
                if id(d) in redef_name:
                    instrs.append(CallGen(redef_name[id(d)]))
            self.add(GenFunction(rn, REDEF, c.ordinal, instrs=instrs))

    # --------------------------------------------------------------- per-scope

    def emit_scope_init(self, scope: str | None, name: str) -> GenFunction:
        instrs = []
        for c in self.unit.constructs:
            if c.scope == scope:
                for fn in self.plans[c.ordinal].init_fns:
                    instrs.append(CallGen(fn))
        fn = GenFunction(self.names.fresh(name), UNIT_INIT, -1, instrs=instrs)
        return self.add(fn)

    def emit_class(self, cls: ast.ClassDecl) -> ClassPlan:
        unit_init = self.emit_scope_init(cls.name, f"init_0_{cls.name}")
        member_classes = {}
        for m in cls.members:
            if m.base_type not in ("int", "bool") and m.ptr_depth == 0:
                member_classes[m.name] = m.base_type
        return ClassPlan(cls.name, [m.name for m in cls.members], member_classes,
                         unit_init.name, [c.ordinal for c in cls.constructs])


def lower(unit: ast.Unit, graph: RedefGraph) -> GenUnit:
    """Lower a checked unit to its generated-function form."""
    return Emitter(unit, graph).emit_unit()
