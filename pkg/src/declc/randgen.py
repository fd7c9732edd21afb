"""Seeded random program generator for differential testing.

Generated programs stay inside a documented safe subset where the incremental
runtime and the brute-force reference are specified to agree.  The subset is
defined in terms of *rebindable families*: a pointer dereference `*pt` (whose
binding moves when `pt` is reassigned) or an indexed access `arr[idx]` (whose
binding moves when `idx` is reassigned).  Outside this subset the two routes
can disagree on registration-stack order after rebinding, which is exactly
the behavior differential runs are meant to pin down, so the generator stays
inside it:

  - each rebindable family is used by at most one construct (as constraint
    left side, monitor subject, or precondition trigger); a family owned by a
    constraint left side is not read anywhere else either, because stores
    issued while that constraint re-applies during rebinding would observe
    other constructs' not-yet-rebound registrations;
  - plain variables are the left side of at most one constraint and at most
    one monitor;
  - precondition triggers avoid cells that any rebindable registration can
    move onto;
  - monitor and precondition bodies write only their own sink variables;
  - pointers are always initialized and rebound within a dedicated target set
    disjoint from other pointers' sets and from constraint-owned variables;
  - array index variables only receive in-range literals;
  - constraint right sides read only storage ranked below the left side,
    keeping the constraint data flow acyclic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


@dataclass
class GenConfig:
    max_constraints: int = 4
    max_monitors: int = 2
    max_preconds: int = 2
    max_writes: int = 24
    class_prob: float = 0.4
    pointer_prob: float = 0.7
    array_prob: float = 0.7


@dataclass
class _Prog:
    decls: list[str] = field(default_factory=list)
    constructs: list[str] = field(default_factory=list)
    helpers: list[str] = field(default_factory=list)
    main: list[str] = field(default_factory=list)

    def text(self) -> str:
        out = list(self.decls) + self.helpers + self.constructs
        out.append("void main() {")
        out += ["    " + s for s in self.main]
        out.append("}")
        return "\n".join(out) + "\n"


@dataclass
class _Family:
    """One rebindable family and the role it was assigned."""

    kind: str                  # "ptr" | "arr"
    lv: str                    # "*pt0" / "arr0[idx0]"
    name: str                  # pt0 / arr0
    role: str = "free"         # "free" | "constraint" | "monitor" | "precond"
    targets: list[str] = field(default_factory=list)  # ptr target set
    size: int = 0
    idx: str = ""
    rank: int = 0              # anti-cycle rank of the family's l-value


class Generator:
    def __init__(self, seed: int, config: GenConfig | None = None):
        self.rng = random.Random(seed)
        self.cfg = config or GenConfig()
        self.prog = _Prog()
        self.free: list[str] = []
        self.owned: list[str] = []
        self.sinks: list[str] = []
        self.families: list[_Family] = []
        self.has_class = False
        self.has_helper = False

    # ------------------------------------------------------------- helpers

    def fams(self, kind=None, role=None):
        return [f for f in self.families
                if (kind is None or f.kind == kind)
                and (role is None or f.role == role)]

    def lit(self) -> str:
        return str(self.rng.randint(-9, 9))

    def new_sink(self) -> str:
        sink = f"sink{len(self.sinks)}"
        self.sinks.append(sink)
        self.prog.decls.append(f"int {sink};")
        return sink

    # ---------------------------------------------------------- expressions

    def rhs_atom(self, rank: int) -> str:
        """Readable atom for a constraint right side, ranked below `rank`."""
        opts = [self.lit]
        pool = self.free if rank < 0 else self.free[:rank]
        if pool:
            opts.append(lambda: self.rng.choice(pool))
        for f in self.fams("arr", "free"):
            opts.append(lambda f=f: f"{f.name}[{self.rng.randint(0, f.size - 1)}]")
            opts.append(lambda f=f: f.lv)
        for f in self.fams("ptr", "free"):
            opts.append(lambda f=f: f.lv)
        if self.has_class:
            opts.append(lambda: "w0.get0()")
        return self.rng.choice(opts)()

    def rhs_expr(self, rank: int, depth: int = 2) -> str:
        if depth == 0 or self.rng.random() < 0.4:
            return self.rhs_atom(rank)
        op = self.rng.choice(["+", "-", "*", "+"])
        return f"{self.rhs_expr(rank, depth - 1)} {op} {self.rhs_expr(rank, depth - 1)}"

    def cond_atom(self) -> str:
        """Atom for precondition triggers: stable bindings only, away from
        cells that rebindable registrations can move onto."""
        reserved = {t for f in self.fams("ptr") if f.role != "free"
                    for t in f.targets}
        opts = [self.lit]
        pool = [v for v in self.free if v not in reserved]
        if pool:
            opts.append(lambda: self.rng.choice(pool))
        for f in self.fams("arr", "free"):
            opts.append(lambda f=f: f"{f.name}[{self.rng.randint(0, f.size - 1)}]")
        if self.has_class:
            opts.append(lambda: "w0.get0()")
        return self.rng.choice(opts)()

    def cond(self, lhs: str | None = None) -> str:
        op = self.rng.choice(["<", ">", "<=", ">=", "==", "!="])
        left = lhs if lhs is not None else self.cond_atom()
        return f"{left} {op} {self.cond_atom()}"

    # ----------------------------------------------------------- generation

    def generate(self) -> str:
        rng, p = self.rng, self.prog
        n_free = rng.randint(3, 5)
        for k in range(n_free):
            self.free.append(f"v{k}")
            p.decls.append(f"int v{k} = {rng.randint(0, 9)};")
        n_owned = min(2, n_free - 2)
        self.owned = self.free[n_free - n_owned:]

        if rng.random() < self.cfg.array_prob:
            for a in range(rng.randint(1, 2)):
                size = rng.randint(3, 8)
                p.decls.append(f"int arr{a}[{size}];")
                p.decls.append(f"int idx{a} = {rng.randint(0, size - 1)};")
                self.families.append(_Family(
                    "arr", f"arr{a}[idx{a}]", f"arr{a}", size=size,
                    idx=f"idx{a}", rank=n_free + a))

        ptr_pool = self.free[:n_free - n_owned]
        if rng.random() < self.cfg.pointer_prob and len(ptr_pool) >= 2:
            targets = list(ptr_pool)
            rng.shuffle(targets)
            n_ptr = rng.randint(1, 2)
            per = max(2, len(targets) // n_ptr)
            for k in range(n_ptr):
                tset = targets[k * per:(k + 1) * per]
                if len(tset) < 2:
                    break
                p.decls.append(f"int *pt{k} = &{tset[0]};")
                self.families.append(_Family(
                    "ptr", f"*pt{k}", f"pt{k}", targets=tset,
                    rank=min(self.free.index(t) for t in tset)))

        if rng.random() < self.cfg.class_prob:
            self.emit_class()

        self.assign_roles()
        self.emit_constraints()
        self.emit_monitors()
        self.emit_preconds()
        self.emit_helper()
        for _ in range(rng.randint(6, self.cfg.max_writes)):
            p.main.append(self.write_stmt())
        return p.text()

    def assign_roles(self):
        rng = self.rng
        fams = list(self.families)
        rng.shuffle(fams)
        roles = (["constraint"] * rng.randint(0, 2)
                 + ["monitor"] * rng.randint(0, 1)
                 + ["precond"] * rng.randint(0, 1))
        for f, role in zip(fams, roles):
            f.role = role

    def emit_class(self):
        k = self.rng.randint(1, 4)
        self.prog.decls.extend([
            "class W {",
            "private:",
            "    int m0;",
            "    int m1;",
            "public:",
            "    void set0(int x) { m0 = x; }",
            "    int get0() { return m0; }",
            "    int get1() { return m1; }",
            f"    m1 := m0 + {k};",
            "};",
            "W w0;",
        ])
        self.has_class = True

    def emit_constraints(self):
        rng, p = self.rng, self.prog
        candidates: list[tuple[str, int]] = []
        for name in self.owned:
            candidates.append((name, self.free.index(name)))
        for f in self.fams(role="constraint"):
            candidates.append((f.lv, f.rank))
        if self.has_class:
            candidates.append(("shadow", len(self.free) + len(self.families)))
        rng.shuffle(candidates)
        self.con_lhs: list[str] = []
        for lhs, rank in candidates[:rng.randint(1, self.cfg.max_constraints)]:
            self.con_lhs.append(lhs)
            if lhs == "shadow":
                p.decls.append("int shadow;")
                p.constructs.append(
                    f"shadow := w0.get0() + {rng.randint(0, 5)};")
                continue
            line = f"{lhs} := {self.rhs_expr(rank)}"
            if rng.random() < 0.3:
                line += f" given {self.cond()}"
            p.constructs.append(line + ";")
        for f in self.fams(role="constraint"):
            if f.lv not in self.con_lhs:
                f.role = "free"   # unchosen candidates stay generally usable

    def emit_monitors(self):
        rng, p = self.rng, self.prog
        in_tset = {t for f in self.fams("ptr") for t in f.targets}
        pool = [lhs for lhs in self.con_lhs
                if lhs in self.free]                       # plain owned vars
        pool += [v for v in self.free if v not in in_tset and v not in pool]
        pool += [f.lv for f in self.fams(role="monitor")]
        rng.shuffle(pool)
        for lhs in pool[:rng.randint(0, self.cfg.max_monitors)]:
            sink = self.new_sink()
            p.constructs.append(f"{lhs} ::= {{ {sink} = {sink} + 1; }}")

    def emit_preconds(self):
        rng, p = self.rng, self.prog
        special = self.fams(role="precond")
        for k in range(rng.randint(0, self.cfg.max_preconds)):
            sink = self.new_sink()
            lhs = None
            if special and k == 0:
                lhs = special[0].lv
            p.constructs.append(
                f"{self.cond(lhs)} ?? {{ {sink} = {sink} + 1; }}")

    def emit_helper(self):
        rng, p = self.rng, self.prog
        if rng.random() < 0.5 or not self.free:
            return
        t = rng.choice(self.free)
        p.helpers.extend([
            "void helper() {",
            f"    int tmp = {self.rhs_expr(-1, 1)};",
            f"    {t} = tmp + {self.lit()};",
            "}",
        ])
        self.has_helper = True

    def write_stmt(self) -> str:
        rng = self.rng
        choices = [lambda: f"{rng.choice(self.free)} = {self.rhs_expr(-1)};"]
        for f in self.fams("arr"):
            choices.append(lambda f=f:
                           f"{f.name}[{rng.randint(0, f.size - 1)}] = "
                           f"{self.rhs_expr(-1, 1)};")
            choices.append(lambda f=f: f"{f.idx} = {rng.randint(0, f.size - 1)};")
        for f in self.fams("ptr"):
            choices.append(lambda f=f: f"{f.name} = &{rng.choice(f.targets)};")
        if self.has_class:
            choices.append(lambda: f"w0.set0({rng.randint(-9, 9)});")
        if self.has_helper:
            choices.append(lambda: "helper();")
        return rng.choice(choices)()


def generate(seed: int, config: GenConfig | None = None) -> str:
    """Deterministic random program for one seed."""
    return Generator(seed, config).generate()
