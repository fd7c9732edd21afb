"""Syntax tree for HybridC: expressions, statements, declarations, constructs.

L-value expression forms (Name, Deref, Index, Dot, Arrow, DotStar, ArrowStar)
correspond one-to-one with the l-value grammar productions used to build
redefinition graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import NOPOS, Pos


# ---------------------------------------------------------------- expressions

@dataclass
class Expr:
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)
    ty: object = field(default=None, kw_only=True, compare=False, repr=False)


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class NullLit(Expr):
    pass


@dataclass
class Name(Expr):
    name: str
    # filled in by the checker: ("global", name) | ("local", name)
    # | ("member", class_name, name) | ("func", name) | ("method", class_name, name)
    binding: object = field(default=None, compare=False, repr=False)


@dataclass
class Deref(Expr):
    operand: Expr


@dataclass
class AddrOf(Expr):
    operand: Expr


@dataclass
class Unary(Expr):
    op: str  # "-" | "!"
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Call(Expr):
    callee: Expr
    args: list[Expr]


@dataclass
class Index(Expr):
    base: Expr
    index: Expr


@dataclass
class Dot(Expr):
    obj: Expr
    member: str


@dataclass
class Arrow(Expr):
    obj: Expr
    member: str


@dataclass
class DotStar(Expr):
    obj: Expr
    ptr: Expr


@dataclass
class ArrowStar(Expr):
    obj: Expr
    ptr: Expr


LVALUE_FORMS = (Name, Deref, Index, Dot, Arrow, DotStar, ArrowStar)


def is_lvalue_form(e: Expr) -> bool:
    return isinstance(e, LVALUE_FORMS)


# ----------------------------------------------------------------- statements

@dataclass
class Stmt:
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)


@dataclass
class Block(Stmt):
    stmts: list[Stmt]


@dataclass
class VarDecl(Stmt):
    base_type: str     # "int" | "bool" | class name
    ptr_depth: int
    name: str
    array_size: Optional[int]
    init: Optional[Expr]


@dataclass
class Assign(Stmt):
    target: Expr
    value: Expr


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    orelse: Optional[Stmt]


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass
class Return(Stmt):
    value: Optional[Expr]


# ----------------------------------------------------------------- constructs

@dataclass
class Construct:
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)
    scope: Optional[str] = field(default=None, kw_only=True)  # None = file scope, else class name
    ordinal: int = field(default=-1, kw_only=True)            # declaration order within the unit


@dataclass
class Constraint(Construct):
    lhs: Expr
    rhs: Expr
    guard: Optional[Expr] = None


@dataclass
class Monitor(Construct):
    lhs: Expr
    body: Block


@dataclass
class Precond(Construct):
    cond: Expr
    body: Block


# --------------------------------------------------------------- declarations

@dataclass
class Param:
    base_type: str
    ptr_depth: int
    name: str


@dataclass
class FuncDecl:
    ret_type: str
    ret_ptr_depth: int
    name: str
    params: list[Param]
    body: Block
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)
    cls: Optional[str] = field(default=None, kw_only=True)  # owning class for methods


@dataclass
class ClassDecl:
    name: str
    members: list[VarDecl]
    methods: list[FuncDecl]
    constructs: list[Construct]
    pos: Pos = field(default=NOPOS, kw_only=True, compare=False)


@dataclass
class Unit:
    """A parsed translation unit; decls holds file-scope items in source order."""

    decls: list  # VarDecl | FuncDecl | ClassDecl
    constructs: list[Construct]  # all constructs (file scope and class scope), source order

    @property
    def globals(self) -> list[VarDecl]:
        return [d for d in self.decls if isinstance(d, VarDecl)]

    @property
    def functions(self) -> list[FuncDecl]:
        return [d for d in self.decls if isinstance(d, FuncDecl)]

    @property
    def classes(self) -> list[ClassDecl]:
        return [d for d in self.decls if isinstance(d, ClassDecl)]
