"""Acceptance gate: seven criteria, one test and one printed verdict line
each.  Lines are printed with output capture suspended so they appear even
under plain `pytest -v`."""

import sys
import time

import pytest

_CAPTURE = None


@pytest.fixture(autouse=True)
def _capture_manager(request):
    global _CAPTURE
    _CAPTURE = request.config.pluginmanager.getplugin("capturemanager")


def _emit(line: str):
    if _CAPTURE is not None:
        with _CAPTURE.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)

from conftest import GOLDEN, events_of, is_subsequence, machine, program, run
from declc import trace as tr
from declc.checker import check_or_raise
from declc.codegen import RegDependency, lower
from declc.lvgraph import build_graph, check_acyclic, proper_sublist
from declc.oracle import Oracle, diff_memory, diff_traces
from declc.parser import parse_source
from declc.randgen import generate
from declc.render import render
from declc.vm import load_source


def verdict(num: int, title: str, body, budget: float):
    start = time.monotonic()
    try:
        body()
    except BaseException:
        _emit(f"criterion {num}: FAIL — {title}")
        raise
    elapsed = time.monotonic() - start
    ok = elapsed < budget
    _emit(f"criterion {num}: {'PASS' if ok else 'FAIL'} — {title} "
          f"({elapsed:.2f}s, budget {budget:.0f}s)")
    assert ok, f"criterion {num} exceeded its time budget: {elapsed:.2f}s"


def graph_of(source: str):
    unit = parse_source(source)
    check_or_raise(unit)
    return build_graph(unit)


def edge_strs(g):
    return {(a.str, b.str) for a, b in g.edges()}


# --------------------------------------------------------------- criterion 1

def test_criterion_1_redefinition_graph_reproduction():
    def body():
        # (a) indexed l-value with a call argument: the identifiers feeding
        # the inner index expression get no direct edge to the outer l-value
        g = graph_of("""
int q[9]; int p[9]; int x; int y; int s;
int f(int a) { return a; }
q[f(p[x+y])] ::= { s = 1; }
""")
        outer = "q[f(p[x+y])]"
        assert edge_strs(g) == {
            ("p", "p[x+y]"), ("x", "p[x+y]"), ("y", "p[x+y]"),
            ("q", outer), ("f", outer), ("p[x+y]", outer)}
        for src in ("x", "y", "p"):
            assert (src, outer) not in edge_strs(g)

        # (b) repeated identifier: neither occurrence of x connects directly
        # to the whole l-value, both are dominated by longer constituents
        g = graph_of("""
int p[9]; int x; int s; int arr[4];
int *g(int a) { return &arr[0]; }
int f(int a) { return a; }
*(g(p[x])+f(x)) ::= { s = 1; }
""")
        outer = next(n.str for n in g.nodes.values() if n.str.startswith("*g"))
        assert edge_strs(g) == {
            ("p", "p[x]"), ("x", "p[x]"),
            ("g", outer), ("p[x]", outer), ("f", outer)}

        # (c) double indexing through a double pointer: exactly four edges
        g = graph_of("int **p; int i; int j; int s;\np[i][j] ::= { s = 1; }")
        assert edge_strs(g) == {
            ("p", "p[i]"), ("i", "p[i]"),
            ("p[i]", "p[i][j]"), ("j", "p[i][j]")}

    verdict(1, "redefinition graph edge sets reproduced exactly", body, 1.0)


# --------------------------------------------------------------- criterion 2

def test_criterion_2_codegen_reproduction():
    def body():
        source = program("deep_deref.hc")
        unit = parse_source(source)
        check_or_raise(unit)
        gen = lower(unit, build_graph(unit))

        # one init per l-value (five), one redef per redefining l-value
        # (three), the assignment action, and the unit init
        assert sorted(gen.functions) == [
            "assign_0", "init_0",
            "init_p_arr_i", "init_ptr_ptr_x", "init_ptr_x",
            "init_sim_i", "init_sim_x",
            "redef_ptr_x", "redef_sim_i", "redef_sim_x"]

        # structural match against the golden rendering
        expected = (GOLDEN / "deep_deref_lowered.txt").read_text()
        assert render(gen) == expected

        # the dependency registration lives in the constraining l-value's
        # own init, so rebinding i re-executes it: observable as a
        # cancel/install pair on the dependency when i changes
        assert any(isinstance(i, RegDependency)
                   for i in gen.functions["init_p_arr_i"].instrs)
        m = run(source)
        dep = [e for e in m.trace.events
               if e.detail == "dependency:construct:0"]
        assert [(e.kind, e.cell) for e in dep][:3] == [
            ("Install", "p[0]"), ("Cancel", "p[0]"), ("Install", "p[2]")]

    verdict(2, "generated function families and rebinding of the "
               "dependency registration reproduced", body, 1.0)


# --------------------------------------------------------------- criterion 3

SCENARIO = """
int p[5];
int i;
int a = 1;
int b = 2;
int *x = &a;
p[i] := *x;
void main() {{
{writes}
}}
"""


def scenario_links(writes: str):
    m = machine(SCENARIO.format(writes=writes))
    m.call_function("main", [])
    return m.dependency_links()


def test_criterion_3_constraint_rebinding_scenarios():
    def body():
        # scenario 1: the initial topology
        assert scenario_links("") == [("a", "p[0]")]
        # scenario 2: x modified -> the constraining side moves
        assert scenario_links("    x = &b;") == [("b", "p[0]")]
        # scenario 3: i modified -> the constrained side moves
        assert scenario_links("    i = 1;") == [("a", "p[1]")]
        # scenario 4: both modified -> the final topology involves none of
        # the originally involved storage locations
        final = scenario_links("    i = 1;\n    x = &b;")
        assert final == [("b", "p[1]")]
        for cell in final[0]:
            assert cell not in ("a", "p[0]")

    verdict(3, "all four rebinding scenarios produce the expected "
               "constraint topologies", body, 1.0)


# --------------------------------------------------------------- criterion 4

def test_criterion_4_rebinding_call_graph_trace():
    def body():
        src = """
int **x;
int *y;
int *y2;
int target;
int t2;
int p[8];
int i;
**x := p[i];
void main() {
    y = &target;
    y2 = &t2;
    x = &y;
    x = &y2;
}
"""
        m = machine(src)
        m.call_function("main", [])
        events = m.trace.events
        # locate the last write to x and take its reaction window
        start = max(i for i, e in enumerate(events)
                    if e.kind == tr.BEFORE_CHANGE and e.cell == "x")
        # cancel the involvement of *x and **x, commit the write, reinstall
        # on the rebound l-values, then re-apply the constraint — as an
        # ordered subsequence of the reaction window
        kinds = [(e.kind, e.lvalue) for e in events[start:]]
        assert is_subsequence([
            (tr.BEFORE_CHANGE, ""),
            (tr.CANCEL, "*x"),
            (tr.CANCEL, "**x"),
            (tr.AFTER_CHANGE, ""),
            (tr.INSTALL, "*x"),
            (tr.INSTALL, "**x"),
            (tr.CONSTRAINT_APPLIED, "**x"),
        ], kinds)
        cancels = [e for e in events[start:] if e.kind == tr.CANCEL]
        installs = [e for e in events[start:] if e.kind == tr.INSTALL]
        assert [e.cell for e in cancels] == ["y", "target"]
        assert [e.cell for e in installs] == ["y2", "t2"]

    verdict(4, "writing the redefining pointer cancels, rebinds, "
               "reinstalls, and re-applies in order", body, 1.0)


# --------------------------------------------------------------- criterion 5

N_SEEDS = 1000


def test_criterion_5_differential_equivalence():
    def body():
        failures = []
        for seed in range(N_SEEDS):
            source = generate(seed)
            m = load_source(source, tr.TraceSink())
            m.call_function("main", [])
            unit = parse_source(source)
            o = Oracle(unit, check_or_raise(unit))
            o.load()
            o.run()
            if not (diff_traces(m.trace.events, o.trace.events).ok
                    and diff_memory(m.memory_snapshot(),
                                    o.memory_snapshot()).ok):
                failures.append(seed)
        assert failures == [], f"diverging seeds: {failures}"

    verdict(5, f"{N_SEEDS} randomized programs agree with the reference "
               "interpreter on traces and final memory", body, 300.0)


# --------------------------------------------------------------- criterion 6

def test_criterion_6_invariant_suites():
    def body():
        # acyclicity and merge closure over the randomized corpus
        for seed in range(200):
            g = graph_of(generate(seed))
            assert check_acyclic(g) is None
            for n in g.nodes.values():
                for r in n.redef:
                    assert proper_sublist(r.tokens, n.tokens)
                    for other in n.redef:
                        if other is not r:
                            assert not proper_sublist(r.tokens, other.tokens)

        # install/cancel conservation: zero registrations after teardown
        for seed in range(100):
            m = load_source(generate(seed), tr.TraceSink())
            m.call_function("main", [])
            m.teardown()
            assert m.registration_count() == 0

        # monitor non-reentrancy: a monitor writing its own subject fires
        # once per external write and terminates
        m = run("int x; int n;\nx ::= { n = n + 1; x = x + 1; }\n"
                "void main() { x = 5; }")
        assert len(events_of(m, tr.MONITOR_FIRED)) == 1
        assert m.memory_snapshot()["n"] == "1"

        # suspend/resume: one deferred notification per method call, however
        # many member writes the method performs
        m = run("""
class Acc {
private:
    int a;
    int b;
public:
    void put(int v) { a = a + v; b = b * 2 + v; }
    int get() { return a; }
};
Acc acc;
int seen;
seen := acc.get();
void main() {
    acc.put(3);
    acc.put(4);
}
""")
        updates = [e for e in m.trace.events
                   if e.kind == tr.AFTER_CHANGE
                   and e.detail == "object-update"]
        assert len(updates) == 2
        assert m.memory_snapshot()["seen"] == "7"

        # syntactic triggering: a constraint on f() does not react to
        # writes of a global hidden inside f
        m = run("int hidden; int x;\nint f() { return hidden + 1; }\n"
                "x := f();\nvoid main() { hidden = 41; }")
        assert len(events_of(m, tr.CONSTRAINT_APPLIED)) == 1
        assert m.memory_snapshot()["x"] == "1"

    verdict(6, "acyclicity, merge closure, registration conservation, "
               "monitor non-reentrancy, single object notification, and "
               "syntactic triggering all hold", body, 30.0)


# --------------------------------------------------------------- criterion 7

def test_criterion_7_guarded_constraints():
    def body():
        # a false guard never applies
        m = run("int x; int y; bool en;\nx := y + 1 given en;\n"
                "void main() { y = 5; y = 9; }")
        assert events_of(m, tr.CONSTRAINT_APPLIED) == []
        assert m.memory_snapshot()["x"] == "0"

        # flipping the guard's variables alone never triggers application
        m = run("int x; int y = 5; bool en;\nx := y given en;\n"
                "void main() { en = true; en = false; en = true; }")
        assert events_of(m, tr.CONSTRAINT_APPLIED) == []
        assert m.memory_snapshot()["x"] == "0"

        # the guard gates the next genuine trigger
        m = run("int x; int y; bool en;\nx := y given en;\n"
                "void main() { en = true; y = 3; }")
        applied = events_of(m, tr.CONSTRAINT_APPLIED)
        assert len(applied) == 1
        assert m.memory_snapshot()["x"] == "3"

    verdict(7, "given-guards gate application and never trigger it", body,
            1.0)
