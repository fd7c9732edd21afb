import random

import pytest

from declc import trace as tr
from declc.contract import Wave, c_div, c_mod, top_entry
from declc.errors import RuntimeFault
from declc.runtime import (Cell, ConstraintEntry, DependencyGraph, Engine,
                           Entry, ObjectHeader)


def engine():
    return Engine(tr.TraceSink())


def entry(fn, owner=None):
    return Entry(fn, owner, invoke=lambda *a: None)


# ------------------------------------------------------------ c arithmetic

@pytest.mark.parametrize("a,b", [(7, 2), (-7, 2), (7, -2), (-7, -2),
                                 (9, 3), (0, 5), (1, -1)])
def test_division_truncates_toward_zero(a, b):
    q, r = c_div(a, b), c_mod(a, b)
    assert q == int(a / b)
    assert q * b + r == a


def test_division_by_zero_faults():
    with pytest.raises(RuntimeFault):
        c_div(1, 0)
    with pytest.raises(RuntimeFault):
        c_mod(1, 0)


# ---------------------------------------------------------- stacking rules

def test_top_entry_is_last_registered():
    e, c = engine(), Cell("x")
    a, b = entry("f1"), entry("f2")
    e.handle_monitor(c, a, True)
    e.handle_monitor(c, b, True)
    assert top_entry(c.monitors) is b
    e.handle_monitor(c, b, False)
    assert top_entry(c.monitors) is a


def test_cancel_removes_topmost_matching():
    """Cancelling by (function, owner) identity removes the most recent
    matching registration, so nested install/cancel pairs balance."""
    e, c = engine(), Cell("x")
    first, again = entry("f"), entry("f")
    e.handle_monitor(c, first, True)
    e.handle_monitor(c, again, True)
    e.handle_monitor(c, entry("f"), False)
    assert c.monitors == [first]


def test_cancel_of_unregistered_entry_faults():
    e, c = engine(), Cell("x")
    with pytest.raises(RuntimeFault):
        e.handle_monitor(c, entry("ghost"), False)


def test_owner_distinguishes_registrations():
    e, c = engine(), Cell("x")
    o1, o2 = object(), object()
    e.handle_monitor(c, entry("f", o1), True)
    e.handle_monitor(c, entry("f", o2), True)
    e.handle_monitor(c, entry("f", o1), False)
    assert [m.owner for m in c.monitors] == [o2]


def test_stack_against_list_model():
    """Random install/cancel sequences across the four registration lists
    behave like a plain list with remove-topmost-matching semantics."""
    rng = random.Random(42)
    e, c = engine(), Cell("x")
    handlers = [e.handle_monitor, e.handle_precondition,
                e.handle_redefinition, e.handle_constraint]
    lists = [c.monitors, c.preconditions, c.redefinitions, c.constraints]
    models = [[], [], [], []]
    for _ in range(500):
        which = rng.randrange(4)
        fn = f"f{rng.randrange(4)}"
        make = (ConstraintEntry if which == 3 else Entry)
        en = make(fn, None, invoke=lambda *a: None)
        model = models[which]
        if rng.random() < 0.55:
            handlers[which](c, en, True)
            model.append(fn)
        else:
            should_fault = fn not in model
            if should_fault:
                with pytest.raises(RuntimeFault):
                    handlers[which](c, en, False)
            else:
                handlers[which](c, en, False)
                for i in range(len(model) - 1, -1, -1):
                    if model[i] == fn:
                        del model[i]
                        break
        assert [x.fn for x in lists[which]] == model


# ------------------------------------------------------------- dependencies

def test_dependency_graph_orders_by_instantiation():
    g = DependencyGraph()
    c1, c2 = Cell("a"), Cell("a2")
    e1 = ConstraintEntry("f1", None, seq=2)
    e2 = ConstraintEntry("f2", None, seq=1)
    g.add(c1, e1, 0)
    g.add(c1, e2, 0)
    g.add(c1, e2, 1)
    assert [e.entry.fn for _, e in g.outgoing(c1)] == ["f2", "f2", "f1"]
    assert g.outgoing(c2) == []


def test_dependency_double_add_and_missing_remove_fault():
    g = DependencyGraph()
    c = Cell("a")
    e = ConstraintEntry("f", None, seq=0)
    g.add(c, e, 0)
    with pytest.raises(RuntimeFault):
        g.add(c, e, 0)
    g.remove(c, e, 0)
    with pytest.raises(RuntimeFault):
        g.remove(c, e, 0)
    assert len(g) == 0


# -------------------------------------------------------------------- waves

def test_wave_marks_clear_at_outermost_exit():
    w = Wave()
    c = Cell("x")
    w.enter()
    w.enter()
    w.mark(c)
    assert w.skip(c)
    w.exit()
    assert w.skip(c)          # still inside the outer wave
    w.exit()
    w.enter()
    assert not w.skip(c)      # a new wave starts clean
    w.exit()


def test_resolution_applies_once_per_wave():
    """A cell assigned by resolution is skipped by later edges in the same
    wave, so constraint cycles degrade to a single application."""
    e = engine()
    src, dst = Cell("src", 0), Cell("dst", 0)
    fired = []
    en = ConstraintEntry("assign_0", None, seq=0,
                         target=lambda: dst,
                         apply=lambda: fired.append("hit"))
    dst.constraints.append(en)
    e.deps.add(src, en, 0)
    e.wave.enter()
    e.resolve(src)
    e.resolve(src)            # second trigger in the same wave
    e.wave.exit()
    assert fired == ["hit"]


def test_fire_respects_top_constraint():
    e = engine()
    dst = Cell("dst", 0)
    fired = []
    older = ConstraintEntry("assign_0", None, seq=0, target=lambda: dst,
                            apply=lambda: fired.append("old"))
    newer = ConstraintEntry("assign_1", None, seq=1, target=lambda: dst,
                            apply=lambda: fired.append("new"))
    dst.constraints += [older, newer]
    e.wave.enter()
    e.fire(older, via_resolution=True)
    e.fire(newer, via_resolution=True)
    e.wave.exit()
    assert fired == ["new"]


def test_fire_with_unresolvable_target_warns():
    e = engine()

    def target():
        raise RuntimeFault("null pointer dereference")

    en = ConstraintEntry("assign_0", None, seq=0, target=target)
    e.fire(en, via_resolution=False)
    assert [ev.kind for ev in e.trace.events] == [tr.WARNING]


def test_false_guard_blocks_application():
    e = engine()
    dst = Cell("dst", 0)
    fired = []
    en = ConstraintEntry("assign_0", None, seq=0, target=lambda: dst,
                         guard=lambda: False,
                         apply=lambda: fired.append("hit"))
    dst.constraints.append(en)
    e.fire(en, via_resolution=False)
    assert fired == []


# ----------------------------------------------------------- change protocol

def test_only_top_monitor_fires():
    e = engine()
    c = Cell("x", 0)
    fired = []
    c.monitors.append(Entry("m0", None, invoke=lambda: fired.append("m0")))
    c.monitors.append(Entry("m1", None, invoke=lambda: fired.append("m1")))
    e.actions_after_change(c)
    assert fired == ["m1"]


def test_monitor_not_reentrant():
    e = engine()
    c = Cell("x", 0)
    fired = []

    def body():
        fired.append("m")
        if len(fired) < 5:
            e.actions_after_change(c)   # a monitor body writing its own cell

    c.monitors.append(Entry("m", None, invoke=body))
    e.actions_after_change(c)
    assert fired == ["m"]


def test_preconditions_all_fire_in_order():
    e = engine()
    c = Cell("x", 0)
    fired = []
    c.preconditions.append(Entry("t0", None, invoke=lambda: fired.append(0)))
    c.preconditions.append(Entry("t1", None, invoke=lambda: fired.append(1)))
    e.actions_after_change(c)
    assert fired == [0, 1]


# ------------------------------------------------------------ object protocol

def test_suspend_resume_accumulates():
    """N suspends require N resumes before the deferred notification runs."""
    e = engine()
    h, c = ObjectHeader(), Cell("obj")
    notified = []
    c.monitors.append(Entry("m", None, invoke=lambda: notified.append(1)))
    e.suspend(h, c)
    e.suspend(h, c)
    e.set_updated(h, c)
    e.set_updated(h, c)       # repeated updates coalesce
    e.resume(h, c)
    assert notified == []
    e.resume(h, c)
    assert notified == [1]
    assert h.updated is False


def test_resume_without_update_is_silent():
    e = engine()
    h, c = ObjectHeader(), Cell("obj")
    notified = []
    c.monitors.append(Entry("m", None, invoke=lambda: notified.append(1)))
    e.suspend(h, c)
    e.resume(h, c)
    assert notified == []


def test_resume_unbalanced_faults():
    e = engine()
    h, c = ObjectHeader(), Cell("obj")
    with pytest.raises(RuntimeFault):
        e.resume(h, c)


def test_set_updated_emits_before_change_once():
    e = engine()
    h, c = ObjectHeader(), Cell("obj")
    e.suspend(h, c)
    e.set_updated(h, c)
    e.set_updated(h, c)
    befores = [ev for ev in e.trace.events if ev.kind == tr.BEFORE_CHANGE]
    assert len(befores) == 1 and befores[0].detail == "object-update"
