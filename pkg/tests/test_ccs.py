import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ccspg.ccs import (NIL, CcsError, New, Par, Prefix, Process, Sum, ccs_graph, ccs_next,
                       is_bot_ccs, parse_ccs, passes_ccs, print_ccs, term_size)
from ccspg.generators import random_process
from ccspg.lts import ID, TICK, ALabel


def p(text):
    return parse_ccs(text)


def test_parse_input_prefix():
    assert p("channels 1; 1?.0") == Process(1, Sum(((Prefix("in", 1), NIL),)))


def test_parse_parallel():
    got = p("channels 1; (1?.0 | 1!.tick.0)")
    tick_nil = Sum(((Prefix("tick"), NIL),))
    assert got == Process(1, Par(Sum(((Prefix("in", 1), NIL),)),
                                 Sum(((Prefix("out", 1), tick_nil),))))


def test_parse_new_binds_next_channel():
    assert p("channels 0; new. 1?.0") == Process(0, New(Sum(((Prefix("in", 1), NIL),))))


@pytest.mark.parametrize("text", [
    "channels 1; 2?.0",
    "channels 0; 1!.0",
    "channels 1; (1?.0 | ",
    "channels 1; 1?.0 extra",
    "channels x; 0",
])
def test_parse_errors(text):
    with pytest.raises(CcsError):
        p(text)


def test_parse_error_reports_position():
    with pytest.raises(CcsError) as e:
        p("channels 1;\n  1?.0 + 3!.0")
    msg = str(e.value)
    assert "line 2" in msg or "2:" in msg


def test_print_nil():
    assert print_ccs(Process(2, NIL)) == "channels 2; 0"


def test_print_one_new_per_binder():
    text = print_ccs(Process(0, New(New(Sum(((Prefix("out", 2), NIL),))))))
    assert text.count("new.") == 2


def test_round_trip_random_terms():
    rng = random.Random(7)
    for _ in range(500):
        q = random_process(rng, 8, 3)
        assert parse_ccs(print_ccs(q)) == q


def test_next_of_parallel_sync():
    q = p("channels 1; (1?.0 | 1!.0)")
    got = set(ccs_next(q))
    assert got == {
        (ID, q),
        (ALabel("in", 1), p("channels 1; (0 | 1!.0)")),
        (ALabel("out", 1), p("channels 1; (1?.0 | 0)")),
        (ID, p("channels 1; (0 | 0)")),
    }


def test_next_blocks_bound_channel():
    q = p("channels 1; new.2?.0")
    assert ccs_next(q) == [(ID, q)]


def test_next_of_tick():
    q = p("channels 1; tick.0")
    assert ccs_next(q) == [(ID, q), (TICK, Process(1, NIL))]


@pytest.mark.parametrize("text,expected", [
    ("channels 1; tick.0", True),
    ("channels 1; 0", False),
    ("channels 1; (1?.tick.0 | 1!.0)", True),
    ("channels 1; tick.0 + 1?.0", True),
    ("channels 0; new.(1!.0 | 1?.0 + tick.0)", False),
])
def test_is_bot(text, expected):
    assert is_bot_ccs(p(text)) is expected


def test_passes_examples():
    assert passes_ccs(p("channels 1; 1!.0"), p("channels 1; 1?.tick.0"))
    assert not passes_ccs(p("channels 1; 0"), p("channels 1; 0"))
    assert passes_ccs(p("channels 3; 1?.(2?.0 + 3?.0)"), p("channels 3; 1!.2!.tick.0"))
    assert not passes_ccs(p("channels 3; 1?.2?.0 + 1?.3?.0"), p("channels 3; 1!.2!.tick.0"))


def test_passes_rejects_gamma_mismatch():
    with pytest.raises(CcsError):
        passes_ccs(p("channels 1; 0"), p("channels 2; 0"))


def _brute_par(left, right, gamma):
    """Transitions of left|right from the two component transition lists."""
    ls = ccs_next(Process(gamma, left))[1:]
    rs = ccs_next(Process(gamma, right))[1:]
    out = {(a, Par(l.body, right)) for a, l in ls}
    out |= {(a, Par(left, r.body)) for a, r in rs}
    for (a, l), (b, r) in product(ls, rs):
        if a.kind in ("in", "out") and b == a.complement():
            out.add((ID, Par(l.body, r.body)))
    return out


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_step_invariants(seed):
    rng = random.Random(seed)
    q = random_process(rng, 7, 2)
    for a, r in ccs_next(q):
        assert r.gamma == q.gamma
        if a.kind in ("in", "out"):
            assert 1 <= a.chan <= q.gamma
        if r != q:
            assert term_size(r.body) < term_size(q.body)
    if isinstance(q.body, Par):
        got = {(a, r.body) for a, r in ccs_next(q)[1:]}
        assert got == _brute_par(q.body.left, q.body.right, q.gamma)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_bot_closed_under_silent_steps(seed):
    q = random_process(random.Random(seed), 7, 1)
    if not is_bot_ccs(q):
        return
    g = ccs_graph(q)
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for a, j in g.edges[i]:
            if a == ID and j not in seen:
                seen.add(j)
                stack.append(j)
    for i in seen:
        assert is_bot_ccs(g.states[i])
