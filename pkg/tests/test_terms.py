import random

import pytest
from hypothesis import given, settings, strategies as st

from ccspg.canon import interfaced_succ
from ccspg.ccs import Par, parse_ccs
from ccspg.diagrams import position
from ccspg.generators import all_processes, random_process
from ccspg.plays import Basic
from ccspg.terms import (ZERO, ForkPair, Guard, GuardedSum, Interfaced, TermError, TermState,
                         check_term, flatten_state, initial_state, parse_term_text, size,
                         term_local_step, term_next, term_to_text, theta, theta_inverse)


def p(text):
    return parse_ccs(text)


def test_theta_nil():
    assert theta(p("channels 0; 0")) == ZERO


def test_theta_new_is_nu_guard():
    got = theta(p("channels 0; new.1?.0"))
    assert got == GuardedSum(((Guard("nu"), GuardedSum(((Guard("in", 1), ZERO),))),))


def test_theta_par_is_fork_pair():
    got = theta(p("channels 1; (1?.0 | tick.0)"))
    assert got == ForkPair(GuardedSum(((Guard("in", 1), ZERO),)),
                           GuardedSum(((Guard("tick"), ZERO),)))


def test_theta_injective_on_small_terms():
    procs = list(all_processes(4, 2))
    images = {(q.gamma, theta(q)) for q in procs}
    assert len(images) == len(procs)
    for q in procs:
        assert theta_inverse(theta(q)) == q.body


def test_local_step_fork():
    t1, t2 = GuardedSum(((Guard("in", 1), ZERO),)), ZERO
    assert term_local_step(ForkPair(t1, t2), 1, "fork") == [(t1, t2)]


def test_local_step_one_successor_per_matching_guard():
    t1 = GuardedSum(((Guard("tick"), ZERO),))
    t = GuardedSum(((Guard("in", 1), t1), (Guard("in", 1), ZERO)))
    assert term_local_step(t, 1, Basic("in", 1)) == [(t1,), (ZERO,)]


def test_local_step_no_matching_guard():
    t = GuardedSum(((Guard("tick"), ZERO),))
    assert term_local_step(t, 1, Basic("in", 1)) == []


def test_local_step_rejects_bad_channel():
    with pytest.raises(TermError):
        term_local_step(ZERO, 1, Basic("in", 2))


def _non_id(s):
    return [(d, t) for d, t in term_next(s) if d.kind != "id"]


def test_fork_transition_gives_two_players():
    s = initial_state(p("channels 1; (1?.0 | 1!.0)"))
    steps = _non_id(s)
    assert [d.kind for d, _ in steps] == ["fork"]
    t = steps[0][1]
    assert len(t.position.players) == 2
    assert sorted(map(str, t.terms)) == ["1!.0", "1?.0"]


def test_new_then_input_on_created_channel():
    s = initial_state(p("channels 0; new.1?.0"))
    (d, t), = _non_id(s)
    assert d.kind == "nu" and t.position.players == ((0,),) and t.position.channels == 1
    (d2, u), = _non_id(t)
    assert d2.kind == "in" and d2.channel() == 0 and u.terms == (ZERO,)


def test_tau_between_players_sharing_a_channel():
    s = TermState(position(1, [(0,), (0,)]),
                  (GuardedSum(((Guard("out", 1), ZERO),)), GuardedSum(((Guard("in", 1), ZERO),))))
    kinds = sorted(d.kind for d, _ in _non_id(s))
    assert kinds == ["in", "out", "tau"]
    (d, t), = [(d, t) for d, t in _non_id(s) if d.kind == "tau"]
    assert d.players == (0, 1) and t.terms == (ZERO, ZERO)


def test_text_round_trip():
    for q in all_processes(4, 2):
        n, t = parse_term_text(term_to_text(q.gamma, theta(q)))
        assert (n, t) == (q.gamma, theta(q))


def test_flatten_single_player_identity():
    rng = random.Random(3)
    for _ in range(200):
        q = random_process(rng, 6, 2)
        assert flatten_state(Interfaced(tuple(range(q.gamma)), initial_state(q))) == q


def test_flatten_private_shared_channel():
    s = TermState(position(1, [(0,), (0,)]),
                  (GuardedSum(((Guard("out", 1), ZERO),)), GuardedSum(((Guard("in", 1), ZERO),))))
    assert flatten_state(Interfaced((), s)) == p("channels 0; new.(1!.0 | 1?.0)")


def _components(t):
    if isinstance(t, Par):
        return _components(t.left) + _components(t.right)
    return [t]


def test_flatten_after_fork_is_parallel_composition():
    q = p("channels 2; (1?.2!.0 | (tick.0 + 2?.0))")
    s = initial_state(q)
    (_, t), = _non_id(s)
    got = flatten_state(Interfaced((0, 1), t))
    assert got.gamma == 2
    assert sorted(map(str, _components(got.body))) == sorted(map(str, _components(q.body)))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_transitions_preserve_typing_and_shrink(seed):
    q = random_process(random.Random(seed), 7, 2)
    frontier = [initial_state(q)]
    for _ in range(3):
        nxt = []
        for s in frontier:
            total = sum(size(t) for t in s.terms)
            for d, t in term_next(s):
                assert len(t.terms) == len(t.position.players)
                for slots, term in zip(t.position.players, t.terms):
                    check_term(term, len(slots))
                if d.kind != "id":
                    assert sum(size(u) for u in t.terms) < total
                    nxt.append(t)
        frontier = nxt[:20]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2))
def test_interfaced_labels_only_on_interface(seed, keep):
    q = random_process(random.Random(seed), 6, 2)
    h = tuple(range(min(keep, q.gamma)))
    s = Interfaced(h, initial_state(q))
    for d, t in term_next(initial_state(q)):
        if d.kind == "fork":
            s = Interfaced(h, t)
    labels = [a for a, _ in interfaced_succ(term_next)(s)]
    expected = [d for d, _ in term_next(s.state)
                if d.kind not in ("in", "out") or d.channel() in h]
    assert len(labels) == len(expected)
    for a in labels:
        if a.kind in ("in", "out"):
            assert 1 <= a.chan <= len(h)
