import random

import pytest
from hypothesis import given, settings, strategies as st

from ccspg.canon import canonical_state
from ccspg.ccs import Process, parse_ccs
from ccspg.diagrams import position
from ccspg.generators import all_processes, random_process
from ccspg.plays import FL, FR, NU, TK, Basic, basic_classes
from ccspg.strategies import (EMPTY, Definite, Oplus, StratState, StrategyError, amalgamate,
                              fold, is_bot_strat, parse_strategy, residual, semantic_passes,
                              strat_next, strategy_to_text, translate, translate_state,
                              translation_mismatches, unfold)
from ccspg.terms import Interfaced, initial_state, theta


def tr(text):
    q = parse_ccs(text)
    return translate(theta(q), q.gamma)


def state(text):
    return translate_state(initial_state(parse_ccs(text)))


def iface(text):
    q = parse_ccs(text)
    return Interfaced(tuple(range(q.gamma)), state(text))


def test_translate_sum_groups_by_class():
    d = tr("channels 2; 1?.tick.0 + 1?.0 + 2!.0")
    assert d.get(Basic("in", 1)) == Oplus((tr("channels 2; tick.0"), tr("channels 2; 0")))
    assert d.get(Basic("out", 2)) == Oplus((tr("channels 2; 0"),))
    for b in basic_classes(2):
        if b not in (Basic("in", 1), Basic("out", 2)):
            assert d.get(b) == EMPTY


def test_translate_nil_is_empty_everywhere():
    d = tr("channels 2; 0")
    assert all(d.get(b) == EMPTY for b in basic_classes(2))


def test_translate_par():
    d = tr("channels 1; (1?.0 | tick.0)")
    assert d.get(FL) == Oplus((tr("channels 1; 1?.0"),))
    assert d.get(FR) == Oplus((tr("channels 1; tick.0"),))
    assert d.get(TK) == EMPTY and d.get(NU) == EMPTY


def test_translate_new_raises_arity():
    d = tr("channels 0; new.1!.0")
    (child,) = d.get(NU).components
    assert child.arity == 1 and child.get(Basic("out", 1)).components


def test_residual_examples():
    s = Oplus((tr("channels 1; 1?.tick.0 + 1?.0"),))
    assert residual(s, Basic("in", 1)) == Oplus((tr("channels 1; tick.0"), tr("channels 1; 0")))
    assert residual(EMPTY, TK) == EMPTY
    par = Oplus((tr("channels 1; (1?.0 | 0)"),))
    assert residual(par, FL) == Oplus((tr("channels 1; 1?.0"),))


def test_unfold_examples():
    assert unfold(EMPTY) == (0, {})
    d1, d2 = tr("channels 1; tick.0"), tr("channels 1; 1!.0")
    m, table = unfold(Oplus((d1, d2)))
    assert m == 2 and table[(0, TK)] == d1.get(TK) and table[(1, Basic("out", 1))] == d2.get(
        Basic("out", 1))


def test_fold_unfold_inverse_on_random_sums():
    rng = random.Random(9)
    for _ in range(500):
        gamma = rng.randint(0, 2)
        comps = []
        for _ in range(rng.randint(0, 3)):
            q = random_process(rng, 6, 0)
            comps.append(translate(theta(Process(gamma, q.body)), gamma))
        s = Oplus(comps)
        m, table = unfold(s)
        assert fold(gamma, m, table) == s
        assert unfold(fold(gamma, m, table)) == (m, table)


def test_text_round_trip():
    for q in all_processes(4, 2):
        d = Oplus((translate(theta(q), q.gamma),))
        assert parse_strategy(strategy_to_text(q.gamma, d)) == (q.gamma, d)


@pytest.mark.parametrize("text", ["arity 1; <in(2): 0>", "arity 1; <tk: 0, tk: 0>", "<tk: 0>",
                                  "arity 0; <zz: 0>"])
def test_parse_errors(text):
    with pytest.raises(StrategyError):
        parse_strategy(text)


def _non_id(s):
    return [(d, t) for d, t in strat_next(s) if d.kind != "id"]


def test_input_step():
    steps = _non_id(state("channels 1; 1?.0"))
    assert [(d.kind, t.strats) for d, t in steps] == [("in", (tr("channels 1; 0"),))]


def test_empty_branch_gives_no_transition():
    s = state("channels 1; tick.0")
    assert all(d.kind != "in" for d, _ in _non_id(s))


def test_fork_step():
    steps = _non_id(state("channels 1; (1?.0 | 1!.0)"))
    assert len(steps) == 1
    d, t = steps[0]
    assert d.kind == "fork"
    assert sorted(map(str, t.strats)) == sorted(map(str, (tr("channels 1; 1?.0"),
                                                          tr("channels 1; 1!.0"))))


def test_amalgamate_with_empty_state():
    a = iface("channels 2; 1?.2!.0")
    empty = Interfaced((0, 1), StratState(position(2, []), ()))
    got = amalgamate(a, empty)
    assert got == a.state


def test_amalgamate_shares_interface_channels():
    a, b = iface("channels 2; 1?.0"), iface("channels 2; 2!.0")
    got = amalgamate(a, b)
    assert got.position.channels == 2 and got.position.players == ((0, 1), (0, 1))


def test_amalgamate_interface_mismatch():
    with pytest.raises(StrategyError):
        amalgamate(iface("channels 1; 0"), iface("channels 2; 0"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_amalgamate_counts_and_swap(seed):
    rng = random.Random(seed)
    gamma = rng.randint(0, 2)
    qs = [Process(gamma, random_process(rng, 5, 0).body) for _ in range(2)]
    a, b = (Interfaced(tuple(range(gamma)), translate_state(initial_state(q))) for q in qs)
    ab, ba = amalgamate(a, b), amalgamate(b, a)
    assert len(ab.strats) == 2
    assert canonical_state(ab, range(gamma)) == canonical_state(ba, range(gamma))


@pytest.mark.parametrize("text,expected", [
    ("channels 1; tick.0", True),
    ("channels 1; 0", False),
    ("channels 1; (1?.tick.0 | 1!.0)", True),
    ("channels 1; 1?.tick.0", False),
])
def test_is_bot_strat(text, expected):
    assert is_bot_strat(state(text)) is expected


def test_is_bot_strat_after_fork():
    (_, t), = _non_id(state("channels 1; (1?.tick.0 | 1!.0)"))
    assert is_bot_strat(t)


def test_is_bot_invariant_under_player_permutation():
    s = StratState(position(1, [(0,), (0,)]), (tr("channels 1; 1?.tick.0"), tr("channels 1; 1!.0")))
    swapped = StratState(s.position, s.strats[::-1])
    assert is_bot_strat(s) and is_bot_strat(swapped)


def test_semantic_passes_examples():
    empty = Interfaced((), StratState(position(0, []), ()))
    assert semantic_passes(iface("channels 0; tick.0"), empty)
    test = iface("channels 3; 1!.2!.tick.0")
    assert semantic_passes(iface("channels 3; 1?.(2?.0 + 3?.0)"), test)
    assert not semantic_passes(iface("channels 3; 1?.2?.0 + 1?.3?.0"), test)


def test_definite_omits_empty_branches():
    assert Definite(1, {TK: EMPTY}) == Definite(1, {})


def test_translation_is_a_bisimulation_on_small_terms():
    for q in all_processes(4, 2):
        assert translation_mismatches(initial_state(q)) == []
