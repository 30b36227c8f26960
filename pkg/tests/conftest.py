import random

import pytest

from ccspg.diagrams import position
from ccspg.generators import random_play
from ccspg.plays import apply_seed, compose_plays, embed_seed, fullfork, make_seed, tau_class


def fork_move_on_host():
    """A binary fork glued to a host with one spectator ``y`` on (b', c) and a loose a'."""
    host = position(3, [(1, 2)])  # channels a'=0, b'=1, c=2
    return embed_seed(make_seed(fullfork(2)), host, [0, 1])


def fork_then_fork():
    """The fork move above followed by a fork of the spectator."""
    m = fork_move_on_host()
    y = m.play.final_pos
    spectator = next(i for i, p in enumerate(m.play.final.players)
                     if p == m.play.initial.players[0])
    second = apply_seed(y, fullfork(2), (spectator,))
    return m, second, compose_plays(second.play, m.play)


def two_synchronisations():
    """x(b) outputs to y(a,b) on b, then z(a) outputs to y's avatar on a."""
    x0 = position(2, [(1,), (0, 1), (0,)])
    first = apply_seed(x0, tau_class(2, 2, 1, 1), (0, 1))
    second = apply_seed(first.play.final_pos, tau_class(2, 1, 1, 1), (2, 1))
    return first, second, compose_plays(second.play, first.play)


@pytest.fixture(scope="session")
def random_plays():
    rng = random.Random(2024)
    return [random_play(rng) for _ in range(150)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
