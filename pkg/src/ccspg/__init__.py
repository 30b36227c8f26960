"""Plays, strategies and fair testing for finite CCS."""

from .ccs import Process, ccs_next, is_bot_ccs, parse_ccs, passes_ccs, print_ccs
from .diagrams import Embedding, PlayNet, find_iso, pullback, pushout, validate_net
from .equiv import (ATree, Failure, Verdict, fair_eq_ccs, fair_eq_semantic, failures_of, fl,
                    full_abstraction_report)
from .lts import bot_sigma, strong_bisim_check, weak_bisim_check
from .plays import (PlayCospan, causal_graph, check_play, compose_plays, decompose_play,
                    embed_seed, enumerate_full_moves, history_map, make_seed, restrict_play,
                    view_of)
from .strategies import amalgamate, is_bot_strat, semantic_passes, strat_next, translate
from .terms import flatten_state, term_next, theta

__version__ = "0.1.0"
