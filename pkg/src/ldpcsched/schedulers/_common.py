from __future__ import annotations

import numpy as np
from numba import njit

from ..instrumentation import OpCounts
from ..kernels import DecodeResult, hard_decision_into, init_state, syndrome_is_zero

# slots of the live counter array handed to every compiled decoder
V2C, C2V, PRE = 0, 1, 2


@njit(cache=True)
def record_decision(post, decisions, t, check_ptr, edge_var):
    """Store the hard decision after ``t`` iterations; True if it is a codeword."""
    row = decisions[t]
    hard_decision_into(post, row)
    return syndrome_is_zero(row, check_ptr, edge_var)


@njit(cache=True)
def fill_tail(decisions, t):
    for r in range(t + 1, decisions.shape[0]):
        decisions[r, :] = decisions[t, :]


def run_compiled(kernel, graph, channel_llrs, config, *params):
    """Shared Python shell around a compiled decoder.

    ``kernel(check_ptr, edge_var, edge_check, var_ptr, var_edge, state arrays,
    t_max, early_stop, *params, decisions, counts)`` returns
    ``(iterations_used, converged)`` and leaves the final beliefs in the
    posterior array.
    """
    state = init_state(graph, channel_llrs)
    decisions = np.zeros((config.t_max + 1, graph.n), dtype=np.uint8)
    counts = np.zeros(3, dtype=np.int64)
    iterations, converged = kernel(
        graph.check_ptr, graph.edge_var, graph.edge_check, graph.var_ptr, graph.var_edge,
        state.channel_llrs, state.v2c, state.c2v, state.posterior, state.posterior_prev,
        config.t_max, config.early_stop, *params, decisions, counts,
    )
    return DecodeResult(
        decoded=decisions[iterations].copy(),
        converged=bool(converged),
        iterations_used=int(iterations),
        op_counts=OpCounts(v2c_ops=int(counts[V2C]), c2v_ops=int(counts[C2V]),
                           precompute_ops=int(counts[PRE]), k=1),
        final_posterior=state.posterior,
        decisions=decisions,
    )
