"""Fixed schedules: flooding and layered (serial check-by-check) BP."""
from __future__ import annotations

import numpy as np
from numba import njit

from ..kernels import c2v_rule, posterior_rule, v2c_rule
from ._common import C2V, V2C, fill_tail, record_decision, run_compiled


@njit(cache=True)
def _flooding_kernel(check_ptr, edge_var, edge_check, var_ptr, var_edge,
                     channel, v2c, c2v, post, post_prev,
                     t_max, early_stop, decisions, counts):
    n = channel.shape[0]
    m = check_ptr.shape[0] - 1
    num_edges = edge_var.shape[0]
    ok = record_decision(post, decisions, 0, check_ptr, edge_var)
    if ok and early_stop:
        fill_tail(decisions, 0)
        return 0, True
    for t in range(1, t_max + 1):
        for e in range(num_edges):
            v2c[e] = v2c_rule(e, edge_var[e], channel, c2v, var_ptr, var_edge)
        counts[V2C] += num_edges
        for c in range(m):
            for e in range(check_ptr[c], check_ptr[c + 1]):
                c2v[e] = c2v_rule(e, c, v2c, check_ptr)
        counts[C2V] += num_edges
        post_prev[:] = post
        for v in range(n):
            post[v] = posterior_rule(v, channel, c2v, var_ptr, var_edge)
        ok = record_decision(post, decisions, t, check_ptr, edge_var)
        if ok and early_stop:
            fill_tail(decisions, t)
            return t, True
    return t_max, ok


@njit(cache=True)
def _layered_kernel(check_ptr, edge_var, edge_check, var_ptr, var_edge,
                    channel, v2c, c2v, post, post_prev,
                    t_max, early_stop, decisions, counts):
    m = check_ptr.shape[0] - 1
    max_dc = 0
    for c in range(m):
        max_dc = max(max_dc, check_ptr[c + 1] - check_ptr[c])
    fresh = np.empty(max_dc)
    ok = record_decision(post, decisions, 0, check_ptr, edge_var)
    if ok and early_stop:
        fill_tail(decisions, 0)
        return 0, True
    for t in range(1, t_max + 1):
        post_prev[:] = post
        for c in range(m):
            lo = check_ptr[c]
            hi = check_ptr[c + 1]
            for e in range(lo, hi):
                v2c[e] = v2c_rule(e, edge_var[e], channel, c2v, var_ptr, var_edge)
            for e in range(lo, hi):
                fresh[e - lo] = c2v_rule(e, c, v2c, check_ptr)
            for e in range(lo, hi):
                c2v[e] = fresh[e - lo]
            for e in range(lo, hi):
                v = edge_var[e]
                post[v] = posterior_rule(v, channel, c2v, var_ptr, var_edge)
            counts[V2C] += hi - lo
            counts[C2V] += hi - lo
        ok = record_decision(post, decisions, t, check_ptr, edge_var)
        if ok and early_stop:
            fill_tail(decisions, t)
            return t, True
    return t_max, ok


def decode_flooding(graph, channel_llrs, config):
    """All V2C, then all C2V, then posteriors and the syndrome test, per iteration."""
    return run_compiled(_flooding_kernel, graph, channel_llrs, config)


def decode_layered(graph, channel_llrs, config):
    """One iteration is a sweep over checks in ascending order; each check
    refreshes its incoming V2C, recomputes its C2V and updates the posteriors
    of its variables before the next check is processed."""
    return run_compiled(_layered_kernel, graph, channel_llrs, config)
