"""Residual belief propagation and its residual-decay and list variants.

A single compiled kernel covers all three: RD-RBP scales each edge's queue key
by ``decay ** commits(edge)`` and List-RBP commits the ``list_size`` largest
keys before any recomputation. With ``decay == 1`` and ``list_size == 1`` the
kernel is plain RBP, so the variants reduce to it bit for bit.

``E`` single-edge commits count as one iteration; the syndrome is tested at
iteration boundaries.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ..kernels import c2v_rule, posterior_rule, v2c_rule
from ._common import C2V, V2C, fill_tail, record_decision, run_compiled
from .queue import heap_build, heap_pop, heap_push, heap_update


def compute_residual(old_c2v: float, candidate_c2v: float) -> float:
    return abs(candidate_c2v - old_c2v)


@njit(cache=True)
def _residual_kernel(check_ptr, edge_var, edge_check, var_ptr, var_edge,
                     channel, v2c, c2v, post, post_prev,
                     t_max, early_stop, decay, list_size, decisions, counts):
    num_edges = edge_var.shape[0]
    cand = np.empty(num_edges)
    key = np.zeros(num_edges)
    commits_of = np.zeros(num_edges, dtype=np.int64)
    heap = np.zeros(num_edges, dtype=np.int64)
    pos = np.full(num_edges, -1, dtype=np.int64)
    size = np.zeros(1, dtype=np.int64)
    batch = np.empty(min(list_size, num_edges), dtype=np.int64)

    ok = record_decision(post, decisions, 0, check_ptr, edge_var)
    if (ok and early_stop) or num_edges == 0:
        fill_tail(decisions, 0)
        return 0, ok

    for e in range(num_edges):
        cand[e] = c2v_rule(e, edge_check[e], v2c, check_ptr)
        key[e] = abs(cand[e] - c2v[e])
    counts[C2V] += num_edges
    heap_build(heap, pos, key, size, np.arange(num_edges))

    commits = 0
    t = 0
    while t < t_max:
        boundary = (t + 1) * num_edges
        stalled = False
        while commits < boundary:
            if key[heap[0]] <= 0.0:
                # every candidate equals its committed message: fixed point
                stalled = True
                break
            nb = 0
            while nb < batch.shape[0] and size[0] > 0:
                batch[nb] = heap_pop(heap, pos, key, size)
                nb += 1
            for i in range(nb):
                e = batch[i]
                c2v[e] = cand[e]
                commits_of[e] += 1
                heap_push(heap, pos, key, size, e, 0.0)
            for i in range(nb):
                e = batch[i]
                v = edge_var[e]
                for j in range(var_ptr[v], var_ptr[v + 1]):
                    f = var_edge[j]
                    if f == e:
                        continue
                    v2c[f] = v2c_rule(f, v, channel, c2v, var_ptr, var_edge)
                    counts[V2C] += 1
                    c = edge_check[f]
                    for g in range(check_ptr[c], check_ptr[c + 1]):
                        if g == f:
                            continue
                        cand[g] = c2v_rule(g, c, v2c, check_ptr)
                        counts[C2V] += 1
                        k = abs(cand[g] - c2v[g])
                        if decay != 1.0:
                            k *= decay ** commits_of[g]
                        heap_update(heap, pos, key, size, g, k)
                post[v] = posterior_rule(v, channel, c2v, var_ptr, var_edge)
            commits += nb
        t += 1
        ok = record_decision(post, decisions, t, check_ptr, edge_var)
        if ok and early_stop:
            fill_tail(decisions, t)
            return t, True
        if stalled:
            # further iterations cannot change any message
            fill_tail(decisions, t)
            return t_max, ok
    return t_max, ok


def decode_rbp(graph, channel_llrs, config):
    return run_compiled(_residual_kernel, graph, channel_llrs, config, 1.0, 1)


def decode_rd_rbp(graph, channel_llrs, config):
    return run_compiled(_residual_kernel, graph, channel_llrs, config, float(config.decay), 1)


def decode_list_rbp(graph, channel_llrs, config):
    return run_compiled(_residual_kernel, graph, channel_llrs, config, 1.0, int(config.list_size))
