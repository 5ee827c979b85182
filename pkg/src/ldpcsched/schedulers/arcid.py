"""Reliability-driven conditional-innovation decoding (AR-CID).

Each iteration runs two stages:

1. quality assessment: syndrome of the current hard decision, per-variable
   count of unsatisfied checks ``R_v``, the sigmoid-domain belief change
   ``delta_y`` against the previous iteration, the combined metric
   ``M = alpha * R_v + beta * delta_y``, and the active set (variables with
   ``M > gamma`` among the first ``ceil(lambda * n)`` by descending ``R_v``);
2. refinement: a residual-ordered sweep over the C2V edges into active
   variables. Each edge is committed once per sweep as
   ``w * m_pre + (1 - w) * m_old`` with ``w = min(1, M[v] / (alpha * deg(v) + beta))``,
   where ``m_pre`` is the sum-product message from current V2C inputs.
   Commits refresh the V2C messages of the destination variable and the
   pending ``m_pre`` / residual of every queued edge that depends on them.

When the syndrome fails but no variable clears the threshold, the single
variable with the largest ``M`` (then ``R_v``, then lowest index) is forced
into the active set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..codes import TannerGraph
from ..exceptions import ConfigError, DimensionError
from ..kernels import c2v_rule, hard_decision_into, posterior_rule, unsatisfied_checks, v2c_rule
from ._common import C2V, PRE, V2C, fill_tail, record_decision, run_compiled
from .queue import heap_build, heap_pop, heap_update


@njit(cache=True)
def _quality(bits, check_ptr, edge_var, edge_check, var_ptr, var_edge, s, r_v):
    unsatisfied_checks(bits, check_ptr, edge_var, s)
    for v in range(var_ptr.shape[0] - 1):
        acc = 0
        for j in range(var_ptr[v], var_ptr[v + 1]):
            acc += s[edge_check[var_edge[j]]]
        r_v[v] = acc


@njit(cache=True, inline="always")
def _sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


@njit(cache=True)
def _transition(post, prev, out):
    for v in range(post.shape[0]):
        out[v] = abs(_sigmoid(post[v]) - _sigmoid(prev[v]))


@njit(cache=True)
def _select(r_v, metric, gamma, lam, out):
    """Write the active set into ``out`` in selection order; return its size."""
    n = r_v.shape[0]
    order = np.argsort(-r_v, kind="mergesort")
    slots = min(n, int(math.ceil(lam * n - 1e-9)))
    count = 0
    for i in range(slots):
        v = order[i]
        if metric[v] > gamma:
            out[count] = v
            count += 1
    return count


@njit(cache=True)
def _fallback(r_v, metric):
    best = 0
    for v in range(1, r_v.shape[0]):
        if metric[v] > metric[best] or (metric[v] == metric[best] and r_v[v] > r_v[best]):
            best = v
    return best


@njit(cache=True)
def _arcid_kernel(check_ptr, edge_var, edge_check, var_ptr, var_edge,
                  channel, v2c, c2v, post, post_prev,
                  t_max, early_stop, alpha, beta, gamma, lam,
                  decisions, counts):
    n = channel.shape[0]
    m = check_ptr.shape[0] - 1
    num_edges = edge_var.shape[0]
    s = np.zeros(m, dtype=np.uint8)
    r_v = np.zeros(n, dtype=np.int64)
    delta = np.zeros(n)
    metric = np.zeros(n)
    active = np.zeros(n, dtype=np.int64)
    m_pre = np.zeros(num_edges)
    key = np.zeros(num_edges)
    queued = np.zeros(num_edges, dtype=np.bool_)
    heap = np.zeros(num_edges, dtype=np.int64)
    pos = np.full(num_edges, -1, dtype=np.int64)
    size = np.zeros(1, dtype=np.int64)
    sweep = np.zeros(num_edges, dtype=np.int64)
    norm = np.empty(n)
    for v in range(n):
        norm[v] = alpha * (var_ptr[v + 1] - var_ptr[v]) + beta

    ok = record_decision(post, decisions, 0, check_ptr, edge_var)
    if ok and early_stop:
        fill_tail(decisions, 0)
        return 0, True

    for t in range(t_max):
        bits = decisions[t]
        _quality(bits, check_ptr, edge_var, edge_check, var_ptr, var_edge, s, r_v)
        _transition(post, post_prev, delta)
        for v in range(n):
            metric[v] = alpha * r_v[v] + beta * delta[v]
        counts[PRE] += num_edges + n
        n_active = _select(r_v, metric, gamma, lam, active)
        if n_active == 0 and not ok:
            active[0] = _fallback(r_v, metric)
            n_active = 1

        n_sweep = 0
        for i in range(n_active):
            v = active[i]
            for j in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edge[j]
                m_pre[e] = c2v_rule(e, edge_check[e], v2c, check_ptr)
                key[e] = abs(m_pre[e] - c2v[e])
                queued[e] = True
                sweep[n_sweep] = e
                n_sweep += 1
        counts[C2V] += n_sweep
        heap_build(heap, pos, key, size, sweep[:n_sweep])

        while size[0] > 0:
            e = heap_pop(heap, pos, key, size)
            queued[e] = False
            v = edge_var[e]
            w = metric[v] / norm[v]
            if w > 1.0:
                w = 1.0
            c2v[e] = w * m_pre[e] + (1.0 - w) * c2v[e]
            for j in range(var_ptr[v], var_ptr[v + 1]):
                f = var_edge[j]
                if f == e:
                    continue
                v2c[f] = v2c_rule(f, v, channel, c2v, var_ptr, var_edge)
                counts[V2C] += 1
                c = edge_check[f]
                for g in range(check_ptr[c], check_ptr[c + 1]):
                    if g != f and queued[g]:
                        m_pre[g] = c2v_rule(g, c, v2c, check_ptr)
                        counts[C2V] += 1
                        heap_update(heap, pos, key, size, g, abs(m_pre[g] - c2v[g]))

        post_prev[:] = post
        for i in range(n_active):
            v = active[i]
            post[v] = posterior_rule(v, channel, c2v, var_ptr, var_edge)
        ok = record_decision(post, decisions, t + 1, check_ptr, edge_var)
        if ok and early_stop:
            fill_tail(decisions, t + 1)
            return t + 1, True
    return t_max, ok


def decode_arcid(graph, channel_llrs, config):
    return run_compiled(
        _arcid_kernel, graph, channel_llrs, config,
        float(config.alpha), float(config.beta), float(config.gamma), float(config.lambda_),
    )


# -- stage-one building blocks as standalone functions ------------------------------


@dataclass
class ReliabilityState:
    r_v: np.ndarray
    delta_y: np.ndarray
    metric: np.ndarray
    order: np.ndarray
    active: np.ndarray


def message_quality_check(graph: TannerGraph, posterior) -> np.ndarray:
    """Number of unsatisfied checks touching each variable."""
    post = np.asarray(posterior, dtype=np.float64)
    if post.shape != (graph.n,):
        raise DimensionError(f"expected {graph.n} LLRs, got shape {post.shape}")
    bits = np.empty(graph.n, dtype=np.uint8)
    hard_decision_into(post, bits)
    s = np.zeros(graph.m, dtype=np.uint8)
    r_v = np.zeros(graph.n, dtype=np.int64)
    _quality(bits, graph.check_ptr, graph.edge_var, graph.edge_check, graph.var_ptr, graph.var_edge, s, r_v)
    return r_v


def contextual_transition(posterior, posterior_prev) -> np.ndarray:
    post = np.asarray(posterior, dtype=np.float64)
    prev = np.asarray(posterior_prev, dtype=np.float64)
    if post.shape != prev.shape or post.ndim != 1:
        raise DimensionError(f"shape mismatch: {post.shape} vs {prev.shape}")
    out = np.empty_like(post)
    _transition(post, prev, out)
    return out


def combined_metric(r_v, delta_y, alpha: float, beta: float) -> np.ndarray:
    if abs(alpha + beta - 1.0) > 1e-12 or not (0 <= alpha <= 1 and 0 <= beta <= 1):
        raise ConfigError(f"need alpha + beta = 1 with both in [0, 1], got {alpha}, {beta}")
    return alpha * np.asarray(r_v, dtype=np.float64) + beta * np.asarray(delta_y, dtype=np.float64)


def reliability_state(graph: TannerGraph, posterior, posterior_prev, alpha, beta) -> ReliabilityState:
    r_v = message_quality_check(graph, posterior)
    delta = contextual_transition(posterior, posterior_prev)
    metric = combined_metric(r_v, delta, alpha, beta)
    order = np.argsort(-r_v, kind="stable")
    return ReliabilityState(r_v, delta, metric, order, np.empty(0, dtype=np.int64))


def select_active_set(reliability: ReliabilityState, gamma: float, lam: float, n: int) -> np.ndarray:
    """Variables with ``M > gamma`` among the first ``ceil(lam * n)`` by
    descending ``R_v`` (ties by ascending index), in that order."""
    r_v = np.asarray(reliability.r_v, dtype=np.int64)
    if r_v.shape != (n,):
        raise DimensionError(f"expected {n} reliability entries, got {r_v.shape}")
    out = np.empty(n, dtype=np.int64)
    count = _select(r_v, np.asarray(reliability.metric, dtype=np.float64), float(gamma), float(lam), out)
    reliability.active = out[:count].copy()
    return reliability.active
