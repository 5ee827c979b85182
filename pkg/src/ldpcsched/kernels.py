"""Sum-product message-passing primitives shared by every scheduler.

All per-edge rules are numba-compiled functions that take the flat graph
arrays of :class:`~ldpcsched.codes.TannerGraph`. The schedulers call them from
compiled loops; the Python-level helpers below call the very same functions,
so tests of a single message exercise the production arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .codes import TannerGraph, syndrome
from .exceptions import DimensionError

#: Saturation bound for every LLR and message.
L_MAX = 30.0
#: Largest magnitude allowed into ``atanh``.
ATANH_CLIP = 1.0 - 1e-12


@njit(cache=True, inline="always")
def _clamp(x):
    if x > L_MAX:
        return L_MAX
    if x < -L_MAX:
        return -L_MAX
    return x


@njit(cache=True)
def v2c_rule(e, v, channel, c2v, var_ptr, var_edge):
    """Channel LLR of ``v`` plus all incoming C2V except along edge ``e``."""
    acc = channel[v]
    for i in range(var_ptr[v], var_ptr[v + 1]):
        f = var_edge[i]
        if f != e:
            acc += c2v[f]
    return _clamp(acc)


@njit(cache=True)
def c2v_rule(e, c, v2c, check_ptr):
    """Exact tanh-product rule over the other edges of check ``c``.

    The exact output never exceeds the smallest input magnitude; near
    saturation ``atanh(tanh(x))`` overshoots by rounding, so the result is
    capped at that minimum.
    """
    prod = 1.0
    smallest = L_MAX
    for f in range(check_ptr[c], check_ptr[c + 1]):
        if f != e:
            prod *= np.tanh(0.5 * v2c[f])
            smallest = min(smallest, abs(v2c[f]))
    if prod > ATANH_CLIP:
        prod = ATANH_CLIP
    elif prod < -ATANH_CLIP:
        prod = -ATANH_CLIP
    out = 2.0 * np.arctanh(prod)
    if out > smallest:
        return smallest
    if out < -smallest:
        return -smallest
    return out


@njit(cache=True)
def posterior_rule(v, channel, c2v, var_ptr, var_edge):
    acc = channel[v]
    for i in range(var_ptr[v], var_ptr[v + 1]):
        acc += c2v[var_edge[i]]
    return _clamp(acc)


@njit(cache=True)
def hard_decision_into(llrs, out):
    for i in range(llrs.shape[0]):
        out[i] = 1 if llrs[i] < 0.0 else 0


@njit(cache=True)
def unsatisfied_checks(bits, check_ptr, edge_var, out):
    """Fill ``out`` with the syndrome of ``bits``; return its weight."""
    weight = 0
    for c in range(check_ptr.shape[0] - 1):
        s = 0
        for f in range(check_ptr[c], check_ptr[c + 1]):
            s ^= bits[edge_var[f]]
        out[c] = s
        weight += s
    return weight


@njit(cache=True)
def syndrome_is_zero(bits, check_ptr, edge_var):
    for c in range(check_ptr.shape[0] - 1):
        s = 0
        for f in range(check_ptr[c], check_ptr[c + 1]):
            s ^= bits[edge_var[f]]
        if s:
            return False
    return True


# -- Python-level state and wrappers ------------------------------------------------


@dataclass
class MessageState:
    """Per-edge messages and per-variable beliefs of one decode."""

    channel_llrs: np.ndarray
    v2c: np.ndarray
    c2v: np.ndarray
    c2v_old: np.ndarray
    posterior: np.ndarray
    posterior_prev: np.ndarray


@dataclass
class DecodeResult:
    decoded: np.ndarray
    converged: bool
    iterations_used: int
    op_counts: object
    final_posterior: np.ndarray
    #: hard decision after each iteration; row ``t`` holds the state after
    #: ``t`` iterations (row 0 is the channel decision). Rows past
    #: ``iterations_used`` repeat the final decision.
    decisions: np.ndarray | None = field(default=None, repr=False)


def _checked_llrs(graph: TannerGraph, llrs) -> np.ndarray:
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1 or llrs.shape[0] != graph.n:
        raise DimensionError(f"expected {graph.n} LLRs, got shape {llrs.shape}")
    return llrs


def init_state(graph: TannerGraph, channel_llrs) -> MessageState:
    """Messages before the first iteration: every V2C carries its channel
    LLR and every C2V is zero. Channel LLRs are clamped to ``L_MAX``."""
    ch = np.clip(_checked_llrs(graph, channel_llrs), -L_MAX, L_MAX)
    e = graph.num_edges
    return MessageState(
        channel_llrs=ch,
        v2c=ch[graph.edge_var].copy(),
        c2v=np.zeros(e),
        c2v_old=np.zeros(e),
        posterior=ch.copy(),
        posterior_prev=ch.copy(),
    )


def v2c_message(state: MessageState, graph: TannerGraph, edge: int) -> float:
    v = graph.edge_var[edge]
    return float(v2c_rule(edge, v, state.channel_llrs, state.c2v, graph.var_ptr, graph.var_edge))


def c2v_message(state: MessageState, graph: TannerGraph, edge: int) -> float:
    c = graph.edge_check[edge]
    return float(c2v_rule(edge, c, state.v2c, graph.check_ptr))


def posterior_llrs(state: MessageState, graph: TannerGraph) -> np.ndarray:
    out = np.empty(graph.n)
    for v in range(graph.n):
        out[v] = posterior_rule(v, state.channel_llrs, state.c2v, graph.var_ptr, graph.var_edge)
    return out


def hard_decision(llrs) -> np.ndarray:
    """Bit 1 for negative LLRs, bit 0 otherwise (zero maps to 0)."""
    llrs = np.asarray(llrs, dtype=np.float64)
    return (llrs < 0.0).astype(np.uint8)


def check_convergence(graph: TannerGraph, llrs) -> bool:
    return not syndrome(graph, hard_decision(_checked_llrs(graph, llrs))).any()
