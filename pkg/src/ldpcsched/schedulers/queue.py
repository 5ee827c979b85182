"""Indexed binary max-heap over edge ids with in-place key updates.

The heap lives in three flat arrays so compiled schedulers can use it without
Python objects: ``heap`` (edge ids in heap order), ``pos`` (heap slot of each
edge, -1 when absent) and ``key``. ``size`` is a one-element array. Ties are
broken toward the lower edge id, which keeps every schedule deterministic.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _above(key, a, b):
    ka = key[a]
    kb = key[b]
    return ka > kb or (ka == kb and a < b)


@njit(cache=True)
def _sift_up(heap, pos, key, i):
    e = heap[i]
    while i > 0:
        parent = (i - 1) >> 1
        p = heap[parent]
        if not _above(key, e, p):
            break
        heap[i] = p
        pos[p] = i
        i = parent
    heap[i] = e
    pos[e] = i


@njit(cache=True)
def _sift_down(heap, pos, key, i, size):
    e = heap[i]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        right = child + 1
        if right < size and _above(key, heap[right], heap[child]):
            child = right
        c = heap[child]
        if not _above(key, c, e):
            break
        heap[i] = c
        pos[c] = i
        i = child
    heap[i] = e
    pos[e] = i


@njit(cache=True)
def heap_push(heap, pos, key, size, e, k):
    key[e] = k
    i = size[0]
    heap[i] = e
    pos[e] = i
    size[0] = i + 1
    _sift_up(heap, pos, key, i)


@njit(cache=True)
def heap_pop(heap, pos, key, size):
    top = heap[0]
    last = size[0] - 1
    size[0] = last
    pos[top] = -1
    if last > 0:
        heap[0] = heap[last]
        pos[heap[0]] = 0
        _sift_down(heap, pos, key, 0, last)
    return top


@njit(cache=True)
def heap_update(heap, pos, key, size, e, k):
    """Change the key of an edge already in the heap."""
    old = key[e]
    key[e] = k
    i = pos[e]
    if k > old:
        _sift_up(heap, pos, key, i)
    elif k < old:
        _sift_down(heap, pos, key, i, size[0])


@njit(cache=True)
def heap_build(heap, pos, key, size, edges):
    """Heapify ``edges`` (keys must already be stored in ``key``)."""
    n = edges.shape[0]
    for i in range(n):
        heap[i] = edges[i]
        pos[edges[i]] = i
    size[0] = n
    for i in range(n // 2 - 1, -1, -1):
        _sift_down(heap, pos, key, i, n)


class ResidualQueue:
    """Max-priority queue of per-edge residuals.

    >>> q = ResidualQueue(4)
    >>> q.push(2, 0.5); q.push(0, 1.5); q.push(3, 1.5)
    >>> q.peek()
    (0, 1.5)
    >>> q.update(2, 9.0); q.pop()
    (2, 9.0)
    """

    def __init__(self, num_edges: int):
        self._heap = np.zeros(num_edges, dtype=np.int64)
        self._pos = np.full(num_edges, -1, dtype=np.int64)
        self._key = np.zeros(num_edges, dtype=np.float64)
        self._size = np.zeros(1, dtype=np.int64)

    def __len__(self):
        return int(self._size[0])

    def __contains__(self, edge):
        return self._pos[edge] >= 0

    def push(self, edge: int, residual: float) -> None:
        if residual < 0:
            raise ValueError("residuals are non-negative")
        if edge in self:
            raise KeyError(f"edge {edge} already queued")
        heap_push(self._heap, self._pos, self._key, self._size, edge, float(residual))

    def update(self, edge: int, residual: float) -> None:
        if residual < 0:
            raise ValueError("residuals are non-negative")
        if edge not in self:
            raise KeyError(edge)
        heap_update(self._heap, self._pos, self._key, self._size, edge, float(residual))

    def peek(self) -> tuple[int, float]:
        if not len(self):
            raise IndexError("peek from empty queue")
        e = int(self._heap[0])
        return e, float(self._key[e])

    def pop(self) -> tuple[int, float]:
        if not len(self):
            raise IndexError("pop from empty queue")
        e = int(heap_pop(self._heap, self._pos, self._key, self._size))
        return e, float(self._key[e])
