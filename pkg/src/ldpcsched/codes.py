"""Parity-check matrices, Tanner graphs, regular code construction and ALIST I/O.

Edges are numbered check-major: the edges of check ``c`` occupy the
contiguous id range ``check_ptr[c]:check_ptr[c + 1]``, ordered by ascending
variable index. Every adjacency list is kept sorted, so two graphs built from
the same matrix are identical array for array.
"""
from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    AlistParseError,
    ConstructionError,
    DimensionError,
    InvalidSpecError,
    RankError,
)

logger = logging.getLogger(__name__)

COLUMN_RETRIES = 100
MATRIX_RETRIES = 50


@dataclass(frozen=True)
class CodeSpec:
    """Dimensions of a (possibly regular) LDPC code.

    ``dv`` and ``dc`` are the variable/check degrees for regular codes and
    the maximum degrees for graphs read from file.
    """

    n: int
    m: int
    dv: int
    dc: int

    def __post_init__(self):
        for name in ("n", "m", "dv", "dc"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidSpecError(f"{name} must be an integer, got {value!r}")
        if not 0 < self.m < self.n:
            raise InvalidSpecError(f"need 0 < m < n, got n={self.n}, m={self.m}")
        if self.dv < 1 or self.dc < 1:
            raise InvalidSpecError("degrees must be positive")

    @property
    def k(self) -> int:
        return self.n - self.m

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def num_edges(self) -> int:
        return self.n * self.dv

    def check_regular(self) -> None:
        """Raise :class:`InvalidSpecError` unless a (dv, dc)-regular graph
        with these dimensions can exist."""
        if self.dv < 2 or self.dc < 2:
            raise InvalidSpecError(f"regular codes need dv, dc >= 2 (got {self.dv}, {self.dc})")
        if self.n * self.dv != self.m * self.dc:
            raise InvalidSpecError(
                f"edge count mismatch: n*dv = {self.n * self.dv} but m*dc = {self.m * self.dc}"
            )
        if self.dc > self.n or self.dv > self.m:
            raise InvalidSpecError("a degree exceeds the number of counterpart nodes")


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.flags.writeable = False
    return a


class TannerGraph:
    """Immutable bipartite graph of a binary parity-check matrix.

    Parameters
    ----------
    n : int
        Number of variable nodes (codeword length).
    check_neighbors : sequence of sequences of int
        ``check_neighbors[c]`` lists the variables taking part in check ``c``.
        Lists are sorted on construction; repeated entries are rejected.
    """

    def __init__(self, n: int, check_neighbors: Sequence[Iterable[int]]):
        n = int(n)
        rows = [sorted(int(v) for v in row) for row in check_neighbors]
        m = len(rows)
        for c, row in enumerate(rows):
            if any(a == b for a, b in zip(row, row[1:])):
                raise InvalidSpecError(f"check {c} lists a variable twice")
            if row and (row[0] < 0 or row[-1] >= n):
                raise InvalidSpecError(f"check {c} references a variable outside [0, {n})")

        check_deg = np.array([len(r) for r in rows], dtype=np.int64)
        check_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(check_deg, out=check_ptr[1:])
        edge_var = np.array([v for r in rows for v in r], dtype=np.int64)
        edge_check = np.repeat(np.arange(m, dtype=np.int64), check_deg)

        # stable sort keeps ascending check order inside each variable
        var_edge = np.argsort(edge_var, kind="stable")
        var_deg = np.bincount(edge_var, minlength=n).astype(np.int64)
        var_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(var_deg, out=var_ptr[1:])

        self.n = n
        self.m = m
        self.check_ptr = _frozen(check_ptr)
        self.edge_var = _frozen(edge_var)
        self.edge_check = _frozen(edge_check)
        self.var_ptr = _frozen(var_ptr)
        self.var_edge = _frozen(var_edge)
        self.var_degree = _frozen(var_deg)
        self.check_degree = _frozen(check_deg)
        self._cache = {}

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_dense(cls, H) -> "TannerGraph":
        H = np.asarray(H)
        if H.ndim != 2:
            raise DimensionError(f"H must be 2-D, got shape {H.shape}")
        if not np.isin(H, (0, 1)).all():
            raise InvalidSpecError("H must be a 0/1 matrix")
        return cls(H.shape[1], [np.flatnonzero(row) for row in H])

    # -- views ------------------------------------------------------------------

    @property
    def num_edges(self) -> int:
        return int(self.edge_var.shape[0])

    @property
    def spec(self) -> CodeSpec:
        return CodeSpec(
            n=self.n,
            m=self.m,
            dv=int(self.var_degree.max(initial=1)),
            dc=int(self.check_degree.max(initial=1)),
        )

    @property
    def is_regular(self) -> bool:
        return bool(
            self.var_degree.size
            and (self.var_degree == self.var_degree[0]).all()
            and (self.check_degree == self.check_degree[0]).all()
        )

    @property
    def check_neighbors(self) -> tuple[tuple[int, ...], ...]:
        p, ev = self.check_ptr, self.edge_var
        return tuple(tuple(ev[p[c]:p[c + 1]].tolist()) for c in range(self.m))

    @property
    def var_neighbors(self) -> tuple[tuple[int, ...], ...]:
        p, ve, ec = self.var_ptr, self.var_edge, self.edge_check
        return tuple(tuple(ec[ve[p[v]:p[v + 1]]].tolist()) for v in range(self.n))

    def edge_id(self, check: int, var: int) -> int:
        """Dense edge id of the nonzero ``H[check, var]``."""
        lo, hi = self.check_ptr[check], self.check_ptr[check + 1]
        slot = int(np.searchsorted(self.edge_var[lo:hi], var))
        if lo + slot >= hi or self.edge_var[lo + slot] != var:
            raise KeyError((check, var))
        return int(lo + slot)

    def edge_endpoints(self, edge: int) -> tuple[int, int]:
        """``(check, var)`` of an edge id."""
        return int(self.edge_check[edge]), int(self.edge_var[edge])

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        H[self.edge_check, self.edge_var] = 1
        return H

    def count_4cycles(self) -> int:
        """Number of check pairs sharing two or more variables (each such
        pair closes at least one 4-cycle)."""
        H = self.to_dense().astype(np.int64)
        overlap = H @ H.T
        np.fill_diagonal(overlap, 0)
        return int(np.count_nonzero(overlap >= 2) // 2)

    def to_edge_csv(self) -> str:
        """Edge list as ``check_id,var_id`` CSV text (debug export)."""
        lines = ["check_id,var_id"]
        lines += [f"{c},{v}" for c, v in zip(self.edge_check.tolist(), self.edge_var.tolist())]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.check_ptr, other.check_ptr)
            and np.array_equal(self.edge_var, other.edge_var)
        )

    def __hash__(self):
        return hash((self.n, self.m, self.edge_var.tobytes(), self.check_ptr.tobytes()))

    def __repr__(self):
        return f"TannerGraph(n={self.n}, m={self.m}, edges={self.num_edges})"

    def __reduce__(self):
        return (TannerGraph, (self.n, self.check_neighbors))


# -- construction -----------------------------------------------------------------


def construct_regular_code(spec: CodeSpec, seed: int) -> TannerGraph:
    """Random (dv, dc)-regular Tanner graph.

    Columns are filled one at a time from the pool of free check sockets.
    A column draw is rejected if it repeats a check or closes a 4-cycle; after
    ``COLUMN_RETRIES`` rejected draws the whole matrix is restarted. Once
    ``MATRIX_RETRIES`` restarts are exhausted, 4-cycles are tolerated (with a
    warning) and only repeated edges are rejected.
    """
    spec.check_regular()
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed) & (2**64 - 1))))
    for _ in range(MATRIX_RETRIES):
        rows = _fill_columns(spec, rng, avoid_4cycles=True)
        if rows is not None:
            return TannerGraph(spec.n, rows)
    logger.warning(
        "no 4-cycle-free (%d,%d) code after %d attempts; accepting 4-cycles",
        spec.n, spec.m, MATRIX_RETRIES,
    )
    for _ in range(MATRIX_RETRIES):
        rows = _fill_columns(spec, rng, avoid_4cycles=False)
        if rows is not None:
            return TannerGraph(spec.n, rows)
    raise ConstructionError(
        f"could not place {spec.num_edges} edges without repeats for "
        f"n={spec.n}, m={spec.m}, dv={spec.dv}, dc={spec.dc} "
        f"({2 * MATRIX_RETRIES} matrix attempts, {COLUMN_RETRIES} draws per column)"
    )


def _fill_columns(spec: CodeSpec, rng: np.random.Generator, avoid_4cycles: bool):
    remaining = np.full(spec.m, spec.dc, dtype=np.int64)
    rows: list[list[int]] = [[] for _ in range(spec.m)]
    # for every check, the set of checks it already shares a variable with
    linked: list[set[int]] = [set() for _ in range(spec.m)]
    for v in range(spec.n):
        open_checks = np.flatnonzero(remaining)
        if open_checks.size < spec.dv:
            return None
        weights = remaining[open_checks] / remaining[open_checks].sum()
        for _ in range(COLUMN_RETRIES):
            # socket-weighted draw without replacement never repeats a check
            picks = rng.choice(open_checks, size=spec.dv, replace=False, p=weights)
            if avoid_4cycles and any(
                int(b) in linked[int(a)] for i, a in enumerate(picks) for b in picks[i + 1:]
            ):
                continue
            break
        else:
            return None
        picks = sorted(int(c) for c in picks)
        for c in picks:
            rows[c].append(v)
            remaining[c] -= 1
        for a in picks:
            for b in picks:
                if a != b:
                    linked[a].add(b)
    return rows


# -- GF(2) arithmetic ---------------------------------------------------------------


def _as_bits(x, length: int, what: str) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != length:
        raise DimensionError(f"{what} must have length {length}, got shape {x.shape}")
    if x.dtype != np.uint8:
        if not np.isin(x, (0, 1)).all():
            raise ValueError(f"{what} must be binary")
        x = x.astype(np.uint8)
    return x


def syndrome(graph: TannerGraph, x_hat) -> np.ndarray:
    """Per-check parity of ``x_hat`` (length ``m``, values 0/1)."""
    x = _as_bits(x_hat, graph.n, "x_hat")
    edge_bits = x[graph.edge_var]
    if graph.num_edges == 0:
        return np.zeros(graph.m, dtype=np.uint8)
    s = np.add.reduceat(edge_bits.astype(np.int64), graph.check_ptr[:-1]) & 1
    # reduceat misreports empty rows; an empty check is always satisfied
    s[graph.check_degree == 0] = 0
    return s.astype(np.uint8)


def is_codeword(graph: TannerGraph, c) -> bool:
    return not syndrome(graph, c).any()


def _rref_gf2(H: np.ndarray):
    """Reduced row echelon form over GF(2); returns ``(R, pivot_columns)``."""
    R = H.astype(bool)
    m, n = R.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        hits = np.flatnonzero(R[row:, col])
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            R[[row, p]] = R[[p, row]]
        others = np.flatnonzero(R[:, col])
        others = others[others != row]
        R[others] ^= R[row]
        pivots.append(col)
        row += 1
    return R[:row], np.array(pivots, dtype=np.int64)


def gf2_rank(graph: TannerGraph) -> int:
    return len(_systematic_form(graph)[1])


def _systematic_form(graph: TannerGraph):
    cached = graph._cache.get("rref")
    if cached is None:
        R, pivots = _rref_gf2(graph.to_dense())
        free = np.setdiff1d(np.arange(graph.n), pivots)
        cached = (R[:, free].astype(np.uint8), pivots, free)
        graph._cache["rref"] = cached
    return cached


def info_positions(graph: TannerGraph) -> np.ndarray:
    """Codeword positions that carry the information bits verbatim."""
    return _systematic_form(graph)[2]


def encode_systematic(graph: TannerGraph, info) -> np.ndarray:
    """Encode ``info`` into a codeword of ``graph``.

    The information bits are copied to the non-pivot columns of the reduced
    parity-check matrix and the pivot columns are solved for. ``info`` has
    length ``k = n - m``; for a rank-deficient ``H`` that raises
    :class:`RankError`, and the caller may instead pass ``n - rank`` bits
    (the effective dimension, see :func:`gf2_rank`).
    """
    P, pivots, free = _systematic_form(graph)
    k_eff = graph.n - len(pivots)
    if len(pivots) < graph.m and np.shape(info) == (graph.n - graph.m,):
        raise RankError(len(pivots), graph.m, graph.n)
    u = _as_bits(info, k_eff, "info")
    c = np.zeros(graph.n, dtype=np.uint8)
    c[free] = u
    c[pivots] = (P.astype(np.int64) @ u) & 1
    return c


# -- ALIST ------------------------------------------------------------------------


def write_alist(graph: TannerGraph) -> str:
    """Serialize to MacKay's ALIST format with zero-padded adjacency rows."""
    out = io.StringIO()
    var_nb = graph.var_neighbors
    chk_nb = graph.check_neighbors
    max_dv = max((len(r) for r in var_nb), default=0)
    max_dc = max((len(r) for r in chk_nb), default=0)
    out.write(f"{graph.n} {graph.m}\n")
    out.write(f"{max_dv} {max_dc}\n")
    out.write(" ".join(str(len(r)) for r in var_nb) + "\n")
    out.write(" ".join(str(len(r)) for r in chk_nb) + "\n")
    for rows, width in ((var_nb, max_dv), (chk_nb, max_dc)):
        for r in rows:
            padded = [x + 1 for x in r] + [0] * (width - len(r))
            out.write(" ".join(map(str, padded)) + "\n")
    return out.getvalue()


def parse_alist(text: str) -> TannerGraph:
    """Parse ALIST text. Zero entries in adjacency rows are padding.

    Both adjacency sections are read and must describe the same matrix.
    """
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks]
    pos = 0

    def next_ints(expected=None, what="line"):
        nonlocal pos
        if pos >= len(lines):
            raise AlistParseError(f"unexpected end of file while reading {what}")
        lineno, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistParseError(f"non-integer token in {what}", lineno) from None
        if expected is not None and len(vals) != expected:
            raise AlistParseError(f"{what}: expected {expected} values, got {len(vals)}", lineno)
        return lineno, vals

    lineno, (n, m) = next_ints(2, "header 'n m'")
    if n <= 0 or m <= 0:
        raise AlistParseError("n and m must be positive", lineno)
    lineno, (max_dv, max_dc) = next_ints(2, "max degrees")
    if max_dv < 0 or max_dc < 0:
        raise AlistParseError("negative maximum degree", lineno)
    dv_line, var_deg = next_ints(n, "variable degree list")
    dc_line, chk_deg = next_ints(m, "check degree list")
    if any(d < 0 or d > max_dv for d in var_deg):
        raise AlistParseError("variable degree outside [0, max_dv]", dv_line)
    if any(d < 0 or d > max_dc for d in chk_deg):
        raise AlistParseError("check degree outside [0, max_dc]", dc_line)

    def read_block(count, degrees, bound, what):
        block = []
        for i in range(count):
            lineno, vals = next_ints(None, f"{what} row {i + 1}")
            nz = [x for x in vals if x != 0]
            if len(nz) != degrees[i]:
                raise AlistParseError(
                    f"{what} row {i + 1} has {len(nz)} entries, degree list says {degrees[i]}",
                    lineno,
                )
            for x in nz:
                if not 1 <= x <= bound:
                    raise AlistParseError(f"index {x} outside [1, {bound}]", lineno)
            if len(set(nz)) != len(nz):
                raise AlistParseError(f"repeated index in {what} row {i + 1}", lineno)
            block.append((lineno, [x - 1 for x in nz]))
        return block

    var_block = read_block(n, var_deg, m, "variable")
    chk_block = read_block(m, chk_deg, n, "check")
    if pos != len(lines):
        raise AlistParseError("trailing data after adjacency lists", lines[pos][0])

    from_checks = {(c, v) for c, (_, vs) in enumerate(chk_block) for v in vs}
    from_vars = {(c, v) for v, (_, cs) in enumerate(var_block) for c in cs}
    if from_checks != from_vars:
        c, v = min(from_checks ^ from_vars)
        where = chk_block[c][0] if (c, v) in from_checks else var_block[v][0]
        raise AlistParseError(
            f"adjacency mismatch at (check {c + 1}, variable {v + 1})", where
        )
    return TannerGraph(n, [vs for _, vs in chk_block])


def load_alist(path) -> TannerGraph:
    with open(path, encoding="ascii") as fh:
        return parse_alist(fh.read())


def save_alist(graph: TannerGraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(write_alist(graph))
