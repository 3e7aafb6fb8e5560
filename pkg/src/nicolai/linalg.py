"""Exact sparse rank over GF(p) and over the rationals.

Elimination runs independently on every connected block of the bipartite
row/column graph, with an approximate Markowitz pivot rule: take the
shortest live column, then the shortest row inside it.  Over the rationals
rows are combined fraction-free and divided by their content.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

import gmpy2
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import ArithmeticDisagreement, ConfigError, ResourceError

MAX_DIMENSION = 1 << 27
PRIME_RANGE = (1 << 30, 1 << 31)


@dataclass(frozen=True)
class FieldSpec:
    """Arithmetic used for ranks.

    ``mode`` is ``"prime"`` (a single modulus), ``"two_prime"`` (two moduli
    that must agree, exact fallback otherwise) or ``"rational"``.
    """

    mode: str
    primes: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.mode == "rational":
            if self.primes:
                raise ConfigError("rational mode takes no primes")
            return
        want = {"prime": 1, "two_prime": 2}.get(self.mode)
        if want is None:
            raise ConfigError(f"unknown field mode {self.mode!r}")
        if len(self.primes) != want:
            raise ConfigError(f"{self.mode} mode needs {want} prime(s), got {self.primes}")
        for p in self.primes:
            # residues times residues must fit into int64 workspaces
            if not 2 <= p < (1 << 31) or not gmpy2.is_prime(p):
                raise ConfigError(f"{p} is not a prime below 2^31")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", (p,))

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls("rational")

    @classmethod
    def two_prime(cls, seed: Optional[int] = 0) -> "FieldSpec":
        return cls("two_prime", random_primes(2, seed))

    def describe(self) -> str:
        if self.mode == "rational":
            return "rational"
        return f"{self.mode}({','.join(map(str, self.primes))})"


def random_primes(k: int, seed: Optional[int] = 0) -> tuple[int, ...]:
    """``k`` distinct primes drawn from (2^30, 2^31), reproducible from ``seed``."""
    rng = random.Random(seed)
    lo, hi = PRIME_RANGE
    out: list[int] = []
    while len(out) < k:
        p = int(gmpy2.next_prime(rng.randrange(lo, hi - (1 << 20))))
        if p not in out:
            out.append(p)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable integer matrix in coordinate form, entries sorted column-major."""

    rows: int
    cols: int
    row: np.ndarray = field(repr=False)
    col: np.ndarray = field(repr=False)
    val: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative shape")
        if max(self.rows, self.cols) > MAX_DIMENSION:
            raise ResourceError(f"matrix shape {self.rows}x{self.cols} exceeds {MAX_DIMENSION}")
        for a in (self.row, self.col, self.val):
            a.setflags(write=False)

    @classmethod
    def from_entries(cls, rows: int, cols: int,
                     entries: Iterable[tuple[int, int, int]]) -> "SparseMatrix":
        acc: dict[tuple[int, int], int] = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if (r, c) in acc:
                raise ValueError(f"duplicate coordinate ({r}, {c})")
            acc[(r, c)] = int(v)
        items = sorted(((c, r), v) for (r, c), v in acc.items() if v)
        col = np.array([k[0] for k, _ in items], dtype=np.int64)
        row = np.array([k[1] for k, _ in items], dtype=np.int64)
        val = np.array([v for _, v in items], dtype=object if _needs_object(items) else np.int64)
        return cls(rows, cols, row, col, val)

    @classmethod
    def from_coo(cls, rows: int, cols: int, r, c, v) -> "SparseMatrix":
        """Build from coordinate arrays, summing duplicates and dropping zeros."""
        m = sp.coo_matrix((np.asarray(v, dtype=np.int64), (np.asarray(r), np.asarray(c))),
                          shape=(rows, cols)).tocsc()
        m.sum_duplicates()
        m.eliminate_zeros()
        return cls.from_scipy(m)

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = sp.csc_matrix(m)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        coo = m.tocoo()
        order = np.lexsort((coo.row, coo.col))
        return cls(m.shape[0], m.shape[1], coo.row[order].astype(np.int64),
                   coo.col[order].astype(np.int64), coo.data[order].astype(np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        e = np.empty(0, dtype=np.int64)
        return cls(rows, cols, e, e.copy(), e.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self.val.size)

    @property
    def entries(self) -> list[tuple[int, int, int]]:
        return [(int(r), int(c), int(v)) for r, c, v in zip(self.row, self.col, self.val)]

    def to_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.val.astype(np.int64), (self.row, self.col)),
                             shape=self.shape, dtype=np.int64)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=object)
        for r, c, v in self.entries:
            out[r, c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_entries(self.cols, self.rows,
                                         ((c, r, v) for r, c, v in self.entries))

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "SparseMatrix":
        """Entry ``(r, c)`` moves to ``(row_perm[r], col_perm[c])``."""
        return SparseMatrix.from_entries(
            self.rows, self.cols, ((row_perm[r], col_perm[c], v) for r, c, v in self.entries))

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        """Exact product using Python integers."""
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for r, c, v in other.entries:
            by_row.setdefault(r, []).append((c, v))
        acc: dict[tuple[int, int], int] = {}
        for r, k, v in self.entries:
            for c, w in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseMatrix.from_entries(self.rows, other.cols,
                                         ((r, c, v) for (r, c), v in acc.items() if v))

    __matmul__ = matmul

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self.entries)))

    def to_triplet_text(self) -> str:
        """Header ``rows cols M``, one 1-indexed ``row col value`` line per entry, ``0 0 0``."""
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        lines.extend(f"{r + 1} {c + 1} {v}" for r, c, v in self.entries)
        lines.append("0 0 0")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_triplet_text(cls, text: str) -> "SparseMatrix":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        rows, cols, count = map(int, lines[0])
        body = lines[1:]
        if body and body[-1] == ["0", "0", "0"]:
            body = body[:-1]
        if len(body) != count:
            raise ValueError(f"header announces {count} entries, found {len(body)}")
        return cls.from_entries(rows, cols, ((int(r) - 1, int(c) - 1, int(v)) for r, c, v in body))


def _needs_object(items) -> bool:
    return any(abs(v) >= 1 << 62 for _, v in items)


def _blocks(M: SparseMatrix) -> list[dict[int, dict[int, int]]]:
    """Split ``M`` into connected blocks; each block maps row -> {col: value}."""
    if M.nnz == 0:
        return []
    r = M.row.astype(np.int64)
    c = M.col.astype(np.int64) + M.rows
    n = M.rows + M.cols
    g = sp.coo_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    lab = labels[r]
    order = np.argsort(lab, kind="stable")
    blocks: list[dict[int, dict[int, int]]] = []
    current = -1
    rows_of: dict[int, dict[int, int]] = {}
    for idx in order:
        if lab[idx] != current:
            current = lab[idx]
            rows_of = {}
            blocks.append(rows_of)
        rows_of.setdefault(int(M.row[idx]), {})[int(M.col[idx])] = int(M.val[idx])
    return blocks


def _block_rank(rows: dict[int, dict[int, int]], p: Optional[int]) -> int:
    """Destructive elimination of one block; ``p=None`` means exact integers."""
    if p is not None:
        for rd in rows.values():
            for c in list(rd):
                x = rd[c] % p
                if x:
                    rd[c] = x
                else:
                    del rd[c]
    cols: dict[int, set[int]] = {}
    for r, rd in rows.items():
        for c in rd:
            cols.setdefault(c, set()).add(r)
    heap = [(len(rs), c) for c, rs in cols.items() if rs]
    heapq.heapify(heap)
    rank = 0
    while heap:
        cnt, c = heapq.heappop(heap)
        rs = cols.get(c)
        if not rs:
            continue
        if cnt != len(rs):
            heapq.heappush(heap, (len(rs), c))
            continue
        pr = min(rs, key=lambda r: (len(rows[r]), r))
        prow = rows.pop(pr)
        pv = prow[c]
        for cc in prow:
            cols[cc].discard(pr)
        del cols[c]
        rank += 1
        others = list(rs)
        if not others:
            continue
        if p is not None:
            inv = pow(pv, -1, p)
            for r in others:
                rd = rows[r]
                f = rd.pop(c) * inv % p
                for cc, pv2 in prow.items():
                    if cc == c:
                        continue
                    x = (rd.get(cc, 0) - f * pv2) % p
                    if x:
                        if cc not in rd:
                            cols[cc].add(r)
                        rd[cc] = x
                    elif cc in rd:
                        del rd[cc]
                        cols[cc].discard(r)
        else:
            for r in others:
                rd = rows[r]
                a = rd.pop(c)
                g = gcd(a, pv)
                ma, mp = pv // g, a // g
                if ma != 1:
                    for cc in rd:
                        rd[cc] *= ma
                for cc, pv2 in prow.items():
                    if cc == c:
                        continue
                    x = rd.get(cc, 0) - mp * pv2
                    if x:
                        if cc not in rd:
                            cols[cc].add(r)
                        rd[cc] = x
                    elif cc in rd:
                        del rd[cc]
                        cols[cc].discard(r)
                if rd:
                    content = 0
                    for x in rd.values():
                        content = gcd(content, x)
                        if content == 1:
                            break
                    if content > 1:
                        for cc in rd:
                            rd[cc] //= content
        for cc in prow:
            if cc != c and cc in cols:
                heapq.heappush(heap, (len(cols[cc]), cc))
    return rank


def _copy(block: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    return {r: dict(rd) for r, rd in block.items()}


def rank(M: SparseMatrix, field: FieldSpec) -> int:
    """Rank of ``M`` over ``field``.

    In ``two_prime`` mode each block is eliminated modulo both primes; a block
    on which they disagree is recounted over the integers.
    """
    blocks = _blocks(M)
    if field.mode == "rational":
        return sum(_block_rank(b, None) for b in blocks)
    if field.mode == "prime":
        return sum(_block_rank(b, field.primes[0]) for b in blocks)
    total = 0
    for b in blocks:
        ranks = {_block_rank(_copy(b), p) for p in field.primes}
        if len(ranks) == 1:
            total += ranks.pop()
            continue
        exact = _block_rank(b, None)
        # a modular rank can only fall short of the characteristic-0 rank
        if exact < max(ranks):
            raise ArithmeticDisagreement(f"modular ranks {sorted(ranks)} exceed exact rank {exact}")
        total += exact
    return total


def kernel_dim(M: SparseMatrix, field: FieldSpec) -> int:
    return M.cols - rank(M, field)
