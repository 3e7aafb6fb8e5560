"""Graded differential matrices, homology dimensions and the Laplacian oracle."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .errors import ModelError, ResourceError, SiteRangeError
from .fock import SuperchargeSpec, adjoint, basis_masks, term_action
from .linalg import FieldSpec, SparseMatrix, rank
from .poly import PoincarePolynomial

DEFAULT_SIZE_CAP = 24
DEFAULT_HAMILTONIAN_CAP = 14


def size_cap() -> int:
    """Brute-force cap on the number of sites, overridable via ``NICOLAI_SIZE_CAP``."""
    raw = os.environ.get("NICOLAI_SIZE_CAP")
    return int(raw) if raw else DEFAULT_SIZE_CAP


def _check_cap(n: int, cap: Optional[int]) -> None:
    cap = size_cap() if cap is None else cap
    if n > cap:
        raise ResourceError(f"n={n} exceeds the brute-force size cap {cap}")


def _index_lookup(n: int, masks: np.ndarray) -> np.ndarray:
    lut = np.full(1 << n, -1, dtype=np.int64)
    lut[masks] = np.arange(masks.size, dtype=np.int64)
    return lut


def differential_matrix(Q: SuperchargeSpec, n: int, d: int) -> SparseMatrix:
    """Block of ``Q`` from degree ``d`` to degree ``d + Q.degree``.

    Columns follow ``basis_states(n, d)``, rows ``basis_states(n, d + Q.degree)``.
    """
    if not 0 <= d <= n:
        raise SiteRangeError(f"degree {d} not in 0..{n}")
    if n < Q.sites:
        raise SiteRangeError(f"supercharge needs {Q.sites} sites, got n={n}")
    src = basis_masks(n, d)
    t = d + Q.degree
    if not 0 <= t <= n:
        return SparseMatrix.zeros(0, src.size)
    dst = basis_masks(n, t)
    lut = _index_lookup(n, dst)
    rows, cols, vals = [], [], []
    for term in Q.terms:
        pos, sign, img = term_action(term, src)
        rows.append(lut[img])
        cols.append(pos)
        vals.append(sign)
    if not rows:
        return SparseMatrix.zeros(dst.size, src.size)
    return SparseMatrix.from_coo(dst.size, src.size, np.concatenate(rows),
                                 np.concatenate(cols), np.concatenate(vals))


def composition_vanishes(Q: SuperchargeSpec, n: int,
                         blocks: Optional[dict[int, SparseMatrix]] = None) -> bool:
    """Matrix-level ``Q^2 = 0``: every product of consecutive blocks is zero."""
    k = -Q.degree
    if blocks is None:
        blocks = {d: differential_matrix(Q, n, d) for d in range(n + 1)}
    for d in range(k, n + 1):
        if d - k < 0 or blocks[d].rows == 0:
            continue
        prod = blocks[d - k].to_scipy() @ blocks[d].to_scipy()
        prod.eliminate_zeros()
        if prod.nnz:
            return False
    return True


@dataclass
class HomologyReport:
    model: str
    n: int
    chain_dims: list[int]
    ranks: list[int]
    homology_dims: list[int]
    poincare: PoincarePolynomial
    field: str
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return self.poincare(1)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "size": self.n,
            "chain_dims": [str(x) for x in self.chain_dims],
            "ranks": [str(x) for x in self.ranks],
            "coefficients": [str(x) for x in self.homology_dims],
            "count": str(self.count),
            "field": self.field,
            "timings": self.timings,
        }


def homology_report(Q: SuperchargeSpec, n: Optional[int] = None,
                    field: Optional[FieldSpec] = None, *, model: str = "custom",
                    cap: Optional[int] = None, jobs: int = 1) -> HomologyReport:
    """Per-degree ranks and Betti numbers of ``Q`` on ``n`` sites.

    ``jobs`` sets the size of the per-degree worker pool; results are merged
    in degree order regardless of completion order.
    """
    n = Q.sites if n is None else n
    field = FieldSpec.two_prime(0) if field is None else field
    _check_cap(n, cap)
    k = -Q.degree
    if k <= 0:
        raise ModelError(f"supercharge degree must be negative, got {Q.degree}")
    t0 = time.perf_counter()
    blocks = {d: differential_matrix(Q, n, d) for d in range(n + 1)}
    t1 = time.perf_counter()
    if not composition_vanishes(Q, n, blocks):
        raise ModelError(f"Q^2 != 0 for {Q}")
    t2 = time.perf_counter()

    def job(d: int) -> int:
        return rank(blocks[d], field)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            ranks = list(pool.map(job, range(n + 1)))
    else:
        ranks = [job(d) for d in range(n + 1)]
    t3 = time.perf_counter()
    dims = [comb(n, d) for d in range(n + 1)]
    betti = []
    for d in range(n + 1):
        incoming = ranks[d + k] if d + k <= n else 0
        h = dims[d] - ranks[d] - incoming
        if h < 0:
            raise ModelError(f"negative Betti number at degree {d}: sign or nilpotency bug")
        betti.append(h)
    return HomologyReport(
        model=model, n=n, chain_dims=dims, ranks=ranks, homology_dims=betti,
        poincare=PoincarePolynomial(betti), field=field.describe(),
        timings={"assemble": round(t1 - t0, 6), "nilpotency": round(t2 - t1, 6),
                 "rank": round(t3 - t2, 6)},
    )


def homology_dims(Q: SuperchargeSpec, n: Optional[int] = None,
                  field: Optional[FieldSpec] = None, **kw) -> list[int]:
    return homology_report(Q, n, field, **kw).homology_dims


def poincare_polynomial(Q: SuperchargeSpec, n: Optional[int] = None,
                        field: Optional[FieldSpec] = None, **kw) -> PoincarePolynomial:
    return homology_report(Q, n, field, **kw).poincare


def ground_state_count(Q: SuperchargeSpec, n: Optional[int] = None,
                       field: Optional[FieldSpec] = None, **kw) -> int:
    return poincare_polynomial(Q, n, field, **kw)(1)


def hamiltonian_kernel_dim(Q: SuperchargeSpec, n: Optional[int], d: int,
                           cap: int = DEFAULT_HAMILTONIAN_CAP) -> int:
    """``dim ker(Q Q† + Q† Q)`` on degree ``d``, computed over the rationals.

    Q† is assembled from the adjoint operator's own action, not by
    transposing Q's matrix.
    """
    n = Q.sites if n is None else n
    if n > cap:
        raise ResourceError(f"n={n} exceeds the Hamiltonian oracle cap {cap}")
    if not 0 <= d <= n:
        raise SiteRangeError(f"degree {d} not in 0..{n}")
    Qd = adjoint(Q)
    k = -Q.degree
    size = comb(n, d)
    acc: dict[tuple[int, int], int] = {}
    products = []
    # Q† Q : d -> d-k -> d
    if d - k >= 0:
        products.append(differential_matrix(Qd, n, d - k) @ differential_matrix(Q, n, d))
    # Q Q† : d -> d+k -> d
    if d + k <= n:
        products.append(differential_matrix(Q, n, d + k) @ differential_matrix(Qd, n, d))
    for prod in products:
        for r, c, v in prod.entries:
            acc[(r, c)] = acc.get((r, c), 0) + v
    L = SparseMatrix.from_entries(size, size, ((r, c, v) for (r, c), v in acc.items() if v))
    return size - rank(L, FieldSpec.rational())


def euler_check(P: PoincarePolynomial, n: int) -> bool:
    """``P(-1) == 0``; the empty lattice (``n = 0``) never passes."""
    if n < 1:
        return False
    return P(-1) == 0
