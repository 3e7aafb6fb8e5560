"""One-step homological perturbation for supercharges split as Q = d1 + d2.

For a cubic monomial ``d1`` the homotopy ``h`` is the reversed, dagger-swapped
monomial with its sign fixed so that the inclusion/projection pair satisfies

    pi . iota = Id,    iota . pi = Id + d1 h + h d1.

The transferred differential on the d1-homology is ``pi (1 - d2 h)^{-1} d2 iota``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import ConstructionError, DivergenceError, DomainError
from .fock import FockState, MonomialTerm, SuperchargeSpec, operator_matrix
from .fock import nicolai_supercharge, z2_supercharge
from .homology import poincare_polynomial
from .linalg import FieldSpec, SparseMatrix, rank
from .poly import PoincarePolynomial, suspend


def _is_zero(m: sp.spmatrix) -> bool:
    m = sp.csr_matrix(m)
    m.eliminate_zeros()
    return m.nnz == 0


def _same(a: sp.spmatrix, b: sp.spmatrix) -> bool:
    return _is_zero(a - b)


def term_matrix(term: MonomialTerm, n: int) -> sp.csr_matrix:
    return operator_matrix(SuperchargeSpec(n, (term,), term.degree), n)


def split_last_term(Q: SuperchargeSpec) -> tuple[MonomialTerm, SuperchargeSpec]:
    """Peel off the term reaching the highest site (the last one on ties)."""
    if not Q.terms:
        raise DomainError("cannot split a zero supercharge")
    idx = max(range(len(Q.terms)), key=lambda i: (Q.terms[i].max_site, i))
    rest = Q.terms[:idx] + Q.terms[idx + 1:]
    return Q.terms[idx], SuperchargeSpec(Q.sites, rest, Q.degree)


@dataclass
class Retract:
    n: int
    d1: MonomialTerm
    h: MonomialTerm
    representatives: list[FockState]
    projection_kernel: list[FockState]
    checks: dict[str, bool] = field(default_factory=dict)

    def inclusion(self) -> sp.csr_matrix:
        """``2^n x R`` matrix embedding the representatives."""
        rows = [s.occupation for s in self.representatives]
        k = len(rows)
        return sp.csr_matrix((np.ones(k, dtype=np.int64), (rows, np.arange(k))),
                             shape=(1 << self.n, k))

    def projection(self) -> sp.csr_matrix:
        return self.inclusion().T.tocsr()

    def d1_matrix(self) -> sp.csr_matrix:
        return term_matrix(self.d1, self.n)

    def h_matrix(self) -> sp.csr_matrix:
        return term_matrix(self.h, self.n)

    def verify(self) -> dict[str, bool]:
        d1, h = self.d1_matrix(), self.h_matrix()
        i, p = self.inclusion(), self.projection()
        ident = sp.identity(1 << self.n, dtype=np.int64, format="csr")
        homotopy = d1 @ h + h @ d1
        return {
            "pi_iota_identity": _same(p @ i, sp.identity(i.shape[1], dtype=np.int64)),
            "iota_pi_homotopy": _same(i @ p, ident + homotopy),
            "h_squared_zero": _is_zero(h @ h),
            "d1_h_d1": _same(d1 @ h @ d1, -d1),
            "h_d1_h": _same(h @ d1 @ h, -h),
            "h_iota_zero": _is_zero(h @ i),
            "pi_h_zero": _is_zero(p @ h),
        }

    def ok(self) -> bool:
        return bool(self.checks) and all(self.checks.values())


def _dagger_reverse(term: MonomialTerm, sign: int) -> MonomialTerm:
    return MonomialTerm(tuple(l.dagger() for l in reversed(term.letters)), sign * term.coefficient)


def build_retract(d1: MonomialTerm, n: int) -> Retract:
    """Deformation retract of ``(H_n, d1)`` onto the monomials ``d1`` leaves alone.

    Representatives are the basis monomials killed by both ``d1 h`` and
    ``h d1``; everything else spans the kernel of the projection.
    """
    if len(d1.letters) != 3 or len(set(d1.sites())) != 3:
        raise ConstructionError(f"expected a cubic monomial on three distinct sites, got {d1}")
    if d1.coefficient not in (1, -1):
        raise ConstructionError(f"d1 must have unit coefficient, got {d1.coefficient}")
    if d1.max_site > n:
        raise ConstructionError(f"{d1} does not fit on {n} sites")
    d1m = term_matrix(d1, n)
    for sign in (1, -1):
        h = _dagger_reverse(d1, sign)
        hm = term_matrix(h, n)
        touched = (abs(d1m @ hm) + abs(hm @ d1m)).diagonal()
        reps = [FockState(m, n) for m in range(1 << n) if touched[m] == 0]
        kernel = [FockState(m, n) for m in range(1 << n) if touched[m] != 0]
        r = Retract(n, d1, h, reps, kernel)
        r.checks = r.verify()
        if r.ok():
            return r
    raise ConstructionError(f"no sign of h satisfies the retract conditions for {d1}")


@dataclass
class ReducedComplex:
    basis: list[FockState]
    degrees: list[int]
    differential: dict[int, SparseMatrix]
    degree_shift_used: int
    truncation_order: int
    matrix: sp.csr_matrix = field(repr=False)

    def basis_in_degree(self, d: int) -> list[FockState]:
        return [s for s in self.basis if s.degree == d]

    def squares_to_zero(self) -> bool:
        return _is_zero(self.matrix @ self.matrix)

    def full_matrix(self) -> SparseMatrix:
        return SparseMatrix.from_scipy(self.matrix)

    def to_triplet_text(self) -> str:
        return self.full_matrix().to_triplet_text()

    def poincare(self, field: Optional[FieldSpec] = None) -> PoincarePolynomial:
        field = FieldSpec.two_prime(0) if field is None else field
        n = self.basis[0].sites if self.basis else 0
        k = -self.degree_shift_used
        counts = [sum(1 for s in self.basis if s.degree == d) for d in range(n + 1)]
        ranks = [rank(self.differential[d], field) for d in range(n + 1)]
        dims = [counts[d] - ranks[d] - (ranks[d + k] if d + k <= n else 0)
                for d in range(n + 1)]
        return PoincarePolynomial(dims)


def reduced_differential(r: Retract, d2: SuperchargeSpec) -> ReducedComplex:
    """Transfer ``d2`` to the d1-homology via ``pi sum_j (d2 h)^j d2 iota``.

    The Neumann series is cut at the first power of ``d2 h`` that vanishes as
    an operator, which makes the inverse of ``1 - d2 h`` exact.
    """
    n = r.n
    d2m = operator_matrix(d2, n)
    hm = r.h_matrix()
    i, p = r.inclusion(), r.projection()
    step = (d2m @ hm).tocsr()
    dim = 1 << n
    series = sp.identity(dim, dtype=np.int64, format="csr")
    power = series
    order = 0
    while True:
        power = (power @ step).tocsr()
        if _is_zero(power):
            break
        order += 1
        if order > n:
            raise DivergenceError("(d2 h)^k does not vanish for k <= n; 1 - d2 h is not invertible")
        series = series + power
    red = (p @ series @ d2m @ i).tocsr()
    red.eliminate_zeros()
    degs = [s.degree for s in r.representatives]
    index_by_deg: dict[int, list[int]] = {}
    for idx, dg in enumerate(degs):
        index_by_deg.setdefault(dg, []).append(idx)
    blocks: dict[int, SparseMatrix] = {}
    shift = d2.degree
    for d in range(n + 1):
        cols = index_by_deg.get(d, [])
        rows = index_by_deg.get(d + shift, []) if 0 <= d + shift <= n else []
        if rows and cols:
            blk = red[rows][:, cols]
            blocks[d] = SparseMatrix.from_scipy(blk)
        else:
            blocks[d] = SparseMatrix.zeros(len(rows), len(cols))
    out = ReducedComplex(list(r.representatives), degs, blocks, shift, order, red)
    if not out.squares_to_zero():
        raise ConstructionError("reduced differential does not square to zero")
    return out


def truncation_witness(r: Retract, d2: SuperchargeSpec) -> bool:
    """``h d2 h == 0`` on the whole space."""
    hm = r.h_matrix()
    return _is_zero(hm @ operator_matrix(d2, r.n) @ hm)


def kernel_avoidance(r: Retract, d2: SuperchargeSpec) -> bool:
    """``pi d2 h d2 iota == 0``: the second-order correction never survives projection."""
    d2m = operator_matrix(d2, r.n)
    return _is_zero(r.projection() @ d2m @ r.h_matrix() @ d2m @ r.inclusion())


def homology_via_hpl(Q: SuperchargeSpec, n: Optional[int] = None,
                     field: Optional[FieldSpec] = None) -> PoincarePolynomial:
    n = Q.sites if n is None else n
    if not Q.terms:
        return PoincarePolynomial([comb(n, d) for d in range(n + 1)])
    d1, d2 = split_last_term(Q)
    r = build_retract(d1, n)
    return reduced_differential(r, d2).poincare(field)


def decomposition_rhs(model: str, size: int,
                      field: Optional[FieldSpec] = None) -> PoincarePolynomial:
    """Suspended sum of brute-force polynomials of the two smaller chains."""
    if model == "nicolai":
        if size < 7 or size % 2 == 0:
            raise DomainError(f"Nicolai decomposition needs an odd size >= 7, got {size}")
        m = (size - 1) // 2
        near = poincare_polynomial(nicolai_supercharge(m - 1), field=field)
        far = poincare_polynomial(nicolai_supercharge(m - 2), field=field)
        return (near + suspend(near, 2) + suspend(far, 1) + suspend(far, 2)
                + suspend(far, 2) + suspend(far, 3))
    if model == "z2":
        if size < 3:
            raise DomainError(f"Z2 decomposition needs size >= 3, got {size}")
        near = poincare_polynomial(z2_supercharge(size - 2), field=field)
        far = poincare_polynomial(z2_supercharge(size - 3), field=field)
        return suspend(near, 1) + suspend(near, 1) + suspend(far, 1) + suspend(far, 2)
    raise DomainError(f"unknown model {model!r}")


def decomposition_check(model: str, size: int, field: Optional[FieldSpec] = None) -> bool:
    """Brute-force polynomial of ``size`` equals the suspended sum of smaller ones."""
    rhs = decomposition_rhs(model, size, field)
    Q = nicolai_supercharge((size - 1) // 2) if model == "nicolai" else z2_supercharge(size)
    return poincare_polynomial(Q, field=field) == rhs
