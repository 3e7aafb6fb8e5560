"""Fermionic Fock space on an open chain and the built-in supercharges.

A basis monomial ``c†_{i1} ... c†_{ik}`` (``i1 < ... < ik``) is stored as an
occupation bitmask where site ``j`` (1-indexed) lives in bit ``j - 1``.

Both letter kinds pick up the sign ``(-1)^(number of occupied sites below j)``:
``c_j`` acts as an odd derivation and ``c†_j`` as left multiplication
followed by reordering into ascending-site form.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, SiteRangeError


def _parity_below(mask: int, bit: int) -> int:
    return (mask & ((1 << bit) - 1)).bit_count() & 1


@dataclass(frozen=True, order=True)
class FockState:
    occupation: int
    sites: int

    def __post_init__(self) -> None:
        if self.sites < 0:
            raise SiteRangeError(f"negative site count {self.sites}")
        if self.occupation < 0 or self.occupation >> self.sites:
            raise SiteRangeError(
                f"occupation {self.occupation:b} has bits outside sites 1..{self.sites}")

    @classmethod
    def from_sites(cls, n: int, occupied: Iterable[int]) -> "FockState":
        mask = 0
        for j in occupied:
            if not 1 <= j <= n:
                raise SiteRangeError(f"site {j} not in 1..{n}")
            mask |= 1 << (j - 1)
        return cls(mask, n)

    @property
    def degree(self) -> int:
        return self.occupation.bit_count()

    def site_list(self) -> list[int]:
        return [j + 1 for j in range(self.sites) if self.occupation >> j & 1]

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.site_list())) + "}"


class Kind(enum.Enum):
    ANNIHILATE = "a"
    CREATE = "c"


@dataclass(frozen=True)
class OperatorLetter:
    site: int
    kind: Kind

    def __post_init__(self) -> None:
        if self.site < 1:
            raise SiteRangeError(f"site {self.site} must be >= 1")

    def dagger(self) -> "OperatorLetter":
        other = Kind.CREATE if self.kind is Kind.ANNIHILATE else Kind.ANNIHILATE
        return OperatorLetter(self.site, other)

    def __str__(self) -> str:
        return f"{self.kind.value}{self.site}"


def annihilate(site: int) -> OperatorLetter:
    return OperatorLetter(site, Kind.ANNIHILATE)


def create(site: int) -> OperatorLetter:
    return OperatorLetter(site, Kind.CREATE)


@dataclass(frozen=True)
class MonomialTerm:
    """Signed ordered product of letters; the rightmost letter acts first."""

    letters: tuple[OperatorLetter, ...]
    coefficient: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(self.letters))
        keys = [(l.site, l.kind) for l in self.letters]
        if len(set(keys)) != len(keys):
            raise DomainError(f"repeated letter in term {self}")

    @property
    def degree(self) -> int:
        return sum(1 if l.kind is Kind.CREATE else -1 for l in self.letters)

    @property
    def max_site(self) -> int:
        return max((l.site for l in self.letters), default=0)

    def sites(self) -> tuple[int, ...]:
        return tuple(l.site for l in self.letters)

    def __str__(self) -> str:
        body = " ".join(map(str, self.letters))
        if self.coefficient == 1:
            return body
        return f"{self.coefficient}*{body}"


@dataclass(frozen=True)
class SuperchargeSpec:
    sites: int
    terms: tuple[MonomialTerm, ...]
    degree: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.degree != self.degree:
                raise DomainError(f"term {t} has degree {t.degree}, expected {self.degree}")
            if t.max_site > self.sites:
                raise SiteRangeError(f"term {t} uses a site beyond n={self.sites}")

    @classmethod
    def from_terms(cls, sites: int, terms: Sequence[MonomialTerm],
                   degree: Optional[int] = None) -> "SuperchargeSpec":
        if degree is None:
            if not terms:
                raise DomainError("degree must be given for an empty supercharge")
            degree = terms[0].degree
        return cls(sites, tuple(terms), degree)

    def __str__(self) -> str:
        return " + ".join(map(str, self.terms)) or "0"


class SignedState(NamedTuple):
    sign: int
    state: FockState


def basis_states(n: int, d: int) -> list[FockState]:
    """All degree-``d`` monomials on ``n`` sites in ascending bitmask order."""
    return [FockState(int(m), n) for m in basis_masks(n, d)]


def basis_masks(n: int, d: int) -> np.ndarray:
    if n < 0 or not 0 <= d <= n:
        raise SiteRangeError(f"degree {d} not in 0..{n}")
    if n <= 26:
        allm = np.arange(1 << n, dtype=np.int64)
        return allm[np.bitwise_count(allm) == d]
    out = np.fromiter((sum(1 << b for b in c) for c in itertools.combinations(range(n), d)),
                      dtype=np.int64, count=comb(n, d))
    out.sort()
    return out


def apply_letter(letter: OperatorLetter, s: FockState) -> Optional[SignedState]:
    if letter.site > s.sites:
        raise SiteRangeError(f"site {letter.site} beyond n={s.sites}")
    bit = letter.site - 1
    occupied = s.occupation >> bit & 1
    if occupied == (letter.kind is Kind.CREATE):
        return None
    sign = -1 if _parity_below(s.occupation, bit) else 1
    return SignedState(sign, FockState(s.occupation ^ (1 << bit), s.sites))


def apply_term(term: MonomialTerm, s: FockState) -> Optional[SignedState]:
    sign = term.coefficient
    for letter in reversed(term.letters):
        res = apply_letter(letter, s)
        if res is None:
            return None
        sign *= res.sign
        s = res.state
    return SignedState(sign, s)


def apply_supercharge(Q: SuperchargeSpec, s: FockState) -> list[tuple[int, FockState]]:
    acc: dict[int, int] = {}
    for term in Q.terms:
        res = apply_term(term, s)
        if res is not None:
            key = res.state.occupation
            acc[key] = acc.get(key, 0) + res.sign
    return [(c, FockState(m, s.sites)) for m, c in sorted(acc.items()) if c]


def term_action(term: MonomialTerm, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`apply_term` over an array of bitmasks.

    Returns ``(positions, coefficients, images)`` for the inputs the term
    does not kill.
    """
    masks = np.asarray(masks, dtype=np.int64)
    pos = np.arange(masks.size)
    cur = masks.copy()
    sign = np.full(masks.size, term.coefficient, dtype=np.int64)
    for l in reversed(term.letters):
        bit = l.site - 1
        occ = (cur >> bit) & 1
        alive = occ == (1 if l.kind is Kind.ANNIHILATE else 0)
        pos, cur, sign = pos[alive], cur[alive], sign[alive]
        par = np.bitwise_count(cur & ((1 << bit) - 1)) & 1
        sign = np.where(par == 1, -sign, sign)
        cur = cur ^ (1 << bit)
    return pos, sign, cur


def operator_matrix(Q: SuperchargeSpec, n: Optional[int] = None) -> sp.csr_matrix:
    """Q on the full 2^n-dimensional space, basis indexed by bitmask."""
    n = Q.sites if n is None else n
    dim = 1 << n
    masks = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    for term in Q.terms:
        pos, sign, img = term_action(term, masks)
        rows.append(img)
        cols.append(pos)
        vals.append(sign)
    if rows:
        r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    else:
        r = c = v = np.empty(0, dtype=np.int64)
    m = sp.coo_matrix((v, (r, c)), shape=(dim, dim), dtype=np.int64).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    return m


def nicolai_supercharge(m: int) -> SuperchargeSpec:
    """``sum_{i=1}^m c_{2i-1} c†_{2i} c_{2i+1}`` on ``2m+1`` sites."""
    if m < 1:
        raise DomainError(f"Nicolai model needs m >= 1, got {m}")
    terms = [MonomialTerm((annihilate(2 * i - 1), create(2 * i), annihilate(2 * i + 1)))
             for i in range(1, m + 1)]
    return SuperchargeSpec(2 * m + 1, tuple(terms), -1)


def z2_supercharge(n: int) -> SuperchargeSpec:
    """``sum_{i=1}^{n-2} c_i c_{i+1} c_{i+2}`` on ``n`` sites (zero for n < 3)."""
    if n < 0:
        raise DomainError(f"negative site count {n}")
    terms = [MonomialTerm((annihilate(i), annihilate(i + 1), annihilate(i + 2)))
             for i in range(1, n - 1)]
    return SuperchargeSpec(n, tuple(terms), -3)


def adjoint(Q: SuperchargeSpec) -> SuperchargeSpec:
    terms = tuple(MonomialTerm(tuple(l.dagger() for l in reversed(t.letters)), t.coefficient)
                  for t in Q.terms)
    return SuperchargeSpec(Q.sites, terms, -Q.degree)


def check_nilpotent(Q: SuperchargeSpec, n: Optional[int] = None) -> bool:
    """Apply Q twice to every basis state and test for exact cancellation."""
    n = Q.sites if n is None else n
    if n < Q.sites:
        raise SiteRangeError(f"supercharge needs {Q.sites} sites, got n={n}")
    q = operator_matrix(Q, n)
    sq = q @ q
    sq.eliminate_zeros()
    return sq.nnz == 0
