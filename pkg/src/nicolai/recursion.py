"""Ground-state generating functions from the Nicolai and Z2 recurrences.

Nicolai, sizes ``2m+1``::

    P_{2m+1} = (1 + z^2) P_{2m-1} + (z + 2z^2 + z^3) P_{2m-3}

seeded with ``P_3 = 1 + 2z + 2z^2 + z^3`` and ``P_5 = 1 + 3z + 6z^2 + 6z^3 + 3z^4 + z^5``.

Z2 Nicolai, sizes ``n``::

    P_n = 2z P_{n-2} + (z + z^2) P_{n-3}

seeded with ``P_0 = 1``, ``P_1 = 1 + z``, ``P_2 = 1 + 2z + z^2``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import DomainError
from .poly import PoincarePolynomial

NICOLAI_SEEDS = {
    3: PoincarePolynomial([1, 2, 2, 1]),
    5: PoincarePolynomial([1, 3, 6, 6, 3, 1]),
}
Z2_SEEDS = {
    0: PoincarePolynomial([1]),
    1: PoincarePolynomial([1, 1]),
    2: PoincarePolynomial([1, 2, 1]),
}
NICOLAI_COUNT_SEEDS = {3: 6, 5: 20}
Z2_COUNT_SEEDS = {0: 1, 1: 2, 2: 4}

_NIC_NEAR = PoincarePolynomial([1, 0, 1])
_NIC_FAR = PoincarePolynomial([0, 1, 2, 1])
_Z2_NEAR = PoincarePolynomial([0, 2])
_Z2_FAR = PoincarePolynomial([0, 1, 1])

MODELS = ("nicolai", "z2")


def _nicolai_polys(m: int) -> list[PoincarePolynomial]:
    out = [NICOLAI_SEEDS[3], NICOLAI_SEEDS[5]]
    while len(out) < m:
        out.append(_NIC_NEAR * out[-1] + _NIC_FAR * out[-2])
    return out[:m]


def _z2_polys(n: int) -> list[PoincarePolynomial]:
    out = [Z2_SEEDS[0], Z2_SEEDS[1], Z2_SEEDS[2]]
    while len(out) <= n:
        out.append(_Z2_NEAR * out[-2] + _Z2_FAR * out[-3])
    return out[: n + 1]


def nicolai_poly(m: int) -> PoincarePolynomial:
    """Poincaré polynomial of the Nicolai chain with ``2m+1`` sites."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return _nicolai_polys(m)[-1]


def z2_poly(n: int) -> PoincarePolynomial:
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return _z2_polys(n)[-1]


def nicolai_count(m: int) -> int:
    """Ground-state count from ``a_{2m+1} = 2 a_{2m-1} + 4 a_{2m-3}``."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    a, b = NICOLAI_COUNT_SEEDS[3], NICOLAI_COUNT_SEEDS[5]
    if m == 1:
        return a
    for _ in range(m - 2):
        a, b = b, 2 * b + 4 * a
    return b


def z2_count(n: int) -> int:
    """Ground-state count from ``a_n = 2 a_{n-2} + 2 a_{n-3}``."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    seq = [Z2_COUNT_SEEDS[0], Z2_COUNT_SEEDS[1], Z2_COUNT_SEEDS[2]]
    while len(seq) <= n:
        seq.append(2 * seq[-2] + 2 * seq[-3])
    return seq[n]


def model_poly(model: str, size: int) -> PoincarePolynomial:
    """Polynomial by model name and number of sites."""
    if model == "nicolai":
        if size < 3 or size % 2 == 0:
            raise DomainError(f"Nicolai sizes are odd and >= 3, got {size}")
        return nicolai_poly((size - 1) // 2)
    if model == "z2":
        return z2_poly(size)
    raise DomainError(f"unknown model {model!r}")


def model_count(model: str, size: int) -> int:
    if model == "nicolai":
        if size < 3 or size % 2 == 0:
            raise DomainError(f"Nicolai sizes are odd and >= 3, got {size}")
        return nicolai_count((size - 1) // 2)
    if model == "z2":
        return z2_count(size)
    raise DomainError(f"unknown model {model!r}")


@dataclass
class RecursionTable:
    model: str
    polynomials: dict[int, PoincarePolynomial] = field(default_factory=dict)
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def sizes(self) -> list[int]:
        return sorted(self.polynomials)

    def consistent(self) -> bool:
        return all(self.counts[s] == self.polynomials[s](1) for s in self.polynomials)

    def rows(self) -> list[tuple[int, int, list[int]]]:
        return [(s, self.counts[s], list(self.polynomials[s].coeffs)) for s in self.sizes]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size", "count", "coefficients"])
        for s, c, coeffs in self.rows():
            w.writerow([s, c, " ".join(map(str, coeffs))])
        return buf.getvalue()

    def to_json_obj(self) -> list[dict]:
        return [{"size": s, "count": str(c), "coefficients": [str(x) for x in coeffs]}
                for s, c, coeffs in self.rows()]

    def to_json(self) -> str:
        return json.dumps({"model": self.model, "rows": self.to_json_obj()}, indent=2)


def build_table(model: str, max_size: int) -> RecursionTable:
    """All sizes up to ``max_size``, one linear pass per sequence.

    Counts come from the count recurrences, independently of the polynomials.
    """
    table = RecursionTable(model)
    if model == "nicolai":
        if max_size < 3:
            raise DomainError(f"smallest Nicolai size is 3, got {max_size}")
        m_max = (max_size - 1) // 2
        for m, p in enumerate(_nicolai_polys(m_max), start=1):
            table.polynomials[2 * m + 1] = p
        a, b = NICOLAI_COUNT_SEEDS[3], NICOLAI_COUNT_SEEDS[5]
        table.counts[3] = a
        if m_max >= 2:
            table.counts[5] = b
        for m in range(3, m_max + 1):
            a, b = b, 2 * b + 4 * a
            table.counts[2 * m + 1] = b
    elif model == "z2":
        if max_size < 0:
            raise DomainError(f"smallest Z2 size is 0, got {max_size}")
        table.polynomials = dict(enumerate(_z2_polys(max_size)))
        seq = [Z2_COUNT_SEEDS[0], Z2_COUNT_SEEDS[1], Z2_COUNT_SEEDS[2]]
        while len(seq) <= max_size:
            seq.append(2 * seq[-2] + 2 * seq[-3])
        table.counts = dict(enumerate(seq[: max_size + 1]))
    else:
        raise DomainError(f"unknown model {model!r}")
    return table
