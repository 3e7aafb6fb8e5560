"""Integer polynomials in one variable, used for Poincaré polynomials."""

from __future__ import annotations

from typing import Iterable, Sequence, Union

from .errors import DomainError


class PoincarePolynomial:
    """Polynomial with big-integer coefficients, ``coeffs[i]`` multiplying ``z**i``.

    Trailing zeros are dropped, so equality is coefficient-wise.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()) -> None:
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)

    @classmethod
    def monomial(cls, k: int, coefficient: int = 1) -> "PoincarePolynomial":
        if k < 0:
            raise DomainError(f"negative exponent {k}")
        return cls([0] * k + [coefficient])

    @property
    def degree(self) -> int:
        """Index of the top nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def padded(self, length: int) -> list[int]:
        if length < len(self.coeffs):
            raise ValueError(f"polynomial of degree {self.degree} does not fit {length} slots")
        return list(self.coeffs) + [0] * (length - len(self.coeffs))

    def __call__(self, z: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    evaluate = __call__

    def __add__(self, other: "PoincarePolynomial") -> "PoincarePolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return PoincarePolynomial([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    def __mul__(self, other: Union["PoincarePolynomial", int]) -> "PoincarePolynomial":
        if isinstance(other, int):
            return PoincarePolynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return PoincarePolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return PoincarePolynomial(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "PoincarePolynomial":
        """Multiply by ``z**k``; negative ``k`` must not push a nonzero term below degree 0."""
        if k >= 0:
            return PoincarePolynomial([0] * k + list(self.coeffs))
        if any(self.coeffs[: -k]):
            raise DomainError(f"shift by {k} produces a negative degree")
        return PoincarePolynomial(self.coeffs[-k:])

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def is_palindromic(self) -> bool:
        c = self.coeffs
        lo = next((i for i, x in enumerate(c) if x), 0)
        body = c[lo:]
        return body == body[::-1]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PoincarePolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self == PoincarePolynomial(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"PoincarePolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                base = "z" if i == 1 else f"z^{i}"
                terms.append(base if c == 1 else f"{c}{base}")
        return " + ".join(terms) or "0"


def poly(coeffs: Sequence[int]) -> PoincarePolynomial:
    return PoincarePolynomial(coeffs)


def suspend(P: PoincarePolynomial, k: int) -> PoincarePolynomial:
    """Grading shift by ``k``: multiplies the Poincaré polynomial by ``z**k``."""
    return P.shift(k)
