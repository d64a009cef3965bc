"""Exact multivariate polynomials over the rationals.

Coefficient arithmetic for the form engine.  Monomials are name-sorted
tuples of (variable, exponent) pairs; the zero polynomial is the empty
term dict, which is the unique representation of 0.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

Mono = tuple  # tuple[tuple[str, int], ...], variables name-sorted, exponents >= 1

_ONE_MONO: Mono = ()


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out: dict[str, int] = dict(a)
    for name, exp in b:
        out[name] = out.get(name, 0) + exp
    return tuple(sorted(out.items()))


def mono_degree(mono: Mono) -> int:
    return sum(exp for _, exp in mono)


class Poly:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, Fraction] | None = None):
        self.terms: dict[Mono, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    self.terms[mono] = coeff

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def const(value) -> "Poly":
        c = Fraction(value)
        return Poly({_ONE_MONO: c}) if c else Poly()

    @staticmethod
    def var(name: str, exp: int = 1) -> "Poly":
        if exp == 0:
            return Poly.const(1)
        return Poly({((name, exp),): Fraction(1)})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(_ONE_MONO, Fraction(0))

    def variables(self) -> set[str]:
        out: set[str] = set()
        for mono in self.terms:
            for name, _ in mono:
                out.add(name)
        return out

    def total_degree(self) -> int:
        """Maximum term degree; 0 for the zero polynomial."""
        return max((mono_degree(m) for m in self.terms), default=0)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            c = out.get(mono, Fraction(0)) + coeff
            if c:
                out[mono] = c
            else:
                out.pop(mono, None)
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            if not f:
                return Poly()
            return Poly({m: c * f for m, c in self.terms.items()})
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = out.get(m, Fraction(0)) + c1 * c2
                if c:
                    out[m] = c
                else:
                    out.pop(m, None)
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff(self, name: str) -> "Poly":
        out: dict[Mono, Fraction] = {}
        for mono, coeff in self.terms.items():
            for i, (var, exp) in enumerate(mono):
                if var != name:
                    continue
                rest = mono[:i] + ((var, exp - 1),) + mono[i + 1 :] if exp > 1 else mono[:i] + mono[i + 1 :]
                c = out.get(rest, Fraction(0)) + coeff * exp
                if c:
                    out[rest] = c
                else:
                    out.pop(rest, None)
                break
        return Poly(out)

    # -- comparison / iteration ----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def items(self) -> Iterator[tuple[Mono, Fraction]]:
        return iter(self.terms.items())

    def sorted_terms(self, varkey=None) -> list[tuple[Mono, Fraction]]:
        """Terms in descending graded order; `varkey` maps a variable name to a sort key."""
        if varkey is None:
            varkey = lambda name: name

        def monokey(mono: Mono):
            return (mono_degree(mono), tuple(sorted(((varkey(n), e) for n, e in mono))))

        return sorted(self.terms.items(), key=lambda t: monokey(t[0]), reverse=True)

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = [str(coeff)] + [f"{n}^{e}" if e > 1 else n for n, e in mono]
            parts.append("*".join(factors))
        return "Poly(" + " + ".join(parts) + ")"


def poly_sum(polys: Iterable[Poly]) -> Poly:
    out = Poly()
    for p in polys:
        out = out + p
    return out
