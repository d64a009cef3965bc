"""Multi-graded commutative algebra of iterated differential forms.

A form over a coordinate patch is a finite sum of terms

    polynomial coefficient  x  wedge monomial of generators,

where a generator is either a raw factor ``d[K](coordinate)`` (the slot
set K applied to a coordinate function) or, in the adapted alphabet used
by the Cartan machinery, a contact generator tied to a contact form of
the patch.  Every generator carries the multi-degree given by the
indicator vector of its slot set; monomials are kept sorted under a
global factor order, with re-orderings tracked by Koszul signs.

The sign rule is isolated in :func:`pairing_parity` / :func:`pair_factors`
so the whole engine can be switched between the total-degree convention
(default; distinct differentials anticommute) and the componentwise-dot
convention (distinct differentials commute).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import InputError
from .poly import Poly, mono_degree

RAW = 0
CONTACT = 1

SIGN_TOTAL = "total"
SIGN_DOT = "dot"


class Factor(NamedTuple):
    """One wedge factor: ``d[K](coordinate)`` or an adapted contact generator.

    ``slots`` is the strictly increasing slot set K.  For raw factors ``ref``
    is the patch coordinate index; for contact factors it is the pair
    (flavor slot, contact index), the flavor being the slot whose Cartan
    ideal the generator belongs to.
    """

    slots: tuple[int, ...]
    kind: int
    ref: object

    @property
    def total_degree(self) -> int:
        return len(self.slots)


Monomial = tuple  # tuple[Factor, ...] in canonical order

ONE_MONO: Monomial = ()


def raw_factor(slots: Sequence[int], coord_index: int) -> Factor:
    return Factor(tuple(sorted(slots)), RAW, coord_index)


def contact_factor(slots: Sequence[int], flavor: int, index: int) -> Factor:
    return Factor(tuple(sorted(slots)), CONTACT, (flavor, index))


# -- Koszul signs -------------------------------------------------------------


def pairing_parity(rule: str, deg_a: Sequence[int], deg_b: Sequence[int]) -> int:
    """Parity (0 or 1) of the Koszul pairing of two multi-degrees."""
    if rule == SIGN_TOTAL:
        return (sum(deg_a) * sum(deg_b)) & 1
    if rule == SIGN_DOT:
        return sum(a * b for a, b in zip(deg_a, deg_b)) & 1
    raise InputError(f"unknown sign rule {rule!r}")


def pair_factors(rule: str, a: Factor, b: Factor) -> int:
    """Parity of the pairing of two generator degrees (indicator vectors)."""
    if rule == SIGN_TOTAL:
        return (len(a.slots) * len(b.slots)) & 1
    return len(set(a.slots) & set(b.slots)) & 1


def slot_insert_sign(rule: str, m: int, slots: Iterable[int]) -> int:
    """Sign of moving one extra differential d_m into a canonical slot word."""
    if rule == SIGN_DOT:
        return 1
    count = sum(1 for j in slots if j > m)
    return -1 if count & 1 else 1


def sort_slot_word(rule: str, word: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort a differential application word into canonical order with its sign.

    The word lists slots outermost-first; the canonical word is strictly
    decreasing (slot 1 applied innermost).  Returns (sign, sorted slots
    increasing).  A repeated slot gives sign 0 (the square of a differential).
    """
    letters = list(word)
    parity = 0
    for i in range(1, len(letters)):
        j = i
        while j > 0 and letters[j - 1] < letters[j]:
            letters[j - 1], letters[j] = letters[j], letters[j - 1]
            if rule == SIGN_TOTAL:
                parity ^= 1
            j -= 1
    for i in range(1, len(letters)):
        if letters[i] == letters[i - 1]:
            return 0, ()
    return (-1 if parity else 1), tuple(reversed(letters))


def canonicalize_factor_sequence(rule: str, factors: Sequence[Factor]) -> tuple[int, Monomial | None]:
    """Sort factors into the global order, tracking the Koszul sign.

    Returns (sign, monomial); (0, None) when the product vanishes because a
    factor of odd self-pairing repeats.
    """
    items = list(factors)
    parity = 0
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            parity ^= pair_factors(rule, items[j - 1], items[j])
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for i in range(1, len(items)):
        if items[i] == items[i - 1] and pair_factors(rule, items[i], items[i]):
            return 0, None
    return (-1 if parity else 1), tuple(items)


def merge_monomials(rule: str, left: Monomial, right: Monomial) -> tuple[int, Monomial | None]:
    """Wedge two canonical monomials; Koszul sign from interleaving."""
    if not left:
        return 1, right
    if not right:
        return 1, left
    return canonicalize_factor_sequence(rule, left + right)


def mono_degree_vector(mono: Monomial, k: int) -> tuple[int, ...]:
    deg = [0] * k
    for f in mono:
        for s in f.slots:
            deg[s - 1] += 1
    return tuple(deg)


def mono_total_degree(mono: Monomial) -> int:
    return sum(len(f.slots) for f in mono)


# -- the form type ------------------------------------------------------------


class IForm:
    """An iterated differential form: polynomial-coefficient terms over monomials.

    Immutable by convention; all operations return new forms.
    """

    __slots__ = ("patch", "k", "terms")

    def __init__(self, patch, k: int, terms: dict[Monomial, Poly]):
        self.patch = patch
        self.k = k
        self.terms = terms

    # -- constructors --------------------------------------------------------

    @staticmethod
    def make(patch, k: int, terms: dict[Monomial, Poly]) -> "IForm":
        return IForm(patch, k, {m: c for m, c in terms.items() if not c.is_zero()})

    @staticmethod
    def zero(patch, k: int) -> "IForm":
        return IForm(patch, k, {})

    @staticmethod
    def from_poly(patch, k: int, poly: Poly) -> "IForm":
        return IForm.make(patch, k, {ONE_MONO: poly})

    @staticmethod
    def constant(patch, k: int, value) -> "IForm":
        return IForm.from_poly(patch, k, Poly.const(value))

    @staticmethod
    def from_factor(patch, k: int, factor: Factor, coeff: Poly | None = None) -> "IForm":
        if max(factor.slots) > k:
            raise InputError(f"slot {max(factor.slots)} exceeds arity {k}")
        return IForm.make(patch, k, {(factor,): coeff if coeff is not None else Poly.const(1)})

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IForm)
            and self.patch is other.patch
            and self.k == other.k
            and self.terms == other.terms
        )

    __hash__ = None

    def sorted_terms(self) -> list[tuple[Monomial, Poly]]:
        return sorted(self.terms.items(), key=lambda t: t[0])

    def degree_vector(self) -> tuple[int, ...]:
        """Multi-degree of a homogeneous form (error if mixed)."""
        comps = self.homogeneous_components()
        if not comps:
            return (0,) * self.k
        if len(comps) > 1:
            raise InputError("form is not homogeneous")
        return comps[0][0]

    def is_homogeneous(self) -> bool:
        return len(self.homogeneous_components()) <= 1

    def homogeneous_components(self) -> list[tuple[tuple[int, ...], "IForm"]]:
        """Split into homogeneous multi-degree pieces; empty list for 0."""
        by_deg: dict[tuple[int, ...], dict[Monomial, Poly]] = {}
        for mono, coeff in self.terms.items():
            by_deg.setdefault(mono_degree_vector(mono, self.k), {})[mono] = coeff
        return [(deg, IForm(self.patch, self.k, t)) for deg, t in sorted(by_deg.items())]

    def max_coeff_degree(self) -> int:
        return max((c.total_degree() for c in self.terms.values()), default=0)

    def coordinates_used(self) -> set[str]:
        names: set[str] = set()
        for mono, coeff in self.terms.items():
            names |= coeff.variables()
            for f in mono:
                if f.kind == RAW:
                    names.add(self.patch.coords[f.ref].name)
        return names

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other: "IForm"):
        if self.patch is not other.patch:
            raise InputError("forms live over different patches")
        if self.k != other.k:
            raise InputError(f"arity mismatch: {self.k} vs {other.k}")

    def __add__(self, other: "IForm") -> "IForm":
        self._check_compatible(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            c = out.get(mono)
            c = coeff if c is None else c + coeff
            if c.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = c
        return IForm(self.patch, self.k, out)

    def __neg__(self) -> "IForm":
        return IForm(self.patch, self.k, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "IForm") -> "IForm":
        return self + (-other)

    def scale(self, factor) -> "IForm":
        """Multiply by a Poly / Fraction / int scalar."""
        if isinstance(factor, (int, Fraction)):
            factor = Poly.const(factor)
        out: dict[Monomial, Poly] = {}
        for mono, coeff in self.terms.items():
            c = coeff * factor
            if not c.is_zero():
                out[mono] = c
        return IForm(self.patch, self.k, out)

    def wedge(self, other: "IForm") -> "IForm":
        self._check_compatible(other)
        rule = self.patch.sign_rule
        out: dict[Monomial, Poly] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, mono = merge_monomials(rule, m1, m2)
                if mono is None:
                    continue
                c = c1 * c2
                if sign < 0:
                    c = -c
                acc = out.get(mono)
                acc = c if acc is None else acc + c
                if acc.is_zero():
                    out.pop(mono, None)
                else:
                    out[mono] = acc
        return IForm(self.patch, self.k, out)

    def __mul__(self, other):
        if isinstance(other, IForm):
            return self.wedge(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __xor__(self, other: "IForm") -> "IForm":
        return self.wedge(other)

    def __repr__(self):
        return f"IForm({render_form(self)})"

    def __str__(self):
        return render_form(self)


def wedge(a: IForm, b: IForm) -> IForm:
    return a.wedge(b)


def wedge_all(forms: Sequence[IForm]) -> IForm:
    if not forms:
        raise InputError("empty wedge")
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def form_sum(patch, k: int, forms: Iterable[IForm]) -> IForm:
    out = IForm.zero(patch, k)
    for f in forms:
        out = out + f
    return out


# -- the canonical generator representation (spec: canonicalize_generator) ----


def canonicalize_generator(patch, k: int, coordinate: str, application_word: Sequence[int]):
    """Canonical form of applying differentials to a coordinate in a given order.

    ``application_word`` lists slot indices outermost-first (the leftmost
    entry is applied last).  Returns (sign, Factor); a repeated slot
    annihilates the generator, reported as (0, None) rather than an error.
    """
    if not application_word:
        raise InputError("empty application sequence")
    for s in application_word:
        if not 1 <= s <= k:
            raise InputError(f"slot {s} out of range 1..{k}")
    sign, slots = sort_slot_word(patch.sign_rule, application_word)
    if sign == 0:
        return 0, None
    idx = patch.coord_index(coordinate)
    return sign, raw_factor(slots, idx)


# -- rendering ----------------------------------------------------------------


def render_fraction(value: Fraction) -> str:
    return str(value)


def render_poly(poly: Poly, patch=None) -> str:
    """Expanded polynomial rendering, terms in descending graded order."""
    if poly.is_zero():
        return "0"
    if patch is not None:
        varkey = lambda name: (patch.coord_index(name),)
    else:
        varkey = lambda name: name
    parts: list[str] = []
    for mono, coeff in poly.sorted_terms(varkey):
        body = "*".join(f"{n}^{e}" if e > 1 else n for n, e in sorted(mono, key=lambda t: varkey(t[0])))
        mag = abs(coeff)
        if not body:
            piece = render_fraction(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{render_fraction(mag)}*{body}"
        if not parts:
            parts.append(piece if coeff > 0 else "-" + piece)
        else:
            parts.append((" + " if coeff > 0 else " - ") + piece)
    return "".join(parts)


def render_factor(factor: Factor, patch, k: int) -> str:
    slots = ",".join(str(s) for s in factor.slots)
    if factor.kind == RAW:
        return f"d[{slots}]({patch.coords[factor.ref].name})"
    flavor, index = factor.ref
    base = f"w{index}" if flavor == k else f"w{index}@{flavor}"
    rest = tuple(s for s in factor.slots if s != flavor)
    if not rest:
        return base
    return f"d[{','.join(str(s) for s in rest)}]({base})"


def render_form(form: IForm) -> str:
    """Canonical deterministic rendering; the golden-file format."""
    if form.is_zero():
        return "0"
    patch, k = form.patch, form.k
    out: list[str] = []
    for mono, coeff in form.sorted_terms():
        body = " ^ ".join(render_factor(f, patch, k) for f in mono)
        if not mono:
            piece = render_poly(coeff, patch)
            negated = False
        elif len(coeff.terms) > 1:
            piece = f"({render_poly(coeff, patch)}) * {body}"
            negated = False
        else:
            ((pmono, c),) = coeff.terms.items()
            mag_poly = Poly({pmono: abs(c)})
            if mag_poly == 1:
                piece = body
            else:
                piece = f"{render_poly(mag_poly, patch)} * {body}"
            negated = c < 0
        if not out:
            out.append(("-" if negated else "") + piece)
        else:
            if not mono:
                out.append(" + " + piece if not piece.startswith("-") else " - " + piece[1:])
            else:
                out.append((" - " if negated else " + ") + piece)
    return "".join(out)
