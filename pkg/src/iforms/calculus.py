"""Graded derivations and algebra maps on iterated differential forms.

Derivations are descriptors: a multi-degree shift plus values on coordinate
functions and on raw generators.  Application to an arbitrary form extends
those values by additivity and the graded Leibniz rule, whose sign comes
from the patch sign rule.  The slot differentials, insertion operators,
Lie derivatives (graded commutator with the last differential) and the
slot-permutation automorphisms are all built on top of this.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import InputError
from .poly import Poly
from .algebra import (
    CONTACT,
    Factor,
    IForm,
    Monomial,
    RAW,
    mono_degree_vector,
    pairing_parity,
    raw_factor,
    slot_insert_sign,
    sort_slot_word,
    wedge_all,
)


def reembed(form: IForm, k: int) -> IForm:
    """Re-tag a form whose slots all fit below ``k`` as an arity-k form."""
    if form.k == k:
        return form
    for mono in form.terms:
        for f in mono:
            if f.slots and max(f.slots) > k:
                raise InputError(f"slot {max(f.slots)} does not fit in arity {k}")
    return IForm(form.patch, k, dict(form.terms))


class Derivation:
    """Graded derivation determined by values on coordinates and raw generators."""

    __slots__ = ("patch", "k", "shift", "_fn", "_gen", "label", "_cache")

    def __init__(self, patch, k: int, shift: Sequence[int], fn_value, gen_value, label: str = ""):
        self.patch = patch
        self.k = k
        self.shift = tuple(shift)
        if len(self.shift) != k:
            raise InputError("shift length must equal arity")
        self._fn = fn_value
        self._gen = gen_value
        self.label = label
        self._cache: dict = {}

    @property
    def total_degree(self) -> int:
        return sum(self.shift)

    def value_on_coordinate(self, index: int) -> IForm:
        key = ((), index)
        val = self._cache.get(key)
        if val is None:
            val = self._fn(index)
            self._cache[key] = val
        return val

    def value_on_generator(self, slots: tuple[int, ...], index: int) -> IForm:
        if not slots:
            return self.value_on_coordinate(index)
        key = (slots, index)
        val = self._cache.get(key)
        if val is None:
            val = self._gen(slots, index)
            self._cache[key] = val
        return val

    def _value_on_factor(self, f: Factor) -> IForm:
        if f.kind != RAW:
            raise InputError("derivations act on the raw generator alphabet; convert adapted forms first")
        return self.value_on_generator(f.slots, f.ref)

    def apply(self, form: IForm) -> IForm:
        if form.patch is not self.patch:
            raise InputError("derivation and form live over different patches")
        if form.k != self.k:
            raise InputError(f"arity mismatch: derivation {self.k}, form {form.k}")
        patch, k, rule = self.patch, self.k, self.patch.sign_rule
        out = IForm.zero(patch, k)
        for mono, coeff in form.terms.items():
            # chain rule on the polynomial coefficient
            for name in sorted(coeff.variables()):
                val = self.value_on_coordinate(patch.coord_index(name))
                if val.is_zero():
                    continue
                piece = val.scale(coeff.diff(name))
                if mono:
                    piece = piece.wedge(IForm(patch, k, {mono: Poly.const(1)}))
                out = out + piece
            # Leibniz over the wedge factors
            prefix_deg = (0,) * k
            for i, f in enumerate(mono):
                val = self._value_on_factor(f)
                if not val.is_zero():
                    piece = val
                    if i:
                        piece = IForm(patch, k, {mono[:i]: Poly.const(1)}).wedge(piece)
                    if i + 1 < len(mono):
                        piece = piece.wedge(IForm(patch, k, {mono[i + 1 :]: Poly.const(1)}))
                    piece = piece.scale(coeff)
                    if pairing_parity(rule, self.shift, prefix_deg):
                        piece = -piece
                    out = out + piece
                prefix_deg = tuple(
                    d + (1 if s + 1 in f.slots else 0) for s, d in enumerate(prefix_deg)
                )
        return out

    def __call__(self, form: IForm) -> IForm:
        return self.apply(form)

    def __repr__(self):
        return f"Derivation({self.label or 'anonymous'}, shift={self.shift})"


# -- basic constructors --------------------------------------------------------


def differential(patch, k: int, m: int) -> Derivation:
    """The m-th slot differential, an odd derivation of multi-degree e_m."""
    if not 1 <= m <= k:
        raise InputError(f"slot {m} out of range 1..{k}")
    rule = patch.sign_rule
    shift = tuple(1 if i == m - 1 else 0 for i in range(k))

    def fn(idx: int) -> IForm:
        return IForm.from_factor(patch, k, raw_factor((m,), idx))

    def gen(slots: tuple[int, ...], idx: int) -> IForm:
        if m in slots:
            return IForm.zero(patch, k)
        sign = slot_insert_sign(rule, m, slots)
        new = tuple(sorted(slots + (m,)))
        return IForm.from_factor(patch, k, raw_factor(new, idx), Poly.const(sign))

    return Derivation(patch, k, shift, fn, gen, label=f"d_{m}")


def apply_d_set(patch, k: int, slots: Sequence[int], form: IForm) -> IForm:
    """Apply the differentials of a slot set, smallest slot first (innermost)."""
    out = form
    for m in sorted(slots):
        out = differential(patch, k, m).apply(out)
    return out


def zero_derivation(patch, k: int) -> Derivation:
    z = IForm.zero(patch, k)
    return Derivation(patch, k, (0,) * k, lambda idx: z, lambda slots, idx: z, label="0")


def _values_lookup(patch, k: int, values: Mapping) -> Callable[[int], IForm]:
    table: dict[int, IForm] = {}
    for key, val in values.items():
        idx = patch.coord_index(key) if isinstance(key, str) else key
        if isinstance(val, Poly):
            val = IForm.from_poly(patch, k, val)
        table[idx] = reembed(val, k)
    zero = IForm.zero(patch, k)
    return lambda idx: table.get(idx, zero)


def coordinate_field(patch, k: int, values: Mapping, shift: Sequence[int] | None = None,
                     label: str = "") -> Derivation:
    """Derivation from coordinate values, lifted to commute with every differential.

    The generator value on d[K](c) is d[K] applied to the coordinate value;
    this is the standard lift of a vector field to the form algebra.
    """
    fn = _values_lookup(patch, k, values)
    shift = tuple(shift) if shift is not None else (0,) * k

    def gen(slots: tuple[int, ...], idx: int) -> IForm:
        return apply_d_set(patch, k, slots, fn(idx))

    return Derivation(patch, k, shift, fn, gen, label=label or "field")


def generator_values_derivation(patch, k: int, shift: Sequence[int],
                                fn_values: Mapping, gen_values: Mapping,
                                label: str = "") -> Derivation:
    """Derivation from explicit value tables (extension is a function of these only)."""
    fn = _values_lookup(patch, k, fn_values)
    table: dict[tuple, IForm] = {}
    for (slots, key), val in gen_values.items():
        idx = patch.coord_index(key) if isinstance(key, str) else key
        table[(tuple(sorted(slots)), idx)] = reembed(val, k)
    zero = IForm.zero(patch, k)

    def gen(slots: tuple[int, ...], idx: int) -> IForm:
        return table.get((slots, idx), zero)

    return Derivation(patch, k, tuple(shift), fn, gen, label=label or "table")


# -- insertion operators ---------------------------------------------------------


def insertion(patch, k: int, values: Mapping, slots_removed: Sequence[int],
              value_shift: Sequence[int] | None = None, label: str = "") -> Derivation:
    """Insertion of a function-level derivation along a slot set.

    ``values`` gives X on coordinate functions (coordinate -> arity-k form).
    The resulting derivation sends d[K'](f) to d[K' minus K](X(f)) when K is
    contained in K' and to 0 otherwise; for empty K it restricts to X on
    functions.
    """
    K = tuple(sorted(set(slots_removed)))
    for s in K:
        if not 1 <= s <= k:
            raise InputError(f"slot {s} out of range 1..{k}")
    fn_raw = _values_lookup(patch, k, values)
    zero = IForm.zero(patch, k)
    if value_shift is None:
        value_shift = (0,) * k
    shift = tuple(v - (1 if i + 1 in K else 0) for i, v in enumerate(value_shift))

    def fn(idx: int) -> IForm:
        return fn_raw(idx) if not K else zero

    kset = set(K)

    def gen(gslots: tuple[int, ...], idx: int) -> IForm:
        if not kset.issubset(gslots):
            return zero
        val = fn_raw(idx)
        if val.is_zero():
            return zero
        return apply_d_set(patch, k, tuple(s for s in gslots if s not in kset), val)

    return Derivation(patch, k, shift, fn, gen, label=label or f"i^{K}")


def slot_differential_values(patch, k: int, m: int) -> dict[int, IForm]:
    """Values of d_m restricted to coordinate functions."""
    return {
        idx: IForm.from_factor(patch, k, raw_factor((m,), idx))
        for idx in range(len(patch.coords))
    }


def slot_insertion(patch, k: int, m: int, slots_removed: Sequence[int]) -> Derivation:
    """The insertion of d_m restricted to functions along a slot set."""
    shift = tuple(1 if i == m - 1 else 0 for i in range(k))
    return insertion(patch, k, slot_differential_values(patch, k, m), slots_removed,
                     value_shift=shift, label=f"i_{m}^{tuple(sorted(set(slots_removed)))}")


# -- commutators and Lie derivatives --------------------------------------------


def commutator(a: Derivation, b: Derivation, label: str = "") -> Derivation:
    """Graded commutator a b - (-1)^{<|a|,|b|>} b a, again a derivation."""
    if a.patch is not b.patch or a.k != b.k:
        raise InputError("commutator needs derivations of one algebra")
    patch, k = a.patch, a.k
    sign = -1 if pairing_parity(patch.sign_rule, a.shift, b.shift) else 1
    shift = tuple(x + y for x, y in zip(a.shift, b.shift))

    def fn(idx: int) -> IForm:
        return a.apply(b.value_on_coordinate(idx)) - b.apply(a.value_on_coordinate(idx)).scale(sign)

    def gen(slots: tuple[int, ...], idx: int) -> IForm:
        return a.apply(b.value_on_generator(slots, idx)) - b.apply(a.value_on_generator(slots, idx)).scale(sign)

    return Derivation(patch, k, shift, fn, gen, label=label or f"[{a.label},{b.label}]")


def insertion_along_last(sym: Derivation, k: int) -> Derivation:
    """Insertion into the last slot of a derivation of the first k-1 slots.

    ``sym`` acts on the subalgebra generated by slots 1..k-1; the insertion
    kills that subalgebra and evaluates sym under one removed last-slot
    differential.
    """
    if sym.k != k - 1:
        raise InputError(f"symmetry must act on arity {k - 1}")
    patch = sym.patch
    zero = IForm.zero(patch, k)
    shift = tuple(sym.shift) + (0,)
    shift = tuple(v - (1 if i == k - 1 else 0) for i, v in enumerate(shift))

    def fn(idx: int) -> IForm:
        return zero

    def gen(slots: tuple[int, ...], idx: int) -> IForm:
        if k not in slots:
            return zero
        rest = tuple(s for s in slots if s != k)
        return reembed(sym.value_on_generator(rest, idx), k)

    return Derivation(patch, k, shift, fn, gen, label=f"i_({sym.label})^{{{k}}}")


def lie_along_last(sym: Derivation, k: int) -> Derivation:
    """Lie derivative along a first-(k-1)-slots derivation: [insertion, d_k]."""
    return commutator(insertion_along_last(sym, k), differential(sym.patch, k, k),
                      label=f"L_({sym.label})")


# -- slot permutations -----------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n} given by its tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise InputError(f"not a permutation of 1..{len(self.images)}: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other."""
        if self.n != other.n:
            raise InputError("permutation size mismatch")
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, img in enumerate(self.images, start=1):
            inv[img - 1] = i
        return Permutation(tuple(inv))

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def transposition(n: int, a: int, b: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[a - 1], images[b - 1] = b, a
        return Permutation(tuple(images))

    def extend(self, n: int) -> "Permutation":
        """Extend by fixed points up to size n."""
        if n < self.n:
            raise InputError("cannot shrink a permutation")
        return Permutation(self.images + tuple(range(self.n + 1, n + 1)))


def kappa(perm: Permutation, form: IForm) -> IForm:
    """The algebra automorphism relabeling differential slots along a permutation."""
    k = form.k
    if perm.n != k:
        raise InputError(f"permutation of size {perm.n} on arity {k}")
    patch = form.patch
    rule = patch.sign_rule
    out: dict[Monomial, Poly] = {}
    from .algebra import canonicalize_factor_sequence  # local to avoid cycle noise

    for mono, coeff in form.terms.items():
        total_sign = 1
        new_factors: list[Factor] = []
        for f in mono:
            if f.kind != RAW:
                raise InputError("convert adapted forms to the raw alphabet before permuting slots")
            word = [perm(s) for s in sorted(f.slots, reverse=True)]
            sign, slots = sort_slot_word(rule, word)
            total_sign *= sign
            new_factors.append(raw_factor(slots, f.ref))
        sign2, new_mono = canonicalize_factor_sequence(rule, new_factors)
        if new_mono is None:
            continue
        c = coeff * (total_sign * sign2)
        acc = out.get(new_mono)
        acc = c if acc is None else acc + c
        if acc.is_zero():
            out.pop(new_mono, None)
        else:
            out[new_mono] = acc
    return IForm(patch, k, out)


def kappa_swap_last(form: IForm, m: int) -> IForm:
    """Relabel by the transposition of slot m with the last slot."""
    if m == form.k:
        return form
    return kappa(Permutation.transposition(form.k, m, form.k), form)


# -- the covariant tensor embedding ----------------------------------------------


def iota(patch, k: int, tensor: Sequence[tuple[Poly, Sequence[Poly]]]) -> IForm:
    """Embed a covariant k-tensor, given as sum of coeff * df_1 (x) ... (x) df_k.

    Tensor slot j is realized through the differential of slot k+1-j, so the
    image is homogeneous of multi-degree (1,...,1).
    """
    out = IForm.zero(patch, k)
    for coeff, funcs in tensor:
        if len(funcs) != k:
            raise InputError(f"tensor term arity {len(funcs)} != {k}")
        parts = []
        for j, f in enumerate(funcs, start=1):
            df = differential(patch, k, k + 1 - j).apply(IForm.from_poly(patch, k, f))
            parts.append(df)
        out = out + wedge_all(parts).scale(coeff)
    return out


def subsets_of(values: Sequence[int], min_size: int = 0) -> list[tuple[int, ...]]:
    """All subsets as sorted tuples, ordered by (size, lexicographic)."""
    from itertools import combinations

    vals = sorted(values)
    out: list[tuple[int, ...]] = []
    for size in range(min_size, len(vals) + 1):
        out.extend(combinations(vals, size))
    return out


def is_covariant_tensor(form: IForm) -> bool:
    """Characterization test for the image of the tensor embedding.

    A homogeneous form of multi-degree (1,...,1) is a covariant tensor iff
    every insertion of a slot differential along a slot set of size >= 2
    kills it, for all slots below the last.
    """
    k = form.k
    deg = form.degree_vector()
    if deg != (1,) * k:
        raise InputError(f"covariant tensor test needs multi-degree {(1,) * k}, got {deg}")
    for m in range(1, k):
        for K in subsets_of(range(1, k + 1), min_size=2):
            if not slot_insertion(form.patch, k, m, K).apply(form).is_zero():
                return False
    return True
