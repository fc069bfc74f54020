"""Finite Grassmann algebras over a pluggable coefficient ring.

A :class:`Supernumber` is stored as a map from generator bitmasks to nonzero
coefficients.  Bit ``i`` stands for the ``i``-th declared generator, and a
monomial is always read in declaration order, so two supernumbers are equal
exactly when their term maps are equal.

Conventions fixed here and used everywhere else:

* derivatives with respect to odd generators act from the left unless the
  ``right_`` variant is called;
* ``berezin_integrate(x, [a, b])`` is the iterated integral
  ``∫da db x = ∂_a ∂_b x``, the rightmost measure acting first.  With the
  supertime generators declared as ``(θ, θ̄)`` this gives ``∫dθ dθ̄ θ̄θ = 1``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from . import _pykernels, kernels
from .errors import AlgebraMismatch, NoInverse, NotNilpotent, UnknownGenerator
from .rings import COMPLEX, exact_scalars

__all__ = [
    "GrassmannAlgebra",
    "Supernumber",
    "multiply",
    "berezin_integrate",
    "left_derivative",
    "right_derivative",
    "invert",
    "nilpotent_exp",
    "body_soul",
    "evaluate_polynomial",
]


def _popcount(x: int) -> int:
    return x.bit_count()


class GrassmannAlgebra:
    """Exterior algebra on an ordered, finite set of odd generators."""

    def __init__(self, generators: Sequence[str], ring=None):
        labels = tuple(generators)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate generator labels in {labels}")
        self.labels = labels
        self.ring = ring if ring is not None else exact_scalars()
        self._index = {g: i for i, g in enumerate(labels)}
        self._mul = kernels.graded_mul if len(labels) <= 63 else _pykernels.graded_mul

    @property
    def ngens(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownGenerator(f"{label!r} is not a generator of {self}") from None

    def __contains__(self, label) -> bool:
        return label in self._index

    def __eq__(self, other):
        return (
            isinstance(other, GrassmannAlgebra)
            and self.labels == other.labels
            and self.ring == other.ring
        )

    def __hash__(self):
        return hash((self.labels, self.ring))

    def __repr__(self):
        return f"GrassmannAlgebra({list(self.labels)!r}, {self.ring!r})"

    # construction -----------------------------------------------------

    def element(self, terms: Mapping[int, object]) -> "Supernumber":
        conv = self.ring.convert
        out = {}
        for m, c in terms.items():
            c = conv(c)
            if c:
                out[m] = c
        return Supernumber(self, out)

    def scalar(self, value) -> "Supernumber":
        c = self.ring.convert(value)
        return Supernumber(self, {0: c} if c else {})

    @property
    def zero(self) -> "Supernumber":
        return Supernumber(self, {})

    @property
    def one(self) -> "Supernumber":
        return self.scalar(1)

    def gen(self, label: str) -> "Supernumber":
        return Supernumber(self, {1 << self.index(label): self.ring.one})

    def gens(self, *labels: str) -> tuple:
        labels = labels or self.labels
        return tuple(self.gen(g) for g in labels)

    def monomial(self, labels: Iterable[str], coefficient=1) -> "Supernumber":
        """Product of the named generators in the given order, times a coefficient."""
        mask = 0
        sign = 1
        for g in labels:
            bit = 1 << self.index(g)
            if mask & bit:
                return self.zero
            # moving the new factor past every already-present higher generator
            if _popcount(mask >> self.index(g)) & 1:
                sign = -sign
            mask |= bit
        c = self.ring.convert(coefficient)
        if sign < 0:
            c = -c
        return Supernumber(self, {mask: c} if c else {})

    def labels_of(self, mask: int) -> tuple:
        return tuple(g for i, g in enumerate(self.labels) if mask >> i & 1)

    def convert(self, x) -> "Supernumber":
        """Embed a supernumber (matched by generator label) or a scalar."""
        if not isinstance(x, Supernumber):
            return self.scalar(x)
        if x.algebra == self:
            return x
        conv = self.ring.convert
        if x.algebra.labels == self.labels:
            return self.element({m: conv(c) for m, c in x.terms.items()})
        out = {}
        for m, c in x.terms.items():
            # labels keep their relative order only if the target order agrees;
            # rebuild through `monomial` to get the sign right in general
            labels = x.algebra.labels_of(m)
            target = 0
            for g in labels:
                target |= 1 << self.index(g)
            sign = self.monomial(labels).terms.get(target)
            c = conv(c)
            if sign is not None and sign != self.ring.one:
                c = -c
            if c:
                out[target] = out.get(target, self.ring.zero) + c
        return Supernumber(self, {m: c for m, c in out.items() if c})

    def with_ring(self, ring) -> "GrassmannAlgebra":
        return GrassmannAlgebra(self.labels, ring)

    def extended(self, extra: Sequence[str], ring=None, front: bool = False) -> "GrassmannAlgebra":
        labels = tuple(extra) + self.labels if front else self.labels + tuple(extra)
        return GrassmannAlgebra(labels, ring if ring is not None else self.ring)


class Supernumber:
    """Immutable element of a :class:`GrassmannAlgebra`."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: GrassmannAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = terms

    # arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Supernumber":
        if isinstance(other, Supernumber):
            if other.algebra is not self.algebra and other.algebra != self.algebra:
                raise AlgebraMismatch(f"{other.algebra} vs {self.algebra}")
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Supernumber(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return Supernumber(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Supernumber):
            c = self.algebra.ring.convert(other)
            out = {}
            for m, v in self.terms.items():
                v = v * c
                if v:
                    out[m] = v
            return Supernumber(self.algebra, out)
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraMismatch(f"{other.algebra} vs {self.algebra}")
        return Supernumber(self.algebra, self.algebra._mul(self.terms, other.terms))

    def __rmul__(self, other):
        # scalars are even and central
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, Supernumber):
            return self * invert(other)
        return self * self.algebra.ring.inverse(self.algebra.ring.convert(other))

    def __pow__(self, k: int):
        if k < 0:
            return invert(self) ** (-k)
        out = self.algebra.one
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, Supernumber):
            return self.algebra == other.algebra and self.terms == other.terms
        try:
            return self.terms == self.algebra.scalar(other).terms
        except Exception:
            return NotImplemented

    def __hash__(self):
        return hash((self.algebra, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # structure --------------------------------------------------------

    def parity(self):
        """0 (even), 1 (odd), or ``None`` for mixed; zero counts as even."""
        ps = {_popcount(m) & 1 for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def is_even(self) -> bool:
        return self.parity() == 0

    def is_odd(self) -> bool:
        return bool(self.terms) and self.parity() == 1

    def even_part(self) -> "Supernumber":
        return Supernumber(self.algebra, {m: c for m, c in self.terms.items() if not _popcount(m) & 1})

    def odd_part(self) -> "Supernumber":
        return Supernumber(self.algebra, {m: c for m, c in self.terms.items() if _popcount(m) & 1})

    def grade_involution(self) -> "Supernumber":
        return Supernumber(
            self.algebra, {m: (-c if _popcount(m) & 1 else c) for m, c in self.terms.items()}
        )

    def body(self):
        return self.terms.get(0, self.algebra.ring.zero)

    def soul(self) -> "Supernumber":
        return Supernumber(self.algebra, {m: c for m, c in self.terms.items() if m})

    def coefficient(self, labels: Sequence[str] = ()):
        """Coefficient of the monomial written as the given ordered product."""
        mono = self.algebra.monomial(labels)
        if not mono.terms:
            return self.algebra.ring.zero
        (mask, sign), = mono.terms.items()
        c = self.terms.get(mask, self.algebra.ring.zero)
        return c if sign == self.algebra.ring.one else -c

    def map_coefficients(self, f, algebra: GrassmannAlgebra | None = None) -> "Supernumber":
        algebra = algebra or self.algebra
        return algebra.element({m: f(c) for m, c in self.terms.items()})

    def max_degree(self) -> int:
        return max((_popcount(m) for m in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda k: (_popcount(k), k)):
            labels = self.algebra.labels_of(m)
            c = self.terms[m]
            parts.append(f"({self.algebra.ring.show(c)})" + ("*" + "*".join(labels) if labels else ""))
        return " + ".join(parts)

    # convenience wrappers ----------------------------------------------

    def d(self, label: str) -> "Supernumber":
        return left_derivative(self, label)

    def inverse(self) -> "Supernumber":
        return invert(self)

    def exp(self) -> "Supernumber":
        return nilpotent_exp(self)


# ---------------------------------------------------------------------------
# operations


def multiply(x: Supernumber, y: Supernumber) -> Supernumber:
    if not isinstance(x, Supernumber) or not isinstance(y, Supernumber):
        raise TypeError("multiply expects two supernumbers")
    return x * y


def left_derivative(x: Supernumber, label: str) -> Supernumber:
    """∂_g acting from the left: move g to the front, then strike it."""
    i = x.algebra.index(label)
    bit = 1 << i
    below = bit - 1
    out = {}
    for m, c in x.terms.items():
        if m & bit:
            out[m ^ bit] = -c if _popcount(m & below) & 1 else c
    return Supernumber(x.algebra, out)


def right_derivative(x: Supernumber, label: str) -> Supernumber:
    """Derivative acting from the right: move g to the end, then strike it."""
    i = x.algebra.index(label)
    bit = 1 << i
    out = {}
    for m, c in x.terms.items():
        if m & bit:
            out[m ^ bit] = -c if _popcount(m >> (i + 1)) & 1 else c
    return Supernumber(x.algebra, out)


def berezin_integrate(x: Supernumber, variables: Sequence[str]) -> Supernumber:
    """Iterated Berezin integral ``∫dv_1 … dv_k x``; the last measure acts first."""
    for g in variables:
        x.algebra.index(g)
    for g in reversed(list(variables)):
        x = left_derivative(x, g)
    return x


def body_soul(x: Supernumber):
    return x.body(), x.soul()


def invert(x: Supernumber) -> Supernumber:
    """Two-sided inverse via the terminating geometric series in the soul."""
    ring = x.algebra.ring
    b = x.body()
    if not b:
        raise NoInverse("a supernumber with zero body has no inverse")
    binv = ring.inverse(b)
    u = x.soul() * binv
    term = x.algebra.one
    total = x.algebra.one
    while True:
        term = -(term * u)
        if not term:
            break
        total = total + term
    return total * binv


def nilpotent_exp(x: Supernumber) -> Supernumber:
    """exp(x) = exp(body) · Σ soul^k / k!, the series terminating by nilpotency."""
    ring = x.algebra.ring
    b = x.body()
    s = x.soul()
    eb = ring.exp(b) if b else ring.one  # raises NotNilpotent on exact rings
    total = x.algebra.one
    power = x.algebra.one
    k = 0
    while True:
        k += 1
        power = power * s
        if not power:
            break
        total = total + power * ring.convert(Fraction(1, factorial(k)))
    return total * eb


# ---------------------------------------------------------------------------
# substitution of polynomial coefficients


def evaluate_polynomial(poly, values: Sequence, one, convert=None):
    """Evaluate a sympy sparse polynomial at commuting values.

    ``values`` is aligned with ``poly.ring.gens`` and may hold ring elements or
    even supernumbers; ``one`` is the unit of the value type and ``convert``
    maps a ground coefficient into it (defaults to the supernumber ring).
    """
    if convert is None:
        convert = one.algebra.ring.convert if isinstance(one, Supernumber) else (lambda c: c)
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        v = cache.get(key)
        if v is None:
            v = values[i] if e == 1 else power(i, e - 1) * values[i]
            cache[key] = v
        return v

    total = one * 0
    for monom, coeff in poly.terms():
        term = one
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        total = total + term * convert(coeff)
    return total


def _ground(coeff, like: Supernumber):
    return like.algebra.ring.convert(coeff)


def substitute(
    x: Supernumber,
    target: GrassmannAlgebra,
    even: Mapping[str, object] | None = None,
    odd: Mapping[str, Supernumber] | None = None,
) -> Supernumber:
    """Homomorphic substitution into ``target``.

    Ring generators named in ``even`` are replaced by the given values (even
    supernumbers of ``target`` or scalars); other ring generators are carried
    over into the target ring.  Odd generators named in ``odd`` are replaced by
    the given supernumbers; the rest are embedded by label.
    """
    even = dict(even or {})
    odd = dict(odd or {})
    src = x.algebra
    src_ring = src.ring
    names = getattr(src_ring, "names", ())
    mapped = [n in even for n in names]
    values = [target.convert(even[n]) if n in even else None for n in names]
    gen_images = [odd[g] if g in odd else target.gen(g) for g in src.labels]
    for g, img in zip(src.labels, gen_images):
        if img.algebra != target:
            raise AlgebraMismatch(f"image of {g} is not in the target algebra")
    pcache: dict = {}

    def power(i, e):
        key = (i, e)
        v = pcache.get(key)
        if v is None:
            v = values[i] if e == 1 else power(i, e - 1) * values[i]
            pcache[key] = v
        return v

    total = target.zero
    for m, c in x.terms.items():
        mono = target.one
        for i in range(src.ngens):
            if m >> i & 1:
                mono = mono * gen_images[i]
        if not mono:
            continue
        if src_ring is COMPLEX or not names:
            total = total + mono * target.ring.convert(c)
            continue
        coeff = target.zero
        for monom, a in c.terms():
            rest = [0] * len(names)
            term = None
            for i, e in enumerate(monom):
                if not e:
                    continue
                if mapped[i]:
                    p = power(i, e)
                    term = p if term is None else term * p
                else:
                    rest[i] = e
            ground = src_ring.R({tuple(rest): a})
            g = target.ring.convert(ground)
            coeff = coeff + (target.scalar(g) if term is None else term * g)
        total = total + coeff * mono
    return total
