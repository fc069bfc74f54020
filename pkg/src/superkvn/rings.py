"""Coefficient rings for supernumbers.

A Grassmann algebra is parametrized by the commutative ring its coefficients
live in.  Three kinds are used throughout the package:

* ``ComplexField`` -- machine complex numbers, for numeric suites;
* ``ExactRing`` with no generators -- exact Gaussian rationals;
* ``ExactRing`` with generators -- sparse exact polynomials, e.g. in ``t``
  (paths) or in the phase-space and conjugate coordinates.

Exact rings are thin adapters over :mod:`sympy.polys.rings`.  Zero testing is
truthiness everywhere, which both sympy ring elements and Python numbers
support.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement, PolyRing, ring

from .errors import NoInverse, NotNilpotent

__all__ = [
    "ComplexField",
    "ExactRing",
    "COMPLEX",
    "exact_scalars",
    "polynomial_ring",
    "gaussian",
    "to_complex",
]


def gaussian(x) -> object:
    """Convert a Python number (int, Fraction, float, complex) to ``QQ_I``."""
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, complex):
        return QQ_I(QQ(Fraction(x.real)), QQ(Fraction(x.imag)))
    if isinstance(x, float):
        return QQ_I(QQ(Fraction(x)), 0)
    if isinstance(x, Fraction):
        return QQ_I(QQ(x.numerator, x.denominator), 0)
    if isinstance(x, int):
        return QQ_I(x, 0)
    return QQ_I.convert(x)


def to_complex(x) -> complex:
    """Best-effort conversion of an exact scalar to a Python complex."""
    if isinstance(x, PolyElement):
        if not x:
            return 0j
        if not x.is_ground:
            raise TypeError(f"non-constant polynomial {x} has no scalar value")
        x = x.LC
    if isinstance(x, (int, float, complex, Fraction)):
        return complex(x)
    if hasattr(x, "x") and hasattr(x, "y"):  # GaussianRational / GaussianInteger
        return complex(float(x.x), float(x.y))
    return complex(sympy.N(sympy.sympify(x)))


class ComplexField:
    """Machine complex numbers.  Not exact; exponentials are available."""

    tag = "complex"
    exact = False
    zero = 0j
    one = 1 + 0j
    gens: tuple = ()

    def convert(self, x) -> complex:
        if isinstance(x, complex):
            return x
        return to_complex(x)

    def inverse(self, x) -> complex:
        if x == 0:
            raise NoInverse("division by zero body")
        return 1 / x

    def exp(self, x) -> complex:
        return cmath.exp(x)

    def is_constant(self, x) -> bool:
        return True

    def diff(self, x, name):
        raise KeyError(name)

    def show(self, x) -> str:
        return repr(x)

    def __eq__(self, other):
        return isinstance(other, ComplexField)

    def __hash__(self):
        return hash("ComplexField")

    def __repr__(self):
        return "ComplexField()"


COMPLEX = ComplexField()


class ExactRing:
    """Exact sparse polynomial ring (possibly with zero generators)."""

    exact = True

    def __init__(self, names: Sequence[str] = (), domain=QQ_I):
        self.names = tuple(names)
        self.domain = domain
        self.R: PolyRing = ring(list(self.names), domain)[0]
        self.gens = tuple(self.R.gens)
        self._index = {n: i for i, n in enumerate(self.names)}
        self.zero = self.R.zero
        self.one = self.R.one

    @property
    def tag(self) -> str:
        if not self.names:
            return f"exact-scalars[{self.domain}]"
        return f"polynomials[{','.join(self.names)}]"

    def gen(self, name: str) -> PolyElement:
        return self.gens[self._index[name]]

    def convert(self, x) -> PolyElement:
        R = self.R
        if isinstance(x, PolyElement):
            if x.ring == R:
                return x
            if not x:
                return R.zero
            if x.ring.domain != self.domain:
                return R.from_dict(
                    {self._remap(x.ring, m): self.domain.convert(c, x.ring.domain)
                     for m, c in x.items()})
            return R.from_dict({self._remap(x.ring, m): c for m, c in x.items()})
        if isinstance(x, (bool, int, Fraction, float, complex)):
            return R.ground_new(self.domain.convert(gaussian(x), QQ_I))
        if isinstance(x, sympy.Basic):
            return R.from_expr(x) if x.free_symbols else R.ground_new(self.domain.from_sympy(x))
        return R.ground_new(self.domain.convert(x))

    def _remap(self, source: PolyRing, monom):
        out = [0] * len(self.names)
        for sym, e in zip(source.symbols, monom):
            if e:
                try:
                    out[self._index[str(sym)]] = e
                except KeyError:
                    raise ValueError(f"generator {sym} not present in {self.tag}") from None
        return tuple(out)

    def is_constant(self, x) -> bool:
        return x.is_ground

    def inverse(self, x) -> PolyElement:
        if not x:
            raise NoInverse("division by zero body")
        if not x.is_ground:
            raise NoInverse(f"body {x} is not a unit of {self.tag}")
        return self.R.ground_new(self.domain.quo(self.domain.one, x.LC))

    def exp(self, x) -> PolyElement:
        if not x:
            return self.R.one
        raise NotNilpotent(f"exact ring {self.tag} cannot exponentiate nonzero body {x}")

    def diff(self, x: PolyElement, name: str) -> PolyElement:
        return x.diff(self.gen(name))

    def show(self, x) -> str:
        return str(sympy.nsimplify(x.as_expr()) if not self.domain.is_QQ_I else x.as_expr())

    def __eq__(self, other):
        return isinstance(other, ExactRing) and self.R == other.R

    def __hash__(self):
        return hash(self.R)

    def __repr__(self):
        return f"ExactRing({list(self.names)!r}, {self.domain})"


@lru_cache(maxsize=None)
def polynomial_ring(names: tuple = (), domain=QQ_I) -> ExactRing:
    return ExactRing(names, domain)


def exact_scalars(domain=QQ_I) -> ExactRing:
    return polynomial_ring((), domain)

