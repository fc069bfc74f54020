"""Sliced quantum propagators for quadratic potentials, with closed-form oracles.

The N-slice configuration integral of a quadratic action is Gaussian, so it
is evaluated exactly: the fluctuation determinant comes from the
Gelfand–Yaglom recursion and the exponent is the discrete action on the
discrete classical path.  Slices use left-point potentials,

    S_N = Σ_k [ m (x_{k+1} − x_k)² / (2ε) − ε V(x_k) ],

which makes the harmonic kernel converge at first order in ε.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import CausticError

_SIN_FLOOR = 1e-14


@dataclass(frozen=True)
class QuadraticPotential:
    """V(x) = v0 + v1 x + ½ v2 x²."""

    v0: float = 0.0
    v1: float = 0.0
    v2: float = 0.0
    kind: str = "quadratic"

    @classmethod
    def free(cls) -> "QuadraticPotential":
        return cls(kind="free")

    @classmethod
    def harmonic(cls, omega: float, m: float = 1.0) -> "QuadraticPotential":
        return cls(0.0, 0.0, m * omega * omega, kind="harmonic")

    def __call__(self, x):
        return self.v0 + self.v1 * x + 0.5 * self.v2 * x * x

    def omega(self, m: float) -> float:
        """Frequency of the oscillator part (0 for a free particle)."""
        if self.v2 < 0:
            raise ValueError("inverted oscillators have no real frequency")
        return math.sqrt(self.v2 / m)


@dataclass(frozen=True)
class DiscretizedAction:
    N: int
    t: float
    m: float = 1.0
    hbar: float = 1.0
    potential: QuadraticPotential = field(default_factory=QuadraticPotential.free)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("need at least two slices")
        if not self.t > 0:
            raise ValueError("slice step ε = t/N must be positive")
        if not self.hbar > 0:
            raise ValueError("ħ must be positive")
        if not self.m > 0:
            raise ValueError("mass must be positive")

    @property
    def eps(self) -> float:
        return self.t / self.N

    @classmethod
    def harmonic(cls, N: int, t: float, omega: float = 1.0, m: float = 1.0, hbar: float = 1.0):
        return cls(N, t, m, hbar, QuadraticPotential.harmonic(omega, m))

    @classmethod
    def free(cls, N: int, t: float, m: float = 1.0, hbar: float = 1.0):
        return cls(N, t, m, hbar, QuadraticPotential.free())

    def with_slices(self, N: int) -> "DiscretizedAction":
        return DiscretizedAction(N, self.t, self.m, self.hbar, self.potential)

    # the interior quadratic form (m/2ε)[xᵀAx − 2bᵀx + ...] --------------

    def tridiagonal(self):
        n = self.N - 1
        eps = self.eps
        diag = np.full(n, 2.0 - eps * eps * self.potential.v2 / self.m)
        off = np.full(max(n - 1, 0), -1.0)
        return diag, off

    def discrete_action(self, path: np.ndarray) -> float:
        x = np.asarray(path, dtype=float)
        eps = self.eps
        kinetic = float(np.sum(np.diff(x) ** 2)) * self.m / (2 * eps)
        return kinetic - eps * float(np.sum(self.potential(x[:-1])))


def fluctuation_minors(spec: DiscretizedAction) -> np.ndarray:
    """Gelfand–Yaglom leading minors ``D_0 .. D_{N-1}`` of the interior form."""
    diag, off = spec.tridiagonal()
    return kernels.gelfand_yaglom(diag, off)


def _check_minors(spec: DiscretizedAction, D: np.ndarray):
    # D_k ↔ the chain from x_0 to x_{k+1}; the first non-positive minor marks
    # the first focal point, past which the real square-root branch is lost
    bad = np.nonzero(D[1:] <= 0)[0]
    if bad.size:
        k = int(bad[0]) + 1
        time = (k + 1) * spec.eps
        raise CausticError(f"fluctuation determinant vanishes near t = {time:.6g}", time)


def classical_path(spec: DiscretizedAction, q0: float, q1: float) -> np.ndarray:
    """Stationary point of the sliced action with the endpoints attached."""
    diag, off = spec.tridiagonal()
    n = spec.N - 1
    b = np.full(n, spec.eps ** 2 * spec.potential.v1 / spec.m)
    b[0] += q0
    b[-1] += q1
    x = kernels.tridiag_solve(diag, off, b) if n else np.empty(0)
    return np.concatenate([[q0], x, [q1]])


@dataclass(frozen=True)
class KernelValue:
    amplitude: complex
    determinant: float
    action: float

    def __complex__(self):
        return complex(self.amplitude)


def qpi_kernel_details(spec: DiscretizedAction, q0: float, q1: float) -> KernelValue:
    D = fluctuation_minors(spec)
    _check_minors(spec, D)
    det = float(D[-1])
    S = spec.discrete_action(classical_path(spec, q0, q1))
    pref = math.sqrt(spec.m / (2 * math.pi * spec.hbar * spec.eps * det))
    amp = pref * np.exp(-1j * math.pi / 4) * np.exp(1j * S / spec.hbar)
    return KernelValue(complex(amp), det, S)


def qpi_kernel_quadratic(spec: DiscretizedAction, q0: float, q1: float) -> complex:
    """Exact N-slice propagator ``⟨q1| e^{-iHt/ħ} |q0⟩_N``."""
    return qpi_kernel_details(spec, q0, q1).amplitude


def free_kernel(m: float, hbar: float, t: float, q0: float, q1: float) -> complex:
    pref = math.sqrt(m / (2 * math.pi * hbar * t)) * np.exp(-1j * math.pi / 4)
    return complex(pref * np.exp(1j * m * (q1 - q0) ** 2 / (2 * hbar * t)))


def mehler_oracle(m: float, omega: float, hbar: float, t: float, q0: float, q1: float) -> complex:
    """Closed-form oscillator propagator, continued past focal points.

    The phase of the square root follows continuously from t → 0⁺: each
    half period adds −π/2.
    """
    if omega == 0:
        return free_kernel(m, hbar, t, q0, q1)
    s = math.sin(omega * t)
    if abs(s) < _SIN_FLOOR:
        raise CausticError(f"sin(ωt) vanishes at t = {t:.6g}", t)
    k = math.floor(omega * t / math.pi)
    pref = math.sqrt(m * omega / (2 * math.pi * hbar * abs(s)))
    phase = np.exp(-1j * math.pi / 4) * np.exp(-1j * math.pi * k / 2)
    expo = m * omega / (2 * hbar * s) * ((q0 * q0 + q1 * q1) * math.cos(omega * t) - 2 * q0 * q1)
    return complex(pref * phase * np.exp(1j * expo))


def oracle_for(spec: DiscretizedAction, q0: float, q1: float) -> complex:
    pot = spec.potential
    if pot.v1 or pot.v0:
        raise ValueError("oracle covers free and harmonic potentials only")
    return mehler_oracle(spec.m, pot.omega(spec.m), spec.hbar, spec.t, q0, q1)


def mehler_group_check(m: float, omega: float, hbar: float, t1: float, t2: float,
                       q0: float, q1: float, points: int = 4001) -> float:
    """|∫K(t2; q1, x)K(t1; x, q0)dx − K(t1+t2)| by quadrature.

    The integrand is an entire Gaussian in x, so the contour is tilted into
    the half plane where it decays and the trapezoid rule converges fast.
    """
    s1, s2 = math.sin(omega * t1), math.sin(omega * t2)
    coeff = m * omega / (2 * hbar) * (math.cos(omega * t1) / s1 + math.cos(omega * t2) / s2)
    tilt = math.pi / 8 if coeff > 0 else -math.pi / 8
    rot = np.exp(1j * tilt)
    width = math.sqrt(1.0 / (abs(coeff) * math.sin(2 * abs(tilt))))
    L = 12 * width + abs(q0) + abs(q1)
    s = np.linspace(-L, L, points)
    x = s * rot

    def K(t, a, b):
        sn = math.sin(omega * t)
        k = math.floor(omega * t / math.pi)
        pref = math.sqrt(m * omega / (2 * math.pi * hbar * abs(sn))) * np.exp(-1j * math.pi / 4 - 1j * math.pi * k / 2)
        return pref * np.exp(1j * m * omega / (2 * hbar * sn) * ((a * a + b * b) * math.cos(omega * t) - 2 * a * b))

    integrand = K(t2, x, q1) * K(t1, q0, x) * rot
    value = np.trapezoid(integrand, s) if hasattr(np, "trapezoid") else np.trapz(integrand, s)
    return float(abs(value - mehler_oracle(m, omega, hbar, t1 + t2, q0, q1)))


# ---------------------------------------------------------------------------
# comparison


@dataclass
class KernelRow:
    q0: float
    q1: float
    discrete: complex
    oracle: complex

    @property
    def modulus_error(self) -> float:
        return abs(abs(self.discrete) - abs(self.oracle)) / abs(self.oracle)

    @property
    def phase_error(self) -> float:
        return abs(float(np.angle(self.discrete / self.oracle)))

    @property
    def relative_error(self) -> float:
        return abs(self.discrete - self.oracle) / abs(self.oracle)


@dataclass
class KernelReport:
    N: int
    rows: list

    @property
    def max_modulus_error(self) -> float:
        return max(r.modulus_error for r in self.rows)

    @property
    def max_phase_error(self) -> float:
        return max(r.phase_error for r in self.rows)

    @property
    def max_relative_error(self) -> float:
        return max(r.relative_error for r in self.rows)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q0", "q1", "abs_k_discrete", "abs_k_oracle", "rel_error"])
            for r in self.rows:
                w.writerow([repr(float(r.q0)), repr(float(r.q1)), repr(abs(r.discrete)),
                            repr(abs(r.oracle)), repr(r.relative_error)])
        return path


def default_pairs() -> list:
    vals = (-1.0, -0.5, 0.0, 0.5, 1.0)
    return [(a, b) for a in vals for b in vals]


def kernel_compare(spec: DiscretizedAction, pairs: Iterable[Sequence[float]] | None = None) -> KernelReport:
    """Discrete kernel against the oracle on a set of endpoint pairs."""
    pairs = default_pairs() if pairs is None else list(pairs)
    rows = [KernelRow(q0, q1, qpi_kernel_quadratic(spec, q0, q1), oracle_for(spec, q0, q1))
            for q0, q1 in pairs]
    return KernelReport(spec.N, rows)


@dataclass
class ConvergenceReport:
    slices: list
    errors: list

    @property
    def ratios(self) -> list:
        return [a / b for a, b in zip(self.errors, self.errors[1:])]

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    @property
    def order(self) -> float:
        """Least-squares slope of log error against log N."""
        x = np.log(np.asarray(self.slices, float))
        y = np.log(np.asarray(self.errors, float))
        return float(-np.polyfit(x, y, 1)[0])


def kernel_convergence(spec: DiscretizedAction, slices: Sequence[int] = (512, 1024, 2048),
                       pairs: Iterable[Sequence[float]] | None = None) -> ConvergenceReport:
    pairs = default_pairs() if pairs is None else list(pairs)
    errs = [kernel_compare(spec.with_slices(N), pairs).max_relative_error for N in slices]
    return ConvergenceReport(list(slices), errs)
