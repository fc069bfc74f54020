"""Koopman–von Neumann waves on a (q, p) grid and transport of forms.

The Liouvillian is a first-order operator, so ``i∂_tψ = L̂ψ`` is solved
exactly by characteristics: ``ψ(φ, t) = ψ0(Φ_{-t}(φ))``.  Each grid node is
traced backwards through the Hamiltonian flow (all nodes in one vectorized
integration) and the initial data are read off by Keys cubic interpolation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatch, SupportEscape
from .integrate import dopri45
from .phase_flow import HamiltonianSystem, PolynomialObservable, compile_polynomials, hamilton_flow

ESCAPE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class GridSpec:
    qmin: float = -6.0
    qmax: float = 6.0
    nq: int = 256
    pmin: float = -6.0
    pmax: float = 6.0
    np: int = 256
    dt: float | None = None
    total_time: float | None = None

    def __post_init__(self):
        if self.nq < 8 or self.np < 8:
            raise ValueError("grids need at least 8 points per axis")
        if not (self.qmax > self.qmin and self.pmax > self.pmin):
            raise ValueError("grid bounds must be increasing")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("time step must be positive")

    @property
    def dq(self) -> float:
        return (self.qmax - self.qmin) / (self.nq - 1)

    @property
    def dp(self) -> float:
        return (self.pmax - self.pmin) / (self.np - 1)

    @property
    def cell(self) -> float:
        return self.dq * self.dp

    def axes(self):
        return np.linspace(self.qmin, self.qmax, self.nq), np.linspace(self.pmin, self.pmax, self.np)

    def mesh(self):
        q, p = self.axes()
        return np.meshgrid(q, p, indexing="ij")

    def courant(self, H: PolynomialObservable, dt: float) -> float:
        """Largest number of cells a node moves in one step of length ``dt``."""
        v = HamiltonianSystem(H).field(np.stack(self.mesh()))
        speed = float(np.max(np.abs(v))) if v.size else 0.0
        return speed * abs(dt) / min(self.dq, self.dp)

    def check_speed(self, H: PolynomialObservable, dt: float):
        # characteristics are exact, so the only bound is that one step stays
        # within one box length
        c = self.courant(H, dt)
        if c > max(self.nq, self.np):
            raise ValueError(f"time step {dt} gives Courant number {c:.3g} on a "
                             f"{self.nq}x{self.np} grid; use a smaller step")

    def steps_for(self, t: float) -> int:
        if self.dt is None:
            return 1
        return max(1, int(np.ceil(abs(t) / self.dt - 1e-12)))


@dataclass
class KvNWave:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.nq, self.grid.np):
            raise DimensionMismatch(f"values have shape {self.values.shape}, grid is "
                                    f"{(self.grid.nq, self.grid.np)}")

    @classmethod
    def from_function(cls, grid: GridSpec, f: Callable) -> "KvNWave":
        Q, P = grid.mesh()
        return cls(grid, f(Q, P))

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def l1_density(self) -> float:
        return float(self.density.sum() * self.grid.cell)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.density.sum() * self.grid.cell))

    def boundary_max(self) -> float:
        v = np.abs(self.values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))

    def to_csv(self, path) -> Path:
        """Rows (q, p, Re ψ, Im ψ, ρ) in grid order."""
        path = Path(path)
        Q, P = self.grid.mesh()
        rho = self.density
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "p", "re_psi", "im_psi", "rho"])
            for i in range(self.grid.nq):
                for j in range(self.grid.np):
                    v = self.values[i, j]
                    w.writerow([repr(float(Q[i, j])), repr(float(P[i, j])), repr(float(v.real)),
                                repr(float(v.imag)), repr(float(rho[i, j]))])
        return path


def gaussian_blob(center=(1.0, 0.0), width: float = 0.4, momentum: float = 0.0) -> Callable:
    """exp(−|φ−φ_c|²/(2w²)) with an optional phase e^{i k q}."""
    q0, p0 = center

    def f(Q, P):
        return np.exp(-((Q - q0) ** 2 + (P - p0) ** 2) / (2 * width ** 2)) * np.exp(1j * momentum * Q)

    return f


def backward_nodes(H: PolynomialObservable, grid: GridSpec, t: float, tol: float = 1e-10) -> np.ndarray:
    """Φ_{-t} of every grid node, shape ``(2, nq, np)``."""
    if H.n != 1:
        raise DimensionMismatch("grid evolution is implemented for one degree of freedom")
    X = np.stack(grid.mesh())
    Y, _ = HamiltonianSystem(H).trajectories(X, -t, tol)
    return Y


def _pull_back(values: np.ndarray, grid: GridSpec, back: np.ndarray, threshold: float) -> np.ndarray:
    xi = (back[0] - grid.qmin) / grid.dq
    yi = (back[1] - grid.pmin) / grid.dp
    outside = (xi < 0) | (xi > grid.nq - 1) | (yi < 0) | (yi > grid.np - 1)
    if np.any(outside):
        # amplitude the escaping characteristics would have carried, read at the clamped edge
        ci = np.clip(np.rint(xi[outside]).astype(int), 0, grid.nq - 1)
        cj = np.clip(np.rint(yi[outside]).astype(int), 0, grid.np - 1)
        lost = float(np.max(np.abs(values[ci, cj])))
        if lost > threshold:
            raise SupportEscape(f"characteristics leave the grid carrying amplitude {lost:.3g}")
    return kernels.cubic_interp2d(values, xi, yi)


def _check_outflow(H, values, grid: GridSpec, h: float, threshold: float, tol: float):
    """Forward-trace the nodes carrying amplitude and make sure they stay inside."""
    if not np.isfinite(threshold):
        return
    live = np.abs(values) > threshold
    if not live.any():
        return
    Q, P = grid.mesh()
    X = np.stack([Q[live], P[live]])
    Y, _ = HamiltonianSystem(H).trajectories(X, h, tol)
    slack = 1e-9 * max(grid.qmax - grid.qmin, grid.pmax - grid.pmin)
    out = ((Y[0] < grid.qmin - slack) | (Y[0] > grid.qmax + slack)
           | (Y[1] < grid.pmin - slack) | (Y[1] > grid.pmax + slack))
    if out.any():
        lost = float(np.max(np.abs(values[live][out])))
        raise SupportEscape(f"amplitude {lost:.3g} is carried off the grid")


def evolve_wave(H: PolynomialObservable, psi0: KvNWave, t: float, steps: int | None = None,
                tol: float = 1e-10, threshold: float = ESCAPE_THRESHOLD) -> KvNWave:
    """ψ(t) = ψ0 ∘ Φ_{-t}, optionally in several semi-Lagrangian steps.

    Without ``steps`` the grid's time step decides; a grid without one takes
    a single exact step.
    """
    grid = psi0.grid
    steps = grid.steps_for(t) if steps is None else steps
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if t == 0:
        return KvNWave(grid, psi0.values.copy())
    h = t / steps
    if grid.dt is not None:
        grid.check_speed(H, h)
    back = backward_nodes(H, grid, h, tol)
    values = psi0.values
    for _ in range(steps):
        _check_outflow(H, values, grid, h, threshold, tol)
        values = _pull_back(values, grid, back, threshold)
    return KvNWave(grid, values)


def evolve_density(H: PolynomialObservable, rho0: np.ndarray, grid: GridSpec, t: float,
                   steps: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """Liouville evolution of a density by the same characteristics."""
    out = evolve_wave(H, KvNWave(grid, rho0), t, steps, tol, threshold=np.inf)
    return out.values.real


@dataclass
class DensityReport:
    max_discrepancy: float
    l1_initial: float
    l1_final: float
    l2_initial: float
    l2_final: float
    peak: float

    @property
    def l1_drift(self) -> float:
        return abs(self.l1_final - self.l1_initial) / self.l1_initial

    @property
    def l2_drift(self) -> float:
        return abs(self.l2_final - self.l2_initial) / self.l2_initial

    @property
    def relative_discrepancy(self) -> float:
        return self.max_discrepancy / self.peak if self.peak else self.max_discrepancy


def density_consistency(H: PolynomialObservable, psi0: KvNWave, t: float, steps: int | None = None,
                        tol: float = 1e-10) -> DensityReport:
    """Compare |evolve(ψ)|² with evolve(|ψ|²) and track the L¹/L² norms."""
    psi = evolve_wave(H, psi0, t, steps, tol)
    rho = evolve_density(H, psi0.density, psi0.grid, t, steps, tol)
    diff = float(np.max(np.abs(psi.density - rho)))
    return DensityReport(diff, psi0.l1_density(), float(rho.sum() * psi0.grid.cell),
                         psi0.l2_norm(), psi.l2_norm(), float(psi0.density.max()))


# ---------------------------------------------------------------------------
# forms


@dataclass
class EvolvedForm:
    """Zero-form values and one-form coefficients at the query points."""

    points: np.ndarray
    zero_form: np.ndarray | None
    one_form: np.ndarray | None
    backward_points: np.ndarray = field(repr=False, default=None)


def _backward_with_jacobi(H: PolynomialObservable, X: np.ndarray, t: float, tol: float):
    system = HamiltonianSystem(H)
    d = 2 * H.n
    batch = X.shape[1:]

    def rhs(_t, y):
        phi = y[:d]
        J = y[d:].reshape((d, d) + batch)
        A = system.tangent_matrix(phi)
        dJ = np.einsum("ab...,bc...->ac...", A, J)
        return np.concatenate([system.field(phi), dJ.reshape((d * d,) + batch)])

    eye = np.broadcast_to(np.eye(d).reshape((d, d) + (1,) * len(batch)), (d, d) + batch)
    y0 = np.concatenate([X.astype(float), eye.reshape((d * d,) + batch)])
    y, _ = dopri45(rhs, y0, 0.0, -t, tol)
    return y[:d], y[d:].reshape((d, d) + batch)


def evolve_form(H: PolynomialObservable, F0: PolynomialObservable | None,
                F1: Sequence[PolynomialObservable] | None, points, t: float,
                tol: float = 1e-10) -> EvolvedForm:
    """Lie-derivative evolution of ``F0 + F_a c^a`` at ``points`` (2n, ...).

    The zero form is pulled back along the flow; the one-form coefficients
    are ``(F_t)_b(φ) = F_a(Φ_{-t}φ) (J_{-t})^a_b`` so that the pairing with
    ``c`` transported by the Jacobi matrix is invariant.
    """
    X = np.asarray(points, dtype=float)
    d = 2 * H.n
    if X.shape[0] != d:
        raise DimensionMismatch(f"points need {d} leading coordinates")
    back, Jb = _backward_with_jacobi(H, X, t, tol)
    zero = None
    if F0 is not None:
        zero = compile_polynomials([F0.poly])(back)[0]
    one = None
    if F1 is not None:
        if len(F1) != d:
            raise DimensionMismatch(f"one-form needs {d} coefficients")
        Fa = compile_polynomials([f.poly for f in F1])(back)
        one = np.einsum("a...,ab...->b...", Fa, Jb)
    return EvolvedForm(X, zero, one, back)


def form_pairing_invariance(H: PolynomialObservable, F1: Sequence[PolynomialObservable], x0,
                            t: float, c0=None, tol: float = 1e-10) -> float:
    """|F_t(φ(t))·c(t) − F(φ0)·c0| with c(t) transported by the extended flow."""
    from .extended import ExtendedPoint, extended_flow

    x0 = np.asarray(x0, dtype=float)
    d = x0.shape[0]
    c0 = np.ones(d) if c0 is None else np.asarray(c0, dtype=float)
    ext = extended_flow(H, ExtendedPoint(x0, np.zeros(d)), t, tol)
    ct = ext.J @ c0
    evolved = evolve_form(H, None, F1, ext.phi[:, None], t, tol)
    before = compile_polynomials([f.poly for f in F1])(x0[:, None])[:, 0] @ c0
    after = evolved.one_form[:, 0] @ ct
    return float(abs(after - before))


# ---------------------------------------------------------------------------
# sliced classical kernel


@dataclass
class ComposeResult:
    chained: np.ndarray
    direct: np.ndarray

    @property
    def discrepancy(self) -> float:
        return float(np.max(np.abs(self.chained - self.direct)))


def cpi_kernel_compose(H: PolynomialObservable, phi0, times: Sequence[float],
                       tol: float = 1e-10) -> ComposeResult:
    """Chain flows over the slices of ``times`` and compare with one flow.

    The sliced classical kernel is a product of delta functions, so summing
    over intermediate configurations just composes the slice flows.
    """
    times = [float(x) for x in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("slice times must be non-decreasing")
    phi = np.asarray(phi0, dtype=float)
    for a, b in zip(times, times[1:]):
        if b > a:
            phi = hamilton_flow(H, phi, b - a, tol).endpoint.phi
    direct = hamilton_flow(H, phi0, times[-1] - times[0], tol).endpoint.phi if len(times) > 1 else np.asarray(phi0, float)
    return ComposeResult(phi, direct)


def uniform_slices(t: float, n: int) -> list:
    return list(np.linspace(0.0, t, n + 1))


def closed_form_free(psi0: Callable, t: float) -> Callable:
    """ψ(q, p, t) = ψ0(q − pt, p) for H = p²/2."""
    return lambda Q, P: psi0(Q - P * t, P)


def closed_form_oscillator(psi0: Callable, t: float) -> Callable:
    """ψ(q, p, t) = ψ0(q cos t − p sin t, q sin t + p cos t) for H = (p²+q²)/2."""
    c, s = np.cos(t), np.sin(t)
    return lambda Q, P: psi0(Q * c - P * s, Q * s + P * c)


def with_grid(wave: KvNWave, **changes) -> GridSpec:
    return replace(wave.grid, **changes)
