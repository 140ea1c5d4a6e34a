"""Semi-implicit three-level theta-scheme for the Novikov-Veselov system.

The evolution is carried in spectral space: with D the diagonal symbol
i(xi^3 - 3 xi eta^2) and F the nonlinear term 3i xi F[uv] + 3i eta F[uw],
the semi-discrete system 4 dc/dt = D c + F(c) is advanced by

    (2 - theta*dt*D) c^{n+1} = (1-2theta)*dt*D c^n + (2 + theta*dt*D) c^{n-1}
                               + dt * F(c^n)

which is implicit in the (diagonal) linear part and leapfrog-explicit in the
nonlinearity. theta = 1/2 gives the Crank-Nicolson form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from .errors import ConfigurationError, DivergenceError
from .grid import (
    RealField,
    SpectralField,
    TorusGrid,
    _aux_multipliers,
    l2_norm,
    linear_symbol,
)

FIRST_STEP_POLICIES = ("copy_previous", "exact_reference")


@dataclass
class SchemeParams:
    """Time-stepper configuration.

    reference, when first_step == "exact_reference", samples the known solution:
    a callable t -> (L, M) array of u samples.
    """

    dt: float
    theta: float = 0.5
    dealias: bool = False
    first_step: str = "copy_previous"
    reference: Optional[Callable[[float], np.ndarray]] = None

    def __post_init__(self):
        if not (0.0 <= self.theta <= 1.0):
            raise ConfigurationError(f"theta={self.theta} outside [0, 1]")
        if self.dt <= 0:
            raise ConfigurationError(f"dt={self.dt} must be positive")
        if self.first_step not in FIRST_STEP_POLICIES:
            raise ConfigurationError(f"unknown first_step policy {self.first_step!r}")
        if self.first_step == "exact_reference" and self.reference is None:
            raise ConfigurationError("exact_reference first step needs a reference sampler")


@dataclass(frozen=True)
class NVState:
    """The (u, v, w) triple at time t; v and w are slaved to u."""

    t: float
    u: RealField
    v: RealField
    w: RealField


@dataclass(frozen=True)
class Diagnostics:
    l2_norm: float
    mean: float
    max_abs: float
    time: float


def diagnostics(state: NVState) -> Diagnostics:
    u = state.u.samples
    return Diagnostics(
        l2_norm=l2_norm(state.u),
        mean=float(u.mean()),
        max_abs=float(np.abs(u).max()),
        time=state.t,
    )


class _Workspace:
    """Precomputed grid arrays reused every step."""

    def __init__(self, grid: TorusGrid, params: SchemeParams):
        self.grid = grid
        self.D = linear_symbol(grid).coeffs
        self.mv, self.mw = _aux_multipliers(grid)
        self.ikx = 1j * grid.XI * grid.nyquist_mask
        self.iky = 1j * grid.ETA * grid.nyquist_mask
        self.dealias = grid.dealias_mask if params.dealias else None
        td = params.theta * params.dt * self.D
        self.denom = 2.0 - td
        self.coef_now = (1.0 - 2.0 * params.theta) * params.dt * self.D
        self.coef_prev = 2.0 + td


def _nonlinear(ws: _Workspace, c: np.ndarray) -> np.ndarray:
    """F(c) = 3i xi F[uv] + 3i eta F[uw] with v, w from the auxiliary solve."""
    if ws.dealias is not None:
        c = ws.dealias * c
    u = np.fft.ifft2(c).real
    v = np.fft.ifft2(ws.mv * c).real
    w = np.fft.ifft2(ws.mw * c).real
    out = 3.0 * (ws.ikx * np.fft.fft2(u * v) + ws.iky * np.fft.fft2(u * w))
    if ws.dealias is not None:
        out = ws.dealias * out
    return out


def nonlinear_term(u_hat: SpectralField, dealias: bool = False) -> SpectralField:
    """Public wrapper around the nonlinear spectral term."""
    ws = _Workspace(u_hat.grid, SchemeParams(dt=1.0, dealias=dealias))
    return SpectralField(u_hat.grid, _nonlinear(ws, u_hat.coeffs))


def step(c_now: SpectralField, c_prev: SpectralField, params: SchemeParams) -> SpectralField:
    """One theta-scheme step; solved mode-by-mode since D is diagonal."""
    if c_now.grid != c_prev.grid:
        raise ConfigurationError("c_now and c_prev live on different grids")
    if not (np.all(np.isfinite(c_now.coeffs)) and np.all(np.isfinite(c_prev.coeffs))):
        raise ConfigurationError("non-finite spectral coefficients passed to step()")
    ws = _Workspace(c_now.grid, params)
    new = _step_arrays(ws, c_now.coeffs, c_prev.coeffs, params.dt)
    return SpectralField(c_now.grid, new)


def _step_arrays(ws: _Workspace, c_now: np.ndarray, c_prev: np.ndarray, dt: float) -> np.ndarray:
    rhs = ws.coef_now * c_now + ws.coef_prev * c_prev + dt * _nonlinear(ws, c_now)
    return rhs / ws.denom


def _state_from_spectrum(grid: TorusGrid, c: np.ndarray, t: float,
                         ws: _Workspace) -> NVState:
    u = RealField(grid, np.fft.ifft2(c).real)
    v = RealField(grid, np.fft.ifft2(ws.mv * c).real)
    w = RealField(grid, np.fft.ifft2(ws.mw * c).real)
    return NVState(t=t, u=u, v=v, w=w)


def evolve(u0: RealField, t_final: float, params: SchemeParams,
           observer_stride: int = 100) -> Iterator[tuple[NVState, Diagnostics]]:
    """Run ceil(t_final/dt) steps, yielding (state, diagnostics) at the stride.

    The initial state and the final step are always emitted. The first step
    uses c^{-1} = c^0 (copy_previous) or the sampled exact solution at -dt.
    """
    if t_final <= 0:
        raise ConfigurationError(f"t_final={t_final} must be positive")
    if observer_stride < 1:
        raise ConfigurationError("observer_stride must be >= 1")
    grid = u0.grid
    ws = _Workspace(grid, params)
    dt = params.dt
    n_steps = math.ceil(t_final / dt)

    c_now = np.fft.fft2(u0.samples)
    if params.first_step == "exact_reference":
        c_prev = np.fft.fft2(np.asarray(params.reference(-dt), dtype=float))
    else:
        c_prev = c_now.copy()

    init_max = float(np.abs(c_now).max())
    blowup = 1e8 * init_max if init_max > 0 else math.inf

    state = _state_from_spectrum(grid, c_now, 0.0, ws)
    yield state, diagnostics(state)

    for n in range(1, n_steps + 1):
        c_new = _step_arrays(ws, c_now, c_prev, dt)
        if not np.all(np.isfinite(c_new)) or np.abs(c_new).max() > blowup:
            raise DivergenceError(f"solution diverged at step {n} (t={n * dt:.6g})", step=n)
        c_prev, c_now = c_now, c_new
        if n % observer_stride == 0 or n == n_steps:
            state = _state_from_spectrum(grid, c_now, n * dt, ws)
            yield state, diagnostics(state)


def max_stable_dt(alpha_lin: float, dx: float) -> float:
    """Sufficient theta = 1/2 bound dt <= 4*dx/(3*|alpha|*pi) for the linearization.

    alpha_lin = 0 is unconditionally stable for 1/4 <= theta <= 1; returns +inf.
    """
    if dx <= 0:
        raise ConfigurationError(f"dx={dx} must be positive")
    if alpha_lin == 0:
        return math.inf
    return 4.0 * dx / (3.0 * abs(alpha_lin) * math.pi)


def default_dt(u0: RealField) -> float:
    """Conservative default step: min(1e-3, 0.5 * bound with alpha = 2*max|u0|)."""
    amp = float(np.abs(u0.samples).max())
    bound = max_stable_dt(2.0 * amp, u0.grid.dx) if amp > 0 else math.inf
    return min(1e-3, 0.5 * bound)


def amplification_eigenvalues(theta: float, lam: float, gamma_coef: float,
                              dt: float) -> tuple[complex, complex]:
    """Eigenvalues of the two-level iteration matrix of the scheme.

    b1 = 2 + i*theta*lam*dt, b2 = i*((1-2theta)*lam + gamma)*dt; the roots of
    z^2 - (b2/conj(b1)) z - (b1/conj(b1)) are returned. |z1*z2| = 1 always.
    """
    if dt <= 0:
        raise ConfigurationError(f"dt={dt} must be positive")
    b1 = 2.0 + 1j * theta * lam * dt
    b2 = 1j * ((1.0 - 2.0 * theta) * lam + gamma_coef) * dt
    z1, z2 = np.roots([1.0, -b2 / np.conj(b1), -b1 / np.conj(b1)])
    return complex(z1), complex(z2)


def scheme_stable(theta: float, lam: float, gamma_coef: float, dt: float) -> bool:
    """The sufficient condition ((1-4t)l^2 + 2(1-2t)l g + g^2) dt^2 <= 16."""
    lhs = ((1.0 - 4.0 * theta) * lam**2
           + 2.0 * (1.0 - 2.0 * theta) * lam * gamma_coef
           + gamma_coef**2) * dt**2
    return lhs <= 16.0
