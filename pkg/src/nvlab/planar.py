"""Planar (plane-wave) solutions of the NV system via the KdV reduction.

A solution depending only on s = cos(a) x + sin(a) y solves the KdV-like
equation (4/kappa) u_t = -u''' + 6 u u' + (3 beta/kappa) u' with
kappa = cos(3a). Solutions of the standard KdV equation
q_t = -q''' + 6 q q' map to planar NV solutions by
u(t, s) = q(kappa t / 4, s + k1 t) - k2 with 3 beta / 4 = k1 + k2 * 3 kappa / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, DegenerateDirectionError

KAPPA_EPS = 1e-12


def kappa(alpha: float) -> float:
    """Angle-dependent speed factor cos(3*alpha) (threefold symmetry)."""
    return math.cos(3.0 * alpha)


class SolitonSampler(NamedTuple):
    u: Callable[[np.ndarray, float], np.ndarray]
    v: Callable[[np.ndarray, float], np.ndarray]
    w: Callable[[np.ndarray, float], np.ndarray]


def kdv_soliton(c: float, x0: float = 0.0) -> SolitonSampler:
    """The y-independent NV soliton u = v = -2c sech^2(sqrt(c)(x - x0 - c t)), w = 0."""
    if c <= 0:
        raise ConfigurationError(f"soliton speed c={c} must be positive")
    rc = math.sqrt(c)

    def u(x, t=0.0):
        return -2.0 * c / np.cosh(rc * (np.asarray(x) - x0 - c * t)) ** 2

    def w(x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=float))

    return SolitonSampler(u=u, v=u, w=w)


def standard_kdv_soliton(c: float, x0: float = 0.0) -> Callable[[float, np.ndarray], np.ndarray]:
    """Soliton q(t, x) = -2c sech^2(sqrt(c)(x - x0 - 4c t)) of q_t = -q''' + 6 q q'."""
    if c <= 0:
        raise ConfigurationError(f"soliton speed c={c} must be positive")
    rc = math.sqrt(c)

    def q(t, x):
        return -2.0 * c / np.cosh(rc * (np.asarray(x) - x0 - 4.0 * c * t)) ** 2

    return q


@dataclass(frozen=True)
class PlanarParams:
    """Direction, speed, and frame constants of a planar solution.

    The constraint 3 beta / 4 = k1 + k2 * 3 kappa / 2 ties the frame constants
    to the auxiliary-field offsets; k1 is derived from it when not given.
    """

    c: float
    alpha: float
    c1_offset: float = 0.0
    c2_offset: float = 0.0
    k2: float = 0.0
    k1: Optional[float] = None

    def __post_init__(self):
        if self.c <= 0:
            raise ConfigurationError(f"speed c={self.c} must be positive")
        if self.k1 is None:
            object.__setattr__(self, "k1", 0.75 * self.beta - 1.5 * self.kappa * self.k2)
        elif abs(0.75 * self.beta - (self.k1 + 1.5 * self.kappa * self.k2)) > 1e-12:
            raise ConfigurationError("constants violate 3*beta/4 = k1 + k2*3*kappa/2")

    @property
    def n1(self) -> float:
        return math.cos(self.alpha)

    @property
    def n2(self) -> float:
        return math.sin(self.alpha)

    @property
    def kappa(self) -> float:
        return kappa(self.alpha)

    @property
    def beta(self) -> float:
        return self.c1_offset * self.n1 + self.c2_offset * self.n2


class PlanarSolution(NamedTuple):
    """Samplers along s and in the (x, y) plane for a mapped planar solution."""

    u_line: Callable[[float, np.ndarray], np.ndarray]
    v1_line: Callable[[float, np.ndarray], np.ndarray]
    v2_line: Callable[[float, np.ndarray], np.ndarray]
    u: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    v1: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    v2: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    params: PlanarParams


def planar_from_kdv(q: Callable[[float, np.ndarray], np.ndarray],
                    params: PlanarParams) -> PlanarSolution:
    """Map a standard-KdV solution q(t, s) to a planar NV solution.

    u(t, s) = q(kappa t / 4, s + k1 t) - k2, with auxiliary fields
    v1 = (n1^2 - n2^2) u + c1 and v2 = -2 n1 n2 u + c2.
    """
    kap = params.kappa
    if abs(kap) < KAPPA_EPS:
        raise DegenerateDirectionError(
            f"kappa = cos(3*alpha) vanishes at alpha={params.alpha}; "
            "the reduced equation has no time-derivative term"
        )
    n1, n2 = params.n1, params.n2
    k1, k2 = params.k1, params.k2

    def u_line(t, s):
        return q(kap * t / 4.0, np.asarray(s) + k1 * t) - k2

    def v1_line(t, s):
        return (n1 * n1 - n2 * n2) * u_line(t, s) + params.c1_offset

    def v2_line(t, s):
        return -2.0 * n1 * n2 * u_line(t, s) + params.c2_offset

    def u(t, x, y):
        return u_line(t, n1 * np.asarray(x) + n2 * np.asarray(y))

    def v1(t, x, y):
        return v1_line(t, n1 * np.asarray(x) + n2 * np.asarray(y))

    def v2(t, x, y):
        return v2_line(t, n1 * np.asarray(x) + n2 * np.asarray(y))

    return PlanarSolution(u_line, v1_line, v2_line, u, v1, v2, params)


def planar_speed(c: float, alpha: float) -> float:
    """Translation speed c*cos(3*alpha) of the planar soliton along its direction."""
    if c <= 0:
        raise ConfigurationError(f"speed c={c} must be positive")
    return c * kappa(alpha)


def nvkdv_residual(sol: PlanarSolution, s: np.ndarray, t: float = 0.0,
                   dt_fd: float = 1e-5) -> np.ndarray:
    """Residual of (4/kappa) u_t + u''' - 6 u u' - (3 beta/kappa) u' on a uniform
    periodic s-grid, with spectral s-derivatives and a centered difference in t."""
    s = np.asarray(s)
    ds = s[1] - s[0]
    k = 2.0 * np.pi * np.fft.fftfreq(s.size, d=ds)
    k[s.size // 2] = 0.0

    u = sol.u_line(t, s)
    uh = np.fft.fft(u)
    u_s = np.fft.ifft(1j * k * uh).real
    u_sss = np.fft.ifft(-1j * k**3 * uh).real
    u_t = (sol.u_line(t + dt_fd, s) - sol.u_line(t - dt_fd, s)) / (2.0 * dt_fd)

    p = sol.params
    return (4.0 / p.kappa) * u_t + u_sss - 6.0 * u * u_s - (3.0 * p.beta / p.kappa) * u_s


def speed_profile(c: float, n_samples: int = 360) -> np.ndarray:
    """Rows (alpha, kappa, speed) over [0, 2*pi)."""
    alphas = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    kappas = np.cos(3.0 * alphas)
    return np.column_stack([alphas, kappas, c * kappas])
