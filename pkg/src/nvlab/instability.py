"""Transverse-instability analysis of the plane-wave soliton.

In the frame moving with the unit-speed soliton, perturbations
u = u0 + eps*f(x)e^{iky + gamma t} (and likewise g, h for the auxiliary
fields) satisfy a linear ODE system in x with non-constant coefficients:

    f''' = (-4 gamma + 3 u0') f + (4 - 3 k^2) f' + 3 u0' g + 6 u0 g'
    g''  = k^2 g + f'' + k^2 f
    h    = (g' - f')/(i k)

with u0(x) = -2 sech^2(x). Bounded far-field behavior is governed by the
cubic lambda^3 + (3k^2 - 4) lambda + 4 gamma = 0 (roots p3 <= 0 <= p1 <= p2)
plus the pair +-k from the g-system. A nonzero bounded profile exists exactly
where the mismatch determinant D(k, gamma) between the left and right
asymptotic subspaces vanishes; the gamma > 0 part of that zero curve gives
exponentially growing transverse perturbations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import (
    ComplexRootError,
    ConfigurationError,
    DegenerateShapeError,
    OffCurveError,
    ResonanceError,
    TraceLostError,
)
from .evolver import NVState
from .grid import RealField, SpectralField, TorusGrid, solve_auxiliary

RESONANCE_TOL = 1e-6
DEFAULT_X_MATCH = 12.0  # sech^2(12) ~ 1.4e-10
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


def sech(x):
    return 1.0 / np.cosh(x)


def soliton_profile(x):
    """Stationary profile u0 = -2 sech^2(x) in the co-moving unit-speed frame."""
    return -2.0 * sech(x) ** 2


def soliton_profile_prime(x):
    return 4.0 * sech(x) ** 2 * np.tanh(x)


# --- co-moving rescaling ------------------------------------------------------


@dataclass(frozen=True)
class ComovingScaling:
    """Scaling u(t,x,y) = c * u~(c^{3/2} t, sqrt(c)(x - c t), sqrt(c) y).

    Maps unit-speed results to soliton speed c: lengths shrink by sqrt(c),
    time by c^{3/2}, amplitudes grow by c. A transverse wavenumber k in the
    unit frame becomes k*sqrt(c) in the lab, so the y-period is 2 pi/(k sqrt(c)).
    """

    c: float

    @property
    def space(self) -> float:
        return math.sqrt(self.c)

    @property
    def time(self) -> float:
        return self.c ** 1.5

    @property
    def amplitude(self) -> float:
        return self.c

    def y_period(self, k: float) -> float:
        return 2.0 * math.pi / (k * self.space)

    def lab_growth_rate(self, gamma: float) -> float:
        return gamma * self.time


def comoving_transform(c: float) -> ComovingScaling:
    if c <= 0:
        raise ConfigurationError(f"soliton speed c={c} must be positive")
    return ComovingScaling(c)


# --- far-field roots ----------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticRoots:
    """Real roots of lambda^3 + (3k^2 - 4) lambda + 4 gamma = 0.

    p1 is the root that vanishes as gamma -> 0 (the middle one), p2 the
    largest, p3 the smallest. The g-system contributes the pair +-k.
    """

    p1: float
    p2: float
    p3: float
    k: float

    @property
    def g_pair(self) -> tuple[float, float]:
        return (self.k, -self.k)


def cubic_discriminant_condition(k: float, gamma: float) -> float:
    """Three distinct real roots iff this is negative: 4 g^2 + (3k^2-4)^3/27."""
    return 4.0 * gamma**2 + (3.0 * k**2 - 4.0) ** 3 / 27.0


def characteristic_roots(k: float, gamma: float) -> AsymptoticRoots:
    """Solve the far-field cubic by the trigonometric (three-real-root) formula."""
    if cubic_discriminant_condition(k, gamma) >= 0:
        raise ComplexRootError(
            f"(k, gamma)=({k}, {gamma}): 4g^2 + (3k^2-4)^3/27 >= 0, roots not all real"
        )
    p = 3.0 * k**2 - 4.0
    q = 4.0 * gamma
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    theta = math.acos(min(1.0, max(-1.0, arg)))
    roots = sorted(m * math.cos(theta / 3.0 - 2.0 * math.pi * j / 3.0) for j in range(3))
    return AsymptoticRoots(p1=roots[1], p2=roots[2], p3=roots[0], k=k)


# --- the linearized ODE system ------------------------------------------------


def linearized_rhs(k: float, gamma: float) -> Callable[[float], np.ndarray]:
    """Coefficient matrix A(x) of d/dx (f, f', f'', g, g') = A(x) (...)."""
    k2 = k * k

    def A(x: float) -> np.ndarray:
        u = float(soliton_profile(x))
        up = float(soliton_profile_prime(x))
        return np.array([
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [-4.0 * gamma + 3.0 * up, 4.0 - 3.0 * k2, 0.0, 3.0 * up, 6.0 * u],
            [0.0, 0.0, 0.0, 0.0, 1.0],
            [k2, 0.0, 1.0, k2, 0.0],
        ])

    return A


def _linearized_rhs_k0(gamma: float) -> Callable[[float], np.ndarray]:
    """3x3 system for k = 0, where g = f: f''' = (-4g + 6u0')f + (4 + 6u0)f'."""

    def A(x: float) -> np.ndarray:
        u = float(soliton_profile(x))
        up = float(soliton_profile_prime(x))
        return np.array([
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [-4.0 * gamma + 6.0 * up, 4.0 + 6.0 * u, 0.0],
        ])

    return A


def _flow(A: Callable[[float], np.ndarray], x0: float, x1: float, Y0: np.ndarray,
          dense: bool = False, ode: str = "adaptive"):
    """Integrate the matrix ODE Y' = A(x) Y from x0 to x1; Y0 is (n, m)."""
    n, m = Y0.shape

    def rhs(x, y):
        return (A(x) @ y.reshape(n, m)).ravel()

    if ode == "rk4":
        return _rk4_flow(rhs, x0, x1, Y0, dense=dense)
    sol = solve_ivp(rhs, (x0, x1), Y0.ravel(), method="DOP853",
                    rtol=ODE_RTOL, atol=ODE_ATOL, dense_output=dense)
    if not sol.success:
        raise ConfigurationError(f"ODE integration failed on [{x0}, {x1}]: {sol.message}")
    if dense:
        return sol
    return sol.y[:, -1].reshape(n, m)


class _RK4Dense:
    """Fixed-step RK4 trajectory with linear interpolation between nodes."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        self._xs = xs
        self._ys = ys
        self._forward = xs[-1] >= xs[0]

    def sol(self, x):
        xs = self._xs if self._forward else self._xs[::-1]
        ys = self._ys if self._forward else self._ys[:, ::-1]
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty((self._ys.shape[0], x.size))
        for i in range(self._ys.shape[0]):
            out[i] = np.interp(x, xs, ys[i])
        return out


def _rk4_flow(rhs, x0, x1, Y0, step: float = 1e-3, dense: bool = False):
    n_steps = max(1, int(math.ceil(abs(x1 - x0) / step)))
    h = (x1 - x0) / n_steps
    y = Y0.ravel().astype(float)
    xs = np.empty(n_steps + 1)
    ys = np.empty((y.size, n_steps + 1)) if dense else None
    xs[0] = x0
    if dense:
        ys[:, 0] = y
    x = x0
    for i in range(n_steps):
        k1 = rhs(x, y)
        k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x = x0 + (i + 1) * h
        xs[i + 1] = x
        if dense:
            ys[:, i + 1] = y
    if dense:
        return _RK4Dense(xs, ys)
    return y.reshape(Y0.shape)


def flow_map(k: float, gamma: float, x_match: float = DEFAULT_X_MATCH,
             ode: str = "adaptive", rhs: Optional[Callable] = None) -> np.ndarray:
    """Flow of the 5x5 linearized system across [-x_match, +x_match].

    Columns are the images of the canonical basis vectors.
    """
    if x_match <= 0:
        raise ConfigurationError(f"x_match={x_match} must be positive")
    A = rhs if rhs is not None else linearized_rhs(k, gamma)
    return _flow(A, -x_match, x_match, np.eye(5), ode=ode)


# --- asymptotic matching ------------------------------------------------------


def asymptotic_matrices(k: float, gamma: float,
                        x_match: float = DEFAULT_X_MATCH) -> tuple[np.ndarray, np.ndarray]:
    """The explicit 5x5 boundary matrices T- (at -x_match) and T+ (at +x_match).

    They map the asymptotic coefficients (c1, c2, c3, beta1, beta2) to the
    state (f, f', f'', g, g'). The g-coupling factors (p^2+k^2)/(p^2-k^2)
    degenerate near p_i^2 = k^2; such points raise ResonanceError.
    """
    if k <= 0:
        raise ConfigurationError("asymptotic matrices need k > 0 (use the k=0 variant)")
    r = characteristic_roots(k, gamma)
    for p in (r.p1, r.p2, r.p3):
        if abs(p * p - k * k) < RESONANCE_TOL:
            raise ResonanceError(
                f"(k, gamma)=({k}, {gamma}): |p^2 - k^2|={abs(p*p - k*k):.2e} "
                "below tolerance; asymptotic g-formulas invalid"
            )
    M = x_match
    T_minus = np.zeros((5, 5))
    for j, p in ((0, r.p1), (1, r.p2)):
        cpl = (p * p + k * k) / (p * p - k * k)
        T_minus[:, j] = np.array([1.0, p, p * p, cpl, cpl * p]) * math.exp(-p * M)
    T_minus[3, 3] = math.exp(-k * M)
    T_minus[4, 3] = k * math.exp(-k * M)

    T_plus = np.zeros((5, 5))
    p = r.p3
    cpl = (p * p + k * k) / (p * p - k * k)
    T_plus[:, 2] = np.array([1.0, p, p * p, cpl, cpl * p]) * math.exp(p * M)
    T_plus[3, 4] = math.exp(-k * M)
    T_plus[4, 4] = -k * math.exp(-k * M)
    return T_minus, T_plus


def _subspace_basis_left(r: AsymptoticRoots) -> np.ndarray:
    """Directions spanning the x -> -infinity bounded subspace, 5x3.

    Cubic-root columns carry the homogeneous e^{kx} mode subtracted out, so
    they stay finite through p^2 = k^2 (the coefficient parametrization's
    resonance is an artifact of the basis, not of the subspace).
    """
    k = r.k
    cols = []
    for p in (r.p1, r.p2):
        if abs(p + k) < RESONANCE_TOL:
            raise ResonanceError(f"left far-field mode p={p} collides with -k={-k}")
        cols.append([1.0, p, p * p, 0.0, (p * p + k * k) / (p + k)])
    cols.append([0.0, 0.0, 0.0, 1.0, k])
    B = np.array(cols).T
    return B / np.linalg.norm(B, axis=0)


def _subspace_basis_right(r: AsymptoticRoots) -> np.ndarray:
    """Directions spanning the x -> +infinity bounded subspace, 5x2."""
    k, p = r.k, r.p3
    # p3 <= -1 < k in the scan window, so p3 - k is bounded away from zero
    cols = [
        [1.0, p, p * p, 0.0, (p * p + k * k) / (p - k)],
        [0.0, 0.0, 0.0, 1.0, -k],
    ]
    B = np.array(cols).T
    return B / np.linalg.norm(B, axis=0)


def _bidirectional_matrix(k: float, gamma: float, x_match: float,
                          ode: str = "adaptive", dense: bool = False):
    """Midpoint matching matrix [YL(0) | -YR(0)] for the 5x5 system."""
    r = characteristic_roots(k, gamma)
    A = linearized_rhs(k, gamma)
    BL = _subspace_basis_left(r)
    BR = _subspace_basis_right(r)
    if dense:
        solL = _flow(A, -x_match, 0.0, BL, dense=True, ode=ode)
        solR = _flow(A, x_match, 0.0, BR, dense=True, ode=ode)
        YL = solL.sol(0.0).reshape(5, 3)
        YR = solR.sol(0.0).reshape(5, 2)
        return np.hstack([YL, -YR]), r, solL, solR
    YL = _flow(A, -x_match, 0.0, BL, ode=ode)
    YR = _flow(A, x_match, 0.0, BR, ode=ode)
    return np.hstack([YL, -YR]), r, None, None


def _normalized_det(Mmat: np.ndarray) -> tuple[float, float]:
    norms = np.linalg.norm(Mmat, axis=0)
    if np.any(norms == 0.0):
        return 0.0, 0.0
    D = float(np.linalg.det(Mmat / norms))
    return D, abs(D)


def det_mismatch(k: float, gamma: float, x_match: float = DEFAULT_X_MATCH,
                 method: str = "bidirectional", ode: str = "adaptive") -> tuple[float, float]:
    """Mismatch determinant; returns (signed normalized D, |D|).

    one_sided computes det(T T- - T+) directly; bidirectional (default)
    integrates the bounded bases from both ends to x = 0 and takes the
    determinant of the midpoint matching matrix. Both share the zero set;
    normalization by column norms defeats the exponential scale factors.
    """
    if method == "one_sided":
        T_minus, T_plus = asymptotic_matrices(k, gamma, x_match)
        T = flow_map(k, gamma, x_match, ode=ode)
        return _normalized_det(T @ T_minus - T_plus)
    if method != "bidirectional":
        raise ConfigurationError(f"unknown det_mismatch method {method!r}")
    if k <= 0.0:
        # the (0, 0, 0, 1, +-k) columns coincide at k = 0 and the matching
        # matrix is singular for every gamma; the 3x3 k = 0 system is separate
        raise ConfigurationError("det_mismatch needs k > 0 (use det_mismatch_k0)")
    Mmat, _, _, _ = _bidirectional_matrix(k, gamma, x_match, ode=ode)
    return _normalized_det(Mmat)


def det_mismatch_k0(gamma: float, x_match: float = DEFAULT_X_MATCH,
                    method: str = "bidirectional", ode: str = "adaptive") -> float:
    """Signed normalized mismatch determinant of the 3x3 k = 0 system.

    g = f is forced by the conditions at infinity; the bounded bases are the
    p1, p2 modes on the left and the p3 mode on the right.
    """
    if gamma < 0:
        raise ConfigurationError(f"gamma={gamma} must be >= 0 for the k=0 scan")
    r = characteristic_roots(0.0, gamma)
    A = _linearized_rhs_k0(gamma)
    if method == "one_sided":
        M = x_match
        T_minus = np.zeros((3, 3))
        for j, p in ((0, r.p1), (1, r.p2)):
            T_minus[:, j] = np.array([1.0, p, p * p]) * math.exp(-p * M)
        T_plus = np.zeros((3, 3))
        T_plus[:, 2] = np.array([1.0, r.p3, r.p3 ** 2]) * math.exp(r.p3 * M)
        T0 = _flow(A, -M, M, np.eye(3), ode=ode)
        return _normalized_det(T0 @ T_minus - T_plus)[0]
    if method != "bidirectional":
        raise ConfigurationError(f"unknown det_mismatch_k0 method {method!r}")
    BL = np.array([[1.0, r.p1, r.p1 ** 2], [1.0, r.p2, r.p2 ** 2]]).T
    BL /= np.linalg.norm(BL, axis=0)
    BR = np.array([[1.0, r.p3, r.p3 ** 2]]).T
    BR /= np.linalg.norm(BR, axis=0)
    YL = _flow(A, -x_match, 0.0, BL, ode=ode)
    YR = _flow(A, x_match, 0.0, BR, ode=ode)
    return _normalized_det(np.hstack([YL, -YR]))[0]


def signed_mismatch(k: float, gamma: float, x_match: float = DEFAULT_X_MATCH,
                    ode: str = "adaptive") -> float:
    """Signed normalized D(k, gamma), nan inside resonance/complex-root regions."""
    if k <= 0.0:
        return math.nan
    try:
        return det_mismatch(k, gamma, x_match, ode=ode)[0]
    except (ResonanceError, ComplexRootError):
        return math.nan


# --- curve tracing ------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    k: float
    gamma: float
    s: float
    residual: float


class TraceResult(NamedTuple):
    points: list[CurvePoint]
    closed: bool


def find_zero_gamma(k: float, gamma_lo: float, gamma_hi: float,
                    x_match: float = DEFAULT_X_MATCH, n_scan: int = 40) -> float:
    """Locate a zero of D(k, .) by sign scanning plus Brent refinement."""
    gammas = np.linspace(gamma_lo, gamma_hi, n_scan)
    vals = np.array([signed_mismatch(k, g, x_match) for g in gammas])
    for i in range(n_scan - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            return brentq(lambda g: signed_mismatch(k, g, x_match),
                          gammas[i], gammas[i + 1], xtol=1e-12)
    raise TraceLostError(f"no sign change of D({k}, gamma) in [{gamma_lo}, {gamma_hi}]")


def _correct_on_normal(center: np.ndarray, normal: np.ndarray, halfwidth: float,
                       x_match: float) -> tuple[np.ndarray, float]:
    """Find the zero of D along the segment center + t*normal, |t| <= halfwidth.

    Requires an actual sign change (a zero, not a mere minimum of |D|).
    """

    def D(t):
        p = center + t * normal
        return signed_mismatch(p[0], p[1], x_match)

    vals = {0.0: D(0.0)}
    bracket = None
    # widen symmetrically until a sign change appears near the predictor
    for h in (0.25, 0.5, 1.0):
        for t in (h * halfwidth, -h * halfwidth):
            vals[t] = D(t)
        ts = sorted(t for t, v in vals.items() if np.isfinite(v))
        for a, b in zip(ts, ts[1:]):
            if vals[a] * vals[b] < 0:
                if bracket is None or abs(a) + abs(b) < abs(bracket[0]) + abs(bracket[1]):
                    bracket = (a, b)
        if bracket is not None:
            break
    if bracket is None:
        raise TraceLostError("no sign change of D across the orthogonal segment")
    t_root = brentq(D, bracket[0], bracket[1], xtol=1e-10)
    return center + t_root * normal, abs(D(t_root))


def trace_instability_curve(start: tuple[float, float],
                            direction: tuple[float, float],
                            step: float = 0.01,
                            max_points: int = 600,
                            x_match: float = DEFAULT_X_MATCH,
                            ortho_halfwidth: float = 0.05,
                            seed_tol: float = 1e-2,
                            k_max: float = 1.0) -> TraceResult:
    """Arc-length trace of the zero curve of D(k, gamma) within k in [0, k_max].

    Predict along the current direction, correct by a sign-bracketed root
    solve on the orthogonal segment, update the direction by the secant of
    the last two points. Terminates on closure (return within step/2 of the
    seed) or after max_points. Negative-gamma lobes are traced as well: the
    zero set is symmetric under gamma -> -gamma, so at a gamma = 0 crossing
    on the window boundary (the corners near k = 0 and k = k_max, where the
    zero set leaves the window) the curve reflects; when the corrector fails
    near the axis the tracer jumps to the mirror point and heads away from
    the corner with the k-component of the direction flipped.
    """
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    seed = np.asarray(start, dtype=float)
    seed_D = signed_mismatch(seed[0], seed[1], x_match)
    if not np.isfinite(seed_D) or abs(seed_D) > seed_tol:
        raise TraceLostError(f"seed {tuple(seed)} has |D|={abs(seed_D):.3g} above "
                             f"the loose threshold {seed_tol}")
    # put the seed exactly on the curve
    normal = np.array([-d[1], d[0]])
    seed, res = _correct_on_normal(seed, normal, ortho_halfwidth, x_match)
    points = [CurvePoint(seed[0], seed[1], 0.0, res)]
    pos = seed
    s = 0.0
    for _ in range(max_points - 1):
        predictor = pos + step * d
        normal = np.array([-d[1], d[0]])
        try:
            new, res = _correct_on_normal(predictor, normal, ortho_halfwidth, x_match)
            at_corner = new[0] > k_max
        except TraceLostError as exc:
            new, at_corner = None, True
        if at_corner:
            # The zero set leaves the window (k < 0 makes the corrector fail;
            # k > k_max is caught by position). By the gamma -> -gamma symmetry
            # the in-window continuation is the reflected arc: jump to the
            # mirror point and head away from the corner.
            if abs(pos[1]) >= 5.0 * step:
                raise TraceLostError(
                    f"zero curve lost near ({pos[0]:.4g}, {pos[1]:.4g})",
                    last_point=points[-1])
            mirrored = np.array([pos[0], -pos[1]])
            d = np.array([-d[0], d[1]])
            s += float(np.linalg.norm(mirrored - pos))
            res = abs(signed_mismatch(mirrored[0], mirrored[1], x_match))
            points.append(CurvePoint(mirrored[0], mirrored[1], s, res))
            pos = mirrored
            predictor = pos + step * d
            normal = np.array([-d[1], d[0]])
            try:
                new, res = _correct_on_normal(predictor, normal,
                                              ortho_halfwidth, x_match)
            except TraceLostError as exc:
                raise TraceLostError(str(exc), last_point=points[-1]) from exc
        s += float(np.linalg.norm(new - pos))
        points.append(CurvePoint(new[0], new[1], s, res))
        d = (new - pos) / np.linalg.norm(new - pos)
        pos = new
        if len(points) > 10 and np.linalg.norm(pos - seed) < 0.5 * step:
            return TraceResult(points, True)
    return TraceResult(points, False)


def unstable_band(points: Sequence[CurvePoint]) -> tuple[float, float]:
    """(k_min, k_max) of the gamma > 0 arc, interpolating the gamma = 0 crossings."""
    ks = []
    for a, b in zip(points, points[1:]):
        if a.gamma * b.gamma < 0:
            w = a.gamma / (a.gamma - b.gamma)
            ks.append(a.k + w * (b.k - a.k))
    ks.extend(p.k for p in points if p.gamma > 0)
    if not ks:
        raise TraceLostError("traced curve has no gamma > 0 arc")
    return min(ks), max(ks)


# --- perturbation shapes --------------------------------------------------------


class Tails(NamedTuple):
    c1: float
    c2: float
    c3: float
    beta1: float
    beta2: float


def _tail_columns_left(r: AsymptoticRoots, x: np.ndarray) -> np.ndarray:
    """Asymptotic solutions (columns c1, c2, beta1) evaluated at x (< -x_match ok).

    Resonant cubic modes (p^2 ~ k^2) switch the g particular solution to the
    (k^2/p) x e^{px} form.
    """
    k = r.k
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((5, 3, x.size))
    for j, p in ((0, r.p1), (1, r.p2)):
        e = np.exp(p * x)
        out[0, j] = e
        out[1, j] = p * e
        out[2, j] = p * p * e
        if k > 0 and abs(p * p - k * k) < RESONANCE_TOL:
            a = k * k / p
            out[3, j] = a * x * e
            out[4, j] = a * (1.0 + p * x) * e
        elif k > 0:
            cpl = (p * p + k * k) / (p * p - k * k)
            out[3, j] = cpl * e
            out[4, j] = cpl * p * e
    ek = np.exp(k * x)
    out[3, 2] = ek
    out[4, 2] = k * ek
    return out


def _tail_columns_right(r: AsymptoticRoots, x: np.ndarray) -> np.ndarray:
    """Asymptotic solutions (columns c3, beta2) evaluated at x (> +x_match ok)."""
    k, p = r.k, r.p3
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((5, 2, x.size))
    e = np.exp(p * x)
    out[0, 0] = e
    out[1, 0] = p * e
    out[2, 0] = p * p * e
    if k > 0 and abs(p * p - k * k) < RESONANCE_TOL:
        a = k * k / p
        out[3, 0] = a * x * e
        out[4, 0] = a * (1.0 + p * x) * e
    elif k > 0:
        cpl = (p * p + k * k) / (p * p - k * k)
        out[3, 0] = cpl * e
        out[4, 0] = cpl * p * e
    ek = np.exp(-k * x)
    out[3, 1] = ek
    out[4, 1] = -k * ek
    return out


@dataclass
class PerturbationShape:
    """Sampled perturbation profiles on [-x_match, x_match] plus asymptotic tails.

    h in the complex ansatz is purely imaginary for real (f, g); h_imag holds
    h = i*h_imag. Normalized so max|f| = 1 with a positive peak.
    """

    xs: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h_imag: np.ndarray
    tails: Tails
    k: float
    gamma: float
    x_match: float
    states: np.ndarray = field(repr=False)  # (5, n) interior states
    roots: Optional[AsymptoticRoots] = field(default=None, repr=False)

    def __post_init__(self):
        self._spl_f = CubicSpline(self.xs, self.f)
        self._spl_g = CubicSpline(self.xs, self.g)
        self._spl_h = CubicSpline(self.xs, self.h_imag)

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(f, g, h_imag) at arbitrary x, using the asymptotic tails outside."""
        x = np.asarray(x, dtype=float)
        shp = x.shape
        x = np.atleast_1d(x).ravel()
        f = np.empty_like(x)
        g = np.empty_like(x)
        h = np.empty_like(x)
        inside = np.abs(x) <= self.x_match
        f[inside] = self._spl_f(x[inside])
        g[inside] = self._spl_g(x[inside])
        h[inside] = self._spl_h(x[inside])
        left = x < -self.x_match
        right = x > self.x_match
        if self.k == 0.0:
            r = self.roots
            if np.any(left):
                cols = _tail_columns_left(r, x[left])[:3, :2]
                y = np.einsum("jcn,c->jn", cols, [self.tails.c1, self.tails.c2])
                f[left] = g[left] = y[0]
                h[left] = 0.0
            if np.any(right):
                cols = _tail_columns_right(r, x[right])[:3, :1]
                f[right] = g[right] = self.tails.c3 * cols[0, 0]
                h[right] = 0.0
            return f.reshape(shp), g.reshape(shp), h.reshape(shp)
        for mask, tail_fn, coeffs in (
            (left, _tail_columns_left, [self.tails.c1, self.tails.c2, self.tails.beta1]),
            (right, _tail_columns_right, [self.tails.c3, self.tails.beta2]),
        ):
            if not np.any(mask):
                continue
            cols = tail_fn(self.roots, x[mask])
            y = np.einsum("jcn,c->jn", cols, coeffs)
            f[mask] = y[0]
            g[mask] = y[3]
            h[mask] = -(y[4] - y[1]) / self.k
        return f.reshape(shp), g.reshape(shp), h.reshape(shp)


def _null_vector(Mmat: np.ndarray, off_curve_tol: float, degeneracy_ratio: float = 1e3):
    norms = np.linalg.norm(Mmat, axis=0)
    _, sv, Vt = np.linalg.svd(Mmat / norms)
    rel = sv / sv[0]
    if rel[-1] > off_curve_tol:
        raise OffCurveError(
            f"matching matrix smallest singular value {rel[-1]:.3g} exceeds "
            f"{off_curve_tol}; point is off the zero curve", residual=float(rel[-1]))
    if sv[-2] < degeneracy_ratio * sv[-1]:
        raise DegenerateShapeError(
            f"two near-degenerate null directions (sv ratio {sv[-2]/sv[-1]:.3g}); "
            f"directions: {Vt[-1]} and {Vt[-2]}")
    return Vt[-1] / norms  # undo the column scaling


def perturbation_shape(k: float, gamma: float, x_match: float = DEFAULT_X_MATCH,
                       n_samples: int = 2001,
                       off_curve_tol: float = 1e-6) -> PerturbationShape:
    """Construct the bounded perturbation profile at an on-curve (k, gamma).

    The null vector of the midpoint matching matrix fixes the boundary data;
    the interior profiles come from dense integration of the linearized
    system, h from h = (g' - f')/(ik), and the tail coefficients from a
    least-squares fit of the asymptotic forms at +-x_match.
    """
    xs = np.linspace(-x_match, x_match, n_samples)
    if k == 0.0:
        return _perturbation_shape_k0(gamma, x_match, xs, off_curve_tol)
    Mmat, r, solL, solR = _bidirectional_matrix(k, gamma, x_match, dense=True)
    nvec = _null_vector(Mmat, off_curve_tol)
    a, b = nvec[:3], nvec[3:]

    states = np.empty((5, xs.size))
    neg = xs < 0.0
    states[:, neg] = np.einsum("jcn,c->jn", solL.sol(xs[neg]).reshape(5, 3, -1), a)
    states[:, ~neg] = np.einsum("jcn,c->jn", solR.sol(xs[~neg]).reshape(5, 2, -1), b)

    f = states[0]
    i_peak = int(np.argmax(np.abs(f)))
    scale = 1.0 / f[i_peak]
    states = states * scale

    f = states[0]
    g = states[3]
    h_imag = -(states[4] - states[1]) / k

    TL = _tail_columns_left(r, np.array([-x_match]))[:, :, 0]
    TR = _tail_columns_right(r, np.array([x_match]))[:, :, 0]
    c1, c2, beta1 = np.linalg.lstsq(TL, states[:, 0], rcond=None)[0]
    c3, beta2 = np.linalg.lstsq(TR, states[:, -1], rcond=None)[0]

    return PerturbationShape(xs=xs, f=f, g=g, h_imag=h_imag,
                             tails=Tails(c1, c2, c3, beta1, beta2),
                             k=k, gamma=gamma, x_match=x_match,
                             states=states, roots=r)


def _perturbation_shape_k0(gamma: float, x_match: float, xs: np.ndarray,
                           off_curve_tol: float) -> PerturbationShape:
    r = characteristic_roots(0.0, gamma)
    A = _linearized_rhs_k0(gamma)
    BL = np.array([[1.0, r.p1, r.p1 ** 2], [1.0, r.p2, r.p2 ** 2]]).T
    BL /= np.linalg.norm(BL, axis=0)
    BR = np.array([[1.0, r.p3, r.p3 ** 2]]).T
    BR /= np.linalg.norm(BR, axis=0)
    solL = _flow(A, -x_match, 0.0, BL, dense=True)
    solR = _flow(A, x_match, 0.0, BR, dense=True)
    Mmat = np.hstack([solL.sol(0.0).reshape(3, 2), -solR.sol(0.0).reshape(3, 1)])
    nvec = _null_vector(Mmat, off_curve_tol)
    a, b = nvec[:2], nvec[2:]

    states3 = np.empty((3, xs.size))
    neg = xs < 0.0
    states3[:, neg] = np.einsum("jcn,c->jn", solL.sol(xs[neg]).reshape(3, 2, -1), a)
    states3[:, ~neg] = np.einsum("jcn,c->jn", solR.sol(xs[~neg]).reshape(3, 1, -1), b)

    f = states3[0]
    i_peak = int(np.argmax(np.abs(f)))
    states3 = states3 / f[i_peak]
    f = states3[0]

    TL = _tail_columns_left(r, np.array([-x_match]))[:3, :2, 0]
    TR = _tail_columns_right(r, np.array([x_match]))[:3, :1, 0]
    c1, c2 = np.linalg.lstsq(TL, states3[:, 0], rcond=None)[0]
    (c3,) = np.linalg.lstsq(TR, states3[:, -1], rcond=None)[0]

    # embed in the 5-state layout with g = f
    states = np.vstack([states3, states3[0], states3[1]])
    return PerturbationShape(xs=xs, f=f, g=f.copy(), h_imag=np.zeros_like(f),
                             tails=Tails(c1, c2, c3, 0.0, 0.0),
                             k=0.0, gamma=gamma, x_match=x_match,
                             states=states, roots=r)


# --- perturbed initial data -----------------------------------------------------


@dataclass(frozen=True)
class PerturbationParams:
    """Parameters of a transverse-perturbation experiment."""

    k: float
    gamma: float
    epsilon: float
    c: float = 1.0
    x_match: float = DEFAULT_X_MATCH

    def __post_init__(self):
        if self.k < 0:
            raise ConfigurationError(f"k={self.k} must be >= 0")
        if self.epsilon < 0:
            raise ConfigurationError(f"epsilon={self.epsilon} must be >= 0")
        if self.x_match <= 0:
            raise ConfigurationError(f"x_match={self.x_match} must be positive")
        if self.c <= 0:
            raise ConfigurationError(f"c={self.c} must be positive")


def admissible_y_width(k: float, c: float, n_periods: int = 2) -> float:
    """Smallest y-width holding n_periods of the lab-frame perturbation."""
    return n_periods * comoving_transform(c).y_period(k)


def perturbed_initial_state(shape: PerturbationShape, params: PerturbationParams,
                            grid: TorusGrid, x0: Optional[float] = None) -> NVState:
    """Initial data u = c(u0 + eps f cos(k_eff y)) at the lab-frame scaling.

    k_eff = k*sqrt(c); the grid's y-width must hold an integer number of
    perturbation periods. v and w are obtained from the spectral auxiliary
    solve of u, which agrees with the (g, h) ansatz up to the periodic tail
    truncation and keeps the slaving invariant exact.
    """
    scaling = comoving_transform(params.c)
    sc = scaling.space
    k_eff = params.k * sc
    if params.k > 0:
        n_per = grid.Wy * k_eff / (2.0 * math.pi)
        if abs(n_per - round(n_per)) > 1e-8 or round(n_per) < 1:
            n = max(1, round(n_per))
            good = 2.0 * math.pi * n / k_eff
            raise ConfigurationError(
                f"y-width {grid.Wy} is not a multiple of the perturbation period "
                f"{2.0 * math.pi / k_eff:.6g}; nearest admissible widths "
                f"{good:.6g} and {good + 2.0 * math.pi / k_eff:.6g}")
    if x0 is None:
        x0 = grid.Wx / 2.0
    edge = sc * min(x0, grid.Wx - x0)
    if 2.0 * params.c * sech(edge) ** 2 > 1e-10:
        raise ConfigurationError(
            f"soliton at x0={x0} has tail {2.0 * params.c * sech(edge)**2:.3g} "
            "> 1e-10 at the domain edge; enlarge the domain or re-center")

    X = grid.x[:, None]
    Y = grid.y[None, :]
    xi_loc = sc * (X - x0)
    u = params.c * soliton_profile(xi_loc) * np.ones((1, grid.M))
    if params.epsilon > 0:
        fv, _, _ = shape.evaluate(xi_loc[:, 0])
        u = u + params.c * params.epsilon * fv[:, None] * np.cos(k_eff * Y)
    u_field = RealField(grid, u)
    u_hat = SpectralField(grid, np.fft.fft2(u))
    v_hat, w_hat = solve_auxiliary(u_hat)
    v = RealField(grid, np.fft.ifft2(v_hat.coeffs).real)
    w = RealField(grid, np.fft.ifft2(w_hat.coeffs).real)
    return NVState(t=0.0, u=u_field, v=v, w=w)


def ansatz_fields(shape: PerturbationShape, params: PerturbationParams,
                  grid: TorusGrid, x0: float, t: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(u, v, w) of the real perturbation ansatz, for consistency checks."""
    scaling = comoving_transform(params.c)
    sc = scaling.space
    k_eff = params.k * sc
    growth = math.exp(params.gamma * scaling.time * t)
    X = grid.x[:, None]
    Y = grid.y[None, :]
    xi_loc = sc * (X - x0 - params.c * t)
    fv, gv, hv = shape.evaluate(xi_loc[:, 0])
    base = soliton_profile(xi_loc) * np.ones((1, grid.M))
    eps = params.epsilon * growth
    u = params.c * (base + eps * fv[:, None] * np.cos(k_eff * Y))
    v = params.c * (base + eps * gv[:, None] * np.cos(k_eff * Y))
    # real form of the i*h_imag*exp(iky) channel: w = -h_imag sin(ky),
    # consistent with the constraint u_x = v_x - w_y
    w = -params.c * eps * hv[:, None] * np.sin(k_eff * Y)
    return u, v, w


# --- growth-rate fitting ---------------------------------------------------------


def growth_rate_fit(deviation_norms: Sequence[tuple[float, float]],
                    window: Optional[tuple[float, float]] = None) -> tuple[float, float]:
    """Least-squares slope of log d versus t; returns (gamma_est, r_squared)."""
    data = np.asarray(list(deviation_norms), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ConfigurationError("expected a sequence of (t, d) pairs")
    if window is not None:
        lo, hi = window
        data = data[(data[:, 0] >= lo) & (data[:, 0] <= hi)]
    if data.shape[0] < 5:
        raise ConfigurationError("need at least 5 samples to fit a growth rate")
    if np.any(data[:, 1] <= 0):
        raise ConfigurationError("deviation norms must be positive for a log fit")
    t = data[:, 0]
    logd = np.log(data[:, 1])
    slope, intercept = np.polyfit(t, logd, 1)
    pred = slope * t + intercept
    ss_res = float(np.sum((logd - pred) ** 2))
    ss_tot = float(np.sum((logd - logd.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2
