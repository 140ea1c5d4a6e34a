"""Periodic torus grid, DFT conventions, spectral symbols, and the auxiliary solve.

Conventions: fields are (L, M) arrays with axis 0 along x and axis 1 along y.
The forward transform is the plain unnormalized double sum; the inverse carries
the 1/(L*M) factor (numpy's fft2/ifft2 pair). Wavenumbers are
xi_p = 2*pi*p/Wx for p in {-L/2, ..., L/2-1} and likewise eta_q.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

NVGRID_MAGIC = b"NVGRID1\x00"


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Rectangular periodic grid [0, Wx) x [0, Wy) with L x M points."""

    Wx: float
    Wy: float
    L: int
    M: int

    @property
    def dx(self) -> float:
        return self.Wx / self.L

    @property
    def dy(self) -> float:
        return self.Wy / self.M

    @cached_property
    def x(self) -> np.ndarray:
        return self.dx * np.arange(self.L)

    @cached_property
    def y(self) -> np.ndarray:
        return self.dy * np.arange(self.M)

    @cached_property
    def xi(self) -> np.ndarray:
        """x-wavenumbers in FFT order, shape (L,)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.L, d=self.dx)

    @cached_property
    def eta(self) -> np.ndarray:
        """y-wavenumbers in FFT order, shape (M,)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.M, d=self.dy)

    @cached_property
    def XI(self) -> np.ndarray:
        return self.xi[:, None]

    @cached_property
    def ETA(self) -> np.ndarray:
        return self.eta[None, :]

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """1 everywhere except the unpaired Nyquist rows/columns, shape (L, M).

        Odd-order derivative symbols have no real-valued counterpart at the
        Nyquist mode, so it is zeroed in all of them.
        """
        mask = np.ones((self.L, self.M))
        mask[self.L // 2, :] = 0.0
        mask[:, self.M // 2] = 0.0
        return mask

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask for quadratic products, shape (L, M)."""
        cut_x = (2.0 / 3.0) * np.abs(self.xi).max()
        cut_y = (2.0 / 3.0) * np.abs(self.eta).max()
        return ((np.abs(self.XI) <= cut_x) & (np.abs(self.ETA) <= cut_y)).astype(float)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.L, self.M)


def make_grid(Wx: float, Wy: float, L: int, M: int) -> TorusGrid:
    """Build a TorusGrid; L and M must be powers of two (standard FFT), >= 8."""
    if Wx <= 0 or Wy <= 0:
        raise ConfigurationError(f"domain widths must be positive, got Wx={Wx}, Wy={Wy}")
    for name, n in (("L", L), ("M", M)):
        if not _is_power_of_two(n) or n < 8:
            raise ConfigurationError(f"{name}={n} must be a power of two and >= 8")
    return TorusGrid(float(Wx), float(Wy), int(L), int(M))


@dataclass(frozen=True)
class RealField:
    """Real samples u_{l,m} at (l*dx, m*dy) on a TorusGrid."""

    grid: TorusGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != self.grid.shape:
            raise ConfigurationError(
                f"field shape {s.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(s)):
            raise ConfigurationError("field contains non-finite samples")
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class SpectralField:
    """Complex DFT coefficients indexed by (xi_p, eta_q) in FFT order."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise ConfigurationError(
                f"spectrum shape {c.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "coeffs", c)


def forward(field: RealField) -> SpectralField:
    """Unnormalized forward DFT."""
    return SpectralField(field.grid, np.fft.fft2(field.samples))


def inverse(spec: SpectralField) -> RealField:
    """Inverse DFT with the 1/(L*M) factor; imaginary round-off is dropped."""
    return RealField(spec.grid, np.fft.ifft2(spec.coeffs).real)


def is_hermitian(spec: SpectralField, tol: float = 1e-10) -> bool:
    """Check u_hat(-p,-q) == conj(u_hat(p,q)) for all paired indices."""
    c = spec.coeffs
    flipped = np.conj(np.roll(c[::-1, ::-1], (1, 1), axis=(0, 1)))
    scale = max(np.abs(c).max(), 1.0)
    return bool(np.abs(c - flipped).max() <= tol * scale)


def linear_symbol(grid: TorusGrid) -> SpectralField:
    """Diagonal of D in the spectral ODE 4*dc/dt = D c + F(c): i(xi^3 - 3 xi eta^2)."""
    sym = 1j * (grid.XI**3 - 3.0 * grid.XI * grid.ETA**2) * grid.nyquist_mask
    return SpectralField(grid, sym)


def _aux_multipliers(grid: TorusGrid) -> tuple[np.ndarray, np.ndarray]:
    ksq = grid.XI**2 + grid.ETA**2
    safe = ksq.copy()
    safe[0, 0] = 1.0
    mv = (grid.XI**2 - grid.ETA**2) / safe
    mw = (-2.0 * grid.XI * grid.ETA) / safe
    mv[0, 0] = 0.0  # zero-mean convention for v
    mw[0, 0] = 0.0  # and for w
    return mv, mw


def solve_auxiliary(u_hat: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Solve the dbar constraints for v_hat, w_hat in terms of u_hat.

    v_hat = (xi^2 - eta^2)/(xi^2 + eta^2) u_hat,
    w_hat = -2 xi eta /(xi^2 + eta^2) u_hat, with zero mean at the (0,0) mode.
    """
    mv, mw = _aux_multipliers(u_hat.grid)
    return (
        SpectralField(u_hat.grid, mv * u_hat.coeffs),
        SpectralField(u_hat.grid, mw * u_hat.coeffs),
    )


# --- NVGRID1 snapshot format -------------------------------------------------
#
# 8-byte ASCII magic "NVGRID1\0", little-endian u32 L, u32 M,
# f64 Wx, f64 Wy, f64 t, then L*M f64 samples with the x-index fastest.

_HEADER = struct.Struct("<II3d")


def write_snapshot(path, field: RealField, t: float, name: str = "u",
                   sidecar: bool = True) -> None:
    """Write an NVGRID1 binary snapshot plus a JSON metadata sidecar."""
    path = Path(path)
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(NVGRID_MAGIC)
        fh.write(_HEADER.pack(g.L, g.M, g.Wx, g.Wy, float(t)))
        # samples with x-index fastest: column-major order of the (L, M) array
        fh.write(np.ascontiguousarray(field.samples.T).tobytes())
    if sidecar:
        meta = {"format": "NVGRID1", "L": g.L, "M": g.M, "Wx": g.Wx, "Wy": g.Wy,
                "t": float(t), "field": name}
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=2))


def read_snapshot(path) -> tuple[RealField, float]:
    """Read an NVGRID1 snapshot; returns (field, t)."""
    raw = Path(path).read_bytes()
    if raw[:8] != NVGRID_MAGIC:
        raise ConfigurationError(f"{path}: bad magic, not an NVGRID1 file")
    L, M, Wx, Wy, t = _HEADER.unpack_from(raw, 8)
    samples = np.frombuffer(raw, dtype="<f8", count=L * M, offset=8 + _HEADER.size)
    grid = make_grid(Wx, Wy, L, M)
    return RealField(grid, samples.reshape(M, L).T.copy()), t


def l2_norm(field: RealField) -> float:
    """Discrete L2 norm sqrt(dx*dy*sum u^2)."""
    g = field.grid
    return float(np.sqrt(g.dx * g.dy * np.sum(field.samples**2)))
