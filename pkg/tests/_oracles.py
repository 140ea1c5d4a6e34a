"""Independent numerical oracles used by the test suite.

These deliberately avoid the code paths of the package under test: the
growth-rate oracle discretizes the linearized operator by Fourier
collocation and takes matrix eigenvalues, and the cubic-root oracle uses
companion-matrix root finding. Agreement between these and the package's
shooting/matching machinery is the core correctness evidence.
"""

import numpy as np
from scipy.linalg import eigvals, solve


def spectral_diff_matrices(n: int, width: float):
    """Dense periodic differentiation matrices of order 1, 2, 3."""
    kx = 2.0 * np.pi * np.fft.fftfreq(n, d=width / n)
    FI = np.fft.fft(np.eye(n), axis=0)

    def d(power):
        return np.real(np.fft.ifft((1j * kx)[:, None] ** power * FI, axis=0))

    return d(1), d(2), d(3)


def collocation_max_growth(k: float, n: int = 512, width: float = 60.0) -> float:
    """Largest real eigenvalue of the linearized operator at wavenumber k.

    Discretizes f''' = (-4 gamma + 3 u0')f + (4 - 3k^2)f' + 3 u0' g + 6 u0 g'
    with g eliminated through g'' - k^2 g = f'' + k^2 f on a periodic domain
    wide enough that the soliton tails are negligible. The eigenvalues of the
    resulting matrix over 4 are the growth rates gamma.
    """
    x = width * np.arange(n) / n - width / 2.0
    d1, d2, d3 = spectral_diff_matrices(n, width)
    u0 = -2.0 / np.cosh(x) ** 2
    u0p = 4.0 * np.tanh(x) / np.cosh(x) ** 2
    eye = np.eye(n)
    g_of_f = solve(d2 - k * k * eye, d2 + k * k * eye)
    lin = (-d3 + (4.0 - 3.0 * k * k) * d1 + np.diag(3.0 * u0p)
           + (np.diag(3.0 * u0p) + 6.0 * np.diag(u0) @ d1) @ g_of_f)
    ev = eigvals(lin / 4.0)
    real = ev.real[np.abs(ev.imag) < 1e-8]
    return float(real.max())


def companion_cubic_roots(k: float, gamma: float) -> np.ndarray:
    """Roots of lambda^3 + (3k^2 - 4) lambda + 4 gamma, sorted ascending."""
    return np.sort(np.roots([1.0, 0.0, 3.0 * k * k - 4.0, 4.0 * gamma]))
