"""Trace the transverse-instability curve of the line soliton.

A transverse perturbation ~ (f, g, h)(x) e^(gamma t + i k y) of the c = 1
soliton is an eigenmode when the mismatch determinant D(k, gamma) of the
linearized ODE system vanishes. This script seeds the tracer on the gamma > 0
branch, follows the zero curve through its corners at (0, 0) and (1, 0), and
compares the result with the closed form gamma = k(1 - k)(2 - k) that the
traced zeros turn out to satisfy.

Run:  python3 demos/02_instability_curve.py   (takes about a minute)
"""

import time

import numpy as np

from nvlab import find_zero_gamma, trace_instability_curve, unstable_band

seed_k = 0.9
seed_gamma = find_zero_gamma(seed_k, 0.05, 0.2)
gamma2 = find_zero_gamma(seed_k - 0.01, 0.05, 0.2)
direction = np.array([-0.01, gamma2 - seed_gamma])
direction /= np.linalg.norm(direction)
print(f"seed: ({seed_k}, {seed_gamma:.6f}), direction {direction.round(4)}")

t0 = time.perf_counter()
result = trace_instability_curve((seed_k, seed_gamma), tuple(direction),
                                 step=0.01, max_points=600)
elapsed = time.perf_counter() - t0

k_min, k_max = unstable_band(result.points)
print(f"traced {len(result.points)} points in {elapsed:.1f} s, "
      f"closed = {result.closed}")
print(f"unstable band: {k_min:.5f} < k < {k_max:.5f}")

law_dev = max(abs(abs(p.gamma) - p.k * (1 - p.k) * (2 - p.k))
              for p in result.points)
print(f"max deviation from gamma = +-k(1-k)(2-k): {law_dev:.3e}")

apex = max(result.points, key=lambda p: p.gamma)
print(f"apex: k = {apex.k:.5f}, gamma = {apex.gamma:.5f} "
      f"(closed form: k = 1 - 1/sqrt(3) = {1 - 3**-0.5:.5f}, "
      f"gamma = 2/(3 sqrt(3)) = {2 / (3 * 3**0.5):.5f})")
