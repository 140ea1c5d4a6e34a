import csv
import struct

import numpy as np
import pytest


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


@pytest.fixture
def speed_csv(tmp_path):
    alphas = np.linspace(0, 2 * np.pi, 90)
    rows = [(a, np.cos(3 * a), 1.0 * np.cos(3 * a)) for a in alphas]
    return write_csv(tmp_path / "speed_profile.csv",
                     ["alpha", "kappa", "speed"], rows)


@pytest.fixture
def scan_csv(tmp_path):
    ks = np.linspace(0.1, 0.9, 9)
    gs = np.linspace(0.0, 0.4, 5)
    rows = [(k, g, abs(g - k * (1 - k) * (2 - k)) + 1e-12, "bidirectional")
            for k in ks for g in gs]
    return write_csv(tmp_path / "scan.csv",
                     ["k", "gamma", "normalized_absD", "method"], rows)


@pytest.fixture
def scan_k0_csv(tmp_path):
    gs = np.linspace(0.0, 0.5, 20)
    return write_csv(tmp_path / "scan_k0.csv", ["gamma", "D0"],
                     [(g, -g * (1 + g)) for g in gs])


@pytest.fixture
def trace_csv(tmp_path):
    ks = np.linspace(0.05, 0.95, 40)
    rows = [(i * 0.01, k, k * (1 - k) * (2 - k), 1e-12)
            for i, k in enumerate(ks)]
    return write_csv(tmp_path / "trace.csv", ["s", "k", "gamma", "residual"], rows)


@pytest.fixture
def band_txt(tmp_path):
    path = tmp_path / "band.txt"
    path.write_text("band k_min=0.05 k_max=0.95 closed=true\n")
    return path


@pytest.fixture
def shape_csv(tmp_path):
    xs = np.linspace(-12, 12, 101)
    rows = zip(xs, 1 / np.cosh(xs) ** 3,
               -np.tanh(xs) ** 2 / np.cosh(xs),
               -np.tanh(xs) / np.cosh(xs))
    return write_csv(tmp_path / "shape.csv", ["x", "f", "g", "h_imag"], rows)


@pytest.fixture
def deviation_csv(tmp_path):
    ts = np.linspace(0, 5, 50)
    rows = [(t, 0.01 * np.exp(0.37 * t), np.nan if t == 0 else 0.37)
            for t in ts]
    return write_csv(tmp_path / "deviation.csv",
                     ["t", "deviation_l2", "gamma_running"], rows)


@pytest.fixture
def snapshot_file(tmp_path):
    L, M = 16, 8
    Wx, Wy, t = 4.0, 2.0, 1.25
    x = np.linspace(0, Wx, L, endpoint=False)
    y = np.linspace(0, Wy, M, endpoint=False)
    u = -2.0 / np.cosh(x[:, None] - 2.0) ** 2 * np.cos(y[None, :])
    path = tmp_path / "snapshot.nvg"
    with open(path, "wb") as fh:
        fh.write(b"NVGRID1\0")
        fh.write(struct.pack("<II3d", L, M, Wx, Wy, t))
        fh.write(u.astype("<f8").tobytes(order="F"))  # x fastest
    return path, u, (Wx, Wy, t)
