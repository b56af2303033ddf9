"""Small dense orthogonal-matrix helpers shared across the package.

Everything here is deterministic: rotations are built from Householder
reflections, Haar-like samples come from a caller-supplied seeded generator,
and sphere discretizations are fixed lattices.
"""

from __future__ import annotations

import numpy as np

_AXIS_EPS = 1e-12


def rotation_taking_first_axis(direction: np.ndarray) -> np.ndarray:
    """Rotation O in SO(n) with O e1 = direction, for a unit n-vector.

    Built as a double Householder reflection: one reflection swaps e1 and the
    target, a second one fixing the target restores determinant +1.  Stable
    near direction = +-e1.
    """
    d = np.asarray(direction, dtype=float)
    n = d.shape[0]
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    e1 = np.zeros(n)
    e1[0] = 1.0
    v = d - e1
    if np.linalg.norm(v) < _AXIS_EPS:
        return np.eye(n)
    h1 = np.eye(n) - 2.0 * np.outer(v, v) / float(v @ v)
    # second reflection axis must be orthogonal to the target direction
    w = e1 - (e1 @ d) * d
    if np.linalg.norm(w) < 1e-8:
        # direction ~ -e1: any axis orthogonal to it works; pick the least
        # aligned coordinate axis and orthogonalize
        k = int(np.argmin(np.abs(d)))
        w = np.zeros(n)
        w[k] = 1.0
        w = w - (w @ d) * d
    h2 = np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w)
    return h2 @ h1


def rotation_between(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Rotation O in SO(n) mapping one unit vector onto another."""
    qs = rotation_taking_first_axis(np.asarray(source, dtype=float))
    qt = rotation_taking_first_axis(np.asarray(target, dtype=float))
    return qt @ qs.T


def plane_rotation(n: int, i: int, j: int, angle: float) -> np.ndarray:
    """Rotation by `angle` in the coordinate plane (i, j) of R^n."""
    if not (0 <= i < j < n):
        raise ValueError("need 0 <= i < j < n")
    out = np.eye(n)
    c, s = np.cos(angle), np.sin(angle)
    out[i, i] = c
    out[j, j] = c
    out[i, j] = -s
    out[j, i] = s
    return out


def sample_special_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-like SO(n) sample: QR of a Gaussian matrix, sign-fixed, det +1."""
    if n == 1:
        return np.eye(1)
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def deterministic_sphere_points(n: int, count: int) -> np.ndarray:
    """Fixed set of `count` unit vectors on the (n-1)-sphere.

    n = 3 uses a Fibonacci lattice (near-uniform covering); other dimensions
    fall back to normalized Gaussian draws from a fixed seed.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if n == 1:
        signs = np.array([1.0 if k % 2 == 0 else -1.0 for k in range(count)])
        return signs.reshape(-1, 1)
    if n == 3:
        k = np.arange(count, dtype=float)
        golden = (1.0 + np.sqrt(5.0)) / 2.0
        z = 1.0 - (2.0 * k + 1.0) / count
        theta = 2.0 * np.pi * k / golden
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.column_stack([rho * np.cos(theta), rho * np.sin(theta), z])
    rng = np.random.default_rng(20240 + n)
    pts = rng.standard_normal((count, n))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def rotation_angle_from_trace(o3: np.ndarray) -> float:
    """Angle of a 3x3 rotation via acos((tr - 1)/2), argument clamped."""
    arg = (float(np.trace(o3)) - 1.0) / 2.0
    return float(np.arccos(np.clip(arg, -1.0, 1.0)))
