"""Flat-spacetime geometry and group algebra in 1 + n dimensions.

The metric is diag(-1, +1, ..., +1) with the first coordinate temporal and
units in which the speed of light is 1.  Transformations between inertial
frames are pairs (a, L) acting as x -> L x + a, with L preserving the
metric.  The module provides the canonical boost taking the rest momentum
(m, 0, ..., 0) to an arbitrary on-shell momentum, the group element that
returns a (position, momentum) pair to its rest reference, and the induced
spatial rotation that element reduces to.

Lorentz inverses are always computed through the exact relation
L^-1 = eta L^t eta, never by general matrix inversion, so the group
structure survives to machine precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .rotations import (
    rotation_angle_from_trace,
    rotation_taking_first_axis,
    sample_special_orthogonal,
)

DEFAULT_TOL = 1e-9

_ZERO_MOMENTUM_EPS = 1e-14


def metric(n: int) -> np.ndarray:
    """Minkowski metric diag(-1, +1, ..., +1) on R^(1+n)."""
    eta = np.eye(n + 1)
    eta[0, 0] = -1.0
    return eta


def interval(x: np.ndarray, y: np.ndarray) -> float:
    """Signed squared interval -(y0-x0)^2 + sum (yi-xi)^2."""
    dx = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    if dx.ndim != 1:
        raise ValueError("spacetime points must be vectors")
    return float(-dx[0] ** 2 + dx[1:] @ dx[1:])


def minkowski_norm2(p: np.ndarray) -> float:
    """p . eta . p for a 1+n vector."""
    v = np.asarray(p, dtype=float)
    return float(-v[0] ** 2 + v[1:] @ v[1:])


def is_lorentz(lam: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Does L^t eta L = eta hold within tol?"""
    m = np.asarray(lam, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    eta = metric(m.shape[0] - 1)
    return bool(np.max(np.abs(m.T @ eta @ m - eta)) <= tol)


def is_proper_orthochronous(lam: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Lorentz, determinant +1, and no time reversal (L00 >= 1)."""
    m = np.asarray(lam, dtype=float)
    return (
        is_lorentz(m, tol)
        and abs(np.linalg.det(m) - 1.0) <= tol
        and m[0, 0] >= 1.0 - tol
    )


def lorentz_inverse(lam: np.ndarray) -> np.ndarray:
    m = np.asarray(lam, dtype=float)
    eta = metric(m.shape[0] - 1)
    return eta @ m.T @ eta


@dataclass(frozen=True)
class PoincareTransform:
    """Pair (a, L): translation vector plus Lorentz matrix, acting x -> Lx + a."""

    translation: np.ndarray
    lorentz: np.ndarray

    def __post_init__(self):
        a = np.array(self.translation, dtype=float)
        m = np.array(self.lorentz, dtype=float)
        if a.ndim != 1 or m.shape != (a.shape[0], a.shape[0]):
            raise ValueError("translation and Lorentz matrix dimensions must match")
        a.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "translation", a)
        object.__setattr__(self, "lorentz", m)

    @property
    def n(self) -> int:
        return self.translation.shape[0] - 1


def identity_transform(n: int) -> PoincareTransform:
    return PoincareTransform(np.zeros(n + 1), np.eye(n + 1))


def apply_poincare(p: PoincareTransform, x: np.ndarray) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != p.translation.shape:
        raise ValueError("point dimension does not match the transformation")
    return p.lorentz @ v + p.translation


def apply_to_pair(p: PoincareTransform, b: np.ndarray, q: np.ndarray):
    """Action on a (position, momentum) pair: (a + L b, L q).

    Momenta are translation-insensitive; only the Lorentz part acts on them.
    """
    return apply_poincare(p, b), p.lorentz @ np.asarray(q, dtype=float)


def compose(second: PoincareTransform, first: PoincareTransform) -> PoincareTransform:
    """second o first = (a2 + L2 a1, L2 L1)."""
    if second.n != first.n:
        raise ValueError("cannot compose transformations of different dimension")
    return PoincareTransform(
        second.translation + second.lorentz @ first.translation,
        second.lorentz @ first.lorentz,
    )


def inverse(p: PoincareTransform) -> PoincareTransform:
    inv = lorentz_inverse(p.lorentz)
    return PoincareTransform(-(inv @ p.translation), inv)


@dataclass(frozen=True)
class MassiveMomentum:
    """On-shell momentum: p.eta.p = -m^2 with positive energy and m > 0."""

    vector: np.ndarray
    mass: float

    def __post_init__(self):
        v = np.array(self.vector, dtype=float)
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if v[0] <= 0:
            raise ValueError("energy component must be positive")
        if abs(minkowski_norm2(v) + self.mass**2) > 1e-6 * max(1.0, self.mass**2):
            raise ValueError("momentum is off the mass shell")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def n(self) -> int:
        return self.vector.shape[0] - 1

    @property
    def spatial(self) -> np.ndarray:
        return self.vector[1:]


def rest_momentum(mass: float, n: int) -> MassiveMomentum:
    v = np.zeros(n + 1)
    v[0] = mass
    return MassiveMomentum(v, mass)


def momentum_from_spatial(mass: float, spatial: np.ndarray) -> MassiveMomentum:
    s = np.asarray(spatial, dtype=float)
    energy = float(np.sqrt(mass**2 + s @ s))
    return MassiveMomentum(np.concatenate([[energy], s]), mass)


def boost_x(p_first_axis: float, mass: float, n: int) -> np.ndarray:
    """Pure boost along the first spatial axis parametrized by momentum.

    gamma = sqrt(p^2 + m^2)/m and the off-diagonal entry is p/m, so negating
    the momentum argument yields the inverse boost.
    """
    if mass <= 0:
        raise ValueError("mass must be positive")
    gamma = float(np.sqrt(p_first_axis**2 + mass**2) / mass)
    out = np.eye(n + 1)
    out[0, 0] = gamma
    out[1, 1] = gamma
    out[0, 1] = p_first_axis / mass
    out[1, 0] = p_first_axis / mass
    return out


def rotation_to_axis(direction: np.ndarray) -> np.ndarray:
    """Pure rotation (1+n matrix) taking the first spatial axis to `direction`."""
    d = np.asarray(direction, dtype=float)
    n = d.shape[0]
    out = np.eye(n + 1)
    out[1:, 1:] = rotation_taking_first_axis(d)
    return out


def standard_boost(p: MassiveMomentum) -> np.ndarray:
    """Canonical transformation taking the rest momentum (m, 0, ..., 0) to p.

    Factored as Q(p_hat) S(|p|) Q(p_hat)^-1: rotate the first axis onto the
    momentum direction, boost along it, rotate back.  Zero spatial momentum
    returns the identity (the continuous limit; the direction is undefined
    there).
    """
    spatial = p.spatial
    norm = float(np.linalg.norm(spatial))
    if norm < _ZERO_MOMENTUM_EPS:
        return np.eye(p.n + 1)
    if p.n == 1:
        return boost_x(float(spatial[0]), p.mass, 1)
    q = rotation_to_axis(spatial / norm)
    s = boost_x(norm, p.mass, p.n)
    return q @ s @ lorentz_inverse(q)


def little_group_element(
    a: np.ndarray,
    x: np.ndarray,
    lam: np.ndarray,
    p: MassiveMomentum,
    tol: float = DEFAULT_TOL,
) -> PoincareTransform:
    """Group element fixing the pair (0, p_rest) built from a frame change.

    Composition of: the standard boost from rest launched at x, the frame
    change (a shifted copy of lam), and the inverse standard boost of the
    transformed momentum.  The pair (0, p_rest) travels to (x, p), then to
    (x + a, lam p), then back to (0, p_rest), so the result lies in the
    stabilizer of the rest pair: a pure spatial rotation.
    """
    lam = np.asarray(lam, dtype=float)
    if not is_proper_orthochronous(lam, tol):
        raise ValueError("frame change must be proper orthochronous")
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    boost_p = standard_boost(p)
    moved = MassiveMomentum(lam @ p.vector, p.mass)
    boost_moved_inv = lorentz_inverse(standard_boost(moved))
    first = PoincareTransform(x, boost_p)
    middle = PoincareTransform(x + a - lam @ x, lam)
    last = PoincareTransform(-(boost_moved_inv @ (x + a)), boost_moved_inv)
    return compose(last, compose(middle, first))


def wigner_rotation(lam: np.ndarray, p: MassiveMomentum) -> np.ndarray:
    """Spatial rotation induced on internal labels by a frame change.

    Lambda_rest(lam p)^-1 . lam . Lambda_rest(p): fixes the time axis and its
    spatial block is special orthogonal.  Pure rotations come back unchanged;
    boosts collinear with p give the identity.
    """
    lam = np.asarray(lam, dtype=float)
    moved = MassiveMomentum(lam @ p.vector, p.mass)
    return lorentz_inverse(standard_boost(moved)) @ lam @ standard_boost(p)


def rotation_block_angle(w: np.ndarray) -> float:
    """Rotation angle of a (1+3) little-group output via the trace formula."""
    return rotation_angle_from_trace(np.asarray(w, dtype=float)[1:, 1:])


# ---------------------------------------------------------------------------
# Seeded samplers for property suites
# ---------------------------------------------------------------------------


def random_rotation_transform(n: int, rng: np.random.Generator) -> np.ndarray:
    out = np.eye(n + 1)
    out[1:, 1:] = sample_special_orthogonal(n, rng)
    return out


def random_boost(n: int, rng: np.random.Generator, max_rapidity: float = 1.5) -> np.ndarray:
    """Boost in a random direction with rapidity drawn up to max_rapidity."""
    direction = rng.standard_normal(n)
    direction /= np.linalg.norm(direction)
    rapidity = rng.uniform(-max_rapidity, max_rapidity)
    q = rotation_to_axis(direction) if n > 1 else np.eye(2)
    s = np.eye(n + 1)
    s[0, 0] = s[1, 1] = np.cosh(rapidity)
    s[0, 1] = s[1, 0] = np.sinh(rapidity)
    return q @ s @ lorentz_inverse(q)


def random_proper_orthochronous(
    n: int, rng: np.random.Generator, max_rapidity: float = 1.5
) -> np.ndarray:
    return random_rotation_transform(n, rng) @ random_boost(n, rng, max_rapidity)


def random_poincare(
    n: int, rng: np.random.Generator, max_rapidity: float = 1.5, span: float = 5.0
) -> PoincareTransform:
    return PoincareTransform(
        rng.uniform(-span, span, n + 1),
        random_proper_orthochronous(n, rng, max_rapidity),
    )


def random_momentum(
    mass: float, n: int, rng: np.random.Generator, max_rapidity: float = 1.5
) -> MassiveMomentum:
    lam = random_proper_orthochronous(n, rng, max_rapidity)
    return MassiveMomentum(lam @ rest_momentum(mass, n).vector, mass)


def transforms_to_json(transforms: list[PoincareTransform]) -> str:
    """Log a transform list as a JSON array of {a, Lambda}, row-major matrices."""
    doc = [
        {"a": t.translation.tolist(), "Lambda": t.lorentz.tolist()} for t in transforms
    ]
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))
