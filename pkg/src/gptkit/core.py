"""Vector-space machinery for finite-dimensional operational theories.

A system of dimension d lives in R^(d+1).  States carry a leading 1, the
unit effect is (1, 0, ..., 0), effects act through the Euclidean dot
product, and transformations are (d+1)x(d+1) real matrices.  Two state-space
shapes are supported: convex polytopes given by their vertices and unit
Euclidean balls centred at the origin of the last d coordinates.

All containers are immutable after construction and every operation is a
pure function, so concurrent read-only use is safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from . import lp
from .rotations import deterministic_sphere_points

DEFAULT_TOL = 1e-9

_REVERSIBLE_SPHERE_SAMPLES = 100


def _frozen_array(a, dims: int) -> np.ndarray:
    out = np.array(a, dtype=float)
    if out.ndim != dims:
        raise ValueError(f"expected a {dims}-dimensional array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("entries must be finite")
    out.setflags(write=False)
    return out


def unit_effect(dim: int) -> np.ndarray:
    """The effect giving probability 1 on every state: (1, 0, ..., 0)."""
    u = np.zeros(dim + 1)
    u[0] = 1.0
    return u


def zero_effect(dim: int) -> np.ndarray:
    return np.zeros(dim + 1)


def state_from_point(tilde: Sequence[float]) -> np.ndarray:
    """Lift a point of the reduced state set to a full state vector."""
    return np.concatenate([[1.0], np.asarray(tilde, dtype=float)])


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many states, one per row of `vertices`."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.vertices, 2)
        if v.shape[0] == 0:
            raise ValueError("a polytope needs at least one vertex")
        if np.max(np.abs(v[:, 0] - 1.0)) > 0:
            raise ValueError("state vertices must have first entry exactly 1")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] - 1


@dataclass(frozen=True)
class Ball:
    """Unit Euclidean ball in the last `dim` coordinates."""

    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")


ConvexSet = Union[Polytope, Ball]


@dataclass(frozen=True)
class PolytopeEffects:
    """Effect space given as the convex hull of generator rows.

    The generator list always contains the unit effect and the zero effect.
    """

    generators: np.ndarray

    def __post_init__(self):
        g = _frozen_array(self.generators, 2)
        d = g.shape[1] - 1
        has_unit = np.any(np.all(np.abs(g - unit_effect(d)) < 1e-12, axis=1))
        has_zero = np.any(np.all(np.abs(g) < 1e-12, axis=1))
        if not (has_unit and has_zero):
            raise ValueError("effect generators must include the unit and zero effects")
        object.__setattr__(self, "generators", g)

    @property
    def dim(self) -> int:
        return self.generators.shape[1] - 1


@dataclass(frozen=True)
class BallEffects:
    """Dual of the unit ball: hull of zero, unit, and (1, v)/2 for unit v."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")


EffectSpace = Union[PolytopeEffects, BallEffects]


@dataclass(frozen=True)
class TheorySpec:
    """A complete single-system theory: states, effects, reversible maps.

    `effect_convention` records whether the model ships every normalized
    effect ("all-normalized") or a restricted generating set ("restricted");
    no global choice is imposed across the zoo.
    """

    name: str
    dim: int
    states: ConvexSet
    effects: EffectSpace
    reversibles: tuple[np.ndarray, ...] = field(default_factory=tuple)
    effect_convention: str = "all-normalized"

    def __post_init__(self):
        state_dim = self.states.dim if isinstance(self.states, (Polytope, Ball)) else -1
        if state_dim != self.dim or self.effects.dim != self.dim:
            raise ValueError("state and effect spaces must share the theory dimension")
        revs = tuple(_frozen_array(m, 2) for m in self.reversibles)
        for m in revs:
            if m.shape != (self.dim + 1, self.dim + 1):
                raise ValueError("reversible generators must be (d+1)x(d+1)")
        object.__setattr__(self, "reversibles", revs)
        self._validate_effect_generators()

    def _validate_effect_generators(self, tol: float = DEFAULT_TOL) -> None:
        # every generator must give values in [0, 1] across the state space
        if not isinstance(self.effects, PolytopeEffects):
            return
        gens = self.effects.generators
        if isinstance(self.states, Polytope):
            values = gens @ self.states.vertices.T
            low, high = values.min(), values.max()
        else:
            radii = np.linalg.norm(gens[:, 1:], axis=1)
            low = (gens[:, 0] - radii).min()
            high = (gens[:, 0] + radii).max()
        if low < -tol or high > 1.0 + tol:
            raise ValueError("an effect generator leaves [0, 1] on the state space")

    @property
    def unit(self) -> np.ndarray:
        return unit_effect(self.dim)

    @property
    def zero(self) -> np.ndarray:
        return zero_effect(self.dim)

    def extreme_states(self, count: int = 64) -> np.ndarray:
        """Vertices for polytopes, a deterministic sphere sample for balls."""
        if isinstance(self.states, Polytope):
            return self.states.vertices
        pts = deterministic_sphere_points(self.dim, count)
        return np.hstack([np.ones((count, 1)), pts])

    def effect_generators(self, count: int = 64) -> np.ndarray:
        if isinstance(self.effects, PolytopeEffects):
            return self.effects.generators
        pts = deterministic_sphere_points(self.dim, count)
        extremal = 0.5 * np.hstack([np.ones((count, 1)), pts])
        return np.vstack([self.zero, self.unit, extremal])


def probability(effect: np.ndarray, state: np.ndarray) -> float:
    """Outcome probability: the Euclidean dot product of effect and state.

    The raw value is returned unclamped; clipping is a reporting concern.
    """
    e = np.asarray(effect, dtype=float)
    z = np.asarray(state, dtype=float)
    if e.shape != z.shape or e.ndim != 1:
        raise ValueError(f"effect/state length mismatch: {e.shape} vs {z.shape}")
    return float(e @ z)


def clamp_probability(p: float, tol: float = DEFAULT_TOL) -> float:
    """Clamp a pairing value to [0, 1] for display, within tolerance only."""
    if p < -tol or p > 1.0 + tol:
        raise ValueError(f"value {p} is not a probability within tolerance {tol}")
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    margin: float
    detail: str = ""


def validate_state(
    space: ConvexSet,
    v: np.ndarray,
    tol: float = DEFAULT_TOL,
    exact: bool = False,
) -> MembershipReport:
    """Membership test for a candidate state vector.

    Polytopes are decided by LP feasibility (exact rational pivoting on
    request); balls analytically via the norm of the reduced part.
    """
    vec = np.asarray(v, dtype=float)
    if vec.ndim != 1 or vec.shape[0] != space.dim + 1:
        return MembershipReport(False, float("inf"), "dimension mismatch")
    if not np.all(np.isfinite(vec)):
        return MembershipReport(False, float("inf"), "non-finite entries")
    if abs(vec[0] - 1.0) > tol:
        return MembershipReport(False, abs(vec[0] - 1.0), "first entry must be 1")
    if isinstance(space, Ball):
        norm = float(np.linalg.norm(vec[1:]))
        if norm <= 1.0 + tol:
            return MembershipReport(True, max(0.0, norm - 1.0), "inside ball")
        return MembershipReport(False, norm - 1.0, "outside ball")
    res = lp.hull_membership(space.vertices, vec, tol=tol, exact=exact)
    detail = "convex combination found" if res.member else "outside hull"
    return MembershipReport(res.member, res.margin, detail)


def is_pure(space: ConvexSet, v: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Is `v` an extreme point of the state space?

    Raises ValueError when `v` is not a member at all.
    """
    report = validate_state(space, v, tol)
    if not report.member:
        raise ValueError(f"not a state of the space: {report.detail}")
    vec = np.asarray(v, dtype=float)
    if isinstance(space, Ball):
        return abs(float(np.linalg.norm(vec[1:])) - 1.0) <= tol
    dists = np.max(np.abs(space.vertices - vec), axis=1)
    return bool(np.min(dists) <= tol)


def is_normalized_effect(
    theory: TheorySpec, e: np.ndarray, tol: float = DEFAULT_TOL
) -> bool:
    """Does `e` give values in [0, 1] on the whole state space?

    Checked at the vertices for polytopes; for balls the exact condition is
    0 <= e0 +- ||e_reduced|| <= 1.
    """
    vec = np.asarray(e, dtype=float)
    if vec.shape != (theory.dim + 1,):
        raise ValueError("effect has the wrong length for this theory")
    if isinstance(theory.states, Ball):
        r = float(np.linalg.norm(vec[1:]))
        lo, hi = vec[0] - r, vec[0] + r
        return lo >= -tol and hi <= 1.0 + tol
    values = theory.states.vertices @ vec
    return bool(values.min() >= -tol and values.max() <= 1.0 + tol)


def apply_map(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    mat = np.asarray(m, dtype=float)
    vec = np.asarray(v, dtype=float)
    if mat.shape[1] != vec.shape[0]:
        raise ValueError("matrix/vector dimension mismatch")
    return mat @ vec


def _maps_states_inside(theory: TheorySpec, m: np.ndarray, tol: float) -> bool:
    if isinstance(theory.states, Polytope):
        return all(
            validate_state(theory.states, m @ v, tol).member
            for v in theory.states.vertices
        )
    # ball path: structural check plus a deterministic sphere sample
    d = theory.dim
    first_row_ok = np.max(np.abs(m[0] - unit_effect(d))) <= tol
    first_col_ok = np.max(np.abs(m[:, 0] - unit_effect(d))) <= tol
    block = m[1:, 1:]
    orthogonal = np.max(np.abs(block.T @ block - np.eye(d))) <= tol
    if not (first_row_ok and first_col_ok and orthogonal):
        return False
    sample = theory.extreme_states(_REVERSIBLE_SPHERE_SAMPLES)
    images = sample @ m.T
    norms = np.linalg.norm(images[:, 1:], axis=1)
    return bool(np.max(np.abs(images[:, 0] - 1.0)) <= tol and np.max(norms) <= 1.0 + tol)


def is_reversible(theory: TheorySpec, m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Is `m` a reversible transformation of the theory?

    True iff `m` is invertible and both `m` and its inverse carry every
    extreme state back into the state space.  Singular maps report False
    rather than raising.
    """
    mat = np.asarray(m, dtype=float)
    if mat.shape != (theory.dim + 1, theory.dim + 1):
        raise ValueError("transformation has the wrong shape for this theory")
    if abs(np.linalg.det(mat)) <= tol:
        return False
    inv = np.linalg.inv(mat)
    return _maps_states_inside(theory, mat, tol) and _maps_states_inside(theory, inv, tol)


def convex_mix(
    weighted: Iterable[tuple[float, np.ndarray]], tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Form the mixture sum_j q_j zeta_j of states with probabilities q_j."""
    pairs = [(float(q), np.asarray(z, dtype=float)) for q, z in weighted]
    if not pairs:
        raise ValueError("empty mixture")
    weights = np.array([q for q, _ in pairs])
    if weights.min() < -tol:
        raise ValueError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1.0) > tol:
        raise ValueError(f"mixture weights sum to {weights.sum()}, not 1")
    return sum(q * z for q, z in pairs)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def theory_to_dict(theory: TheorySpec) -> dict:
    if isinstance(theory.states, Polytope):
        states = {"kind": "polytope", "vertices": theory.states.vertices.tolist()}
    else:
        states = {"kind": "ball", "d": theory.states.dim}
    if isinstance(theory.effects, PolytopeEffects):
        effects = {"kind": "hull", "generators": theory.effects.generators.tolist()}
    else:
        effects = {"kind": "ball-dual", "d": theory.effects.dim}
    return {
        "name": theory.name,
        "d": theory.dim,
        "states": states,
        "effects": effects,
        "reversibles": [m.tolist() for m in theory.reversibles],
        "effect_convention": theory.effect_convention,
    }


def theory_to_json(theory: TheorySpec) -> str:
    """Canonical JSON form; matrices are nested row-major lists."""
    return json.dumps(theory_to_dict(theory), sort_keys=True, separators=(",", ":"))


def theory_from_dict(doc: dict) -> TheorySpec:
    if doc["states"]["kind"] == "polytope":
        states: ConvexSet = Polytope(np.array(doc["states"]["vertices"]))
    else:
        states = Ball(int(doc["states"]["d"]))
    if doc["effects"]["kind"] == "hull":
        effects: EffectSpace = PolytopeEffects(np.array(doc["effects"]["generators"]))
    else:
        effects = BallEffects(int(doc["effects"]["d"]))
    return TheorySpec(
        name=doc["name"],
        dim=int(doc["d"]),
        states=states,
        effects=effects,
        reversibles=tuple(np.array(m) for m in doc.get("reversibles", [])),
        effect_convention=doc.get("effect_convention", "all-normalized"),
    )


def theory_from_json(text: str) -> TheorySpec:
    return theory_from_dict(json.loads(text))
