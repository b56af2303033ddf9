"""Momentum-labelled states, frame-change invariance, and representation checks.

A classical-momentum state pairs an on-shell momentum label with an internal
finite-dimensional state; the pairing against a momentum-labelled effect
carries a Kronecker factor on the labels (labels agreeing within a tolerance
multiply the internal dot product, anything else gives exactly zero - the
continuum delta is rendered as exact label agreement).

Frame changes act on the label through their Lorentz part and on the
internal vectors through an assigned representation.  Effects transform with
the transpose inverse of the state map by default: that is the unique linear
choice keeping every outcome probability invariant.

Representation checking is extensional: group elements are sampled (or
enumerated), composed, and the assigned maps compared.  Reports serialize to
JSON as {check, samples, worst_deviation, pass}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .core import validate_state
from .minkowski import MassiveMomentum, PoincareTransform, wigner_rotation
from .rotations import sample_special_orthogonal
from .zoo import polygon_rotation, polygon_theory

DEFAULT_P_TOL = 1e-9

DETECTOR_RESIDUAL_LIMIT = 1e-9


@dataclass(frozen=True)
class ClassicalMomentumState:
    momentum: MassiveMomentum
    internal: np.ndarray

    def __post_init__(self):
        v = np.array(self.internal, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "internal", v)


@dataclass(frozen=True)
class ClassicalMomentumEffect:
    momentum: MassiveMomentum
    internal: np.ndarray

    def __post_init__(self):
        v = np.array(self.internal, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "internal", v)


@dataclass(frozen=True)
class RepMap:
    """Assignment of internal linear maps to group elements.

    `state_map` gives the action on states; the effect action defaults to
    its transpose inverse so that pairings are preserved identically.
    """

    state_map: Callable[[Any], np.ndarray]
    effect_map: Callable[[Any], np.ndarray] | None = None

    def state(self, g) -> np.ndarray:
        return np.asarray(self.state_map(g), dtype=float)

    def effect(self, g) -> np.ndarray:
        if self.effect_map is not None:
            return np.asarray(self.effect_map(g), dtype=float)
        return np.linalg.inv(self.state(g)).T


@dataclass(frozen=True)
class GroupSample:
    """Finite slice of a group: elements, composition rule, identity."""

    elements: tuple
    compose: Callable[[Any, Any], Any]
    identity: Any


def classical_pairing(
    effect: ClassicalMomentumEffect,
    state: ClassicalMomentumState,
    p_tol: float = DEFAULT_P_TOL,
) -> float:
    """Kronecker label agreement times the internal dot product."""
    if effect.internal.shape != state.internal.shape:
        raise ValueError("effect and state internals belong to different theories")
    gap = np.max(np.abs(effect.momentum.vector - state.momentum.vector))
    if gap > p_tol:
        return 0.0
    return float(effect.internal @ state.internal)


def transform_classical(
    p: PoincareTransform, z: ClassicalMomentumState, rep: RepMap
) -> ClassicalMomentumState:
    """(label, internal) -> (Lambda label, R_state internal)."""
    moved = MassiveMomentum(p.lorentz @ z.momentum.vector, z.momentum.mass)
    return ClassicalMomentumState(moved, rep.state(p) @ z.internal)


def transform_classical_effect(
    p: PoincareTransform, e: ClassicalMomentumEffect, rep: RepMap
) -> ClassicalMomentumEffect:
    moved = MassiveMomentum(p.lorentz @ e.momentum.vector, e.momentum.mass)
    return ClassicalMomentumEffect(moved, rep.effect(p) @ e.internal)


def _pair(effect, state, p_tol: float) -> float:
    if isinstance(state, ClassicalMomentumState):
        return classical_pairing(effect, state, p_tol)
    return float(np.asarray(effect) @ np.asarray(state))


def check_invariance(
    pairs,
    element,
    rep: RepMap,
    tol: float = 1e-10,
    p_tol: float = DEFAULT_P_TOL,
) -> bool:
    """Do all outcome probabilities survive the frame change?

    Accepts (effect, state) pairs either as momentum-labelled objects (the
    label moves along with the frame) or as bare internal vectors.
    """
    for effect, state in pairs:
        before = _pair(effect, state, p_tol)
        if isinstance(state, ClassicalMomentumState):
            state2 = transform_classical(element, state, rep)
            effect2 = transform_classical_effect(element, effect, rep)
            after = classical_pairing(effect2, state2, p_tol)
        else:
            after = float(
                (rep.effect(element) @ np.asarray(effect))
                @ (rep.state(element) @ np.asarray(state))
            )
        if abs(after - before) > tol:
            return False
    return True


@dataclass(frozen=True)
class CheckReport:
    check: str
    samples: int
    worst_deviation: float
    passed: bool
    trivial: bool | None = None
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "check": self.check,
            "samples": self.samples,
            "worst_deviation": self.worst_deviation,
            "pass": self.passed,
        }
        if self.trivial is not None:
            doc["trivial"] = self.trivial
        doc.update(self.notes)
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def check_representation(
    sample: GroupSample, rep: RepMap, tol: float = 1e-10
) -> CheckReport:
    """Extensional homomorphism test over all ordered element pairs.

    Verifies R(identity) = 1 and R(g2) R(g1) = R(g2 o g1), reports the worst
    matrix deviation, and flags trivial assignments (every map the identity).
    """
    worst = 0.0
    ident = rep.state(sample.identity)
    dim = ident.shape[0]
    worst = max(worst, float(np.max(np.abs(ident - np.eye(dim)))))
    trivial = True
    for g in sample.elements:
        if np.max(np.abs(rep.state(g) - np.eye(dim))) > tol:
            trivial = False
            break
    count = 0
    for g1 in sample.elements:
        for g2 in sample.elements:
            lhs = rep.state(g2) @ rep.state(g1)
            rhs = rep.state(sample.compose(g2, g1))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            count += 1
    return CheckReport(
        check="representation-law",
        samples=count,
        worst_deviation=worst,
        passed=worst <= tol,
        trivial=trivial,
    )


def rotation_rep(n: int) -> RepMap:
    """Fundamental action of spatial rotations on internal vectors of size 1+n.

    Valid for frame changes whose Lorentz part is a pure rotation; the matrix
    itself is the internal map (the dimension-n internal space rides in the
    last n slots).  Orthogonality makes the effect action the same matrix.
    """

    def state_map(p: PoincareTransform) -> np.ndarray:
        lam = p.lorentz
        e0 = np.zeros(lam.shape[0])
        e0[0] = 1.0
        if np.max(np.abs(lam[0] - e0)) > 1e-9 or np.max(np.abs(lam[:, 0] - e0)) > 1e-9:
            raise ValueError("rotation representation applied to a non-rotation")
        return lam

    return RepMap(state_map=state_map)


def trivial_rep(dim: int) -> RepMap:
    return RepMap(state_map=lambda g: np.eye(dim))


def little_group_internal_map(lam: np.ndarray, p: MassiveMomentum) -> np.ndarray:
    """Internal map induced by a frame change at momentum label p.

    The spatial rotation extracted by returning the transformed pair to rest;
    with internal dimension equal to the spatial dimension, this is the
    fundamental choice and the assignment is a representation of the
    stabilizer group.
    """
    return wigner_rotation(lam, p)


# ---------------------------------------------------------------------------
# Detector sphere
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectorSphereResult:
    weights: np.ndarray
    before: np.ndarray
    after: np.ndarray
    worst_deviation: float
    total_before: float
    passed: bool


def detector_effects(detectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weighted extremal effects along detector axes that sum to the unit.

    Weights solve the (least-squares) system  sum_i w_i (1, v_i)/2 = u;
    detector layouts whose residual exceeds the limit are rejected.
    """
    dirs = np.asarray(detectors, dtype=float)
    count, dim = dirs.shape
    design = 0.5 * np.hstack([np.ones((count, 1)), dirs]).T  # (1+dim, count)
    target = np.zeros(dim + 1)
    target[0] = 1.0
    weights, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.max(np.abs(design @ weights - target)))
    if residual > DETECTOR_RESIDUAL_LIMIT:
        raise ValueError(
            f"detector set cannot resolve the unit effect (residual {residual:.3g})"
        )
    effects = weights[:, None] * 0.5 * np.hstack([np.ones((count, 1)), dirs])
    return effects, weights


def detector_sphere_experiment(
    internal_state: np.ndarray,
    detectors: np.ndarray,
    rotation: np.ndarray,
    tol: float = 1e-10,
) -> DetectorSphereResult:
    """Detection distribution before and after a rigid frame rotation.

    The state and the detector effects transform with the same rotation, so
    the distribution is unchanged; the result carries both distributions and
    the worst pointwise deviation.
    """
    z = np.asarray(internal_state, dtype=float)
    o = np.asarray(rotation, dtype=float)
    dim = z.shape[0] - 1
    effects, weights = detector_effects(detectors)
    before = effects @ z
    block = np.eye(dim + 1)
    block[1:, 1:] = o
    z_rot = block @ z
    effects_rot = effects @ block.T  # orthogonal: transpose inverse = itself
    after = effects_rot @ z_rot
    worst = float(np.max(np.abs(after - before)))
    return DetectorSphereResult(
        weights=weights,
        before=before,
        after=after,
        worst_deviation=worst,
        total_before=float(before.sum()),
        passed=worst <= tol,
    )


# ---------------------------------------------------------------------------
# Toy discrete spacetime
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToySpacetimeReport:
    sides: int
    shift: int
    representation: CheckReport
    invariance_passed: bool
    permutation_passed: bool
    nontrivial: bool

    @property
    def passed(self) -> bool:
        return (
            self.representation.passed
            and self.invariance_passed
            and self.permutation_passed
            and self.nontrivial
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "check": "toy-spacetime",
                "N": self.sides,
                "k": self.shift,
                "samples": self.representation.samples,
                "worst_deviation": self.representation.worst_deviation,
                "pass": self.passed,
                "nontrivial": self.nontrivial,
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def toy_translation_rep(sides: int) -> RepMap:
    """Lattice translation by k steps acts as the rotation by k (2 pi / N)."""
    return RepMap(state_map=lambda k: polygon_rotation(sides, int(k)))


def toy_discrete_spacetime(
    sides: int, shift: int, tol: float = 1e-12
) -> tuple[RepMap, ToySpacetimeReport]:
    """Wire lattice translations to polygon rotations and verify everything.

    Translations compose additively; the assigned rotations must compose the
    same way (checked exhaustively mod N), leave all outcome probabilities
    unchanged, and permute the pure states by the translation amount.  The
    assignment is nontrivial, which is what makes the wiring acceptable.
    """
    if sides < 3:
        raise ValueError("toy model needs a polygon with at least 3 sides")
    rep = toy_translation_rep(sides)
    sample = GroupSample(
        elements=tuple(range(sides)),
        compose=lambda k1, k2: (k1 + k2) % sides,
        identity=0,
    )
    rep_report = check_representation(sample, rep, tol)
    theory = polygon_theory(sides)
    states = theory.states.vertices
    effects = theory.effect_generators()
    pairs = [(e, z) for e in effects for z in states]
    invariance = all(check_invariance(pairs, k, rep, tol) for k in range(sides))
    rot = polygon_rotation(sides, shift)
    permutation = all(
        np.max(np.abs(rot @ states[i] - states[(i + shift) % sides])) <= tol
        for i in range(sides)
    )
    report = ToySpacetimeReport(
        sides=sides,
        shift=shift,
        representation=rep_report,
        invariance_passed=invariance,
        permutation_passed=permutation,
        nontrivial=not rep_report.trivial,
    )
    return rep, report


# ---------------------------------------------------------------------------
# Ball orbit reconstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitReport:
    orbit_pure: bool
    hull_inside: bool
    transitive: bool
    effects_extremal: bool
    distinguishability: bool
    worst_deviation: float

    @property
    def passed(self) -> bool:
        return (
            self.orbit_pure
            and self.hull_inside
            and self.transitive
            and self.effects_extremal
            and self.distinguishability
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "check": "ball-orbit",
                "worst_deviation": self.worst_deviation,
                "pass": self.passed,
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def orbit_ball_reconstruction(
    n: int,
    seed_direction: np.ndarray,
    rotation_count: int = 100,
    seed: int = 0,
    tol: float = 1e-10,
) -> OrbitReport:
    """Rotate a pure ball state around and verify the orbit geometry.

    The orbit stays on the unit sphere, convex mixtures of orbit points stay
    inside the ball, any target direction is reachable with a constructed
    rotation, rotated extremal effects remain normalized extremal effects,
    and antipodal pairs are perfectly distinguished by half their own
    vectors.
    """
    from .core import Ball, is_normalized_effect
    from .rotations import rotation_between
    from .zoo import euclidean_ball

    r = np.asarray(seed_direction, dtype=float)
    if abs(np.linalg.norm(r) - 1.0) > 1e-9:
        raise ValueError("seed direction must be a unit vector")
    rng = np.random.default_rng(seed)
    theory = euclidean_ball(n)
    ball = Ball(n)
    worst = 0.0

    orbit = []
    for _ in range(rotation_count):
        o = sample_special_orthogonal(n, rng)
        point = o @ r
        orbit.append(point)
        worst = max(worst, abs(float(np.linalg.norm(point)) - 1.0))
    orbit_pure = worst <= tol

    hull_inside = True
    for _ in range(20):
        w = rng.dirichlet(np.ones(4))
        idx = rng.integers(len(orbit), size=4)
        mix = sum(wi * orbit[i] for wi, i in zip(w, idx))
        state = np.concatenate([[1.0], mix])
        report = validate_state(ball, state, tol=1e-9)
        hull_inside = hull_inside and report.member

    transitive = True
    for point in orbit[:20]:
        o = rotation_between(r, point)
        dev = float(np.max(np.abs(o @ r - point)))
        worst = max(worst, dev)
        transitive = transitive and dev <= tol

    effects_extremal = True
    for point in orbit:
        eff = 0.5 * np.concatenate([[1.0], point])
        extremal = abs(eff[0] - 0.5) <= tol and abs(np.linalg.norm(eff[1:]) - 0.5) <= tol
        effects_extremal = effects_extremal and extremal and is_normalized_effect(theory, eff)

    plus = np.concatenate([[1.0], r])
    minus = np.concatenate([[1.0], -r])
    gram = np.array(
        [
            [0.5 * plus @ plus, 0.5 * plus @ minus],
            [0.5 * minus @ plus, 0.5 * minus @ minus],
        ]
    )
    dist_dev = float(np.max(np.abs(gram - np.eye(2))))
    worst = max(worst, dist_dev)
    distinguishability = dist_dev <= tol

    mixture = 0.5 * plus + 0.5 * minus
    hull_inside = hull_inside and validate_state(ball, mixture, tol=1e-9).member

    return OrbitReport(
        orbit_pure=orbit_pure,
        hull_inside=hull_inside,
        transitive=transitive,
        effects_extremal=effects_extremal,
        distinguishability=distinguishability,
        worst_deviation=worst,
    )
