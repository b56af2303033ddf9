"""Bipartite machinery: product states, separability, no-signalling, CHSH.

Joint vectors live in the tensor of the two local spaces and are flattened
A-major: entry (i, j) sits at index i * (d_B + 1) + j.  That convention is
fixed globally; reshaping to a (d_A+1) x (d_B+1) matrix turns the pairing
with a product effect e (x) f into  e . Phi . f.

The separable set is the hull of products of local extreme states; the
maximal set contains every normalized vector that is nonnegative on all
product effects.  Membership in either is decided by linear programming:
floating point for interactive runs, exact rational pivoting for acceptance
runs.  For ball-shaped locals the separability LP is discretized at a stated
resolution K; an infeasible discretized LP is reported as inconclusive-at-K
(with its residual margin), never as an entanglement verdict - those require
a CHSH value above the separable bound 2.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import lp
from .core import Ball, BallEffects, Polytope, TheorySpec, unit_effect
from .rotations import deterministic_sphere_points
from .zoo import get_theory

SEPARABILITY_K = 200
MAX_TENSOR_K = 64
BALL_MEASUREMENT_COUNT = 6


def tensor(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kronecker product in A-major order."""
    return np.kron(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


@dataclass(frozen=True, eq=False)
class JointState:
    """Bipartite state vector with references to both local theories."""

    vector: np.ndarray
    local_a: TheorySpec
    local_b: TheorySpec

    def __init__(self, vector, local_a, local_b, check: bool = True):
        v = np.array(vector, dtype=float)
        da, db = local_a.dim, local_b.dim
        if v.shape != ((da + 1) * (db + 1),):
            raise ValueError("joint vector length must be (d_A+1)(d_B+1)")
        if check and abs(self.pair_product_static(v, unit_effect(da), unit_effect(db), db) - 1.0) > 1e-9:
            raise ValueError("joint state is not normalized against the unit effects")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "local_a", local_a)
        object.__setattr__(self, "local_b", local_b)

    @staticmethod
    def pair_product_static(v, ea, eb, db):
        return float(ea @ v.reshape(-1, db + 1) @ eb)

    @property
    def matrix(self) -> np.ndarray:
        return self.vector.reshape(self.local_a.dim + 1, self.local_b.dim + 1)

    def pair_product(self, effect_a: np.ndarray, effect_b: np.ndarray) -> float:
        """(effect_a (x) effect_b) applied to this state."""
        return float(np.asarray(effect_a) @ self.matrix @ np.asarray(effect_b))


def product_state(za: np.ndarray, zb: np.ndarray, a: TheorySpec, b: TheorySpec) -> JointState:
    return JointState(tensor(za, zb), a, b)


def marginal(phi: JointState, side: str) -> np.ndarray:
    """Local reduction by pairing the other side with its unit effect."""
    if side == "a":
        return phi.matrix[:, 0].copy()
    if side == "b":
        return phi.matrix[0, :].copy()
    raise ValueError("side must be 'a' or 'b'")


def _extreme_states(theory: TheorySpec, k: int) -> np.ndarray:
    if isinstance(theory.states, Polytope):
        return theory.states.vertices
    pts = deterministic_sphere_points(theory.dim, k)
    return np.hstack([np.ones((k, 1)), pts])


def _effect_rows(theory: TheorySpec, k: int) -> np.ndarray:
    """Extremal effects plus the unit effect (zero dropped: its row is trivial)."""
    if isinstance(theory.effects, BallEffects):
        pts = deterministic_sphere_points(theory.dim, k)
        ext = 0.5 * np.hstack([np.ones((k, 1)), pts])
    else:
        gens = theory.effects.generators
        keep = [g for g in gens if np.linalg.norm(g) > 1e-12]
        ext = np.array(keep)
    unit = unit_effect(theory.dim)
    if not any(np.allclose(row, unit, atol=1e-12) for row in ext):
        ext = np.vstack([ext, unit])
    return ext


def extremal_effects(theory: TheorySpec, k: int = MAX_TENSOR_K) -> np.ndarray:
    """Extremal effect list without the zero and unit effects."""
    if isinstance(theory.effects, BallEffects):
        pts = deterministic_sphere_points(theory.dim, k)
        return 0.5 * np.hstack([np.ones((k, 1)), pts])
    gens = theory.effects.generators
    unit = unit_effect(theory.dim)
    return np.array(
        [
            g
            for g in gens
            if np.linalg.norm(g) > 1e-12 and not np.allclose(g, unit, atol=1e-12)
        ]
    )


def _dedupe_rows(rows: np.ndarray) -> np.ndarray:
    seen = set()
    keep = []
    for row in rows:
        key = tuple(np.round(row, 12))
        if key not in seen:
            seen.add(key)
            keep.append(row)
    return np.array(keep)


@dataclass(frozen=True)
class SeparabilityVerdict:
    status: str  # "separable" | "entangled" | "inconclusive"
    margin: float
    weights: np.ndarray | None = None
    resolution: int | None = None

    def __str__(self):
        if self.status == "inconclusive":
            return f"inconclusive-at-K={self.resolution} (margin {self.margin:.3g})"
        return self.status


def is_separable(
    phi: JointState,
    tol: float = 1e-9,
    k: int = SEPARABILITY_K,
    exact: bool = False,
) -> SeparabilityVerdict:
    """Decide membership in the hull of products of local extreme states.

    Polytope locals give definite verdicts (LP infeasibility is a proof
    there, and exact pivoting removes solver doubt).  Ball locals are
    discretized with K sphere points per side, so only "separable" and
    "inconclusive" can be returned; the reported margin is the distance by
    which the discretized decomposition fails.
    """
    discretized = isinstance(phi.local_a.states, Ball) or isinstance(phi.local_b.states, Ball)
    pts_a = _extreme_states(phi.local_a, k)
    pts_b = _extreme_states(phi.local_b, k)
    products = np.einsum("ai,bj->abij", pts_a, pts_b).reshape(
        len(pts_a) * len(pts_b), -1
    )
    res = lp.hull_membership(products, phi.vector, tol=tol, exact=exact)
    if res.member:
        return SeparabilityVerdict("separable", res.margin, res.weights,
                                   k if discretized else None)
    if discretized:
        return SeparabilityVerdict("inconclusive", res.margin, None, k)
    return SeparabilityVerdict("entangled", res.margin, None, None)


def _min_ball_pairing(m: np.ndarray) -> float:
    """Minimum of (1, v)/2 . m over unit v: half of m0 - ||m reduced||."""
    return 0.5 * (float(m[0]) - float(np.linalg.norm(m[1:])))


def in_max_tensor(phi: JointState, tol: float = 1e-9, k: int = MAX_TENSOR_K) -> bool:
    """Normalization plus nonnegativity on all product effects.

    Polytope sides contribute their finitely many generators; ball sides are
    handled with the closed-form minimum over extremal effects whenever the
    other factor is fixed, swept over a K-point discretization when both
    sides are balls.
    """
    mat = phi.matrix
    if abs(mat[0, 0] - 1.0) > tol:
        return False
    a_ball = isinstance(phi.local_a.effects, BallEffects)
    b_ball = isinstance(phi.local_b.effects, BallEffects)
    if not a_ball and not b_ball:
        rows_a = _effect_rows(phi.local_a, k)
        rows_b = _effect_rows(phi.local_b, k)
        values = rows_a @ mat @ rows_b.T
        return bool(values.min() >= -tol)
    if a_ball and not b_ball:
        for eb in _effect_rows(phi.local_b, k):
            m = mat @ eb
            if _min_ball_pairing(m) < -tol or m[0] < -tol:
                return False
        return True
    if not a_ball and b_ball:
        for ea in _effect_rows(phi.local_a, k):
            m = ea @ mat
            if _min_ball_pairing(m) < -tol or m[0] < -tol:
                return False
        return True
    # both sides balls: discretize one side, close the other analytically
    for w in deterministic_sphere_points(phi.local_b.dim, k):
        eb = 0.5 * np.concatenate([[1.0], w])
        if _min_ball_pairing(mat @ eb) < -tol:
            return False
    for v in deterministic_sphere_points(phi.local_a.dim, k):
        ea = 0.5 * np.concatenate([[1.0], v])
        if _min_ball_pairing(ea @ mat) < -tol:
            return False
    if _min_ball_pairing(mat @ unit_effect(phi.local_b.dim)) < -tol:
        return False
    if _min_ball_pairing(unit_effect(phi.local_a.dim) @ mat) < -tol:
        return False
    return True


def binary_measurements(
    theory: TheorySpec, count: int = BALL_MEASUREMENT_COUNT
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Two-outcome measurements (e, u - e) available in the theory.

    Polytope effect spaces are scanned for extremal pairs summing to the
    unit effect; classical systems without such pairs fall back to
    coarse-grainings of their distinguishing measurement.  Ball effect
    spaces return antipodal extremal pairs along `count` fixed directions.
    """
    u = theory.unit
    if isinstance(theory.effects, BallEffects):
        dirs = deterministic_sphere_points(theory.dim, count)
        return [
            (
                0.5 * np.concatenate([[1.0], v]),
                0.5 * np.concatenate([[1.0], -v]),
            )
            for v in dirs
        ]
    ext = extremal_effects(theory)
    pairs = []
    used = set()
    for i in range(len(ext)):
        for j in range(i + 1, len(ext)):
            if i in used or j in used:
                continue
            if np.allclose(ext[i] + ext[j], u, atol=1e-10):
                pairs.append((ext[i].copy(), ext[j].copy()))
                used.update((i, j))
    if pairs:
        return pairs
    # restricted classical effect sets: coarse-grain the partition measurement
    if np.allclose(ext.sum(axis=0), u, atol=1e-10):
        n = len(ext)
        for r in range(1, n // 2 + 1):
            for subset in itertools.combinations(range(n), r):
                plus = ext[list(subset)].sum(axis=0)
                pairs.append((plus, u - plus))
    return pairs


def no_signalling_check(
    phi: JointState, tol: float = 1e-9, k: int = MAX_TENSOR_K
) -> bool:
    """Marginals of either side must not depend on the other side's choice.

    States outside the maximal tensor product fail outright (they do not
    define valid joint probabilities).  For members the marginal
    distributions of every complete binary measurement are compared across
    all measurement choices on the far side.
    """
    if not in_max_tensor(phi, tol, k):
        return False
    meas_a = binary_measurements(phi.local_a)
    meas_b = binary_measurements(phi.local_b)
    if not meas_a or not meas_b:
        return True
    for ma in meas_a:
        margins = [
            [sum(phi.pair_product(ea, eb) for eb in mb) for ea in ma] for mb in meas_b
        ]
        base = margins[0]
        for other in margins[1:]:
            if max(abs(x - y) for x, y in zip(base, other)) > tol:
                return False
    for mb in meas_b:
        margins = [
            [sum(phi.pair_product(ea, eb) for ea in ma) for eb in mb] for ma in meas_a
        ]
        base = margins[0]
        for other in margins[1:]:
            if max(abs(x - y) for x, y in zip(base, other)) > tol:
                return False
    return True


# ---------------------------------------------------------------------------
# CHSH
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChshScenario:
    """Two binary measurements per site plus a joint state.

    Each measurement is an (effect, complement) pair summing to the local
    unit effect.
    """

    a0: tuple[np.ndarray, np.ndarray]
    a1: tuple[np.ndarray, np.ndarray]
    b0: tuple[np.ndarray, np.ndarray]
    b1: tuple[np.ndarray, np.ndarray]
    state: JointState


def correlator(phi: JointState, a_pair, b_pair) -> float:
    """E(a, b) = p(++) + p(--) - p(+-) - p(-+)."""
    da = np.asarray(a_pair[0]) - np.asarray(a_pair[1])
    db = np.asarray(b_pair[0]) - np.asarray(b_pair[1])
    return float(da @ phi.matrix @ db)


def _check_measurement(pair, unit, tol):
    if len(pair) != 2 or not np.allclose(pair[0] + pair[1], unit, atol=tol):
        raise ValueError("measurement pair does not sum to the unit effect")


def chsh_value(s: ChshScenario, tol: float = 1e-9) -> float:
    """S = E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1)."""
    ua = s.state.local_a.unit
    ub = s.state.local_b.unit
    for pair in (s.a0, s.a1):
        _check_measurement(pair, ua, tol)
    for pair in (s.b0, s.b1):
        _check_measurement(pair, ub, tol)
    return (
        correlator(s.state, s.a0, s.b0)
        + correlator(s.state, s.a0, s.b1)
        + correlator(s.state, s.a1, s.b0)
        - correlator(s.state, s.a1, s.b1)
    )


@dataclass(frozen=True)
class ChshOptimum:
    value: float
    witness: JointState
    measurement_choice: tuple[int, int, int, int]  # indices (a0, a1, b0, b1)


def _chsh_objective(a0, a1, b0, b1) -> np.ndarray:
    def diff_tensor(a_pair, b_pair):
        return tensor(a_pair[0] - a_pair[1], b_pair[0] - b_pair[1])

    return (
        diff_tensor(a0, b0) + diff_tensor(a0, b1) + diff_tensor(a1, b0) - diff_tensor(a1, b1)
    )


def maximize_chsh(
    local_a: TheorySpec,
    local_b: TheorySpec,
    measurements_a=None,
    measurements_b=None,
    exact: bool = False,
    k: int = MAX_TENSOR_K,
) -> ChshOptimum:
    """Maximize the CHSH functional over the maximal tensor product.

    One LP per assignment of measurements to the four scenario slots; the
    best optimizer is returned as an operational witness state.  Polytope
    locals give exact optima under exact pivoting; ball locals are bounded
    through a K-point effect discretization.
    """
    meas_a = measurements_a if measurements_a is not None else binary_measurements(local_a)
    meas_b = measurements_b if measurements_b is not None else binary_measurements(local_b)
    if not meas_a or not meas_b:
        raise ValueError("both sites need at least one binary measurement")
    # the scenario's own measurement effects must be feasibility constraints,
    # otherwise a discretized relaxation could hand them negative probabilities
    rows_a = _dedupe_rows(
        np.vstack([_effect_rows(local_a, k)] + [np.vstack(m) for m in meas_a])
    )
    rows_b = _dedupe_rows(
        np.vstack([_effect_rows(local_b, k)] + [np.vstack(m) for m in meas_b])
    )
    constraint_rows = np.einsum("ai,bj->abij", rows_a, rows_b).reshape(
        len(rows_a) * len(rows_b), -1
    )
    a_eq = tensor(local_a.unit, local_b.unit).reshape(1, -1)
    b_eq = np.array([1.0])
    a_ub = -constraint_rows
    b_ub = np.zeros(len(constraint_rows))
    best: ChshOptimum | None = None
    for ia0, ia1 in itertools.product(range(len(meas_a)), repeat=2):
        for ib0, ib1 in itertools.product(range(len(meas_b)), repeat=2):
            c = _chsh_objective(meas_a[ia0], meas_a[ia1], meas_b[ib0], meas_b[ib1])
            sol = lp.linear_program(c, a_eq, b_eq, a_ub, b_ub, maximize=True, exact=exact)
            if sol.status != "optimal":  # pragma: no cover - the set is compact
                raise RuntimeError(f"CHSH optimization failed: {sol.status}")
            if best is None or sol.value > best.value:
                witness = JointState(sol.x, local_a, local_b, check=False)
                best = ChshOptimum(sol.value, witness, (ia0, ia1, ib0, ib1))
    return best


def enumerate_deterministic_chsh() -> float:
    """Oracle: best CHSH over the 16 deterministic +-1 assignments."""
    best = -np.inf
    for a0, a1, b0, b1 in itertools.product((-1, 1), repeat=4):
        best = max(best, a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1)
    return float(best)


# ---------------------------------------------------------------------------
# Two-qubit embedding
# ---------------------------------------------------------------------------

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _two_qubit_density(r_a, r_b, t) -> np.ndarray:
    rho = np.eye(4, dtype=complex)
    for i in range(3):
        rho += r_a[i] * np.kron(_PAULI[i], np.eye(2))
        rho += r_b[i] * np.kron(np.eye(2), _PAULI[i])
        for j in range(3):
            rho += t[i, j] * np.kron(_PAULI[i], _PAULI[j])
    return rho / 4.0


def two_qubit_gpt(r_a, r_b, t, tol: float = 1e-9) -> JointState:
    """Joint ball:3 state from local Bloch vectors and a correlation matrix.

    The layout is the A-major block matrix ((1, r_b), (r_a, T)); product
    effect pairings then reproduce the quantum probabilities
    (1 + a.r_a + b.r_b + a.T.b)/4.  Inputs whose implied 4x4 density
    operator is not positive semidefinite are rejected.
    """
    r_a = np.asarray(r_a, dtype=float)
    r_b = np.asarray(r_b, dtype=float)
    t = np.asarray(t, dtype=float)
    if r_a.shape != (3,) or r_b.shape != (3,) or t.shape != (3, 3):
        raise ValueError("need two Bloch vectors and a 3x3 correlation matrix")
    eigenvalues = np.linalg.eigvalsh(_two_qubit_density(r_a, r_b, t))
    if eigenvalues.min() < -tol:
        raise ValueError(
            f"correlation data is non-physical (minimum eigenvalue {eigenvalues.min():.3g})"
        )
    mat = np.empty((4, 4))
    mat[0, 0] = 1.0
    mat[0, 1:] = r_b
    mat[1:, 0] = r_a
    mat[1:, 1:] = t
    ball = get_theory("ball:3")
    return JointState(mat.reshape(-1), ball, ball)


def singlet_state() -> JointState:
    return two_qubit_gpt(np.zeros(3), np.zeros(3), -np.eye(3))


def ball_measurement(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(direction, dtype=float)
    v = v / np.linalg.norm(v)
    return 0.5 * np.concatenate([[1.0], v]), 0.5 * np.concatenate([[1.0], -v])


# ---------------------------------------------------------------------------
# Vertex enumeration for small maximal tensor polytopes
# ---------------------------------------------------------------------------


def max_tensor_vertices(
    local_a: TheorySpec, local_b: TheorySpec, tol: float = 1e-9
) -> np.ndarray:
    """All vertices of the maximal tensor polytope of two polytope locals.

    Brute-force facet enumeration; intended for desk-scale systems only.
    """
    if not (isinstance(local_a.states, Polytope) and isinstance(local_b.states, Polytope)):
        raise ValueError("vertex enumeration needs polytope locals")
    ext_a = extremal_effects(local_a)
    ext_b = extremal_effects(local_b)
    rows = np.einsum("ai,bj->abij", ext_a, ext_b).reshape(len(ext_a) * len(ext_b), -1)
    norm_row = tensor(local_a.unit, local_b.unit)
    dim = rows.shape[1]
    vertices: list[np.ndarray] = []
    for combo in itertools.combinations(range(len(rows)), dim - 1):
        system = np.vstack([norm_row, rows[list(combo)]])
        rhs = np.zeros(dim)
        rhs[0] = 1.0
        if abs(np.linalg.det(system)) < 1e-10:
            continue
        candidate = np.linalg.solve(system, rhs)
        if (rows @ candidate).min() < -tol:
            continue
        if not any(np.max(np.abs(candidate - v)) < 1e-7 for v in vertices):
            vertices.append(candidate)
    return np.array(vertices)


# ---------------------------------------------------------------------------
# Scenario files and CSV emission
# ---------------------------------------------------------------------------


def run_scenario(doc: dict, exact: bool = False) -> dict:
    """Execute one scenario document and produce a CSV-ready result row.

    Schema: {"id", "local_a", "local_b", optional "measurements_a"/"..._b"
    (index pairs into the extremal effect list), optional "joint_vector"}.
    Without an explicit vector the CHSH functional is maximized and the
    optimizer is the reported state.
    """
    local_a = get_theory(doc["local_a"])
    local_b = get_theory(doc["local_b"])

    def build_measurements(theory, key):
        if key not in doc:
            return binary_measurements(theory)
        ext = extremal_effects(theory)
        return [(ext[i].copy(), ext[j].copy()) for i, j in doc[key]]

    meas_a = build_measurements(local_a, "measurements_a")
    meas_b = build_measurements(local_b, "measurements_b")
    if "joint_vector" in doc:
        state = JointState(np.array(doc["joint_vector"], dtype=float), local_a, local_b)
        scenario = ChshScenario(
            meas_a[0], meas_a[min(1, len(meas_a) - 1)],
            meas_b[0], meas_b[min(1, len(meas_b) - 1)],
            state,
        )
        value = chsh_value(scenario)
    else:
        optimum = maximize_chsh(local_a, local_b, meas_a, meas_b, exact=exact)
        state = optimum.witness
        value = optimum.value
    verdict = is_separable(state, exact=exact and not (
        isinstance(local_a.states, Ball) or isinstance(local_b.states, Ball)))
    return {
        "scenario_id": doc.get("id", f"{doc['local_a']}x{doc['local_b']}"),
        "local_a": doc["local_a"],
        "local_b": doc["local_b"],
        "chsh_value": value,
        "separability_verdict": str(verdict),
    }


CSV_COLUMNS = ["scenario_id", "local_a", "local_b", "chsh_value", "separability_verdict"]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def load_scenarios(text: str) -> list[dict]:
    doc = json.loads(text)
    return doc if isinstance(doc, list) else [doc]
