"""Command-line front end: verification suites, CHSH scans, zoo exports.

Every subcommand emits a machine-readable report (JSON by default, CSV on
request) and exits 0 only when all its checks pass.  Reports are
deterministic: the same flags and seed give byte-identical output.  Each
check row carries a stable anchor string naming the fact being verified, so
CI output can be traced back to the corresponding property.

Per-check tolerances derive from the base --tol (default 1e-9): group
composition laws are checked at 10x the base, probability invariance at a
tenth of it, and total-probability normalization at a thousandth.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import composites, minkowski, poincare, zoo
from .core import theory_from_json, theory_to_json
from .rotations import sample_special_orthogonal

CHECK_COLUMNS = ["check", "samples", "worst_deviation", "tolerance", "pass"]


def _check(name: str, samples: int, worst: float, tolerance: float, extra=None) -> dict:
    row = {
        "check": name,
        "samples": samples,
        "worst_deviation": float(worst),
        "tolerance": tolerance,
        "pass": bool(worst <= tolerance),
    }
    if extra:
        row.update(extra)
    return row


def minkowski_suite(
    n: int,
    mass: float,
    samples: int,
    seed: int,
    tol: float,
    log_transforms: str | None = None,
) -> list[dict]:
    rng = np.random.default_rng(seed)
    eta = minkowski.metric(n)

    worst_interval = 0.0
    worst_shell = 0.0
    worst_lorentz = 0.0
    transforms = []
    for _ in range(samples):
        p = minkowski.random_poincare(n, rng)
        transforms.append(p)
        x = rng.uniform(-3, 3, n + 1)
        y = rng.uniform(-3, 3, n + 1)
        dev = abs(
            minkowski.interval(x, y)
            - minkowski.interval(minkowski.apply_poincare(p, x), minkowski.apply_poincare(p, y))
        )
        worst_interval = max(worst_interval, dev)
        q = minkowski.random_momentum(mass, n, rng)
        shell = abs(minkowski.minkowski_norm2(p.lorentz @ q.vector) + mass**2)
        worst_shell = max(worst_shell, shell)
        defect = np.max(np.abs(p.lorentz.T @ eta @ p.lorentz - eta))
        worst_lorentz = max(worst_lorentz, float(defect))

    worst_assoc = 0.0
    for _ in range(samples):
        a, b, c = (minkowski.random_poincare(n, rng) for _ in range(3))
        left = minkowski.compose(minkowski.compose(a, b), c)
        right = minkowski.compose(a, minkowski.compose(b, c))
        worst_assoc = max(
            worst_assoc,
            float(np.max(np.abs(left.translation - right.translation))),
            float(np.max(np.abs(left.lorentz - right.lorentz))),
        )

    worst_boost = 0.0
    for _ in range(samples):
        p_mag = rng.uniform(0.0, 2.0)
        s = minkowski.boost_x(p_mag, mass, n)
        s_inv = minkowski.boost_x(-p_mag, mass, n)
        worst_boost = max(worst_boost, float(np.max(np.abs(s @ s_inv - np.eye(n + 1)))))

    if log_transforms:
        with open(log_transforms, "w", encoding="utf-8") as fh:
            fh.write(minkowski.transforms_to_json(transforms) + "\n")

    return [
        _check("interval-invariance", samples, worst_interval, tol, {"n": n}),
        _check("mass-shell-preservation", samples, worst_shell, tol, {"n": n}),
        _check("metric-preservation", samples, worst_lorentz, tol, {"n": n}),
        _check("composition-associativity", samples, worst_assoc, tol, {"n": n}),
        _check("boost-inverse-roundtrip", samples, worst_boost, tol, {"n": n}),
    ]


def little_group_suite(n: int, mass: float, samples: int, seed: int, tol: float) -> list[dict]:
    rng = np.random.default_rng(seed)
    rest = minkowski.rest_momentum(mass, n)
    origin = np.zeros(n + 1)
    eta = minkowski.metric(n)

    worst_fix = 0.0
    worst_so = 0.0
    for _ in range(samples):
        a = rng.uniform(-2, 2, n + 1)
        x = rng.uniform(-2, 2, n + 1)
        lam = minkowski.random_proper_orthochronous(n, rng)
        p = minkowski.random_momentum(mass, n, rng)
        g = minkowski.little_group_element(a, x, lam, p)
        b2, q2 = minkowski.apply_to_pair(g, origin, rest.vector)
        worst_fix = max(
            worst_fix,
            float(np.max(np.abs(b2))),
            float(np.max(np.abs(q2 - rest.vector))),
        )
        w = minkowski.wigner_rotation(lam, p)
        axis = np.zeros(n + 1)
        axis[0] = 1.0
        worst_so = max(
            worst_so,
            float(np.max(np.abs(w.T @ eta @ w - eta))),
            abs(float(np.linalg.det(w)) - 1.0),
            float(np.max(np.abs(w[0] - axis))),
            float(np.max(np.abs(w[:, 0] - axis))),
        )

    worst_rotation = 0.0
    for _ in range(samples):
        rot = np.eye(n + 1)
        rot[1:, 1:] = sample_special_orthogonal(n, rng)
        a = rng.uniform(-2, 2, n + 1)
        x = rng.uniform(-2, 2, n + 1)
        p = minkowski.random_momentum(mass, n, rng)
        g = minkowski.little_group_element(a, x, rot, p)
        worst_rotation = max(
            worst_rotation,
            float(np.max(np.abs(g.translation))),
            float(np.max(np.abs(g.lorentz - rot))),
        )

    worst_comp = 0.0
    for _ in range(samples):
        a = rng.uniform(-2, 2, n + 1)
        a2 = rng.uniform(-2, 2, n + 1)
        x = rng.uniform(-2, 2, n + 1)
        lam1 = minkowski.random_proper_orthochronous(n, rng)
        lam2 = minkowski.random_proper_orthochronous(n, rng)
        p = minkowski.random_momentum(mass, n, rng)
        moved = minkowski.MassiveMomentum(lam1 @ p.vector, mass)
        left = minkowski.compose(
            minkowski.little_group_element(a2, x + a, lam2, moved),
            minkowski.little_group_element(a, x, lam1, p),
        )
        right = minkowski.little_group_element(a + a2, x, lam2 @ lam1, p)
        worst_comp = max(
            worst_comp,
            float(np.max(np.abs(left.translation - right.translation))),
            float(np.max(np.abs(left.lorentz - right.lorentz))),
        )

    return [
        _check("little-group-fixes-rest-pair", samples, worst_fix, tol, {"n": n}),
        _check("pure-rotation-reduction", samples, worst_rotation, tol, {"n": n}),
        _check("induced-rotation-in-so-n", samples, worst_so, tol, {"n": n}),
        _check("little-group-composition-law", samples, worst_comp, 10 * tol, {"n": n}),
    ]


def invariance_suite(n: int, mass: float, samples: int, seed: int, tol: float) -> list[dict]:
    rng = np.random.default_rng(seed)
    rep = poincare.rotation_rep(n)
    rest = minkowski.rest_momentum(mass, n)

    worst_pairing = 0.0
    for _ in range(samples):
        state = poincare.ClassicalMomentumState(rest, zoo.sample_ball_state(n, rng))
        effect = poincare.ClassicalMomentumEffect(rest, zoo.sample_ball_effect(n, rng))
        lam = np.eye(n + 1)
        lam[1:, 1:] = sample_special_orthogonal(n, rng)
        g = minkowski.PoincareTransform(np.zeros(n + 1), lam)
        before = poincare.classical_pairing(effect, state)
        after = poincare.classical_pairing(
            poincare.transform_classical_effect(g, effect, rep),
            poincare.transform_classical(g, state, rep),
        )
        worst_pairing = max(worst_pairing, abs(after - before))

    rows = [_check("pairing-invariance", samples, worst_pairing, tol / 10, {"n": n})]

    if n == 3:
        detectors = np.vstack([np.eye(3), -np.eye(3)])
        worst_det = 0.0
        worst_total = 0.0
        for _ in range(samples):
            state = zoo.sample_ball_state(3, rng)
            rotation = sample_special_orthogonal(3, rng)
            result = poincare.detector_sphere_experiment(state, detectors, rotation)
            worst_det = max(worst_det, result.worst_deviation)
            worst_total = max(worst_total, abs(result.total_before - 1.0))
        rows.append(_check("detector-sphere-invariance", samples, worst_det, tol / 10))
        rows.append(_check("detector-sphere-total-probability", samples, worst_total, tol / 1000))

    seedling = np.zeros(n)
    seedling[-1] = 1.0
    orbit = poincare.orbit_ball_reconstruction(n, seedling, rotation_count=samples, seed=seed)
    rows.append(
        _check(
            "ball-orbit-reconstruction",
            samples,
            orbit.worst_deviation,
            tol / 10,
            {"n": n, "pass": orbit.passed},
        )
    )
    return rows


def toy_suite(sides: int, shift: int, tol: float) -> list[dict]:
    _, report = poincare.toy_discrete_spacetime(sides, shift, tol)
    return [
        {
            "check": "toy-spacetime-homomorphism",
            "samples": report.representation.samples,
            "worst_deviation": report.representation.worst_deviation,
            "tolerance": tol,
            "pass": report.representation.passed,
            "N": sides,
            "k": shift,
        },
        {
            "check": "toy-spacetime-invariance",
            "samples": sides,
            "worst_deviation": 0.0 if report.invariance_passed else float("inf"),
            "tolerance": tol,
            "pass": report.invariance_passed and report.permutation_passed,
            "N": sides,
            "k": shift,
        },
        {
            "check": "toy-spacetime-nontrivial",
            "samples": sides,
            "worst_deviation": 0.0 if report.nontrivial else float("inf"),
            "tolerance": tol,
            "pass": report.nontrivial,
            "N": sides,
            "k": shift,
        },
    ]


def chsh_rows(locals_name: str, exact: bool, scenario_path: str | None) -> list[dict]:
    if scenario_path:
        with open(scenario_path, "r", encoding="utf-8") as fh:
            docs = composites.load_scenarios(fh.read())
    else:
        docs = [
            {
                "id": f"{locals_name}x{locals_name}",
                "local_a": locals_name,
                "local_b": locals_name,
            }
        ]
    return [composites.run_scenario(doc, exact=exact) for doc in docs]


def zoo_rows() -> list[dict]:
    rows = []
    for name in ("bit", "simplex:2", "polygon:3", "polygon:4", "ball:3"):
        theory = zoo.get_theory(name)
        round_trip = theory_to_json(theory_from_json(theory_to_json(theory)))
        rows.append(
            {
                "check": f"zoo-roundtrip-{name}",
                "samples": 1,
                "worst_deviation": 0.0 if round_trip == theory_to_json(theory) else float("inf"),
                "tolerance": 0.0,
                "pass": round_trip == theory_to_json(theory),
            }
        )
    return rows


def _emit(rows, fmt: str, out: str | None) -> None:
    if fmt == "csv":
        if rows and "scenario_id" in rows[0]:
            text = composites.rows_to_csv(rows)
        else:
            import csv as _csv
            import io as _io

            buf = _io.StringIO()
            writer = _csv.DictWriter(
                buf, fieldnames=CHECK_COLUMNS, extrasaction="ignore", lineterminator="\n"
            )
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
            text = buf.getvalue()
    else:
        text = json.dumps(rows, sort_keys=True, separators=(",", ":")) + "\n"
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as err:
            raise SystemExit(f"error: cannot write report to {out!r}: {err}")
    else:
        sys.stdout.write(text)


def _all_pass(rows) -> bool:
    return all(row.get("pass", True) for row in rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gptkit",
        description="Verification suites for convex operational theories and spacetime symmetries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=3, help="spatial dimension (default 3)")
        p.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9, help="base tolerance")
        p.add_argument("--samples", type=int, default=100)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p_zoo = sub.add_parser("zoo", help="export a theory as JSON or list the registry")
    p_zoo.add_argument("--name", type=str, default=None)
    p_zoo.add_argument("--list", action="store_true")
    p_zoo.add_argument("--out", type=str, default=None)
    p_zoo.add_argument("--format", choices=("json", "csv"), default="json")

    p_chsh = sub.add_parser("chsh-scan", help="CHSH optimization over named locals")
    p_chsh.add_argument("--locals", type=str, default="polygon:4")
    p_chsh.add_argument("--scenario", type=str, default=None, help="scenario JSON file")
    p_chsh.add_argument("--exact", action="store_true", help="exact rational pivoting")
    p_chsh.add_argument("--out", type=str, default=None)
    p_chsh.add_argument("--format", choices=("json", "csv"), default="csv")

    p_mink = sub.add_parser("minkowski-checks")
    common(p_mink)
    p_mink.add_argument(
        "--log-transforms", type=str, default=None,
        help="also write the sampled transforms as a JSON array of {a, Lambda}",
    )
    for name in ("little-group-checks", "invariance-checks"):
        common(sub.add_parser(name))

    p_toy = sub.add_parser("toy-spacetime", help="lattice-translation representation checks")
    p_toy.add_argument("--N", type=int, default=5)
    p_toy.add_argument("--k", type=int, default=2)
    p_toy.add_argument("--tol", type=float, default=1e-12)
    p_toy.add_argument("--out", type=str, default=None)
    p_toy.add_argument("--format", choices=("json", "csv"), default="json")

    p_rep = sub.add_parser("report", help="run every suite and aggregate")
    common(p_rep)
    p_rep.add_argument("--exact", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if getattr(args, "tol", 1e-9) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    if getattr(args, "n", 3) < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2

    if args.command == "zoo":
        if args.list or not args.name:
            _emit([{"name": n} for n in zoo.theory_names()], "json", args.out)
            return 0
        try:
            theory = zoo.get_theory(args.name)
        except (KeyError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        text = theory_to_json(theory) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0

    if args.command == "chsh-scan":
        try:
            rows = chsh_rows(args.locals, args.exact, args.scenario)
        except (KeyError, ValueError, OSError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        _emit(rows, args.format, args.out)
        return 0

    if args.command == "minkowski-checks":
        rows = minkowski_suite(
            args.n, args.mass, args.samples, args.seed, args.tol, args.log_transforms
        )
    elif args.command == "little-group-checks":
        rows = little_group_suite(args.n, args.mass, args.samples, args.seed, args.tol)
    elif args.command == "invariance-checks":
        rows = invariance_suite(args.n, args.mass, args.samples, args.seed, args.tol)
    elif args.command == "toy-spacetime":
        rows = toy_suite(args.N, args.k, args.tol)
    elif args.command == "report":
        rows = []
        for n in (2, 3, 4):
            rows += minkowski_suite(n, args.mass, args.samples, args.seed, args.tol)
        rows += little_group_suite(args.n, args.mass, args.samples, args.seed, args.tol)
        for n in (2, 3, 4):
            rows += invariance_suite(n, args.mass, args.samples, args.seed, args.tol)
        rows += toy_suite(5, 2, 1e-12)
        rows += zoo_rows()
        scan = chsh_rows("polygon:4", args.exact, None) + chsh_rows("bit", args.exact, None)
        for row in scan:
            expected = 4.0 if row["local_a"] == "polygon:4" else 2.0
            rows.append(
                {
                    "check": f"chsh-{row['local_a']}",
                    "samples": 1,
                    "worst_deviation": abs(row["chsh_value"] - expected),
                    "tolerance": 1e-6,
                    "pass": abs(row["chsh_value"] - expected) <= 1e-6,
                }
            )
    else:  # pragma: no cover
        return 2

    _emit(rows, args.format, args.out)
    return 0 if _all_pass(rows) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
