"""Command-line verification suites for the bundled example maps.

``ebcompose verify-example <name>`` re-runs the defining checks of one
catalog entry (plus the switch construction) and exits 0 only when every
check passes; ``ebcompose gaussian`` does the same for a seeded random
completely copositive Gaussian channel.  ``--json-out PATH`` additionally
writes the standard report payload with the full evidence list.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Optional

import numpy as np

from . import catalog, choi, criteria, gaussian, linalg, sdp

BOUNDARY_GAP = 1e-6
BALL_EXCLUSION = 1e-3
SECTOR_TOL = 1e-9


def _check(name: str, passed: bool, **data) -> dict:
    return {"name": name, "passed": bool(passed), "data": data}


def _skip(name: str, reason: str) -> dict:
    return {"name": name, "passed": True, "data": {"skipped": reason}}


def _suite_holevo_werner(args) -> list[dict]:
    d, p, tol = args.d, args.p, args.tol_psd
    nm = catalog.holevo_werner(d, p)
    checks = []

    expect = np.eye(d * d, dtype=complex) - p * linalg.flip_operator(d)
    gap = float(np.max(np.abs(nm.map.choi - expect)))
    checks.append(_check("choi-formula", gap == 0.0, max_abs_gap=gap))

    below = catalog.holevo_werner(d, 1.0 / d - 0.01)
    above = catalog.holevo_werner(d, 1.0 / d + 0.01)
    checks.append(
        _check(
            "cocp-boundary",
            choi.is_cocp(below.map, tol) and not choi.is_cocp(above.map, tol),
            boundary=1.0 / d,
        )
    )

    if abs(p - 1.0 / d) > BOUNDARY_GAP:
        checks.append(
            _check(
                "cocp-at-p",
                choi.is_cocp(nm.map, tol) == (p < 1.0 / d),
                p=float(p),
                cocp=choi.is_cocp(nm.map, tol),
            )
        )
    else:
        checks.append(_skip("cocp-at-p", "p within 1e-6 of the coCP boundary"))

    alpha = catalog.antisym_sym_maps(d)[0]
    endpoint = catalog.holevo_werner(d, 1.0).map.choi / (d * (d - 1))
    checks.append(
        _check(
            "endpoint-matches-antisym",
            bool(np.array_equal(endpoint, alpha.map.choi)),
        )
    )

    if abs(p - 0.5) > BALL_EXCLUSION:
        verdict = criteria.two_eb_ball_certificate(nm.map)
        checks.append(
            _check("two-eb-ball", verdict == (p <= 0.5), p=float(p), certified=verdict)
        )
    else:
        checks.append(_skip("two-eb-ball", "p within 1e-3 of the 2-EB boundary"))
    return checks


def _suite_rank3(args) -> list[dict]:
    nm = catalog.rank3_example()
    pt = linalg.partial_transpose(nm.map.choi, (3, 3), "B")
    return [
        _check("cp", choi.is_cp(nm.map, args.tol_psd), min_eig=linalg.min_eig(nm.map.choi)),
        _check("not-cocp", not choi.is_cocp(nm.map, args.tol_psd), pt_min_eig=linalg.min_eig(pt)),
        _check("operator-rank-3", choi.operator_schmidt_rank(nm.map) == 3),
        _check("two-eb-rank-certificate", criteria.two_eb_rank_certificate(nm.map)),
    ]


def _suite_antisym(args) -> list[dict]:
    d, tol = args.d, args.tol_psd
    a, s = catalog.antisym_sym_maps(d)
    eye, flip = np.eye(d * d), linalg.flip_operator(d)
    checks = [
        _check(
            "choi-formulas",
            np.allclose(a.map.choi, (eye - flip) / (d * (d - 1)))
            and np.allclose(s.map.choi, (eye + flip) / (d * (d + 1))),
        ),
        _check("antisym-cp-not-cocp", choi.is_cp(a.map, tol) and not choi.is_cocp(a.map, tol)),
        _check("sym-cp-and-cocp", choi.is_cp(s.map, tol) and choi.is_cocp(s.map, tol)),
    ]

    sq = choi.compose(a.map, a.map)
    formula = ((d - 2) * eye + linalg.max_entangled_projector(d)) / (d**2 * (d - 1) ** 2)
    gap = float(np.max(np.abs(sq.choi - formula)))
    checks.append(_check("square-formula", gap <= 1e-12, max_abs_gap=gap))
    square_ppt = criteria.is_ppt_state(criteria.BipartiteState((d, d), sq.choi), tol)
    checks.append(
        _check("square-ppt-iff-dim-3plus", square_ppt == (d >= 3), square_ppt=square_ppt)
    )

    if d in (2, 3, 4, 5):
        dec = criteria.heuristic_sep_certify(criteria.BipartiteState((d, d), s.map.choi))
        checks.append(
            _check(
                "sym-separable",
                dec is not None and dec.residual <= 1e-7,
                residual=None if dec is None else float(dec.residual),
                terms=None if dec is None else len(dec.terms),
            )
        )
    else:
        checks.append(_skip("sym-separable", "no unbiased-basis seed atoms at this dimension"))
    return checks


def _suite_tau_n(args) -> list[dict]:
    d, n, tol = args.d, args.n, args.tol_psd
    nm = catalog.tau_n_map(d, n)
    checks = [
        _check("trace-one", abs(np.trace(nm.map.choi).real - 1.0) <= 1e-12),
        _check("cp", choi.is_cp(nm.map, tol)),
        _check("cocp", choi.is_cocp(nm.map, tol)),
    ]
    sq = choi.compose(nm.map, nm.map)
    state = criteria.BipartiteState(sq.dims, sq.choi)
    checks.append(_check("square-ppt", criteria.is_ppt_state(state, tol)))
    checks.append(_check("square-realignment", criteria.realignment_criterion(state)))
    return checks


def _suite_choi_witness(args) -> list[dict]:
    nm = catalog.choi_map_witness()
    witness = criteria.k_positivity_falsify(nm.map, 1, restarts=16, seed=args.seed)
    result = sdp.decomposability_check(nm.map)
    return [
        _check("not-cp", linalg.min_eig(nm.map.choi) < -args.tol_psd,
               min_eig=linalg.min_eig(nm.map.choi)),
        _check("positivity-audit", witness is None),
        _check(
            "not-decomposable",
            result.status == sdp.INFEASIBLE
            and result.residuals.get("witness_overlap", 0.0) < 0.0,
            status=result.status,
            witness_overlap=result.residuals.get("witness_overlap"),
        ),
    ]


def _suite_switch(args) -> list[dict]:
    d, tol = args.d, args.tol_psd
    T1 = choi.random_cp_cocp_map(d, args.seed)
    T2 = choi.random_cp_cocp_map(d, args.seed + 1)
    sw = choi.switch_map(T1, T2)
    rng = np.random.default_rng(args.seed + 2)
    Y = linalg.random_hermitian(d, rng)
    flag0 = np.zeros((2, 2), dtype=complex)
    flag0[0, 0] = 1.0
    twice = choi.apply(sw, choi.apply(sw, np.kron(Y, flag0)))
    expected = np.kron(choi.apply(choi.compose(T2, T1), Y), flag0)
    scale = max(1.0, float(np.max(np.abs(expected))))
    gap = float(np.max(np.abs(twice - expected))) / scale
    return [
        _check("switch-cp-and-cocp", choi.is_cp(sw, tol) and choi.is_cocp(sw, tol)),
        _check("dims-doubled", sw.dims == (2 * d, 2 * d)),
        _check("sector-composition", gap <= SECTOR_TOL, rel_gap=gap),
    ]


def _suite_gaussian(args) -> list[dict]:
    C = gaussian.random_cocp_channel(args.n, args.seed)
    checks = [
        _check("valid", gaussian.is_valid(C, args.tol_psd)),
        _check("cocp", gaussian.is_cocp(C, args.tol_psd)),
    ]
    N, M, verified = gaussian.ppt2_witness(C, C, args.tol_psd)
    checks.append(_check("ppt2-witness", verified))
    result = gaussian.is_eb(gaussian.compose(C, C))
    feasible = result.status == sdp.FEASIBLE
    residuals = {k: float(v) for k, v in result.residuals.items() if np.isscalar(v)}
    checks.append(_check("composition-eb", feasible, status=result.status, **residuals))
    if feasible:
        checks.append(
            _check(
                "split-margins",
                result.residuals["measured_margin"] >= -1e-8
                and result.residuals["remainder_margin"] >= -1e-8,
            )
        )
    return checks


_SUITES: dict[str, Callable] = {
    "holevo-werner": _suite_holevo_werner,
    "rank3": _suite_rank3,
    "antisym": _suite_antisym,
    "tau-n": _suite_tau_n,
    "choi-witness": _suite_choi_witness,
    "switch": _suite_switch,
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--d", type=int, default=3, help="matrix dimension (default 3)")
    parser.add_argument("--p", type=float, default=0.25, help="family parameter (default 0.25)")
    parser.add_argument("--n", type=int, default=1, help="tensor power or mode count (default 1)")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument(
        "--tol-psd", type=float, default=linalg.TOL_PSD,
        help="PSD acceptance tolerance (default 1e-9)",
    )
    parser.add_argument("--json-out", metavar="PATH", help="write the JSON report to PATH")


def _run(op: str, suite: Callable, args) -> int:
    checks = suite(args)
    passed = all(c["passed"] for c in checks)
    for c in checks:
        tag = "SKIP" if c["data"].get("skipped") else ("PASS" if c["passed"] else "FAIL")
        detail = json.dumps(c["data"]) if c["data"] else ""
        print(f"[{tag}] {c['name']} {detail}".rstrip())
    print(f"{op}: {'all checks passed' if passed else 'CHECKS FAILED'}")
    if args.json_out:
        report = criteria.make_report(
            op=op,
            verdict="pass" if passed else "fail",
            evidence=checks,
            seed=args.seed,
            tolerances={"tol_psd": args.tol_psd},
        )
        with open(args.json_out, "w") as fh:
            json.dump(report, fh, indent=2)
    return 0 if passed else 1


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ebcompose",
        description="verification suites for the bundled example maps and channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify-example", help="re-run the checks of one named example")
    verify.add_argument("name", choices=sorted(_SUITES))
    _add_common_flags(verify)

    gauss = sub.add_parser("gaussian", help="check a seeded random coCP Gaussian channel")
    _add_common_flags(gauss)

    args = parser.parse_args(argv)
    if args.command == "verify-example":
        op, suite = f"verify-example:{args.name}", _SUITES[args.name]
    else:
        op, suite = "gaussian", _suite_gaussian
    try:
        return _run(op, suite, args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
