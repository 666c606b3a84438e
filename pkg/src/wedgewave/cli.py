"""Batch command-line front end.

Subcommands compute coefficient tables, strip scans, and wedge eigensolves,
and emit machine-readable JSON (or CSV where noted).  Every record carries
the keys {quantity, inputs, value, provenance, tolerances, paper_anchor};
floats are serialized with 17 significant digits and fixed key order, so a
given invocation is byte-reproducible.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import asymptotics, fem, pencil
from .errors import WedgeWaveError
from .material import from_poisson, make_material, solve_rayleigh, check_rayleigh_identity

__all__ = ["main", "run", "build_parser"]


# ---------------------------------------------------------------------------
# Deterministic serialization
# ---------------------------------------------------------------------------


def _json_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return "null"
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def dumps_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {dumps_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {dumps_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return _json_scalar(obj)


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    else:
        out[prefix] = obj


def dumps_csv(records: list[dict]) -> str:
    flat = []
    for rec in records:
        row: dict = {}
        _flatten("", rec, row)
        flat.append(row)
    header: list[str] = []
    for row in flat:
        for k in row:
            if k not in header:
                header.append(k)
    lines = [",".join(header)]
    for row in flat:
        cells = []
        for k in header:
            v = row.get(k, "")
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, (float, np.floating)):
                cells.append(format(float(v), ".17g"))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _record(quantity, inputs, value, provenance, tolerances, anchor) -> dict:
    return {
        "quantity": quantity,
        "inputs": inputs,
        "value": value,
        "provenance": provenance,
        "tolerances": tolerances,
        "paper_anchor": anchor,
    }


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def _add_material_args(p: argparse.ArgumentParser, lame_allowed: bool = True):
    p.add_argument("--poisson", type=float, help="Poisson ratio in (-1, 1/2); mu = 1")
    if lame_allowed:
        p.add_argument("--lame", type=float, nargs=2, metavar=("L", "M"), help="Lame constants")
    p.add_argument("--k", type=float, default=1.0, help="wavenumber (default 1)")


def _material_from(args, lame_allowed: bool = True):
    has_lame = lame_allowed and args.lame is not None
    if (args.poisson is None) == (not has_lame):
        raise ConstraintUsage("exactly one of --poisson or --lame is required")
    if args.poisson is not None:
        return from_poisson(args.poisson, 1.0), {"poisson": args.poisson, "mu": 1.0}
    lam, mu = args.lame
    return make_material(lam, mu), {"lam": lam, "mu": mu}


class ConstraintUsage(Exception):
    """Usage-level error detected after parsing (exit code 2)."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wedgewave",
        description="Rayleigh baseline, wedge-wave matching constants, strip scans, "
        "and finite-element verification of the trapped-mode gap law.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rayleigh", help="certified Rayleigh speed and derived constants")
    _add_material_args(p)

    p = sub.add_parser("coeffs", help="matching constants via both provenance routes")
    _add_material_args(p)

    p = sub.add_parser("theta-table", help="speed-deficit coefficient over a Poisson grid")
    p.add_argument("--sigma-grid", required=True, metavar="LO:HI:N")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("pencil-scan", help="minimal singular values over the strip")
    _add_material_args(p, lame_allowed=False)
    p.add_argument("--beta", type=float, default=None, help="strip half-width")
    p.add_argument("--grid", type=int, default=2000, help="half-line grid intervals")
    p.add_argument("--xmax", type=float, default=None, help="half-line truncation")

    p = sub.add_parser("wedge-solve", help="one truncated-wedge eigensolve")
    _add_material_args(p, lame_allowed=False)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--angle-mode", choices=("tan", "radians"), default="tan")

    p = sub.add_parser("sweep", help="gap-law fit over a list of wedge angles")
    _add_material_args(p, lame_allowed=False)
    p.add_argument("--eps-list", required=True, metavar="E1,E2,...")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--angle-mode", choices=("tan", "radians"), default="tan")

    return parser


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_rayleigh(args) -> str:
    mat, inputs = _material_from(args)
    inputs["k"] = args.k
    sol = solve_rayleigh(mat)
    resid = check_rayleigh_identity(sol)
    tol = {"identity_rel": 1e-12}
    records = [
        _record("c_R", inputs, sol.c_R, "closed-form", tol, "rayleigh-speed"),
        _record("c_R_over_c_t", inputs, sol.c_R / mat.c_t, "closed-form", tol, "rayleigh-speed"),
        _record("B", inputs, sol.B, "closed-form", tol, "rayleigh-speed"),
        _record("kappa_t", inputs, sol.kappa_t, "closed-form", tol, "rayleigh-speed"),
        _record("kappa_l", inputs, sol.kappa_l, "closed-form", tol, "rayleigh-speed"),
        _record("identity_residual", inputs, resid, "closed-form", tol, "rayleigh-identity"),
    ]
    return dumps_json({"command": "rayleigh", "inputs": inputs, "records": records}) + "\n"


def _cmd_coeffs(args) -> str:
    mat, inputs = _material_from(args)
    inputs["k"] = args.k
    sol = solve_rayleigh(mat)
    co = asymptotics.compute_coefficients(sol, args.k)
    b_q = pencil.compute_b_quadrature(sol, args.k)
    cv_q = asymptotics.compute_cv_plus(sol, args.k)
    lam1_q = asymptotics.compute_lambda1(sol, args.k, "quadrature")
    records = [
        _record("b", inputs, co.b, "closed-form",
                {"cross_check_rel": 1e-11, "observed_rel": co.disagreement["b"]},
                "pencil-coefficient-b"),
        _record("b", inputs, b_q.real, "quadrature",
                {"imag_magnitude": abs(b_q.imag)}, "pencil-coefficient-b"),
        _record("cv_plus", inputs, co.cv_plus, "closed-form",
                {"cross_check_rel": 1e-10, "observed_rel": co.disagreement["cv_plus"]},
                "matching-constant-v"),
        _record("cv_plus", inputs, cv_q.real, "quadrature",
                {"imag_magnitude": abs(cv_q.imag)}, "matching-constant-v"),
        _record("cu_plus", inputs, co.cu_plus, "quadrature",
                {"abs_bound": 1e-10}, "matching-constant-u"),
        _record("xi1", inputs, co.xi1, "closed-form", {}, "outer-decay-slope"),
        _record("lambda1", inputs, co.lambda1, "closed-form",
                {"cross_check_rel": 1e-9, "observed_rel": co.disagreement["lambda1"]},
                "eigenvalue-correction"),
        _record("lambda1", inputs, lam1_q, "quadrature", {}, "eigenvalue-correction"),
        _record("theta", inputs, co.theta, "closed-form", {}, "speed-deficit-coefficient"),
    ]
    return dumps_json({"command": "coeffs", "inputs": inputs, "records": records}) + "\n"


def _cmd_theta_table(args) -> str:
    try:
        lo_s, hi_s, n_s = args.sigma_grid.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise ConstraintUsage(f"--sigma-grid must be LO:HI:N, got {args.sigma_grid!r}") from exc
    if n < 1:
        raise ConstraintUsage("--sigma-grid needs N >= 1")
    records = []
    for sigma in np.linspace(lo, hi, n):
        sol = solve_rayleigh(from_poisson(float(sigma), 1.0))
        inputs = {"poisson": float(sigma), "mu": 1.0}
        records.append(
            {
                "quantity": "theta",
                "inputs": inputs,
                "value": asymptotics.compute_theta(sol),
                "B": sol.B,
                "c_R_over_c_t": sol.c_R / sol.material.c_t,
                "provenance": "closed-form",
                "tolerances": {},
                "paper_anchor": "speed-deficit-coefficient",
            }
        )
    if args.format == "csv":
        return dumps_csv(records)
    return dumps_json({"command": "theta-table", "records": records}) + "\n"


def _cmd_pencil_scan(args) -> str:
    mat, inputs = _material_from(args, lame_allowed=False)
    k = args.k
    sol = solve_rayleigh(mat)
    beta = args.beta if args.beta is not None else 0.1 * k * sol.kappa_t
    xmax = args.xmax if args.xmax is not None else 30.0 / (k * sol.kappa_t)
    grid = pencil.HalfLineGrid.uniform(args.grid, xmax)
    samples = pencil.default_xi_samples(mat, k, beta=beta)
    report = pencil.min_singular_scan(mat, k, grid, samples, beta=beta)
    inputs.update({"k": k, "beta": beta, "grid": args.grid, "xmax": xmax})
    records = [
        _record(
            "sigma_min",
            {"xi_re": s["xi_re"], "xi_im": s["xi_im"]},
            s["sigma_min"],
            "fem",
            {"near_kernel_threshold": report.threshold, "flagged": s["flagged"]},
            "strip-spectrum-scan",
        )
        for s in report.to_dict()["samples"]
    ]
    out = {
        "command": "pencil-scan",
        "inputs": inputs,
        "median_sigma_min": report.median,
        "single_cluster_at_origin": report.is_single_cluster_at_origin(),
        "records": records,
    }
    return dumps_json(out) + "\n"


def _eps_from(args, value: float) -> float:
    return math.tan(value) if args.angle_mode == "radians" else value


def _cmd_wedge_solve(args) -> str:
    mat, inputs = _material_from(args, lame_allowed=False)
    eps = _eps_from(args, args.eps)
    spec = fem.default_mesh_spec(mat, args.k, eps, radius=args.radius, h=args.h, order=args.order)
    result = fem.find_wedge_mode(mat, args.k, spec)
    inputs.update({"k": args.k, "eps": eps, "radius": result.radius, "h": spec.h, "order": spec.order})
    rd = result.to_dict()
    records = [
        _record(name, inputs, rd[name], "fem", {"localization_gate": 0.99}, "wedge-eigenvalue")
        for name in ("omega_hat_sq", "gap", "lambda_estimate", "localization", "trapped")
    ]
    out = {"command": "wedge-solve", "inputs": inputs, "result": rd, "records": records}
    return dumps_json(out) + "\n"


def _cmd_sweep(args) -> str:
    mat, inputs = _material_from(args, lame_allowed=False)
    try:
        eps_list = [_eps_from(args, float(tok)) for tok in args.eps_list.split(",") if tok]
    except ValueError as exc:
        raise ConstraintUsage(f"--eps-list must be comma-separated floats, got {args.eps_list!r}") from exc
    report = fem.sweep_epsilon(mat, args.k, eps_list)
    inputs.update({"k": args.k, "eps_list": eps_list})
    records = [
        _record("lambda_hat", inputs, report.lambda_hat, "fem",
                {"rel_deviation_bound": 0.15, "observed_rel_deviation": report.rel_deviation},
                "gap-law-fit"),
        _record("lambda1", inputs, report.lambda1_ref, "closed-form", {}, "eigenvalue-correction"),
    ] + [
        _record("gap", {"eps": r.eps, "k": args.k}, r.gap, "fem",
                {"localization": r.localization}, "wedge-eigenvalue")
        for r in report.results
    ]
    out = {"command": "sweep", "inputs": inputs, "fit": report.to_dict(), "records": records}
    return dumps_json(out) + "\n"


_HANDLERS = {
    "rayleigh": _cmd_rayleigh,
    "coeffs": _cmd_coeffs,
    "theta-table": _cmd_theta_table,
    "pencil-scan": _cmd_pencil_scan,
    "wedge-solve": _cmd_wedge_solve,
    "sweep": _cmd_sweep,
}


def run(argv=None) -> int:
    """Parse and execute; returns 0 on success, 1 on domain error, 2 on usage error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = _HANDLERS[args.command](args)
    except ConstraintUsage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except WedgeWaveError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", encoding="ascii") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
