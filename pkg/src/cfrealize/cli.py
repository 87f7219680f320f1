"""Command-line front end.

Every command is a pure function of its input files, flags, and seed:
repeated invocations produce byte-identical outputs.  Stochastic commands
require an explicit --seed; there is no wall-clock default.  Reports always
carry the truncation parameters and tolerances they were computed with.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import dupire, hankel, paths, realize
from .errors import CFError
from .fps import RATIONAL, format_series, read_series, to_float
from .symdiff import (
    AnalyticModel,
    BilinearModel,
    bilinear_coefficients,
    cf_coefficients,
    format_model,
    read_model,
)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_json(path: str, payload) -> None:
    _atomic_write(path, _json_text(payload))


def _series_coefficients(model, deg: int):
    if isinstance(model, BilinearModel):
        return bilinear_coefficients(model, deg)
    return cf_coefficients(model, deg)


def _trajectory_csv(grid, columns: dict[str, np.ndarray]) -> str:
    names = ["t"] + list(columns)
    lines = [",".join(names)]
    for j in range(len(grid)):
        row = [repr(float(grid[j]))] + [repr(float(v[j])) for v in columns.values()]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_coeffs(args) -> int:
    model = read_model(args.model)
    s = _series_coefficients(model, args.deg)
    if args.mode == "float":
        s = to_float(s)
    _atomic_write(os.path.join(args.out, "series.txt"), format_series(s))
    per_degree = {}
    for w in s.coeffs:
        per_degree[len(w)] = per_degree.get(len(w), 0) + 1
    summary = {
        "m": s.m,
        "degree": s.max_degree,
        "mode": s.mode,
        "nonzero_per_degree": {str(d): per_degree.get(d, 0) for d in range(s.max_degree + 1)},
        "nonzero_total": len(s.coeffs),
    }
    _write_json(os.path.join(args.out, "summary.json"), summary)
    print(f"wrote {os.path.join(args.out, 'series.txt')} ({len(s.coeffs)} nonzero records)")
    return 0


def cmd_rank(args) -> int:
    s = read_series(args.series)
    block = hankel.hankel_build(s, args.rows, args.cols)
    if s.mode == RATIONAL:
        report = hankel.rank_exact(block)
    else:
        report = hankel.rank_numeric(block, tol=args.tol)
    payload = {"hankel": report.as_dict()}
    if args.bracket is not None and args.obs is not None:
        lie = hankel.lie_rank(s, args.bracket, args.obs, tol=args.tol)
        payload["lie"] = lie.as_dict()
    text = _json_text(payload)
    sys.stdout.write(text)
    if args.out:
        _atomic_write(os.path.join(args.out, "rank.json"), text)
    return 0


def cmd_lierank(args) -> int:
    s = read_series(args.series)
    report = hankel.lie_rank(s, args.bracket, args.obs, tol=args.tol)
    text = _json_text({"lie": report.as_dict()})
    sys.stdout.write(text)
    if args.out:
        _atomic_write(os.path.join(args.out, "rank.json"), text)
    return 0


def cmd_realize(args) -> int:
    s = read_series(args.series)
    result = realize.bilinear_realize(s, args.deg)
    _atomic_write(os.path.join(args.out, "model.txt"), format_model(result.model))
    payload = {
        "dimension": result.model.n,
        "basis_words": [list(w) for w in result.basis_words],
        "verified_degree": result.verified_degree,
        "max_discrepancy": str(result.max_discrepancy),
    }
    _write_json(os.path.join(args.out, "verify.json"), payload)
    print(f"realized dimension {result.model.n}, exact to degree {result.verified_degree}")
    return 0


def _simulate_once(model, grid, seed):
    q = paths.QSpec.identity(model.m)
    path = paths.sample_brownian(q, grid, seed)
    y = (
        paths.simulate_bilinear(model, path)
        if isinstance(model, BilinearModel)
        else paths.simulate_analytic(model, path)
    )
    return path, y


def cmd_simulate(args) -> int:
    model = read_model(args.model)
    grid = paths.make_grid(args.horizon, args.grid)
    terminal = []
    for rep in range(args.reps):
        path, y = _simulate_once(model, grid, paths.replicate_seed(args.seed, rep))
        cols = {f"W{i + 1}": path.values[:, i] for i in range(path.m)}
        cols["Y_sim"] = y
        _atomic_write(
            os.path.join(args.out, f"rep{rep:03d}.csv"), _trajectory_csv(grid, cols)
        )
        terminal.append(float(y[-1]))
    summary = {
        "horizon": args.horizon,
        "grid_steps": args.grid,
        "replicates": args.reps,
        "seed": args.seed,
        "terminal_median": float(np.median(terminal)),
        "terminal_mean": float(np.mean(terminal)),
    }
    _write_json(os.path.join(args.out, "summary.json"), summary)
    print(f"simulated {args.reps} replicates to t={args.horizon}")
    return 0


def cmd_compare(args) -> int:
    model = read_model(args.model)
    s = to_float(_series_coefficients(model, args.deg))
    grid = paths.make_grid(args.horizon, args.grid)
    q = paths.QSpec.identity(model.m)
    errors = {d: [] for d in range(1, args.deg + 1)}
    for rep in range(args.reps):
        path = paths.sample_brownian(q, grid, paths.replicate_seed(args.seed, rep))
        y = (
            paths.simulate_bilinear(model, path)
            if isinstance(model, BilinearModel)
            else paths.simulate_analytic(model, path)
        )
        table = paths.iterated_stratonovich(path, args.deg)
        ycf = paths.cf_trajectory(s, table)
        for d in errors:
            yd = paths.cf_trajectory(s, table, max_degree=d)
            errors[d].append(abs(float(yd[-1]) - float(y[-1])))
        cols = {f"W{i + 1}": path.values[:, i] for i in range(path.m)}
        cols["Y_sim"] = y
        cols["Y_cf"] = ycf
        _atomic_write(
            os.path.join(args.out, f"rep{rep:03d}.csv"), _trajectory_csv(grid, cols)
        )
    summary = {
        "horizon": args.horizon,
        "grid_steps": args.grid,
        "replicates": args.reps,
        "seed": args.seed,
        "series_degree": args.deg,
        "median_terminal_error_per_degree": {
            str(d): float(np.median(v)) for d, v in errors.items()
        },
    }
    _write_json(os.path.join(args.out, "summary.json"), summary)
    print("median terminal truncation errors: " + json.dumps(summary["median_terminal_error_per_degree"]))
    return 0


DECAY_FACTOR = 1.2


def cmd_ito_check(args) -> int:
    from .symdiff import MultiPoly

    q = paths.QSpec.identity(1)
    linear = dupire.MemorylessFunctional(MultiPoly.var(2, 2), 1)
    quad = dupire.MemorylessFunctional(MultiPoly.var(2, 2) * MultiPoly.var(2, 2), 1)
    reports = []
    linear_report = dupire.functional_ito_residual(
        linear, q, paths.make_grid(args.horizon, args.grid), args.horizon, args.reps, args.seed
    )
    reports.append(linear_report.as_dict())
    quad_rms = []
    for scale in (1, 2, 4):
        rep = dupire.functional_ito_residual(
            quad,
            q,
            paths.make_grid(args.horizon, args.grid * scale),
            args.horizon,
            args.reps,
            args.seed,
        )
        reports.append(rep.as_dict())
        quad_rms.append(rep.rms)
    factors = [quad_rms[i] / quad_rms[i + 1] for i in range(len(quad_rms) - 1)]
    ok = linear_report.rms <= 1e-10 and all(f >= DECAY_FACTOR for f in factors)
    payload = {
        "reports": reports,
        "quadratic_decay_factors": factors,
        "linear_rms": linear_report.rms,
        "pass": bool(ok),
    }
    text = _json_text(payload)
    sys.stdout.write(text)
    if args.out:
        _atomic_write(os.path.join(args.out, "residuals.json"), text)
    return 0 if ok else 1


def cmd_hijab_check(args) -> int:
    model = read_model(args.model)
    if not isinstance(model, AnalyticModel):
        raise CFError("decomposition check needs an analytic model")
    rms = []
    reports = []
    for scale in (1, 2):
        grid = paths.make_grid(args.horizon, args.grid * scale)
        rep = dupire.hijab_decomposition_check(model, grid, args.seed, replicates=args.reps)
        reports.append(rep.as_dict())
        rms.append(rep.ito_rms)
    factor = rms[0] / rms[1] if rms[1] > 0 else float("inf")
    ok = factor >= DECAY_FACTOR
    payload = {"reports": reports, "ito_decay_factor": factor, "pass": bool(ok)}
    text = _json_text(payload)
    sys.stdout.write(text)
    if args.out:
        _atomic_write(os.path.join(args.out, "hijab.json"), text)
    return 0 if ok else 1


def cmd_demo_zakai(args) -> int:
    generator = [[-1, 1], [1, -1]]
    obs = [0, 1]
    init = ["1/2", "1/2"]
    phi_indicator = [0, 1]
    model = paths.zakai_build(generator, obs, phi_indicator, init)
    _atomic_write(os.path.join(args.out, "model.txt"), format_model(model))

    s = bilinear_coefficients(model, args.deg)
    block = hankel.hankel_build(s, args.deg // 2, args.deg - args.deg // 2)
    rank_report = hankel.rank_exact(block)

    grid = paths.make_grid(args.horizon, args.grid)
    q = paths.QSpec.identity(1)
    positivity_violations = 0
    pi_min, pi_max = float("inf"), float("-inf")
    one_dev = 0.0
    for rep in range(args.reps):
        path = paths.sample_brownian(q, grid, paths.replicate_seed(args.seed, rep))
        sigma_phi, sigma_one, _ = paths.zakai_readout(model, path)
        positivity_violations += int(np.count_nonzero(sigma_one <= 0))
        pi = paths.normalize_filter(sigma_phi, sigma_one)
        pi_min = min(pi_min, float(np.min(pi)))
        pi_max = max(pi_max, float(np.max(pi)))
        one_dev = max(one_dev, float(np.max(np.abs(paths.normalize_filter(sigma_one, sigma_one) - 1.0))))
        if rep < 4:
            cols = {
                "W1": path.values[:, 0],
                "sigma_phi": sigma_phi,
                "sigma_one": sigma_one,
                "pi": pi,
            }
            _atomic_write(
                os.path.join(args.out, f"rep{rep:03d}.csv"), _trajectory_csv(grid, cols)
            )
    summary = {
        "generator": generator,
        "obs": obs,
        "phi": phi_indicator,
        "horizon": args.horizon,
        "grid_steps": args.grid,
        "replicates": args.reps,
        "seed": args.seed,
        "positivity_violations": positivity_violations,
        "pi_range": [pi_min, pi_max],
        "unit_phi_max_deviation": one_dev,
        "hankel_rank": rank_report.as_dict(),
    }
    _write_json(os.path.join(args.out, "summary.json"), summary)
    print(
        f"positivity violations: {positivity_violations}; pi range "
        f"[{pi_min:.6f}, {pi_max:.6f}]; Hankel rank {rank_report.rank}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfrealize",
        description=(
            "Generate coefficient series from state-space models, compute "
            "Hankel and Lie ranks, synthesize bilinear realizations, and run "
            "pathwise verification studies."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **help_kw):
        p = sub.add_parser(name, **help_kw)
        p.set_defaults(fn=fn)
        return p

    p = add("coeffs", cmd_coeffs, help="generate the coefficient series of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--mode", choices=["rational", "float"], default="rational")
    p.add_argument("--out", required=True)

    p = add("rank", cmd_rank, help="Hankel rank of a series (exact or numeric)")
    p.add_argument("--series", required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--bracket", type=int)
    p.add_argument("--obs", type=int)
    p.add_argument("--tol", type=float, default=hankel.DEFAULT_TOLERANCE)
    p.add_argument("--out")

    p = add("lierank", cmd_lierank, help="truncated Lie-rank estimate of a series")
    p.add_argument("--series", required=True)
    p.add_argument("--bracket", type=int, required=True)
    p.add_argument("--obs", type=int, required=True)
    p.add_argument("--tol", type=float, default=hankel.DEFAULT_TOLERANCE)
    p.add_argument("--out")

    p = add("realize", cmd_realize, help="synthesize a bilinear realization from a series")
    p.add_argument("--series", required=True)
    p.add_argument("--deg", type=int, default=None)
    p.add_argument("--out", required=True)

    p = add("simulate", cmd_simulate, help="simulate a model along sampled driving paths")
    p.add_argument("--model", required=True)
    p.add_argument("--horizon", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("compare", cmd_compare, help="compare simulation against the truncated series")
    p.add_argument("--model", required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--horizon", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("ito-check", cmd_ito_check, help="functional change-of-variable residual study")
    p.add_argument("--horizon", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")

    p = add("hijab-check", cmd_hijab_check, help="first-order decomposition check of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--horizon", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")

    p = add("demo-zakai", cmd_demo_zakai, help="two-state filter demo: positivity and rank")
    p.add_argument("--horizon", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--deg", type=int, default=6)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
