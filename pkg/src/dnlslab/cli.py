"""Command-line interface.

Subcommands: simulate, energies, scaling, identities, verify, bourgain,
budget.  Exit codes: 0 success, 1 regression failure, 2 configuration or
usage error.  Report writes are atomic; a malformed configuration never
leaves partial output behind.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as bnd
from . import bourgain as brg
from .config import ComparisonPolicy
from .errors import DnlsLabError, RegressionError
from .experiments import (
    ExperimentConfig,
    config_from_dict,
    gwp_budget,
    initial_field,
    run_energy_series,
    run_identity_suite,
    run_scaling_study,
)
from .reports import env_out_dir, write_csv_report, write_json_report
from .solver import SimConfig, evolve
from .spectral import Grid


def _load_config(path: str, out_dir: str | None) -> ExperimentConfig:
    doc = json.loads(Path(path).read_text())
    return config_from_dict(doc, out_dir)


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config, args.out_dir)
    sim = SimConfig(grid=cfg.grid, dt=cfg.dt, T=cfg.T, equation=cfg.equation,
                    lam=cfg.lam, sample_every=cfg.sample_every)
    traj = evolve(sim, initial_field(cfg))
    out = env_out_dir(cfg.out_dir) / "trajectory"
    traj.save(out)
    drift = abs(traj.ledger["mass"][-1] - traj.ledger["mass"][0])
    print(f"simulate: {len(traj.times)} samples -> {out} (mass drift {drift:.3e})")
    return 0


def _cmd_energies(args) -> int:
    cfg = _load_config(args.config, args.out_dir)
    series = run_energy_series(cfg)
    print(f"energies: wrote {len(series)} series to {cfg.out_dir}")
    return 0


def _cmd_scaling(args) -> int:
    cfg = _load_config(args.config, args.out_dir)
    rep = run_scaling_study(cfg)
    slope = rep.get("slope_E3", {}).get("slope")
    print(f"scaling: {len(rep['rows'])} cutoffs, third-energy slope {slope}")
    return 0


def _cmd_identities(args) -> int:
    cfg = _load_config(args.config, args.out_dir)
    rep = run_identity_suite(cfg, force=args.force)
    print(
        "identities: order-1 measured order "
        f"{rep['order1_measured_order']:.3f} "
        f"(gate {'passed' if rep['order1_gate_passed'] else 'FAILED'})"
    )
    if "order2" in rep:
        print(f"  order-2 normalized residual {rep['order2']['normalized']:.3e}")
    if "order3" in rep:
        print(
            f"  order-3 normalized residual {rep['order3']['normalized']:.3e} "
            f"(resonance leaks {rep['order3']['sigma_leaks']})"
        )
    return 0 if rep["order1_gate_passed"] or args.force else 1


def _cmd_verify(args) -> int:
    pol = ComparisonPolicy(C_sim=args.csim, C_gg=args.cgg, C_gtr=args.cgtr)
    rep = bnd.verify_bound(
        args.bound, N=args.N, samples=args.samples, seed=args.seed, pol=pol,
        s=args.s, tail=args.tail, profile=args.profile,
    )
    fixtures = bnd.load_fixtures(args.fixtures)
    code = 0
    try:
        bnd.check_fixture(rep, fixtures, update=args.update_fixtures)
    except RegressionError as exc:
        print(f"verify: REGRESSION: {exc}", file=sys.stderr)
        code = 1
    if args.update_fixtures:
        bnd.save_fixtures(fixtures, args.fixtures)
    out = env_out_dir(args.out_dir)
    stem = f"bound_{rep.bound_id}_N{args.N:g}_seed{args.seed}"
    write_csv_report(out / f"{stem}.csv", bnd.CSV_HEADER, [rep.csv_row()],
                     config=rep.policy)
    write_json_report(out / f"{stem}.json", {"report": rep.as_dict()},
                      rep.policy)
    print(
        f"verify {rep.bound_id}: max ratio {rep.max_ratio:.6g} over "
        f"{rep.hypothesis_count} samples (coverage {rep.coverage:.3f})"
    )
    return code


def _cmd_bourgain(args) -> int:
    grid = Grid(L=args.L, K=args.K)
    rep = brg.estimate_ratio(args.estimate, grid, args.Tw, args.Kt, args.seed)
    fixtures = brg.load_st_fixtures(args.fixtures)
    code = 0
    try:
        brg.check_st_fixture(rep, fixtures, update=args.update_fixtures)
    except RegressionError as exc:
        print(f"bourgain: REGRESSION: {exc}", file=sys.stderr)
        code = 1
    if args.update_fixtures:
        brg.save_st_fixtures(fixtures, args.fixtures)
    out = env_out_dir(args.out_dir)
    write_json_report(
        out / f"estimate_{rep.estimate_id}_seed{args.seed}.json",
        {"report": rep.as_dict()},
        {"K": args.K, "Kt": args.Kt, "Tw": args.Tw, "seed": args.seed},
    )
    print(f"bourgain {rep.estimate_id}: max ratio {rep.max_ratio:.6g}")
    return code


def _cmd_budget(args) -> int:
    rec = gwp_budget(args.s, args.N, args.mass, args.mu_exponent)
    print(
        f"budget s={rec['s']} N={rec['N']:g}: mu=N^{rec['mu_exponent_rescale']:.4g}"
        f"={rec['mu']:.6g}, M=N^2.5={rec['iterations_M']:.6g}, "
        f"T=N^{rec['T_exponent']:.4g}={rec['T']:.6g}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dnlslab")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("simulate", _cmd_simulate),
        ("energies", _cmd_energies),
        ("scaling", _cmd_scaling),
    ):
        q = sub.add_parser(name)
        q.add_argument("--config", required=True)
        q.add_argument("--out-dir", default=None)
        q.set_defaults(fn=fn)

    q = sub.add_parser("identities")
    q.add_argument("--config", required=True)
    q.add_argument("--out-dir", default=None)
    q.add_argument("--force", action="store_true",
                   help="run orders 2-3 even if the order-1 gate fails")
    q.set_defaults(fn=_cmd_identities)

    q = sub.add_parser("verify")
    q.add_argument("--bound", required=True)
    q.add_argument("--N", type=float, required=True)
    q.add_argument("--samples", type=int, default=None)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--profile", default=None)
    q.add_argument("--s", type=float, default=0.5)
    q.add_argument("--tail", default="sharp")
    q.add_argument("--csim", type=float, default=2.0)
    q.add_argument("--cgg", type=float, default=8.0)
    q.add_argument("--cgtr", type=float, default=0.5)
    q.add_argument("--out-dir", default="reports")
    q.add_argument("--fixtures", default=None)
    q.add_argument("--update-fixtures", action="store_true")
    q.set_defaults(fn=_cmd_verify)

    q = sub.add_parser("bourgain")
    q.add_argument("--estimate", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--K", type=int, default=48)
    q.add_argument("--Kt", type=int, default=96)
    q.add_argument("--Tw", type=float, default=2.0)
    q.add_argument("--L", type=float, default=2 * 3.141592653589793)
    q.add_argument("--out-dir", default="reports")
    q.add_argument("--fixtures", default=None)
    q.add_argument("--update-fixtures", action="store_true")
    q.set_defaults(fn=_cmd_bourgain)

    q = sub.add_parser("budget")
    q.add_argument("--s", type=float, required=True)
    q.add_argument("--N", type=float, required=True)
    q.add_argument("--mass", type=float, default=None)
    q.add_argument("--mu-exponent", type=float, default=None)
    q.set_defaults(fn=_cmd_budget)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (DnlsLabError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
