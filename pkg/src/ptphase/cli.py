"""Command-line front end: one subcommand per study, machine-readable output.

Every row carries the partition, the quantity name, its value, the standard
error when the quantity is estimated, the sample count, and the master seed.
CSV output is byte-reproducible for a fixed seed; JSON adds a run manifest.
"""

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__, dense, haar, mps, pxp, shadows
from .ensembles import EnsembleSpec, phase_diagram_scan, run_ensemble, sample_haar_state, sample_rng
from .errors import PtphaseError
from .stabilizer import StabilizerTriple, stab_invariants, stab_pt_moments
from .tripartition import Tripartition

CSV_HEADER = ["family", "N_A", "N_B", "N_C", "quantity", "value", "std_error", "n_samples", "seed"]

QUANTITIES = ("p2", "p3", "p4", "r2_tilde", "r2_mean", "negativity", "e3", "entropy")


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int
    version: str
    started_utc: str
    wall_clock_s: float


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    return f"{float(value):.17g}"


def make_row(family, t: Tripartition, quantity, value, std_error, n_samples, seed):
    return {
        "family": family,
        "N_A": t.n_a,
        "N_B": t.n_b,
        "N_C": t.n_c,
        "quantity": quantity,
        "value": value,
        "std_error": std_error,
        "n_samples": n_samples,
        "seed": seed,
    }


def rows_from_stats(family, t, stats, seed):
    rows = []
    for name in ("p2", "p3", "p4", "r2", "negativity", "e3"):
        if name in stats.means:
            quantity = "r2_mean" if name == "r2" else name
            rows.append(
                make_row(family, t, quantity, stats.means[name], stats.std_errors[name],
                         stats.n_samples, seed)
            )
    if stats.r2_tilde is not None:
        rows.append(
            make_row(family, t, "r2_tilde", stats.r2_tilde, stats.r2_tilde_err,
                     stats.n_samples, seed)
        )
    return rows


def write_rows(rows, out_path, fmt, manifest: RunManifest):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [row["family"], row["N_A"], row["N_B"], row["N_C"], row["quantity"],
             _fmt(row["value"]), _fmt(row["std_error"]), row["n_samples"], row["seed"]]
        )
    if fmt == "csv":
        payload = buffer.getvalue()
    else:
        payload = json.dumps(
            {"manifest": asdict(manifest), "rows": rows}, indent=2, default=float
        ) + "\n"
    if out_path in (None, "-"):
        sys.stdout.write(payload)
    else:
        with open(out_path, "w") as handle:
            handle.write(payload)


def _parse_grid(spec: str, n_ab: int, n_c_max: int):
    """'full' or 'RxC' -> integer N_A and N_C grids."""
    if spec == "full":
        return list(range(0, n_ab + 1)), list(range(0, n_c_max + 1))
    try:
        rows, cols = spec.lower().split("x")
        rows, cols = int(rows), int(cols)
    except ValueError:
        raise PtphaseError(f"grid must be 'full' or like '64x64', got {spec!r}")
    n_a_values = sorted({int(round(x)) for x in np.linspace(0, n_ab, rows)})
    n_c_values = sorted({int(round(x)) for x in np.linspace(0, n_c_max, cols)})
    return n_a_values, n_c_values


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x != ""]


def cmd_haar_analytic(args):
    n_c_max = args.nc_max if args.nc_max is not None else 2 * args.nab
    n_a_values, n_c_values = _parse_grid(args.grid, args.nab, n_c_max)
    rows = []
    for r in haar.analytic_ratio_grid(args.nab, n_a_values, n_c_values):
        t = Tripartition(r["n_a"], r["n_b"], r["n_c"])
        rows.append(make_row("haar-analytic", t, "r2_tilde", r["r2_tilde"], None, 0, args.seed))
    return rows


def cmd_noise(args):
    n_c_max = args.nc_max if args.nc_max is not None else 2 * args.nab
    n_a_values, n_c_values = _parse_grid(args.grid, args.nab, n_c_max)
    eps = Fraction(args.epsilon).limit_denominator(10**12)
    rows = []
    for r in haar.noisy_ratio_grid(args.nab, n_a_values, n_c_values, eps):
        t = Tripartition(r["n_a"], r["n_b"], r["n_c"])
        rows.append(make_row("noise", t, "r2_tilde", r["r2_tilde"], None, 0, args.seed))
    return rows


def cmd_haar_mc(args):
    t = Tripartition(args.na, args.nb, args.nc)
    spec = EnsembleSpec("haar", t, args.samples, args.seed)
    stats = run_ensemble(spec, jobs=args.jobs)
    return rows_from_stats("haar-mc", t, stats, args.seed)


def cmd_stabilizer(args):
    counts = _int_list(args.triple)
    if len(counts) != 7:
        raise PtphaseError("--triple needs 7 integers: s_a,s_b,s_c,g,e_ab,e_ac,e_bc")
    triple = StabilizerTriple(*counts)
    t = triple.partition()
    m = stab_pt_moments(triple)
    inv = stab_invariants(triple)
    rows = [
        make_row("stabilizer", t, "p2", float(m[2]), None, 1, args.seed),
        make_row("stabilizer", t, "p3", float(m[3]), None, 1, args.seed),
        make_row("stabilizer", t, "p4", float(m[4]), None, 1, args.seed),
        make_row("stabilizer", t, "r2_mean", float(inv["r2"]), None, 1, args.seed),
        make_row("stabilizer", t, "negativity", float(inv["negativity"]), None, 1, args.seed),
        make_row("stabilizer", t, "e3", float(inv["e3"]), None, 1, args.seed),
    ]
    return rows


def cmd_mps(args):
    n_a_values = _int_list(args.na_list) if args.na_list else list(range(1, args.nab))
    n_c_values = _int_list(args.nc_list) if args.nc_list else list(range(0, 2 * args.nab + 1, 2))
    rows = []
    for r in mps.mps_phase_diagram(args.nab, args.chi, n_a_values, n_c_values,
                                   args.samples, args.seed, jobs=args.jobs):
        t = Tripartition(r["n_a"], r["n_b"], r["n_c"])
        rows.append(make_row("mps", t, "r2_tilde", r["r2_tilde"], r["r2_tilde_err"],
                             r["n_samples"], args.seed))
        rows.append(make_row("mps", t, "negativity", r["mean_negativity"], r["se_negativity"],
                             r["n_samples"], args.seed))
    return rows


def cmd_fermion(args):
    t = Tripartition(args.na, args.nb, args.nc)
    spec = EnsembleSpec("fermion", t, args.samples, args.seed)
    stats = run_ensemble(spec, jobs=args.jobs)
    return rows_from_stats("fermion", t, stats, args.seed)


def cmd_doped_mg(args):
    t = Tripartition(args.na, args.nb, args.nc)
    rows = []
    for n_swap in _int_list(args.nswap):
        spec = EnsembleSpec("doped-mg", t, args.samples, args.seed, {"n_swap": n_swap})
        stats = run_ensemble(spec, jobs=args.jobs, point_index=n_swap)
        family = f"doped-mg:nswap={n_swap}"
        rows.extend(rows_from_stats(family, t, stats, args.seed))
    return rows


def cmd_pxp(args):
    start, stop = (float(x) for x in args.window.split(","))
    times = np.linspace(start, stop, args.snapshots) / args.omega
    run = pxp.evolve_quench(args.n, args.quench, times, omega=args.omega)
    rows = []
    for r in pxp.tripartition_scan(run):
        t = Tripartition(r["n_a"], r["n_b"], r["n_c"])
        rows.append(make_row("pxp", t, "r2_tilde", r["r2_tilde"], r["r2_tilde_err"],
                             r["n_samples"], args.seed))
        rows.append(make_row("pxp", t, "negativity", r["mean_negativity"], None,
                             r["n_samples"], args.seed))
        rows.append(make_row("pxp", t, "entropy", r["mean_entropy"], None,
                             r["n_samples"], args.seed))
    return rows


def cmd_shadows(args):
    t = Tripartition(args.na, args.nb, args.nc)
    rng = sample_rng(args.seed, 0)
    states = [
        dense.reduce_to_ab(sample_haar_state(t, sample_rng(args.seed, 1, i)))
        for i in range(args.ns)
    ]
    cfg = shadows.CampaignConfig(n_states=args.ns, n_unitaries=args.nu, n_shots=args.nm,
                                 tuple_budget=args.budget, seed=args.seed)
    result = shadows.campaign_r2(states, cfg, n_a=args.na, rng=rng)
    rows = []
    for order in (2, 3, 4):
        value, err = result["moments"][order]
        rows.append(make_row("shadows", t, f"p{order}", value, err, args.ns, args.seed))
    rows.append(make_row("shadows", t, "r2_tilde", result["r2_tilde"],
                         result["r2_tilde_err"], args.ns, args.seed))
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptphase",
        description="Entanglement phase diagrams from partial-transpose moments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seeded=True):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=0,
                       help="worker threads; 0 = machine parallelism, results unaffected")

    p = sub.add_parser("haar-analytic", help="exact sampling-free ratio diagram")
    p.add_argument("--nab", type=int, required=True)
    p.add_argument("--nc-max", type=int, default=None)
    p.add_argument("--grid", default="full", help="'full' or 'RxC' like 64x64")
    common(p)
    p.set_defaults(func=cmd_haar_analytic)

    p = sub.add_parser("noise", help="analytic diagram under white noise")
    p.add_argument("--nab", type=int, required=True)
    p.add_argument("--nc-max", type=int, default=None)
    p.add_argument("--grid", default="full")
    p.add_argument("--epsilon", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("haar-mc", help="Monte Carlo sampling of random states")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--nc", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_haar_mc)

    p = sub.add_parser("stabilizer", help="closed forms for one canonical triple")
    p.add_argument("--triple", required=True,
                   help="s_a,s_b,s_c,g,e_ab,e_ac,e_bc")
    common(p)
    p.set_defaults(func=cmd_stabilizer)

    p = sub.add_parser("mps", help="random matrix-product-state diagram")
    p.add_argument("--nab", type=int, default=10)
    p.add_argument("--chi", type=int, default=8)
    p.add_argument("--na-list", default=None, help="comma-separated N_A values")
    p.add_argument("--nc-list", default=None, help="comma-separated N_C values")
    p.add_argument("--samples", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_mps)

    p = sub.add_parser("fermion", help="Gaussian ensemble (counts are modes)")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--nc", type=int, required=True)
    p.add_argument("--samples", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_fermion)

    p = sub.add_parser("doped-mg", help="brickwork matchgate circuits doped with swaps")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--nc", type=int, required=True)
    p.add_argument("--nswap", default="0", help="comma-separated swap counts")
    p.add_argument("--samples", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_doped_mg)

    p = sub.add_parser("pxp", help="blockaded-chain quench tripartition scan")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--quench", choices=("z2", "polarized"), default="z2")
    p.add_argument("--window", default="20,50", help="start,stop in units of 1/omega")
    p.add_argument("--snapshots", type=int, default=300)
    p.add_argument("--omega", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_pxp)

    p = sub.add_parser("shadows", help="simulated randomized-measurement campaign")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--nc", type=int, required=True)
    p.add_argument("--ns", type=int, default=64)
    p.add_argument("--nu", type=int, default=100)
    p.add_argument("--nm", type=int, default=100)
    p.add_argument("--budget", type=int, default=shadows.TUPLE_BUDGET)
    common(p)
    p.set_defaults(func=cmd_shadows)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    tic = time.perf_counter()
    try:
        rows = args.func(args)
    except PtphaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest = RunManifest(
        subcommand=args.subcommand,
        parameters={k: v for k, v in vars(args).items() if k != "func"},
        seed=args.seed,
        version=__version__,
        started_utc=started,
        wall_clock_s=round(time.perf_counter() - tic, 3),
    )
    write_rows(rows, args.out, args.format, manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
