"""Command line entry point.

Subcommands: kernel-table, field-grid, simulate, train, eval.  Configs are
JSON, bulk numbers are CSV ('.' decimals, '\\n' line endings, header row,
floats written with repr so they round-trip exactly).  Every run drops a
manifest.json with the fully resolved configuration; re-running from that
config on one thread reproduces the artifacts byte for byte.

Exit codes: 0 success, 1 usage error, 2 numeric divergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import InputError, SimulationDiverged, TrainingDiverged
from .estimators import Batch, potential_grid
from .flow import SCENARIOS, make_state, run_sim, scenario_state
from .kernels import GAUSSIAN, PLUMMER, KernelSpec, kernel_grad, kernel_laplacian, kernel_value
from .mixtures import assign_modes, grid_mixture_25, hist2d_jsd, mixture_sampler, \
    report_summary, sample_mixture
from .nets import load_checkpoint, save_checkpoint
from .rng import split_streams
from .training import TrainState, config_from_dict, config_to_dict, sample_generator, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIVERGED = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class ArtifactError(Exception):
    """A file exists but cannot be read as the expected format."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; our contract reserves 2
    # for numeric divergence, so route usage problems through an exception
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fieldgan",
                     description="potential-field GAN toolkit: kernel tables, "
                                 "field grids, particle simulation, training, evaluation")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    common = _Parser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker count for grid evaluation; output is "
                             "deterministic for any fixed value (default 1)")

    kt = sub.add_parser("kernel-table", parents=[common],
                        help="dump a radial kernel profile as CSV")
    kt.add_argument("--family", choices=[PLUMMER, GAUSSIAN], default=PLUMMER)
    kt.add_argument("--d", type=float, default=3.0, help="kernel dimension exponent")
    kt.add_argument("--epsilon", type=float, default=1.0, help="softening length")
    kt.add_argument("--m", type=int, default=2,
                    help="ambient dimension for the laplacian column (default 2)")
    kt.add_argument("--rmax", type=float, default=5.0)
    kt.add_argument("--steps", type=int, default=100,
                    help="radial intervals; the table has steps+1 rows")
    kt.set_defaults(func=cmd_kernel_table)

    fg = sub.add_parser("field-grid", parents=[common],
                        help="evaluate potential and field of a batch on a 2-D lattice")
    fg.add_argument("--batch", required=True,
                    help="batch CSV with header set,x0,x1 (set: real|generated)")
    fg.add_argument("--family", choices=[PLUMMER, GAUSSIAN], default=PLUMMER)
    fg.add_argument("--d", type=float, default=3.0)
    fg.add_argument("--epsilon", type=float, default=1.0)
    fg.add_argument("--xmin", type=float, default=-10.0)
    fg.add_argument("--xmax", type=float, default=10.0)
    fg.add_argument("--ymin", type=float, default=-10.0)
    fg.add_argument("--ymax", type=float, default=10.0)
    fg.add_argument("--steps", type=int, default=50,
                    help="lattice intervals per axis; (steps+1)^2 rows")
    fg.set_defaults(func=cmd_field_grid)

    sim = sub.add_parser("simulate", parents=[common],
                         help="run the particle-flow simulator")
    which = sim.add_mutually_exclusive_group(required=True)
    which.add_argument("--scenario", choices=sorted(SCENARIOS),
                       help="built-in scenario name")
    which.add_argument("--scenario-file",
                       help="JSON with real, generated, kernel{family,d,epsilon}, "
                            "optional step_size")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--steps", type=int, default=5000)
    sim.add_argument("--step-size", type=float, default=None,
                     help="override the scenario's step size")
    sim.add_argument("--snapshot-every", type=int, default=0,
                     help="trajectory rows every N steps; 0 keeps only the "
                          "initial and final states (energy.csv always has "
                          "every step)")
    sim.set_defaults(func=cmd_simulate)

    tr = sub.add_parser("train", parents=[common],
                        help="train the two networks on the 25-Gaussian grid")
    tr.add_argument("--config", required=True, help="TrainConfig JSON")
    tr.add_argument("--eval-samples", type=int, default=2000,
                    help="generator draws per logged mode report (default 2000)")
    tr.add_argument("--sample-every", type=int, default=0,
                    help="dump samples_<step>.csv every N steps (0: final only)")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", parents=[common],
                        help="mode coverage and histogram divergence of a sample set")
    ev.add_argument("--generated", required=True,
                    help="sample CSV, or a generator checkpoint .json to sample from")
    ev.add_argument("--target", default="grid25",
                    help="reference sample CSV, or 'grid25' to draw fresh "
                         "target samples (default)")
    ev.add_argument("--n", type=int, default=10000,
                    help="sample count when drawing from a checkpoint or grid25")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--radius-sigmas", type=float, default=3.0)
    ev.add_argument("--bins", type=int, default=50)
    ev.add_argument("--lo", type=float, default=-25.0)
    ev.add_argument("--hi", type=float, default=25.0)
    ev.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (SimulationDiverged, TrainingDiverged) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ArtifactError, OSError, json.JSONDecodeError, UnicodeDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


# ---------------------------------------------------------------- plumbing

def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return value


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path, payload) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    os.replace(tmp, path)


def _write_manifest(out_dir, subcommand, config, seed, artifacts, started,
                    status="ok") -> None:
    _write_json(os.path.join(out_dir, "manifest.json"), {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "artifacts": artifacts,
        "version": __version__,
        "duration_seconds": round(time.time() - started, 3),
        "status": status,
    })


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _read_batch_csv(path) -> Batch:
    """Batch CSV: header set,x0,x1,...; set is 'real' or 'generated'."""
    real, generated = [], []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or header[0] != "set":
            raise ArtifactError(f"{path}: expected header starting with 'set'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            label, coords = row[0], row[1:]
            try:
                point = [float(v) for v in coords]
            except ValueError:
                raise ArtifactError(f"{path}:{lineno}: non-numeric coordinate") from None
            if label == "real":
                real.append(point)
            elif label == "generated":
                generated.append(point)
            else:
                raise ArtifactError(f"{path}:{lineno}: unknown set label {label!r}")
    if not real or not generated:
        raise ArtifactError(f"{path}: need at least one real and one generated row")
    return Batch(real=np.array(real), generated=np.array(generated))


def _read_samples_csv(path) -> np.ndarray:
    """Sample CSV: header x0,x1,...; one point per row."""
    points = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or not header[0].startswith("x"):
            raise ArtifactError(f"{path}: expected a header row like x0,x1,...")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                points.append([float(v) for v in row])
            except ValueError:
                raise ArtifactError(f"{path}:{lineno}: non-numeric coordinate") from None
    if not points:
        raise ArtifactError(f"{path}: no sample rows")
    return np.array(points)


def _write_samples_csv(path, samples) -> None:
    samples = np.asarray(samples)
    header = [f"x{i}" for i in range(samples.shape[1])]
    _write_csv(path, header, samples)


# ------------------------------------------------------------- subcommands

def cmd_kernel_table(args) -> int:
    started = time.time()
    out = _out_dir(args)
    spec = KernelSpec(family=args.family, d=args.d, epsilon=args.epsilon)
    if args.steps < 1 or args.rmax <= 0 or args.m < 1:
        raise InputError("need steps >= 1, rmax > 0 and m >= 1")
    radii = np.linspace(0.0, args.rmax, args.steps + 1)
    origin = np.zeros(args.m)
    rows = []
    for r in radii:
        a = origin.copy()
        a[0] = r
        row = [r, kernel_value(a, origin, spec),
               float(np.linalg.norm(kernel_grad(a, origin, spec)))]
        if spec.family == PLUMMER:
            row.append(kernel_laplacian(a, origin, spec, args.m))
        rows.append(row)
    header = ["r", "k", "grad_norm"] + (["laplacian"] if spec.family == PLUMMER else [])
    path = os.path.join(out, "kernel_table.csv")
    _write_csv(path, header, rows)
    _write_manifest(out, "kernel-table", {
        "family": args.family, "d": args.d, "epsilon": args.epsilon,
        "m": args.m, "rmax": args.rmax, "steps": args.steps,
        "threads": args.threads,
    }, None, ["kernel_table.csv"], started)
    return EXIT_OK


def cmd_field_grid(args) -> int:
    started = time.time()
    out = _out_dir(args)
    spec = KernelSpec(family=args.family, d=args.d, epsilon=args.epsilon)
    batch = _read_batch_csv(args.batch)
    gx, gy, phi, ex, ey = potential_grid(
        batch, spec, args.xmin, args.xmax, args.ymin, args.ymax, args.steps,
        chunks=args.threads)
    path = os.path.join(out, "field_grid.csv")
    _write_csv(path, ["gx", "gy", "phi", "ex", "ey"], zip(gx, gy, phi, ex, ey))
    _write_manifest(out, "field-grid", {
        "batch": args.batch, "family": args.family, "d": args.d,
        "epsilon": args.epsilon, "xmin": args.xmin, "xmax": args.xmax,
        "ymin": args.ymin, "ymax": args.ymax, "steps": args.steps,
        "threads": args.threads,
    }, None, ["field_grid.csv"], started)
    return EXIT_OK


def _scenario_from_file(path, step_size):
    with open(path) as f:
        raw = json.load(f)
    try:
        spec = KernelSpec(**raw["kernel"])
        real = np.array(raw["real"], dtype=np.float64)
        generated = np.array(raw["generated"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as err:
        raise ArtifactError(f"{path}: bad scenario file: {err}") from None
    if step_size is None:
        step_size = raw.get("step_size")
    return make_state(real, generated, spec, step_size)


def cmd_simulate(args) -> int:
    started = time.time()
    out = _out_dir(args)
    if args.steps < 0 or args.snapshot_every < 0:
        raise InputError("steps and snapshot-every must be >= 0")
    if args.scenario:
        state = scenario_state(args.scenario, args.seed, args.step_size)
    else:
        state = _scenario_from_file(args.scenario_file, args.step_size)

    config = {
        "scenario": args.scenario, "scenario_file": args.scenario_file,
        "seed": args.seed, "steps": args.steps, "step_size": state.step_size,
        "snapshot_every": args.snapshot_every, "threads": args.threads,
    }
    try:
        final, trajectory = run_sim(state, args.steps, args.snapshot_every)
    except SimulationDiverged as err:
        print(f"error: {err}", file=sys.stderr)
        _write_manifest(out, "simulate", config, args.seed, [], started,
                        status="diverged")
        return EXIT_DIVERGED

    m = final.batch.m
    coord_names = [f"x{i}" for i in range(m)]
    traj_rows = []
    for snap in trajectory:
        for index, point in enumerate(snap.generated):
            traj_rows.append([snap.step, index, *point])
    _write_csv(os.path.join(out, "trajectory.csv"),
               ["step", "sample_index", *coord_names], traj_rows)
    _write_csv(os.path.join(out, "energy.csv"), ["step", "energy"],
               enumerate(final.energy_history))
    _write_manifest(out, "simulate", config, args.seed,
                    ["trajectory.csv", "energy.csv"], started)
    return EXIT_OK


def cmd_train(args) -> int:
    started = time.time()
    out = _out_dir(args)
    if args.eval_samples < 1 or args.sample_every < 0:
        raise InputError("need eval-samples >= 1 and sample-every >= 0")
    with open(args.config) as f:
        raw = json.load(f)
    if not isinstance(raw, dict):
        raise ArtifactError(f"{args.config}: config must be a JSON object")
    target = raw.pop("target", "grid25")
    if target != "grid25":
        raise InputError(f"unknown target {target!r}; only 'grid25' is built in")
    config = config_from_dict(raw)

    mixture = grid_mixture_25()
    artifacts = []

    def dump_samples(step: int, state: TrainState) -> None:
        # off-stream draw keyed by (seed, step): dumping never perturbs
        # training or eval randomness
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, step]))
        name = f"samples_{step}.csv"
        _write_samples_csv(os.path.join(out, name),
                           sample_generator(state.generator, args.eval_samples, rng))
        artifacts.append(name)

    def on_metrics(row, state):
        if args.sample_every and row.step % args.sample_every == 0:
            dump_samples(row.step, state)

    manifest_config = {"config": config_to_dict(config) | {"target": target},
                       "eval_samples": args.eval_samples,
                       "sample_every": args.sample_every,
                       "threads": args.threads}

    def persist(state: TrainState) -> None:
        _write_csv(os.path.join(out, "metrics.csv"),
                   ["step", "d_loss", "g_loss", "energy", "modes_covered",
                    "high_quality_fraction"],
                   [(r.step, r.d_loss, r.g_loss, r.energy, r.modes_covered,
                     r.high_quality_fraction) for r in state.metric_log])
        save_checkpoint(state.generator, os.path.join(out, "generator.json"),
                        state.gen_adam)
        save_checkpoint(state.discriminator, os.path.join(out, "discriminator.json"),
                        state.disc_adam)
        artifacts.extend(["metrics.csv", "generator.json", "discriminator.json"])

    try:
        final = train(config, mixture_sampler(mixture), mixture.m,
                      mixture=mixture, eval_samples=args.eval_samples,
                      on_metrics=on_metrics)
    except TrainingDiverged as err:
        print(f"error: {err}; persisting the last good state", file=sys.stderr)
        if err.last_state is not None:
            persist(err.last_state)
        _write_manifest(out, "train", manifest_config, config.seed, artifacts,
                        started, status="diverged")
        return EXIT_DIVERGED

    if not (args.sample_every and final.step % args.sample_every == 0):
        dump_samples(final.step, final)
    persist(final)
    _write_manifest(out, "train", manifest_config, config.seed, artifacts, started)
    return EXIT_OK


def cmd_eval(args) -> int:
    started = time.time()
    out = _out_dir(args)
    if args.n < 1:
        raise InputError("n must be >= 1")
    mixture = grid_mixture_25()
    streams = split_streams(args.seed)

    if args.generated.endswith(".json"):
        net, _ = load_checkpoint(args.generated)
        generated = sample_generator(net, args.n, streams["eval"])
    else:
        generated = _read_samples_csv(args.generated)

    if args.target == "grid25":
        target = sample_mixture(mixture, args.n, streams["data"])
    else:
        target = _read_samples_csv(args.target)

    report = assign_modes(generated, mixture, args.radius_sigmas)
    jsd = hist2d_jsd(generated, target, bins=args.bins, lo=args.lo, hi=args.hi)

    _write_json(os.path.join(out, "mode_report.json"), report_summary(report) | {
        "per_mode_count": report.per_mode_count.tolist(),
        "per_mode_std": [None if np.isnan(s) else s for s in report.per_mode_std],
        "radius_sigmas": args.radius_sigmas,
        "n_samples": int(generated.shape[0]),
    })
    with open(os.path.join(out, "hist_jsd.txt"), "w") as f:
        f.write(f"{jsd!r}\n")
    _write_manifest(out, "eval", {
        "generated": args.generated, "target": args.target, "n": args.n,
        "seed": args.seed, "radius_sigmas": args.radius_sigmas,
        "bins": args.bins, "lo": args.lo, "hi": args.hi,
        "threads": args.threads,
    }, args.seed, ["mode_report.json", "hist_jsd.txt"], started)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
