"""Command-line interface.

Subcommands mirror the experiment harness: ``sweep-k``, ``sweep-sigma``
and ``cs-sweep`` emit the rate-plot CSVs; ``denoise`` runs a single
observation against a stored weight manifest; ``autoencoder-check``,
``wdc-check``, ``landscape`` and ``rho-table`` emit the analysis CSVs.

Exit codes: 0 on success, 1 on configuration errors (bad flags or
unusable input files), 2 on runtime failures.  ``GENPRIOR_THREADS``
overrides ``--threads`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .autoencoder import attenuation_trial, random_autoencoder
from .denoiser import DenoiseProblem, DescentConfig, DivergenceError, run
from .experiments import (
    SweepConfig,
    h_slice_rows,
    load_observation,
    loss_surface_rows,
    run_sweep,
    write_sweep_csv,
)
from .landscape import rho, wdc_deviation
from .manifest import ManifestError, load_manifest
from .network import random_network
from .rng import Rng, derive, gaussian_matrix

NEGATION_FLAGS = {
    "every": "every_iteration",
    "onconv": "on_convergence",
    "off": "disabled",
}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _int_list(text):
    return tuple(int(t) for t in text.split(",") if t.strip())


def _float_list(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _add_common(parser, out_required=True):
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--out", required=out_required, help="output CSV path")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")


def _add_descent_flags(parser):
    parser.add_argument("--alpha", type=float, default=0.1, help="step size")
    parser.add_argument("--max-iters", type=int, default=10000)
    parser.add_argument("--tol", type=float, default=1e-9, help="relative step tolerance")
    parser.add_argument("--negation", choices=sorted(NEGATION_FLAGS), default="every")


def _threads(args) -> int:
    env = os.environ.get("GENPRIOR_THREADS")
    if env is not None:
        return max(1, int(env))
    return max(1, args.threads)


def _descent_config(args) -> DescentConfig:
    return DescentConfig(
        alpha=args.alpha,
        max_iters=args.max_iters,
        rel_step_tol=args.tol,
        negation_mode=NEGATION_FLAGS[args.negation],
    )


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _cmd_sweep_k(args) -> int:
    config = SweepConfig(
        mode="sweep_k", values=args.values, widths=args.widths, sigma2=args.sigma2,
        trials=args.trials, base_seed=args.seed, descent=_descent_config(args),
    )
    write_sweep_csv(config, run_sweep(config, threads=_threads(args)), args.out)
    return 0


def _cmd_sweep_sigma(args) -> int:
    config = SweepConfig(
        mode="sweep_sigma", values=args.values, widths=args.widths, k=args.k,
        trials=args.trials, base_seed=args.seed, descent=_descent_config(args),
    )
    write_sweep_csv(config, run_sweep(config, threads=_threads(args)), args.out)
    return 0


def _cmd_cs_sweep(args) -> int:
    config = SweepConfig(
        mode="cs_sweep", values=args.values, widths=args.widths, k=args.k, m=args.m,
        trials=args.trials, base_seed=args.seed, descent=_descent_config(args),
    )
    write_sweep_csv(config, run_sweep(config, threads=_threads(args)), args.out)
    return 0


def _cmd_denoise(args) -> int:
    network = load_manifest(args.manifest)
    y = load_observation(args.observation)
    problem = DenoiseProblem(network=network, y=y)
    trace = run(problem, _descent_config(args), Rng(args.seed))
    negated = set(trace.negation_events)
    rows = [
        (i, float(trace.losses[i]), float(trace.step_norms[i]), int(i in negated))
        for i in range(trace.n_iters)
    ]
    _write_csv(args.out, "iter,loss,step_norm,negated", rows)
    if args.x_hat_out:
        from .experiments import save_observation

        save_observation(args.x_hat_out, trace.x_hat)
    return 0


def _cmd_autoencoder_check(args) -> int:
    widths = (args.k,) + args.widths
    autoencoder = random_autoencoder(Rng(args.seed).child(0), widths)
    rows = []
    for trial in range(args.trials):
        record = attenuation_trial(autoencoder, derive(args.seed, trial + 1), args.sigma2)
        rows.append((trial, record.ratio, record.bound, record.local_spec_norm))
    _write_csv(args.out, "trial,ratio,bound,local_spec_norm", rows)
    return 0


def _cmd_wdc_check(args) -> int:
    rows = []
    for n in args.sizes:
        deviations = []
        for seed_idx in range(args.seeds):
            stream = derive(args.seed, n * 1000 + seed_idx)
            W = gaussian_matrix(stream.child(0), n, args.k, 1.0 / n)
            dev = wdc_deviation(W, stream.child(1), args.pairs)
            deviations.append(dev)
            rows.append((n, seed_idx, dev))
        rows.append((n, -1, float(np.median(deviations))))
    _write_csv(args.out, "n,seed,deviation", rows)
    return 0


def _cmd_landscape(args) -> int:
    if not args.h_slice_out and not args.surface_out:
        raise ValueError("give --h-slice-out and/or --surface-out")
    if args.h_slice_out:
        rows = h_slice_rows(args.depth, num_angles=args.angles)
        _write_csv(args.h_slice_out, "theta0,radius,h_norm", rows)
    if args.surface_out:
        widths = (2,) + args.widths
        network = random_network(Rng(args.seed).child(0), widths, "two_over_fanout")
        rows = loss_surface_rows(
            network, np.array([1.0, 0.0]), extent=args.extent, grid=args.grid
        )
        _write_csv(args.surface_out, "x1,x2,f", rows)
    return 0


def _cmd_rho_table(args) -> int:
    rows = []
    for d in range(1, args.max_depth + 1):
        r = rho(d)
        rows.append((d, r, 1.0 - r))
    _write_csv(args.out, "d,rho,one_minus_rho", rows)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="genprior", description=__doc__)
    parser.add_argument("--version", action="version", version=f"genprior {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-k", parents=[], help="vary k at fixed noise")
    p.add_argument("--values", type=_int_list, default=(10, 25, 50, 75, 100))
    p.add_argument("--sigma2", type=float, default=0.25)
    p.add_argument("--widths", type=_int_list, default=(500, 1500))
    p.add_argument("--trials", type=int, default=20)
    _add_descent_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_k)

    p = sub.add_parser("sweep-sigma", help="vary noise at fixed k")
    p.add_argument("--values", type=_float_list, default=(0.0, 0.05, 0.1, 0.15, 0.2, 0.25))
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--widths", type=_int_list, default=(500, 1500))
    p.add_argument("--trials", type=int, default=20)
    _add_descent_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_sigma)

    p = sub.add_parser("cs-sweep", help="compressed sensing noise sweep")
    p.add_argument("--values", type=_float_list, default=(0.0, 0.05, 0.1, 0.15, 0.2, 0.25))
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--m", type=int, default=750)
    p.add_argument("--widths", type=_int_list, default=(500, 1500))
    p.add_argument("--trials", type=int, default=20)
    _add_descent_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_cs_sweep)

    p = sub.add_parser("denoise", help="denoise one observation file")
    p.add_argument("--manifest", required=True, help="weight manifest directory")
    p.add_argument("--observation", required=True, help="raw float64 vector file")
    p.add_argument("--x-hat-out", default=None, help="optional recovered-code output")
    _add_descent_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("autoencoder-check", help="noise attenuation trials")
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--widths", type=_int_list, default=(400, 784))
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--sigma2", type=float, default=0.25)
    _add_common(p)
    p.set_defaults(func=_cmd_autoencoder_check)

    p = sub.add_parser("wdc-check", help="masked-Gram deviation across widths")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--sizes", type=_int_list, default=(1024, 2048, 4096, 8192))
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--seeds", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=_cmd_wdc_check)

    p = sub.add_parser("landscape", help="h-field slices and loss surface CSVs")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--angles", type=int, default=181)
    p.add_argument("--widths", type=_int_list, default=(300, 784))
    p.add_argument("--extent", type=float, default=2.0)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--h-slice-out", default=None)
    p.add_argument("--surface-out", default=None)
    _add_common(p, out_required=False)
    p.set_defaults(func=_cmd_landscape)

    p = sub.add_parser("rho-table", help="spurious-point coefficients by depth")
    p.add_argument("--max-depth", type=int, default=64)
    _add_common(p)
    p.set_defaults(func=_cmd_rho_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, ManifestError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"genprior: configuration error: {exc}\n")
        return 1
    except DivergenceError as exc:
        sys.stderr.write(f"genprior: run failed: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"genprior: internal error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
