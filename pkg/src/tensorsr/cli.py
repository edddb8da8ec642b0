"""Command-line front-end for the phantom/degrade/superres/evaluate pipeline.

Data goes to files (and, for ``estimate-psf``, the fitted sigmas to
stdout); diagnostics go to stderr. Every subcommand is a thin wrapper
around the library call with the same parameters.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .degradation import DegradationConfig, degrade
from .experiments import (
    DEFAULT_ITERATION_SWEEP,
    DEFAULT_RANK_SWEEP,
    format_table,
    reproduce_table,
)
from .metrics import compare
from .phantom import PhantomSpec, generate_phantom
from .psf import DEFAULT_FLOOR, estimate_psf
from .solver import SolverConfig, super_resolve
from .volume import Volume, VolumeIOError, read_volume, write_volume

_EXAMPLES = """examples:
  tensorsr phantom --dims 64 --seed 7 --out p
  tensorsr degrade --in p --r 2 --sigma 2,2,1 --noise 0.01 --out lr
  tensorsr superres --in lr --r 2 --rank 50 --iters 10 --eps 0.1 --sigma 2,2,1 --seed 1 --out sr
  tensorsr evaluate --recon sr --ref p --seg otsu --out report
  tensorsr estimate-psf --hr a,b --lr x,y --out psf
  tensorsr reproduce --out sweeps.tsv
"""


def _triple(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",") if p.strip()]
    if len(parts) == 1:
        return (parts[0],) * 3
    if len(parts) == 3:
        return tuple(parts)
    raise argparse.ArgumentTypeError(f"expected one or three comma-separated numbers, got {text!r}")


def _int_triple(text: str) -> tuple[int, int, int]:
    parts = [int(p) for p in text.split(",") if p.strip()]
    if len(parts) == 1:
        return (parts[0],) * 3
    if len(parts) == 3:
        return tuple(parts)
    raise argparse.ArgumentTypeError(f"expected one or three comma-separated integers, got {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _path_list(text: str) -> list[str]:
    return [p for p in text.split(",") if p.strip()]


def cmd_phantom(args) -> int:
    spec = PhantomSpec(
        dims=args.dims,
        spacing=args.spacing,
        background=args.background,
        canal=args.canal,
        dentin=args.dentin,
        canal_radius_base_mm=args.canal_base_diameter / 2.0,
        canal_radius_tip_mm=args.canal_tip_diameter / 2.0,
        curvature_mm=args.curvature,
        noise_amplitude=args.noise,
        seed=args.seed,
    )
    volume, mask = generate_phantom(spec)
    write_volume(volume, args.out)
    write_volume(Volume(mask.data.astype(np.float64), mask.spacing), args.out + "_mask")
    return 0


def cmd_degrade(args) -> int:
    volume = read_volume(args.input)
    cfg = DegradationConfig(psf=args.sigma, rate=args.r, noise_sigma=args.noise, seed=args.seed)
    write_volume(degrade(volume, cfg), args.out)
    return 0


def cmd_superres(args) -> int:
    volume = read_volume(args.input)
    cfg = SolverConfig(
        seed=args.seed,
        rank=args.rank,
        iterations=args.iters,
        epsilon=args.eps,
        psf=args.sigma,
        rate=args.r,
        tol=args.tol,
    )
    recon, _, trace = super_resolve(volume, cfg)
    if args.nonneg:
        recon = recon.with_data(np.maximum(recon.data, 0.0))
    write_volume(recon, args.out)
    trace_path = args.out + "_trace.tsv"
    with open(trace_path, "w", encoding="utf-8") as fh:
        fh.write("iteration\tobjective\tseconds\n")
        for index, (objective, seconds) in enumerate(zip(trace.objective, trace.seconds), start=1):
            fh.write(f"{index}\t{objective!r}\t{seconds!r}\n")
    if args.verbose:
        print(f"completed {len(trace)} sweeps, trace in {trace_path}", file=sys.stderr)
    return 0


def cmd_estimate_psf(args) -> int:
    if len(args.hr) != len(args.lr):
        raise ValueError(f"got {len(args.hr)} HR paths and {len(args.lr)} LR paths")
    hr_volumes = [read_volume(p) for p in args.hr]
    lr_volumes = [read_volume(p) for p in args.lr]
    psf, averaged = estimate_psf(lr_volumes, hr_volumes, floor=args.floor, refine=args.refine)
    write_volume(averaged, args.out)
    print("sigma\t" + " ".join(repr(s) for s in psf.sigma))
    return 0


def cmd_evaluate(args) -> int:
    recon = read_volume(args.recon)
    ref = read_volume(args.ref)
    report = compare(recon, ref, mode=args.seg, threshold=args.threshold)
    with open(args.out + ".tsv", "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    return 0


def cmd_reproduce(args) -> int:
    points = reproduce_table(
        dims=args.dims,
        rate=args.r,
        sigma=args.sigma,
        noise_fraction=args.noise_frac,
        rank=args.rank,
        iterations=args.iters,
        iteration_sweep=args.iter_sweep,
        rank_sweep=args.rank_sweep,
        epsilon=args.eps,
        seed=args.seed,
        phantom_seed=args.phantom_seed,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_table(points))
    if args.verbose:
        print(f"wrote {len(points)} sweep points to {args.out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorsr",
        description="3D single-volume super-resolution via low-rank tensor factorization.",
        epilog=_EXAMPLES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a synthetic volume and its canal mask")
    p.add_argument("--dims", type=_int_triple, default=(64, 64, 64), help="volume dimensions (N or I,J,K)")
    p.add_argument("--spacing", type=_triple, default=(0.04, 0.04, 0.04), help="voxel spacing in mm")
    p.add_argument("--background", type=float, default=0.9)
    p.add_argument("--canal", type=float, default=0.3)
    p.add_argument("--dentin", type=float, default=1.0)
    p.add_argument("--canal-base-diameter", type=float, default=0.8, help="mm")
    p.add_argument("--canal-tip-diameter", type=float, default=0.16, help="mm")
    p.add_argument("--curvature", type=float, default=0.2, help="centerline bow in mm")
    p.add_argument("--noise", type=float, default=0.02, help="uniform texture amplitude")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output base path (writes <out>.hdr/.raw and <out>_mask.*)")
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("degrade", help="apply the blur/decimate/noise forward model")
    p.add_argument("--in", dest="input", required=True, help="input volume base path")
    p.add_argument("--r", type=int, default=2, help="decimation rate")
    p.add_argument("--sigma", type=_triple, default=(5.8, 5.3, 0.9), help="blur sigmas in input-voxel units")
    p.add_argument("--noise", type=float, default=0.0, help="additive noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("superres", help="reconstruct a high-resolution volume")
    p.add_argument("--in", dest="input", required=True, help="low-resolution volume base path")
    p.add_argument("--r", type=int, default=2, help="upsampling rate")
    p.add_argument("--rank", type=int, default=500)
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--eps", type=float, default=1.0, help="diagonal loading of the pseudo-inverses")
    p.add_argument("--sigma", type=_triple, default=(5.8, 5.3, 0.9), help="blur sigmas in output-voxel units")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="relative objective change for early stop")
    p.add_argument("--nonneg", action="store_true", help="clamp negative voxels to zero")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out", required=True, help="writes <out>.hdr/.raw and <out>_trace.tsv")
    p.set_defaults(func=cmd_superres)

    p = sub.add_parser("estimate-psf", help="fit blur sigmas from HR/LR volume pairs")
    p.add_argument("--hr", type=_path_list, required=True, help="comma-separated HR volume paths")
    p.add_argument("--lr", type=_path_list, required=True, help="comma-separated LR volume paths")
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR, help="denominator floor, fraction of peak")
    p.add_argument("--refine", action="store_true", help="nonlinear refinement of the moment fit")
    p.add_argument("--out", required=True, help="averaged kernel volume base path")
    p.set_defaults(func=cmd_estimate_psf)

    p = sub.add_parser("evaluate", help="compare a reconstruction against a reference")
    p.add_argument("--recon", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--seg", choices=("otsu", "fixed"), default="otsu")
    p.add_argument("--threshold", type=float, default=None, help="threshold for --seg fixed")
    p.add_argument("--out", required=True, help="writes <out>.tsv and <out>.json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reproduce", help="phantom sweeps over iteration count and rank")
    p.add_argument("--dims", type=int, default=64)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--sigma", type=_triple, default=(2.0, 2.0, 1.0))
    p.add_argument("--noise-frac", type=float, default=0.01, help="noise sigma as a fraction of dynamic range")
    p.add_argument("--rank", type=int, default=50, help="rank used for the iteration sweep")
    p.add_argument("--iters", type=int, default=10, help="iterations used for the rank sweep")
    p.add_argument("--iter-sweep", type=_int_list, default=DEFAULT_ITERATION_SWEEP)
    p.add_argument("--rank-sweep", type=_int_list, default=DEFAULT_RANK_SWEEP)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--phantom-seed", type=int, default=7)
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out", required=True, help="TSV table path")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, VolumeIOError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
