"""Self-contained phantom experiments sweeping iteration count and rank.

Each sweep degrades a generated phantom once, then runs independent
solves from the same seed and reports PSNR against the known
high-resolution volume together with the solver-internal runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

from .degradation import DegradationConfig, degrade
from .metrics import psnr
from .phantom import PhantomSpec, generate_phantom
from .solver import SolverConfig, super_resolve
from .volume import Volume

DEFAULT_ITERATION_SWEEP = (1, 2, 5, 10, 20)
DEFAULT_RANK_SWEEP = (10, 50, 200, 500)


@dataclass(frozen=True)
class SweepPoint:
    """One solve of the sweep: configuration and measured outcome."""

    iterations: int
    rank: int
    psnr_db: float
    seconds: float


def _solve_point(y: Volume, hr: Volume, rank, iterations, epsilon, sigma, rate, seed) -> SweepPoint:
    cfg = SolverConfig(
        seed=seed, rank=rank, iterations=iterations, epsilon=epsilon, psf=sigma, rate=rate
    )
    recon, _, trace = super_resolve(y, cfg)
    return SweepPoint(iterations, rank, psnr_db=psnr(recon, hr), seconds=sum(trace.seconds))


def reproduce_table(
    dims: int = 64,
    rate: int = 2,
    sigma=(2.0, 2.0, 1.0),
    noise_fraction: float = 0.01,
    rank: int = 50,
    iterations: int = 10,
    iteration_sweep=DEFAULT_ITERATION_SWEEP,
    rank_sweep=DEFAULT_RANK_SWEEP,
    epsilon: float = 0.1,
    seed: int = 1,
    phantom_seed: int = 7,
) -> list[SweepPoint]:
    """Run the iteration sweep at fixed `rank`, then the rank sweep at fixed `iterations`.

    The observation is a phantom degraded at `rate` with blur `sigma` and
    Gaussian noise of `noise_fraction` times the phantom's dynamic range.
    A throwaway small solve warms the linear-algebra backend up so the
    reported timings are comparable across points.
    """
    hr, _ = generate_phantom(PhantomSpec(dims=(dims, dims, dims), seed=phantom_seed))
    noise_sigma = noise_fraction * float(hr.data.max() - hr.data.min())
    y = degrade(hr, DegradationConfig(psf=sigma, rate=rate, noise_sigma=noise_sigma, seed=phantom_seed + 1))

    warmup, _ = generate_phantom(PhantomSpec(dims=(16, 16, 16), seed=0))
    warmup_lr = degrade(warmup, DegradationConfig(psf=sigma, rate=rate))
    _solve_point(warmup_lr, warmup, rank=5, iterations=1, epsilon=epsilon, sigma=sigma, rate=rate, seed=seed)

    points = [
        _solve_point(y, hr, rank, its, epsilon, sigma, rate, seed) for its in iteration_sweep
    ]
    points += [
        _solve_point(y, hr, rk, iterations, epsilon, sigma, rate, seed) for rk in rank_sweep
    ]
    return points


def format_table(points) -> str:
    """Render sweep points as a TSV table with a header row."""
    lines = ["iterations\trank\tpsnr_db\tseconds"]
    lines.extend(
        f"{p.iterations}\t{p.rank}\t{p.psnr_db!r}\t{p.seconds!r}" for p in points
    )
    return "\n".join(lines) + "\n"
