import numpy as np
import pytest

from tensorsr.experiments import SweepPoint, format_table, reproduce_table


@pytest.fixture(scope="module")
def sweep():
    return reproduce_table(
        dims=32,
        rate=2,
        sigma=(1.5, 1.5, 0.8),
        noise_fraction=0.01,
        rank=10,
        iterations=8,
        iteration_sweep=(1, 2, 5, 10),
        rank_sweep=(5, 20, 80),
        epsilon=0.1,
        seed=1,
        phantom_seed=3,
    )


class TestReproduceTable:
    def test_row_layout(self, sweep):
        assert [(p.iterations, p.rank) for p in sweep[:4]] == [(1, 10), (2, 10), (5, 10), (10, 10)]
        assert [(p.iterations, p.rank) for p in sweep[4:]] == [(8, 5), (8, 20), (8, 80)]

    def test_values_are_finite(self, sweep):
        assert all(np.isfinite(p.psnr_db) for p in sweep)
        assert all(p.seconds >= 0 for p in sweep)

    def test_psnr_non_decreasing_over_iterations_within_jitter(self, sweep):
        psnrs = [p.psnr_db for p in sweep[:4]]
        for earlier, later in zip(psnrs, psnrs[1:]):
            assert later >= earlier - 0.2

    def test_quality_is_deterministic(self, sweep):
        again = reproduce_table(
            dims=32,
            rate=2,
            sigma=(1.5, 1.5, 0.8),
            noise_fraction=0.01,
            rank=10,
            iterations=8,
            iteration_sweep=(1, 2, 5, 10),
            rank_sweep=(5, 20, 80),
            epsilon=0.1,
            seed=1,
            phantom_seed=3,
        )
        assert [p.psnr_db for p in again] == [p.psnr_db for p in sweep]


class TestFormatTable:
    def test_header_and_rows(self):
        points = [SweepPoint(iterations=3, rank=7, psnr_db=21.5, seconds=0.25)]
        text = format_table(points)
        lines = text.splitlines()
        assert lines[0] == "iterations\trank\tpsnr_db\tseconds"
        assert lines[1] == "3\t7\t21.5\t0.25"
        assert text.endswith("\n")
