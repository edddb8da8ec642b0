import numpy as np
import pytest

from tensorsr.degradation import DegradationConfig, degrade
from tensorsr.resample import upsample_nearest, upsample_trilinear
from tensorsr.volume import Volume


class TestNearest:
    def test_block_replication(self):
        v = Volume(np.arange(8, dtype=float).reshape(2, 2, 2))
        up = upsample_nearest(v, 2)
        assert up.dims == (4, 4, 4)
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    assert up.data[i, j, k] == v.data[i // 2, j // 2, k // 2]

    def test_spacing_shrinks(self):
        v = Volume(np.zeros((2, 2, 2)), (0.08, 0.08, 0.08))
        assert upsample_nearest(v, 2).spacing == (0.04, 0.04, 0.04)

    def test_rate_one_is_identity(self):
        v = Volume(np.random.default_rng(0).standard_normal((3, 4, 5)))
        np.testing.assert_array_equal(upsample_nearest(v, 1).data, v.data)

    def test_inverts_block_average_of_constant_blocks(self):
        rng = np.random.default_rng(1)
        coarse = rng.standard_normal((3, 3, 3))
        fine = upsample_nearest(Volume(coarse), 2)
        back = degrade(fine, DegradationConfig(psf=(0, 0, 0), rate=2))
        np.testing.assert_allclose(back.data, coarse, atol=1e-12)


class TestTrilinear:
    def test_constant_preserved(self):
        v = Volume(np.full((4, 4, 4), 2.5))
        np.testing.assert_allclose(upsample_trilinear(v, 2).data, 2.5, rtol=1e-12)

    def test_dims_grow_by_rate(self):
        v = Volume(np.zeros((3, 4, 5)), (0.1, 0.1, 0.1))
        up = upsample_trilinear(v, 2)
        assert up.dims == (6, 8, 10)
        assert up.spacing == (0.05, 0.05, 0.05)

    def test_linear_ramp_interpolates_midpoints(self):
        # ramp along one axis: interior fine samples sit halfway between
        # the neighboring coarse samples
        ramp = np.arange(4, dtype=float)[:, None, None] * np.ones((1, 2, 2))
        up = upsample_trilinear(Volume(ramp), 2)
        np.testing.assert_allclose(up.data[1:-1, 0, 0], np.arange(0.25, 3.0, 0.5), atol=1e-12)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            upsample_trilinear(Volume(np.zeros((2, 2, 2))), 0)
