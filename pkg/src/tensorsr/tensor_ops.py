"""Canonical polyadic decomposition and the tensor algebra built on it.

Conventions
-----------
A rank-F factor set ``{U1 (I,F), U2 (J,F), U3 (K,F)}`` represents the
volume ``X(i,j,k) = sum_f U1[i,f] * U2[j,f] * U3[k,f]``.

The mode-n unfolding places the mode-n fibers as columns, ordered with the
lower remaining axis index varying fastest:

* mode 1: shape (I, J*K), column ``j + J*k`` is ``X[:, j, k]``
* mode 2: shape (J, I*K), column ``i + I*k`` is ``X[i, :, k]``
* mode 3: shape (K, I*J), column ``i + I*j`` is ``X[i, j, :]``

With ``kr = khatri_rao`` this ordering satisfies the factor identities
``X^(1) = U1 @ kr(U3, U2).T``, ``X^(2) = U2 @ kr(U3, U1).T`` and
``X^(3) = U3 @ kr(U2, U1).T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_matrix
from .volume import Volume

# for each mode, the other two modes ordered (higher, lower)
OTHER_AXES = {1: (3, 2), 2: (3, 1), 3: (2, 1)}


@dataclass(frozen=True, eq=False)
class FactorSet:
    """Three factor matrices sharing a column count (the tensor rank)."""

    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray

    def __post_init__(self):
        mats = []
        for name in ("u1", "u2", "u3"):
            m = as_matrix(getattr(self, name), name)
            m = m.copy()
            m.flags.writeable = False
            mats.append(m)
            object.__setattr__(self, name, m)
        ranks = {m.shape[1] for m in mats}
        if len(ranks) != 1:
            raise ValueError(f"factor matrices disagree on rank: {[m.shape for m in mats]}")
        if mats[0].shape[1] < 1:
            raise ValueError("rank must be at least 1")

    @property
    def rank(self) -> int:
        return self.u1.shape[1]

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.u1.shape[0], self.u2.shape[0], self.u3.shape[0])

    def factor(self, axis: int) -> np.ndarray:
        return (self.u1, self.u2, self.u3)[_check_axis(axis) - 1]

    def with_factor(self, axis: int, matrix) -> "FactorSet":
        parts = [self.u1, self.u2, self.u3]
        parts[_check_axis(axis) - 1] = matrix
        return FactorSet(*parts)


def _check_axis(axis: int) -> int:
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    return axis


def khatri_rao(a, b) -> np.ndarray:
    """Column-wise Kronecker product.

    For ``a`` of shape (m, F) and ``b`` of shape (n, F) the result has
    shape (m*n, F) with ``out[i*n + j, f] = a[i, f] * b[j, f]``.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column counts disagree: {a.shape[1]} vs {b.shape[1]}")
    m, f = a.shape
    n, _ = b.shape
    return (a[:, None, :] * b[None, :, :]).reshape(m * n, f)


def mode_n_product(x: Volume, p, axis: int) -> Volume:
    """Multiply every mode-`axis` fiber of `x` by the matrix `p`.

    The size of `x` along `axis` must equal ``p.shape[1]``; it becomes
    ``p.shape[0]`` in the result. Spacing is carried over unchanged; any
    resampling semantics belong to the caller.
    """
    axis = _check_axis(axis)
    p = as_matrix(p, "p")
    size = x.dims[axis - 1]
    if p.shape[1] != size:
        raise ValueError(f"matrix has {p.shape[1]} columns, axis {axis} has size {size}")
    out = np.tensordot(p, x.data, axes=([1], [axis - 1]))
    return Volume(np.moveaxis(out, 0, axis - 1), x.spacing)


def matricize(x: Volume, axis: int) -> np.ndarray:
    """Mode-`axis` unfolding of `x` (see module docstring for the layout)."""
    axis = _check_axis(axis)
    data = x.data
    return np.moveaxis(data, axis - 1, 0).reshape(data.shape[axis - 1], -1, order="F")


def fold(matrix, axis: int, dims, spacing=(1.0, 1.0, 1.0)) -> Volume:
    """Inverse of :func:`matricize` for a volume of dimensions `dims`."""
    axis = _check_axis(axis)
    i, j, k = dims
    m = np.asarray(matrix, dtype=np.float64)
    expected = {1: (i, j * k), 2: (j, i * k), 3: (k, i * j)}[axis]
    if m.shape != expected:
        raise ValueError(f"mode-{axis} unfolding of {tuple(dims)} must have shape {expected}, got {m.shape}")
    if axis == 1:
        data = m.reshape(i, j, k, order="F")
    elif axis == 2:
        data = np.moveaxis(m.reshape(j, i, k, order="F"), 0, 1)
    else:
        data = np.moveaxis(m.reshape(k, i, j, order="F"), 0, 2)
    return Volume(data, spacing)


def build_from_factors(factors: FactorSet, spacing=(1.0, 1.0, 1.0)) -> Volume:
    """Evaluate the rank-F sum of outer products as a dense volume."""
    first = factors.u1 @ khatri_rao(factors.u3, factors.u2).T
    return fold(first, 1, factors.dims, spacing)


def factor_matricization(factors: FactorSet, axis: int) -> np.ndarray:
    """Mode-`axis` unfolding computed directly from the factors."""
    axis = _check_axis(axis)
    hi, lo = OTHER_AXES[axis]
    return factors.factor(axis) @ khatri_rao(factors.factor(hi), factors.factor(lo)).T


def identifiability_bound(i: int, j: int, k: int) -> int:
    """Rank ceiling under which a generic decomposition is essentially unique.

    Computed on the dimensions sorted in decreasing order d1 >= d2 >= d3 as
    ``2 ** (floor(log2 d2) + floor(log2 d3) - 2)``; the result is therefore
    invariant to the argument order.
    """
    dims = sorted((int(i), int(j), int(k)), reverse=True)
    if dims[-1] < 2:
        raise ValueError(f"all dimensions must be at least 2, got {(i, j, k)}")
    # floor(log2 d) == d.bit_length() - 1; exponent >= 0 since every d >= 2
    exponent = (dims[1].bit_length() - 1) + (dims[2].bit_length() - 1) - 2
    return 2**exponent
