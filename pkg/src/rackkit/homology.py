"""Cellular chain complexes of cubical sets and their integral homology.

The boundary of a ``k``-cell ``c`` is ``sum_i (-1)^i (d_i^0 c - d_i^1 c)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cubical import CubicalSet
from .racks import AbelianGroup
from .snf import SmithForm, SparseIntMatrix, smith_normal_form

__all__ = [
    "BoundaryError",
    "ChainComplex",
    "HomologyClass",
    "HomologyGroup",
    "NotACycleError",
    "TruncationError",
    "chain_complex",
    "cycle_coordinates",
    "homology",
    "homology_range",
]


class BoundaryError(RuntimeError):
    """d o d != 0: the face tables are inconsistent."""


class TruncationError(ValueError):
    """Homology requested in a degree the complex does not determine."""


class NotACycleError(ValueError):
    def __init__(self, boundary: list[int]):
        self.boundary = boundary
        support = {i: v for i, v in enumerate(boundary) if v}
        super().__init__(f"chain is not a cycle; its boundary is {support}")


@dataclass(frozen=True)
class HomologyGroup(AbelianGroup):
    degree: int = 0


def _boundary_matrix(faces: np.ndarray, n_lower: int) -> SparseIntMatrix:
    count, k, _ = faces.shape
    if count == 0 or k == 0:
        return SparseIntMatrix(n_lower, count)
    cols = np.repeat(np.arange(count, dtype=np.int64), 2 * k)
    signs = np.array([(-1) ** i * s for i in range(1, k + 1) for s in (1, -1)], dtype=np.int64)
    rows = faces.reshape(count, 2 * k).reshape(-1)
    vals = np.tile(signs, count)
    key = rows * count + cols
    order = np.argsort(key, kind="stable")
    key, vals = key[order], vals[order]
    uniq, start = np.unique(key, return_index=True)
    sums = np.add.reduceat(vals, start)
    keep = sums != 0
    data: dict[int, dict[int, int]] = {}
    for kk, v in zip(uniq[keep].tolist(), sums[keep].tolist()):
        r, c = divmod(kk, count)
        data.setdefault(r, {})[c] = v
    return SparseIntMatrix(n_lower, count, data)


class ChainComplex:
    """``boundary[k]`` maps ``k``-chains to ``(k-1)``-chains for ``1 <= k <= d``.

    Bases follow the cell order of the cubical set.  Smith forms are cached
    per degree since homology in neighbouring degrees shares them.
    """

    def __init__(self, dims: Sequence[int], boundary: Sequence[SparseIntMatrix]):
        self.dims = list(dims)
        self.boundary = [SparseIntMatrix(0, self.dims[0])] + list(boundary) if dims else []
        self._snf: dict[tuple[int, bool], SmithForm] = {}

    @property
    def max_dim(self) -> int:
        return len(self.dims) - 1

    def smith(self, k: int, transforms: bool = False) -> SmithForm:
        key = (k, transforms)
        if key not in self._snf:
            if not transforms and (k, True) in self._snf:
                return self._snf[(k, True)]
            self._snf[key] = smith_normal_form(self.boundary[k], transforms)
        return self._snf[key]

    def rank(self, k: int) -> int:
        if k <= 0 or k > self.max_dim:
            return 0
        return self.smith(k).rank


def chain_complex(cs: CubicalSet, check: bool = True) -> ChainComplex:
    bounds = [_boundary_matrix(cs.faces[k], cs.counts[k - 1]) for k in range(1, cs.max_dim + 1)]
    cc = ChainComplex(cs.counts, bounds)
    if check:
        for k in range(2, cs.max_dim + 1):
            prod = cc.boundary[k - 1] @ cc.boundary[k]
            if not prod.is_zero():
                r, c, v = next(prod.triplets())
                raise BoundaryError(f"d{k - 1} o d{k} != 0: entry ({r},{c}) = {v}")
    return cc


def homology(cc: ChainComplex, k: int) -> HomologyGroup:
    """``H_k`` of the complex; the complex must reach dimension ``k+1``."""
    if k < 0:
        raise TruncationError("degree must be non-negative")
    if k + 1 > cc.max_dim:
        raise TruncationError(
            f"H_{k} needs cells up to dimension {k + 1}; complex stops at {cc.max_dim}")
    rank = cc.dims[k] - cc.rank(k) - cc.rank(k + 1)
    return HomologyGroup(rank, tuple(cc.smith(k + 1).torsion), degree=k)


def homology_range(cc: ChainComplex, degrees: Sequence[int], workers: int = 1) -> list[HomologyGroup]:
    """Homology in several degrees; Smith forms of distinct matrices may run in a thread pool."""
    for k in degrees:
        if k < 0 or k + 1 > cc.max_dim:
            raise TruncationError(f"H_{k} needs cells up to dimension {k + 1}")
    needed = sorted({j for k in degrees for j in (k, k + 1) if 1 <= j <= cc.max_dim})
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = dict(zip(needed, pool.map(lambda j: smith_normal_form(cc.boundary[j]), needed)))
        for j, s in results.items():
            cc._snf.setdefault((j, False), s)
    return [homology(cc, k) for k in degrees]


@dataclass(frozen=True)
class HomologyClass:
    """Coordinates of a class in ``Z^rank + Z/d1 + ...``.

    ``free`` has one integer per free summand; ``torsion[i]`` lies in
    ``0..d_i-1``.  The basis is the one produced by the Smith forms of the
    neighbouring boundary maps, so coordinates are comparable only for
    classes computed from the same complex.
    """

    group: HomologyGroup
    free: tuple[int, ...]
    torsion: tuple[int, ...]

    @property
    def coordinates(self) -> tuple[int, ...]:
        return self.free + self.torsion

    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def __str__(self) -> str:
        return f"{self.group} [{', '.join(str(c) for c in self.coordinates)}]"


class _CycleBasis:
    """Kernel coordinates for d_k and the Smith form of d_{k+1} in them."""

    def __init__(self, cc: ChainComplex, k: int):
        n = cc.dims[k]
        if k >= 1:
            sa = smith_normal_form(cc.boundary[k], left=False, right=False, right_inverse=True)
            ra, vinv = sa.rank, sa.right_inverse
        else:
            ra, vinv = 0, SparseIntMatrix.identity(n)
        self.kernel_rows = [vinv.row(i) for i in range(ra, n)]
        b = cc.boundary[k + 1]
        # image of d_{k+1} in kernel coordinates: rows of V^-1 beyond the rank, times B
        data = {}
        for i, vrow in enumerate(self.kernel_rows):
            acc: dict[int, int] = {}
            for j, v in vrow.items():
                for col, w in b.row(j).items():
                    acc[col] = acc.get(col, 0) + v * w
            data[i] = acc
        reduced = SparseIntMatrix(len(self.kernel_rows), b.cols, data)
        sb = smith_normal_form(reduced, left=True, right=False, right_inverse=False)
        self.factors = sb.factors
        self.left = sb.left
        self.q = len(self.kernel_rows)
        self.group = HomologyGroup(self.q - sb.rank, tuple(sb.torsion), degree=k)


def cycle_coordinates(cc: ChainComplex, k: int, z: Sequence[int]) -> HomologyClass:
    """Coordinates of the class of the ``k``-cycle ``z`` (a dense coefficient list)."""
    if k + 1 > cc.max_dim:
        raise TruncationError(f"H_{k} needs cells up to dimension {k + 1}")
    z = [int(v) for v in z]
    if len(z) != cc.dims[k]:
        raise ValueError(f"chain has {len(z)} coefficients, C_{k} has rank {cc.dims[k]}")
    if k >= 1:
        dz = cc.boundary[k].apply(z)
        if any(dz):
            raise NotACycleError(dz)
    cache = cc.__dict__.setdefault("_cycle_bases", {})
    if k not in cache:
        cache[k] = _CycleBasis(cc, k)
    basis: _CycleBasis = cache[k]
    w = [sum(v * z[j] for j, v in row.items()) for row in basis.kernel_rows]
    y = basis.left.apply(w) if basis.q else []
    free, tors = [], []
    for i, yi in enumerate(y):
        if i < len(basis.factors):
            d = basis.factors[i]
            if d > 1:
                tors.append(yi % d)
        else:
            free.append(yi)
    return HomologyClass(basis.group, tuple(free), tuple(tors))
