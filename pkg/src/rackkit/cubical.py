"""Truncated cubical sets: rack spaces, extended rack spaces, James complexes.

A :class:`CubicalSet` stores, for every dimension ``k``, an integer array
``faces[k]`` of shape ``(count_k, k, 2)`` with ``faces[k][c, i-1, eps]`` the
index of the ``(k-1)``-cell obtained from cell ``c`` by the face map in
direction ``i`` at end ``eps``.  Only codimension-one faces are stored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import numpy as np

from .racks import Rack

__all__ = [
    "CubicalSet",
    "FaceViolation",
    "JamesComplex",
    "Projection",
    "build_extended_rack_space",
    "build_rack_space",
    "dump_cubical",
    "james_complex",
    "james_level",
    "load_cubical",
    "trivial_cubical_set",
    "validate_cubical",
]


@dataclass(frozen=True)
class FaceViolation:
    """Witness that the cubical identity fails for ``cell`` in dimension ``dim``."""

    dim: int
    cell: int
    i: int
    j: int
    eps: int
    omega: int


class CubicalSet:
    def __init__(self, faces: Sequence[np.ndarray], counts: Sequence[int] | None = None,
                 decode: Callable[[int, int], object] | None = None):
        self.faces = [np.asarray(f, dtype=np.int64) for f in faces]
        if counts is None:
            counts = [len(f) for f in self.faces]
        self.counts = list(counts)
        if len(self.counts) != len(self.faces):
            raise ValueError("need one face table per dimension")
        for k, f in enumerate(self.faces):
            if f.shape != (self.counts[k], k, 2):
                raise ValueError(f"face table of dimension {k} has shape {f.shape}")
            if k and f.size and (f.min() < 0 or f.max() >= self.counts[k - 1]):
                raise ValueError(f"face table of dimension {k} points outside dimension {k - 1}")
        self._decode = decode

    @property
    def max_dim(self) -> int:
        return len(self.counts) - 1

    def face(self, k: int, cell: int, i: int, eps: int) -> int:
        """Index of the face of ``cell`` (a ``k``-cell) in direction ``i`` (1-based)."""
        if not 1 <= i <= k:
            raise IndexError(f"direction {i} out of range for a {k}-cell")
        return int(self.faces[k][cell, i - 1, eps])

    def cell(self, k: int, index: int):
        """Human-readable name of a cell, when the builder provided one."""
        if self._decode is None:
            return index
        return self._decode(k, index)

    def __repr__(self) -> str:
        return f"CubicalSet(counts={self.counts})"


def trivial_cubical_set(max_dim: int) -> CubicalSet:
    """The cubical set with exactly one cell in each dimension."""
    return CubicalSet([np.zeros((1, k, 2), dtype=np.int64) for k in range(max_dim + 1)])


def _digits(n: int, k: int) -> np.ndarray:
    """All k-tuples over range(n) in lexicographic order, shape (n**k, k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((n,) * k).reshape(k, -1).T
    return grids.astype(np.int64)


def _encode(digits: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(len(digits), dtype=np.int64)
    for col in range(digits.shape[1]):
        out = out * n + digits[:, col]
    return out


def _rack_faces(table: np.ndarray, tuples: np.ndarray, shift: int) -> np.ndarray:
    """Faces of cells given as coordinate tuples; ``shift`` leading coordinates
    are carried along (acted on but never deleted)."""
    n = len(table)
    count, width = tuples.shape
    k = width - shift
    out = np.empty((count, k, 2), dtype=np.int64)
    for i in range(1, k + 1):
        pos = shift + i - 1
        keep = np.delete(tuples, pos, axis=1)
        out[:, i - 1, 0] = _encode(keep, n)
        acted = tuples.copy()
        acted[:, :pos] = table[tuples[:, :pos], tuples[:, [pos]]]
        out[:, i - 1, 1] = _encode(np.delete(acted, pos, axis=1), n)
    return out


def build_rack_space(rack: Rack, max_dim: int) -> CubicalSet:
    """The rack space: ``k``-cells are ``X^k`` in lexicographic order.

    The face in direction ``i`` at end 0 deletes coordinate ``i``; at end 1
    it also acts on every earlier coordinate by ``x_i``.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be non-negative")
    table = np.array(rack.table, dtype=np.int64).reshape(rack.size, rack.size)
    n = rack.size
    faces = [_rack_faces(table, _digits(n, k), 0) for k in range(max_dim + 1)]

    def decode(k: int, idx: int) -> tuple[int, ...]:
        return tuple(int(d) for d in np.unravel_index(idx, (n,) * k)) if k else ()

    return CubicalSet(faces, decode=decode)


def build_extended_rack_space(rack: Rack, max_dim: int) -> CubicalSet:
    """The extended rack space: ``m``-cells are ``(x; x_1..x_m)`` in ``X x X^m``.

    Cell ``(x; x_1..x_m)`` has the same index as ``(x, x_1..x_m)`` in the
    rack space, and its face in direction ``j`` is the rack-space face in
    direction ``j+1``.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be non-negative")
    table = np.array(rack.table, dtype=np.int64).reshape(rack.size, rack.size)
    n = rack.size
    faces = [_rack_faces(table, _digits(n, m + 1), 1) for m in range(max_dim + 1)]

    def decode(m: int, idx: int) -> tuple[int, tuple[int, ...]]:
        digits = tuple(int(d) for d in np.unravel_index(idx, (n,) * (m + 1)))
        return digits[0], digits[1:]

    return CubicalSet(faces, decode=decode)


def validate_cubical(cs: CubicalSet) -> list[FaceViolation]:
    """Check ``d_{j-1}^w d_i^e == d_i^e d_j^w`` for all ``i < j`` on every cell."""
    out: list[FaceViolation] = []
    for k in range(2, cs.max_dim + 1):
        f, g = cs.faces[k], cs.faces[k - 1]
        if not len(f):
            continue
        for i, j in itertools.combinations(range(1, k + 1), 2):
            for eps, omega in itertools.product((0, 1), repeat=2):
                lhs = g[f[:, i - 1, eps], j - 2, omega]
                rhs = g[f[:, j - 1, omega], i - 1, eps]
                for cell in np.nonzero(lhs != rhs)[0]:
                    out.append(FaceViolation(k, int(cell), i, j, eps, omega))
    out.sort(key=lambda v: (v.dim, v.cell, v.i, v.j, v.eps, v.omega))
    return out


@dataclass(frozen=True)
class Projection:
    """Retained coordinates ``i_1 < ... < i_k`` out of ``1..ambient``."""

    ambient: int
    retained: tuple[int, ...]

    def __post_init__(self):
        r = tuple(self.retained)
        object.__setattr__(self, "retained", r)
        if any(a >= b for a, b in zip(r, r[1:])) or (r and not (1 <= r[0] and r[-1] <= self.ambient)):
            raise ValueError(f"retained {r} is not increasing within 1..{self.ambient}")

    @property
    def collapsed(self) -> tuple[int, ...]:
        kept = set(self.retained)
        return tuple(i for i in range(1, self.ambient + 1) if i not in kept)

    def face(self, j: int) -> tuple[int, Projection]:
        """Direction in the ambient cube hit by face ``j`` and the projection it induces."""
        pick = self.retained[j - 1]
        rest = tuple(i - (i > pick) for i in self.retained if i != pick)
        return pick, Projection(self.ambient - 1, rest)

    @staticmethod
    def all(ambient: int, k: int) -> list[Projection]:
        return [Projection(ambient, c) for c in itertools.combinations(range(1, ambient + 1), k)]


class JamesComplex:
    """``J^n(C)``: ``k``-cells are pairs (``(n+k)``-cell of ``C``, projection).

    Cell ``(c, lam)`` has index ``c * binom(n+k, k) + position of lam`` among
    the projections in lexicographic order of retained coordinates.
    """

    def __init__(self, base: CubicalSet, n: int, cubical: CubicalSet,
                 projections: list[list[Projection]]):
        self.base = base
        self.n = n
        self.cubical = cubical
        self.projections = projections

    @property
    def max_dim(self) -> int:
        return self.cubical.max_dim

    def cell(self, k: int, index: int) -> tuple[int, Projection]:
        per = len(self.projections[k])
        return index // per, self.projections[k][index % per]

    def index(self, k: int, base_cell: int, proj: Projection) -> int:
        return base_cell * len(self.projections[k]) + self.projections[k].index(proj)

    def projection_map(self, k: int, index: int) -> int:
        """The base ``(n+k)``-cell a ``k``-cell sits in."""
        return self.cell(k, index)[0]


def james_complex(base: CubicalSet, n: int, max_dim: int) -> JamesComplex:
    if n < 0 or max_dim < 0:
        raise ValueError("codimension and max_dim must be non-negative")
    if base.max_dim < n + max_dim:
        raise ValueError(
            f"base built to dimension {base.max_dim}; J^{n} to dimension {max_dim} needs {n + max_dim}")
    projections = [Projection.all(n + k, k) for k in range(max_dim + 1)]
    faces = []
    for k in range(max_dim + 1):
        base_faces = base.faces[n + k]
        count = base.counts[n + k]
        per = len(projections[k])
        table = np.empty((count * per, k, 2), dtype=np.int64)
        if k:
            lower = {p.retained: idx for idx, p in enumerate(projections[k - 1])}
            lower_per = len(projections[k - 1])
            for pi, proj in enumerate(projections[k]):
                rows = np.arange(count) * per + pi
                for j in range(1, k + 1):
                    pick, rest = proj.face(j)
                    for eps in (0, 1):
                        table[rows, j - 1, eps] = base_faces[:, pick - 1, eps] * lower_per + lower[rest.retained]
        faces.append(table)
    jc = JamesComplex(base, n, None, projections)
    jc.cubical = CubicalSet(faces, decode=jc.cell)
    return jc


def james_level(jc: JamesComplex, k: int, index: int) -> int:
    """Height of the centre of a ``J^1`` cell: its collapsed direction."""
    if jc.n != 1:
        raise ValueError(f"level map is defined on J^1 cells, not J^{jc.n}")
    (collapsed,) = jc.cell(k, index)[1].collapsed
    return collapsed


def dump_cubical(cs: CubicalSet) -> str:
    """Text cache: header, then per dimension ``<k> <count>`` and its face records."""
    lines = [f"CUBSET v1 dims={cs.max_dim}"]
    for k in range(cs.max_dim + 1):
        lines.append(f"{k} {cs.counts[k]}")
        f = cs.faces[k]
        for cell in range(cs.counts[k]):
            for i in range(k):
                for eps in (0, 1):
                    lines.append(f"f {cell} {i + 1} {eps} {int(f[cell, i, eps])}")
    return "\n".join(lines) + "\n"


def load_cubical(text: str) -> CubicalSet:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("CUBSET v1 dims="):
        raise ValueError("missing CUBSET v1 header")
    dims = int(lines[0].split("=", 1)[1])
    faces: list[np.ndarray] = []
    current = None
    for no, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "f":
            if current is None:
                raise ValueError(f"line {no}: face record before a dimension line")
            cell, i, eps, target = map(int, parts[1:])
            current[cell, i - 1, eps] = target
        else:
            k, count = map(int, parts)
            if k != len(faces):
                raise ValueError(f"line {no}: expected dimension {len(faces)}, got {k}")
            current = np.full((count, k, 2), -1, dtype=np.int64)
            faces.append(current)
    if len(faces) != dims + 1:
        raise ValueError(f"header says dims={dims} but {len(faces) - 1} found")
    if any((f < 0).any() for f in faces):
        raise ValueError("missing face records")
    return CubicalSet(faces)
