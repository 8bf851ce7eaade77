"""Sparse exact integer matrices and Smith normal form.

Elimination works on dict-of-dict rows with a column index.  Unit pivots are
taken first, shortest column then shortest row (a cheap Markowitz
approximation), which keeps fill-in low on cubical boundary matrices where
almost every entry is +-1.  What is left afterwards is reduced with
gcd-style pivoting on the smallest absolute entry.  All arithmetic uses
Python integers.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = ["SmithForm", "SparseIntMatrix", "invariant_factors", "smith_normal_form"]


class SparseIntMatrix:
    """Immutable sparse integer matrix stored by rows.

    No explicit zeros are stored and each (row, col) appears once.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Mapping[int, Mapping[int, int]] | None = None):
        self.rows = rows
        self.cols = cols
        clean: dict[int, dict[int, int]] = {}
        for r, row in (data or {}).items():
            if not 0 <= r < rows:
                raise IndexError(f"row {r} out of range for {rows} rows")
            kept = {}
            for c, v in row.items():
                if not 0 <= c < cols:
                    raise IndexError(f"column {c} out of range for {cols} columns")
                if v:
                    kept[c] = int(v)
            if kept:
                clean[r] = kept
        self._data = clean

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Mapping[tuple[int, int], int]
                     | Iterable[tuple[int, int, int]]) -> SparseIntMatrix:
        """Build from ``{(r, c): v}`` or ``(r, c, v)`` triplets; duplicates are summed."""
        items = entries.items() if isinstance(entries, Mapping) else (((r, c), v) for r, c, v in entries)
        data: dict[int, dict[int, int]] = {}
        for (r, c), v in items:
            row = data.setdefault(r, {})
            row[c] = row.get(c, 0) + v
        return cls(rows, cols, data)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: int | None = None) -> SparseIntMatrix:
        nrows = len(dense)
        ncols = cols if cols is not None else (len(dense[0]) if nrows else 0)
        return cls(nrows, ncols, {r: {c: v for c, v in enumerate(row) if v} for r, row in enumerate(dense)})

    @classmethod
    def identity(cls, n: int) -> SparseIntMatrix:
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, r: int) -> dict[int, int]:
        return dict(self._data.get(r, {}))

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self._data.get(r, {}).get(c, 0)

    def nnz(self) -> int:
        return sum(len(row) for row in self._data.values())

    def triplets(self) -> Iterator[tuple[int, int, int]]:
        for r in sorted(self._data):
            row = self._data[r]
            for c in sorted(row):
                yield r, c, row[c]

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.triplets():
            out[r][c] = v
        return out

    def transpose(self) -> SparseIntMatrix:
        data: dict[int, dict[int, int]] = {}
        for r, row in self._data.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return SparseIntMatrix(self.cols, self.rows, data)

    def __matmul__(self, other: SparseIntMatrix) -> SparseIntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        data: dict[int, dict[int, int]] = {}
        for r, row in self._data.items():
            acc: dict[int, int] = {}
            for k, v in row.items():
                for c, w in other._data.get(k, {}).items():
                    acc[c] = acc.get(c, 0) + v * w
            data[r] = acc
        return SparseIntMatrix(self.rows, other.cols, data)

    def apply(self, vec: Sequence[int]) -> list[int]:
        """Matrix-vector product with a dense integer vector."""
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.cols} columns")
        out = [0] * self.rows
        for r, row in self._data.items():
            out[r] = sum(v * vec[c] for c, v in row.items())
        return out

    def is_zero(self) -> bool:
        return not self._data

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseIntMatrix) and self.shape == other.shape
                and self._data == other._data)

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def dumps(self) -> str:
        lines = [f"m {self.rows} {self.cols}"]
        lines.extend(f"e {r} {c} {v}" for r, c, v in self.triplets())
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> SparseIntMatrix:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix text")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "m":
            raise ValueError(f"bad matrix header {lines[0]!r}")
        rows, cols = int(head[1]), int(head[2])
        triples = []
        for i, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 4 or parts[0] != "e":
                raise ValueError(f"line {i}: bad entry {ln!r}")
            triples.append((int(parts[1]), int(parts[2]), int(parts[3])))
        return cls.from_entries(rows, cols, triples)


@dataclass
class SmithForm:
    """Result of :func:`smith_normal_form`.

    ``factors`` are the nonzero diagonal entries ``d1 | d2 | ...`` (units
    included), so ``rank == len(factors)``.  When transforms were requested,
    ``left @ M @ right`` is diagonal with ``factors`` in the leading
    positions and ``right_inverse`` is the inverse of ``right``.
    """

    factors: list[int]
    left: SparseIntMatrix | None = None
    right: SparseIntMatrix | None = None
    right_inverse: SparseIntMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.factors if d > 1]


def _axpy(dst: dict[int, int], src: Mapping[int, int], c: int) -> None:
    for k, v in src.items():
        nv = dst.get(k, 0) + c * v
        if nv:
            dst[k] = nv
        else:
            dst.pop(k, None)


class _Reducer:
    def __init__(self, m: SparseIntMatrix, want_left: bool, want_right: bool, want_right_inv: bool):
        self.nrows, self.ncols = m.rows, m.cols
        self.rows: dict[int, dict[int, int]] = {r: dict(row) for r, row in m._data.items()}
        self.cols: dict[int, set[int]] = {}
        for r, row in self.rows.items():
            for c in row:
                self.cols.setdefault(c, set()).add(r)
        self.track = want_left or want_right or want_right_inv
        self.left = {i: {i: 1} for i in range(m.rows)} if want_left else None
        # right stored transposed: right_t[c] is column c of the right transform
        self.right_t = {i: {i: 1} for i in range(m.cols)} if want_right else None
        self.right_inv = {i: {i: 1} for i in range(m.cols)} if want_right_inv else None
        self.heap: list[tuple[int, int]] = [(len(s), c) for c, s in self.cols.items()]
        heapq.heapify(self.heap)
        self.pivots: list[tuple[int, int, int]] = []

    # elementary operations -------------------------------------------------

    def _touch(self, c: int) -> None:
        s = self.cols.get(c)
        if s:
            heapq.heappush(self.heap, (len(s), c))

    def add_row(self, dst: int, src: int, q: int) -> None:
        """row[dst] += q * row[src]"""
        rd = self.rows.setdefault(dst, {})
        cols = self.cols
        for c, v in self.rows[src].items():
            old = rd.get(c, 0)
            nv = old + q * v
            if nv:
                rd[c] = nv
                if not old:
                    cols.setdefault(c, set()).add(dst)
                    self._touch(c)
            else:
                del rd[c]
                cols[c].discard(dst)
                self._touch(c)
        if not rd:
            del self.rows[dst]
        if self.left is not None:
            _axpy(self.left[dst], self.left[src], q)

    def add_col(self, dst: int, src: int, q: int) -> None:
        """col[dst] += q * col[src]"""
        target = self.cols.setdefault(dst, set())
        for r in list(self.cols.get(src, ())):
            row = self.rows[r]
            old = row.get(dst, 0)
            nv = old + q * row[src]
            if nv:
                row[dst] = nv
                target.add(r)
            else:
                del row[dst]
                target.discard(r)
        self._touch(dst)
        if self.right_t is not None:
            _axpy(self.right_t[dst], self.right_t[src], q)
        if self.right_inv is not None:
            _axpy(self.right_inv[src], self.right_inv[dst], -q)

    def negate_row(self, r: int) -> None:
        row = self.rows[r]
        for c in row:
            row[c] = -row[c]
        if self.left is not None:
            lr = self.left[r]
            for k in lr:
                lr[k] = -lr[k]

    def retire(self, r: int, c: int) -> None:
        """Drop pivot row r and column c from the active matrix."""
        row = self.rows.pop(r, {})
        for c2 in row:
            s = self.cols.get(c2)
            if s is not None:
                s.discard(r)
                if c2 != c:
                    self._touch(c2)
        for r2 in self.cols.pop(c, ()):
            if r2 != r:
                self.rows[r2].pop(c, None)
                if not self.rows[r2]:
                    del self.rows[r2]

    # pivoting ----------------------------------------------------------------

    def next_unit_pivot(self) -> tuple[int, int] | None:
        heap, cols, rows = self.heap, self.cols, self.rows
        while heap:
            n, c = heap[0]
            s = cols.get(c)
            if not s or len(s) != n:
                heapq.heappop(heap)
                continue
            best = None
            for r in s:
                v = rows[r][c]
                if v == 1 or v == -1:
                    key = (len(rows[r]), r)
                    if best is None or key < best:
                        best = key
            heapq.heappop(heap)
            if best is not None:
                return best[1], c
        return None

    def smallest_pivot(self) -> tuple[int, int] | None:
        best = None
        for r in sorted(self.rows):
            row = self.rows[r]
            for c in sorted(row):
                key = (abs(row[c]), (len(row) - 1) * (len(self.cols[c]) - 1), r, c)
                if best is None or key < best:
                    best = key
        return None if best is None else (best[2], best[3])

    def settle(self, r: int, c: int, clear_row: bool) -> tuple[int, int]:
        """Clear column c (and row r if asked) around the pivot, moving the pivot
        to a smaller remainder whenever a division is inexact."""
        while True:
            p = self.rows[r][c]
            moved = False
            for r2 in sorted(self.cols[c] - {r}):
                q = self.rows[r2][c] // p
                if q:
                    self.add_row(r2, r, -q)
                if self.rows.get(r2, {}).get(c):
                    r, moved = r2, True
                    break
            if moved:
                continue
            if clear_row:
                for c2 in sorted(set(self.rows[r]) - {c}):
                    q = self.rows[r][c2] // p
                    if q:
                        self.add_col(c2, c, -q)
                    if self.rows[r].get(c2):
                        c, moved = c2, True
                        break
                if moved:
                    continue
            return r, c

    def non_divisible(self, r: int, c: int) -> int | None:
        p = abs(self.rows[r][c])
        for r2, row in sorted(self.rows.items()):
            if r2 == r:
                continue
            for v in row.values():
                if v % p:
                    return r2
        return None

    def run(self) -> None:
        while True:
            rc = self.next_unit_pivot()
            if rc is None:
                break
            r, c = rc
            r, c = self.settle(r, c, clear_row=self.track)
            self.finish(r, c)
        while self.rows:
            r, c = self.smallest_pivot()
            while True:
                r, c = self.settle(r, c, clear_row=True)
                if not self.track:
                    break
                bad = self.non_divisible(r, c)
                if bad is None:
                    break
                self.add_row(r, bad, 1)
            self.finish(r, c)

    def finish(self, r: int, c: int) -> None:
        p = self.rows[r][c]
        if p < 0 and self.track:
            self.negate_row(r)
            p = -p
        self.pivots.append((r, c, abs(p)))
        self.retire(r, c)


def _chain(diag: list[int]) -> list[int]:
    """Invariant factors of the diagonal matrix ``diag`` (positive entries)."""
    units = [d for d in diag if d == 1]
    rest = sorted(d for d in diag if d != 1)
    # pairwise (a, b) -> (gcd, lcm) until every entry divides its successor
    changed = True
    while changed:
        changed = False
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                a, b = rest[i], rest[j]
                if b % a:
                    g = gcd(a, b)
                    rest[i], rest[j] = g, a // g * b
                    changed = True
        rest.sort()
    return units + [d for d in rest if d != 1] + [1] * sum(1 for d in rest if d == 1)


def smith_normal_form(m: SparseIntMatrix, transforms: bool = False, *,
                      left: bool | None = None, right: bool | None = None,
                      right_inverse: bool | None = None) -> SmithForm:
    """Smith normal form of an integer matrix.

    With ``transforms=True`` the unimodular ``left`` (U), ``right`` (V) and
    ``right_inverse`` (V^-1) are returned with ``U M V`` diagonal; the
    keyword flags select them individually.
    """
    want_l = transforms if left is None else left
    want_r = transforms if right is None else right
    want_ri = transforms if right_inverse is None else right_inverse
    red = _Reducer(m, want_l, want_r, want_ri)
    red.run()
    diag = [p for _, _, p in red.pivots]
    if not red.track:
        return SmithForm(sorted(_chain(diag)))
    # pivots already form a divisibility chain in elimination order
    prow = [r for r, _, _ in red.pivots]
    pcol = [c for _, c, _ in red.pivots]
    used_r, used_c = set(prow), set(pcol)
    row_order = prow + [r for r in range(m.rows) if r not in used_r]
    col_order = pcol + [c for c in range(m.cols) if c not in used_c]
    out = SmithForm(diag)
    if red.left is not None:
        out.left = SparseIntMatrix(m.rows, m.rows, {i: red.left[r] for i, r in enumerate(row_order)})
    if red.right_t is not None:
        data: dict[int, dict[int, int]] = {}
        for j, c in enumerate(col_order):
            for i, v in red.right_t[c].items():
                data.setdefault(i, {})[j] = v
        out.right = SparseIntMatrix(m.cols, m.cols, data)
    if red.right_inv is not None:
        out.right_inverse = SparseIntMatrix(
            m.cols, m.cols, {i: red.right_inv[c] for i, c in enumerate(col_order)})
    return out


def invariant_factors(m: SparseIntMatrix) -> list[int]:
    return smith_normal_form(m).factors
