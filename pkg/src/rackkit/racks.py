"""Finite racks, presented racks, homomorphism search and abelian invariants.

Elements of a finite rack are the integers ``0..n-1`` and the operation is
stored as a table with ``table[a][b] == a^b``.  Evaluation is left to right,
so ``a^(bc)`` means ``(a^b)^c``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence

__all__ = [
    "AbelianGroup",
    "MalformedTableError",
    "PresentationError",
    "PresentedRack",
    "Rack",
    "RackAxiomError",
    "RackSpecError",
    "Violation",
    "all_racks",
    "associated_group_abelianized",
    "check_rack_axioms",
    "dump_rack",
    "enumerate_homs",
    "load_rack",
    "make_rack",
    "orbits",
    "parse_rack_spec",
]

KINDS = ("explicit", "trivial", "dihedral", "permutation", "cyclic", "conjugation")


class MalformedTableError(ValueError):
    """The table is not square or has entries outside ``0..n-1``."""


class RackAxiomError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0]
        super().__init__(
            f"table fails the rack axioms ({len(self.violations)} violation(s)); first: {first}"
        )


class RackSpecError(ValueError):
    """Invalid parameters for a named rack kind."""


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    """A witness that a table is not a rack.

    ``kind`` is ``"bijectivity"`` (then ``witness`` is ``(b,)``, the column)
    or ``"identity"`` (then ``witness`` is the triple ``(a, b, c)`` with
    ``(a^b)^c != (a^c)^(b^c)``).
    """

    kind: str
    witness: tuple[int, ...]

    def __str__(self) -> str:
        if self.kind == "bijectivity":
            return f"column b={self.witness[0]} is not a bijection"
        a, b, c = self.witness
        return f"rack identity fails at (a,b,c)=({a},{b},{c})"


def _as_table(table: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    rows = [list(r) for r in table]
    n = len(rows)
    for a, row in enumerate(rows):
        if len(row) != n:
            raise MalformedTableError(f"row {a} has length {len(row)}, expected {n}")
        for b, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, int):
                raise MalformedTableError(f"entry ({a},{b}) is not an integer: {v!r}")
            if not 0 <= v < n:
                raise MalformedTableError(f"entry ({a},{b})={v} out of range 0..{n - 1}")
    return tuple(tuple(r) for r in rows)


def check_rack_axioms(table: Sequence[Sequence[int]]) -> list[Violation]:
    """Return every axiom violation of ``table``; an empty list means it is a rack."""
    t = _as_table(table)
    n = len(t)
    out: list[Violation] = []
    for b in range(n):
        if len({t[a][b] for a in range(n)}) != n:
            out.append(Violation("bijectivity", (b,)))
    for a, b, c in itertools.product(range(n), repeat=3):
        if t[t[a][b]][c] != t[t[a][c]][t[b][c]]:
            out.append(Violation("identity", (a, b, c)))
    return out


@dataclass(frozen=True, eq=False)
class Rack:
    """A finite rack given by its operation table."""

    table: tuple[tuple[int, ...], ...]
    kind: str = "explicit"
    _inverse: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __init__(self, table, kind: str = "explicit", check: bool = True):
        t = _as_table(table)
        if kind not in KINDS:
            raise RackSpecError(f"unknown rack kind {kind!r}")
        if check:
            bad = check_rack_axioms(t)
            if bad:
                raise RackAxiomError(bad)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "kind", kind)
        n = len(t)
        inv = [[0] * n for _ in range(n)]
        for b in range(n):
            for a in range(n):
                inv[t[a][b]][b] = a
        object.__setattr__(self, "_inverse", tuple(tuple(r) for r in inv))

    @property
    def size(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def op(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int, b: int) -> int:
        """The unique ``c`` with ``c^b == a``."""
        return self._inverse[a][b]

    def act(self, a: int, b: int, sign: int) -> int:
        """``a^b`` for ``sign=+1`` and ``a^(b^-1)`` for ``sign=-1``."""
        return self.table[a][b] if sign > 0 else self._inverse[a][b]

    def __eq__(self, other) -> bool:
        return isinstance(other, Rack) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"Rack(size={self.size}, kind={self.kind!r})"


def _check_group(mul: Sequence[Sequence[int]]) -> int:
    """Validate a group multiplication table and return the identity."""
    try:
        t = _as_table(mul)
    except MalformedTableError as exc:
        raise RackSpecError(f"group table: {exc}") from None
    n = len(t)
    if n == 0:
        raise RackSpecError("group table is empty")
    for x, y, z in itertools.product(range(n), repeat=3):
        if t[t[x][y]][z] != t[x][t[y][z]]:
            raise RackSpecError(f"group table not associative at ({x},{y},{z})")
    ids = [e for e in range(n) if all(t[e][x] == x and t[x][e] == x for x in range(n))]
    if not ids:
        raise RackSpecError("group table has no identity element")
    e = ids[0]
    for x in range(n):
        if not any(t[x][y] == e for y in range(n)):
            raise RackSpecError(f"group element {x} has no inverse")
    return e


def _check_permutation(rho: Sequence[int]) -> tuple[int, ...]:
    rho = tuple(rho)
    n = len(rho)
    if n == 0:
        raise RackSpecError("permutation must act on at least one point")
    if sorted(rho) != list(range(n)):
        seen: dict[int, int] = {}
        for i, v in enumerate(rho):
            if not isinstance(v, int) or not 0 <= v < n:
                raise RackSpecError(f"rho({i})={v!r} out of range 0..{n - 1}")
            if v in seen:
                raise RackSpecError(f"rho is not injective: rho({seen[v]})=rho({i})={v}")
            seen[v] = i
    return rho


def make_rack(kind: str, *, n: int | None = None, rho: Sequence[int] | None = None,
              group: Sequence[Sequence[int]] | None = None,
              table: Sequence[Sequence[int]] | None = None) -> Rack:
    """Build a named rack.

    ``trivial`` and ``dihedral`` take ``n``; ``cyclic`` takes ``n`` (the
    order w); ``permutation`` takes ``rho``; ``conjugation`` takes a group
    multiplication table; ``explicit`` takes ``table``.
    """
    if kind in ("trivial", "dihedral", "cyclic"):
        if n is None or isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise RackSpecError(f"{kind} rack needs an integer n >= 1, got {n!r}")
    if kind == "trivial":
        return Rack([[a for _ in range(n)] for a in range(n)], "trivial")
    if kind == "dihedral":
        return Rack([[(2 * j - i) % n for j in range(n)] for i in range(n)], "dihedral")
    if kind == "cyclic":
        return Rack([[(i + 1) % n for _ in range(n)] for i in range(n)], "cyclic")
    if kind == "permutation":
        if rho is None:
            raise RackSpecError("permutation rack needs rho")
        rho = _check_permutation(rho)
        return Rack([[rho[i] for _ in rho] for i in range(len(rho))], "permutation")
    if kind == "conjugation":
        if group is None:
            raise RackSpecError("conjugation rack needs a group table")
        e = _check_group(group)
        m = len(group)
        inverse = [next(y for y in range(m) if group[x][y] == e) for x in range(m)]
        return Rack([[group[group[inverse[b]][a]][b] for b in range(m)] for a in range(m)],
                    "conjugation")
    if kind == "explicit":
        if table is None:
            raise RackSpecError("explicit rack needs a table")
        return Rack(table, "explicit")
    raise RackSpecError(f"unknown rack kind {kind!r}")


def orbits(rack: Rack) -> list[list[int]]:
    """Orbits of the operator action, each sorted, ordered by least element."""
    n = rack.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(n):
        for b in range(n):
            ra, rb = find(a), find(rack.table[a][b])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values())


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^rank + Z/d1 + Z/d2 + ...`` with ``d1 | d2 | ...`` and every ``di >= 2``."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisibility chain")

    def __str__(self) -> str:
        return "".join([f"Z^{self.rank}"] + [f" + Z/{d}" for d in self.torsion])

    def machine(self) -> str:
        return f"{self.rank};" + ",".join(str(d) for d in self.torsion)


def associated_group_abelianized(rack: Rack) -> AbelianGroup:
    """Abelianization of the associated group: free abelian on X modulo ``a = a^b``."""
    from .snf import SparseIntMatrix, smith_normal_form

    n = rack.size
    entries = {}
    col = 0
    for a in range(n):
        for b in range(n):
            c = rack.table[a][b]
            if c != a:
                entries[(a, col)] = 1
                entries[(c, col)] = -1
                col += 1
    relations = SparseIntMatrix.from_entries(n, col, entries)
    factors = smith_normal_form(relations).factors
    return AbelianGroup(n - len(factors), tuple(d for d in factors if d > 1))


@dataclass(frozen=True)
class PresentedRack:
    """Generators and relations ``(g, h, k)`` meaning ``g^h = k``."""

    generators: tuple[Hashable, ...]
    relations: tuple[tuple[Hashable, Hashable, Hashable], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        known = set(self.generators)
        if len(known) != len(self.generators):
            raise PresentationError("duplicate generator names")
        for i, rel in enumerate(self.relations):
            if len(rel) != 3:
                raise PresentationError(f"relation {i} is not a triple: {rel!r}")
            for g in rel:
                if g not in known:
                    raise PresentationError(f"relation {i} {rel!r} names unknown generator {g!r}")


def free_rack(n: int) -> PresentedRack:
    return PresentedRack(tuple(range(n)))


def _search_order(pres: PresentedRack) -> list[int]:
    index = {g: i for i, g in enumerate(pres.generators)}
    degree = [0] * len(pres.generators)
    for rel in pres.relations:
        for g in rel:
            degree[index[g]] += 1
    return sorted(range(len(degree)), key=lambda i: (-degree[i], i))


def _homs(pres: PresentedRack, dst: Rack) -> Iterator[tuple[int, ...]]:
    index = {g: i for i, g in enumerate(pres.generators)}
    rels = [(index[g], index[h], index[k]) for g, h, k in pres.relations]
    touching: list[list[int]] = [[] for _ in pres.generators]
    for r, (g, h, k) in enumerate(rels):
        for x in {g, h, k}:
            touching[x].append(r)
    order = _search_order(pres)
    table, inverse = dst.table, dst._inverse
    n = len(pres.generators)
    value = [-1] * n

    def propagate(start: int, trail: list[int]) -> bool:
        # forward-check every relation touching a newly fixed generator
        queue = [start]
        while queue:
            x = queue.pop()
            for r in touching[x]:
                g, h, k = rels[r]
                vg, vh, vk = value[g], value[h], value[k]
                if vh < 0:
                    continue
                if vg >= 0:
                    want = table[vg][vh]
                    if vk < 0:
                        value[k] = want
                        trail.append(k)
                        queue.append(k)
                    elif vk != want:
                        return False
                elif vk >= 0:
                    value[g] = inverse[vk][vh]
                    trail.append(g)
                    queue.append(g)
        return True

    def rec(pos: int) -> Iterator[tuple[int, ...]]:
        while pos < n and value[order[pos]] >= 0:
            pos += 1
        if pos == n:
            yield tuple(value)
            return
        x = order[pos]
        for v in range(dst.size):
            trail = [x]
            value[x] = v
            if propagate(x, trail):
                yield from rec(pos + 1)
            for y in trail:
                value[y] = -1

    if dst.size == 0:
        return
    yield from rec(0)


def enumerate_homs(src: PresentedRack, dst: Rack, mode: str = "count"):
    """Count (``mode="count"``) or list (``mode="list"``) rack homomorphisms.

    A homomorphism is returned as a dict generator -> element.
    """
    if mode == "count":
        return sum(1 for _ in _homs(src, dst))
    if mode == "list":
        return [dict(zip(src.generators, v)) for v in _homs(src, dst)]
    raise ValueError(f"mode must be 'count' or 'list', not {mode!r}")


def _canonical_table(table: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(table)
    best = None
    for perm in itertools.permutations(range(n)):
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        cand = tuple(tuple(perm[table[inv[a]][inv[b]]] for b in range(n)) for a in range(n))
        if best is None or cand < best:
            best = cand
    return best


def all_racks(n: int) -> list[Rack]:
    """All racks of order ``n`` up to isomorphism (practical for ``n <= 5``)."""
    if n < 1:
        return []
    perms = list(itertools.permutations(range(n)))
    cols: list[tuple[int, ...] | None] = [None] * n
    found: set[tuple[tuple[int, ...], ...]] = set()

    def consistent(upto: int) -> bool:
        # operator form of the rack identity: phi_c(phi_b(a)) = phi_{b^c}(phi_c(a))
        for b in range(upto + 1):
            for c in range(upto + 1):
                pb, pc = cols[b], cols[c]
                bc = pc[b]
                if bc > upto:
                    continue
                pbc = cols[bc]
                if any(pc[pb[a]] != pbc[pc[a]] for a in range(n)):
                    return False
        return True

    def rec(b: int) -> None:
        if b == n:
            table = tuple(tuple(cols[x][a] for x in range(n)) for a in range(n))
            found.add(_canonical_table(table))
            return
        for p in perms:
            cols[b] = p
            if consistent(b):
                rec(b + 1)
        cols[b] = None

    rec(0)
    return [Rack(t) for t in sorted(found)]


_CYCLE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(text: str) -> tuple[int, ...]:
    text = text.strip()
    rest = _CYCLE.sub("", text).strip()
    if rest:
        raise RackSpecError(f"cannot parse permutation {text!r}")
    cycles = []
    for body in _CYCLE.findall(text):
        try:
            cyc = [int(tok) for tok in body.replace(",", " ").split()]
        except ValueError:
            raise RackSpecError(f"non-integer point in cycle ({body})") from None
        cycles.append(cyc)
    points = [p for c in cycles for p in c]
    if not points:
        raise RackSpecError("empty permutation")
    if len(set(points)) != len(points) or min(points) < 0:
        raise RackSpecError(f"cycles {text!r} are not disjoint non-negative points")
    n = max(points) + 1
    rho = list(range(n))
    for c in cycles:
        for i, p in enumerate(c):
            rho[p] = c[(i + 1) % len(c)]
    return tuple(rho)


def parse_rack_spec(spec: str) -> Rack:
    """Parse an inline rack spec such as ``dihedral:5`` or ``perm:(0 1 2)(3 4)``.

    Points of a permutation that appear in no cycle up to the largest named
    point are fixed; write ``(k)`` to include a fixed point ``k`` explicitly.
    """
    kind, sep, param = spec.partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise RackSpecError(f"rack spec {spec!r} is not of the form kind:params")
    if kind in ("trivial", "dihedral", "cyclic"):
        try:
            n = int(param)
        except ValueError:
            raise RackSpecError(f"{kind} needs an integer, got {param!r}") from None
        return make_rack(kind, n=n)
    if kind in ("perm", "permutation"):
        return make_rack("permutation", rho=_parse_cycles(param))
    if kind in ("conj", "conjugation"):
        try:
            group = json.loads(param)
        except json.JSONDecodeError as exc:
            raise RackSpecError(f"conjugation needs a JSON group table: {exc}") from None
        return make_rack("conjugation", group=group)
    raise RackSpecError(f"unknown rack kind {kind!r} in {spec!r}")


def dump_rack(rack: Rack) -> str:
    """Canonical text: ``{"size": n, "table": [[...], ...]}`` on one line."""
    return json.dumps({"size": rack.size, "table": [list(r) for r in rack.table]},
                      separators=(", ", ": "))


def load_rack(text: str) -> Rack:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedTableError(f"rack file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "table" not in doc or "size" not in doc:
        raise MalformedTableError('rack file must be an object with "size" and "table"')
    table = doc["table"]
    if not isinstance(table, list) or not all(isinstance(r, list) for r in table):
        raise MalformedTableError("table must be a list of rows")
    if doc["size"] != len(table):
        raise MalformedTableError(f"size {doc['size']} disagrees with {len(table)} rows")
    return Rack(table)

