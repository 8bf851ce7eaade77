"""Oriented classical and virtual link diagrams.

A diagram is stored at the level of its Gauss code: each component is a
cyclic sequence of passages through crossings (over, under, or virtual),
plus a sign for every real crossing.  Edge ``offset_c + i`` of component
``c`` is the segment leaving passage ``i``; a crossingless component has a
single edge.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .racks import PresentedRack, Rack, enumerate_homs, load_rack, parse_rack_spec

__all__ = [
    "ArcData",
    "CrossingRecord",
    "DiagramError",
    "Labelling",
    "LinkDiagram",
    "ParseError",
    "Passage",
    "arcs",
    "colorings",
    "fundamental_rack",
    "load_labelling",
    "parse_gauss",
    "parse_pd",
    "print_gauss",
    "print_pd",
    "writhe",
]


class DiagramError(ValueError):
    pass


class ParseError(DiagramError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" (token {position})" if position is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True, order=True)
class Passage:
    crossing: int
    role: str  # "O", "U" or "V"


@dataclass(frozen=True)
class CrossingRecord:
    """Incident edges of a crossing.

    For a real crossing the edges are reported by role; ``rotation`` lists
    them counterclockwise from the incoming under edge.  For a virtual
    crossing ``under_*`` is the strand met first in component order.
    """

    id: int
    sign: int
    kind: str
    under_in: int
    over_in: int
    under_out: int
    over_out: int

    @property
    def rotation(self) -> tuple[int, int, int, int]:
        if self.sign > 0:
            return (self.under_in, self.over_out, self.under_out, self.over_in)
        return (self.under_in, self.over_in, self.under_out, self.over_out)


class LinkDiagram:
    """Immutable oriented (virtual) link diagram."""

    def __init__(self, components: Iterable[Sequence[Passage]], signs: dict[int, int]):
        self.components = tuple(tuple(c) for c in components)
        self.signs = dict(signs)
        seen: dict[int, list[str]] = {}
        for comp in self.components:
            for p in comp:
                if p.role not in ("O", "U", "V"):
                    raise DiagramError(f"bad passage role {p.role!r}")
                seen.setdefault(p.crossing, []).append(p.role)
        for x, roles in seen.items():
            if sorted(roles) == ["O", "U"]:
                if self.signs.get(x) not in (1, -1):
                    raise DiagramError(f"real crossing {x} needs sign +1 or -1")
            elif roles != ["V", "V"]:
                raise DiagramError(f"crossing {x} has passages {roles}")
        extra = set(self.signs) - {x for x, r in seen.items() if "O" in r}
        if extra:
            raise DiagramError(f"signs given for unknown crossings {sorted(extra)}")
        self._offsets = []
        total = 0
        for comp in self.components:
            self._offsets.append(total)
            total += max(len(comp), 1)
        self._edge_count = total

    # structure ----------------------------------------------------------------

    @property
    def real_crossings(self) -> list[int]:
        return sorted(self.signs)

    @property
    def virtual_crossings(self) -> list[int]:
        return sorted({p.crossing for comp in self.components for p in comp if p.role == "V"})

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def edge_id(self, component: int, index: int) -> int:
        """Edge leaving passage ``index`` of ``component``."""
        n = max(len(self.components[component]), 1)
        return self._offsets[component] + index % n

    def edge_position(self, edge: int) -> tuple[int, int]:
        if not 0 <= edge < self._edge_count:
            raise IndexError(f"edge {edge} out of range")
        for c in range(len(self.components) - 1, -1, -1):
            if self._offsets[c] <= edge:
                return c, edge - self._offsets[c]
        raise IndexError(edge)

    def passages(self) -> Iterable[tuple[int, int, Passage]]:
        for c, comp in enumerate(self.components):
            for i, p in enumerate(comp):
                yield c, i, p

    def crossings(self) -> list[CrossingRecord]:
        found: dict[int, dict[str, tuple[int, int]]] = {}
        for c, i, p in self.passages():
            entry = self.edge_id(c, i - 1), self.edge_id(c, i)
            slot = found.setdefault(p.crossing, {})
            key = p.role if p.role != "V" else ("U" if "U" not in slot else "O")
            slot[key] = entry
        out = []
        for x in sorted(found):
            s = found[x]
            kind = "virtual" if x not in self.signs else "real"
            out.append(CrossingRecord(x, self.signs.get(x, 0), kind,
                                      s["U"][0], s["O"][0], s["U"][1], s["O"][1]))
        return out

    def without_virtual(self) -> LinkDiagram:
        """The same virtual link with virtual crossings forgotten (its Gauss code)."""
        return LinkDiagram([[p for p in comp if p.role != "V"] for comp in self.components], self.signs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LinkDiagram) and self.components == other.components
                and self.signs == other.signs)

    def __repr__(self) -> str:
        return f"LinkDiagram({print_gauss(self)!r})"


# Gauss codes ------------------------------------------------------------------

_TOKEN = re.compile(r"^([OU])(\d+)([+-])$")


def parse_gauss(text: str) -> LinkDiagram:
    """Parse ``O1+ U2+ ... / ...``; a lone ``o`` is a crossingless component."""
    components: list[list[Passage]] = []
    signs: dict[int, int] = {}
    where: dict[int, dict[str, int]] = {}
    pos = 0
    if not text.strip():
        return LinkDiagram([], {})
    for chunk in text.split("/"):
        tokens = chunk.split()
        if not tokens:
            raise ParseError("empty component", pos)
        if tokens == ["o"]:
            components.append([])
            pos += 1
            continue
        comp = []
        for tok in tokens:
            m = _TOKEN.match(tok)
            if not m:
                raise ParseError(f"bad token {tok!r}", pos)
            role, label, sign = m.group(1), int(m.group(2)), 1 if m.group(3) == "+" else -1
            slots = where.setdefault(label, {})
            if role in slots:
                raise ParseError(f"crossing {label} has two {role} passages", pos)
            if label in signs and signs[label] != sign:
                raise ParseError(f"sign mismatch on crossing {label}", pos)
            signs[label] = sign
            slots[role] = pos
            comp.append(Passage(label, role))
            pos += 1
        components.append(comp)
    for label, slots in sorted(where.items()):
        if len(slots) != 2:
            (role, at), = slots.items()
            raise ParseError(f"crossing {label} has no {'U' if role == 'O' else 'O'} passage", at)
    return LinkDiagram(components, signs)


def print_gauss(d: LinkDiagram) -> str:
    parts = []
    for comp in d.components:
        toks = [f"{p.role}{p.crossing}{'+' if d.signs[p.crossing] > 0 else '-'}"
                for p in comp if p.role != "V"]
        parts.append(" ".join(toks) if toks else "o")
    return " / ".join(parts)


# planar diagram codes ---------------------------------------------------------

_PD_ENTRY = re.compile(r"([XV])\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def _succession_in(j: int, l: int) -> bool:
    """Whether ``j`` is the incoming edge of the pair, from edge-id succession."""
    if l == j + 1:
        return True
    if j == l + 1:
        return False
    return j > l


def parse_pd(text: str) -> LinkDiagram:
    """Parse ``X[a,b,c,d]`` (real) and ``V[a,b,c,d]`` (virtual) entries.

    Edges are listed counterclockwise starting at the incoming under edge
    (for ``V``, at an incoming edge).  Orientation of the other strand is
    propagated from the under strands and otherwise read from edge-id
    succession.
    """
    entries = []
    for m in _PD_ENTRY.finditer(text):
        entries.append((m.group(1), tuple(int(g) for g in m.groups()[1:])))
    leftover = _PD_ENTRY.sub(" ", text).replace(",", " ").strip()
    if leftover:
        raise ParseError(f"unrecognised PD text {leftover.split()[0]!r}")
    uses: dict[int, list[tuple[int, int]]] = {}
    for x, (_, edges) in enumerate(entries):
        for slot, e in enumerate(edges):
            uses.setdefault(e, []).append((x, slot))
    for e, occ in sorted(uses.items()):
        if len(occ) != 2:
            raise ParseError(f"edge {e} used {len(occ)} time(s), expected 2", occ[0][0])
    # incoming[(x, slot)] is True/False once known
    incoming: dict[tuple[int, int], bool] = {}
    queue = []

    def fix(x: int, slot: int, value: bool) -> None:
        key = (x, slot)
        if key in incoming:
            if incoming[key] != value:
                raise ParseError(f"inconsistent orientation at entry {x}", x)
            return
        incoming[key] = value
        queue.append(key)

    def drain() -> None:
        while queue:
            x, slot = queue.pop()
            value = incoming[(x, slot)]
            fix(x, (slot + 2) % 4, not value)
            e = entries[x][1][slot]
            for other in uses[e]:
                if other != (x, slot):
                    fix(other[0], other[1], not value)

    for x in range(len(entries)):
        fix(x, 0, True)
    drain()
    for x, (_, edges) in enumerate(entries):
        if (x, 1) not in incoming:
            fix(x, 1, _succession_in(edges[1], edges[3]))
            drain()
    # walk the strands
    succ: dict[int, tuple[int, int]] = {}
    for (x, slot), inc in incoming.items():
        if inc:
            succ[entries[x][1][slot]] = (x, slot)
    visited: set[int] = set()
    components = []
    signs = {}
    for x, (kind, edges) in enumerate(entries):
        if kind == "X":
            # over strand entering at slot 3 runs left to right
            signs[x + 1] = 1 if incoming[(x, 3)] else -1
    for start in sorted(uses):
        if start in visited:
            continue
        comp = []
        e = start
        while e not in visited:
            visited.add(e)
            x, slot = succ[e]
            kind = entries[x][0]
            role = "V" if kind == "V" else ("U" if slot % 2 == 0 else "O")
            comp.append(Passage(x + 1, role))
            e = entries[x][1][(slot + 2) % 4]
        if e != start:
            raise ParseError(f"edge {start} does not close into a circuit")
        components.append(comp)
    return LinkDiagram(components, signs)


def print_pd(d: LinkDiagram) -> str:
    parts = []
    for rec in d.crossings():
        if rec.kind == "real":
            a, b, c, e = (x + 1 for x in rec.rotation)
            parts.append(f"X[{a},{b},{c},{e}]")
        else:
            parts.append(f"V[{rec.under_in + 1},{rec.over_out + 1},{rec.under_out + 1},{rec.over_in + 1}]")
    return " ".join(parts)


# arcs, writhe, presentation -----------------------------------------------------


@dataclass(frozen=True)
class ArcData:
    """Arcs of a diagram.

    ``arcs[a]`` lists the edges of arc ``a`` in order; ``edge_arc[e]`` is the
    arc of edge ``e``; ``incidences[x]`` is ``(under_in, over, under_out)``
    for every real crossing ``x``.
    """

    arcs: tuple[tuple[int, ...], ...]
    edge_arc: tuple[int, ...]
    incidences: dict[int, tuple[int, int, int]]

    def __len__(self) -> int:
        return len(self.arcs)


def arcs(d: LinkDiagram) -> ArcData:
    arc_list: list[tuple[int, ...]] = []
    edge_arc = [0] * d.edge_count
    for c, comp in enumerate(d.components):
        n = len(comp)
        unders = [i for i, p in enumerate(comp) if p.role == "U"]
        if not unders:
            run = tuple(d.edge_id(c, i) for i in range(max(n, 1)))
            for e in run:
                edge_arc[e] = len(arc_list)
            arc_list.append(run)
            continue
        for t, u in enumerate(unders):
            nxt = unders[(t + 1) % len(unders)]
            length = (nxt - u) % n or n
            run = tuple(d.edge_id(c, u + s) for s in range(length))
            for e in run:
                edge_arc[e] = len(arc_list)
            arc_list.append(run)
    incidences = {}
    for rec in d.crossings():
        if rec.kind == "real":
            incidences[rec.id] = (edge_arc[rec.under_in], edge_arc[rec.over_in], edge_arc[rec.under_out])
    return ArcData(tuple(arc_list), tuple(edge_arc), incidences)


def writhe(d: LinkDiagram) -> int:
    return sum(d.signs.values())


def framings(d: LinkDiagram) -> list[int]:
    """Blackboard framing of each component: signed count of its self-crossings."""
    owner: dict[int, set[int]] = {}
    for c, _, p in d.passages():
        owner.setdefault(p.crossing, set()).add(c)
    out = [0] * len(d.components)
    for x, s in d.signs.items():
        if len(owner[x]) == 1:
            out[next(iter(owner[x]))] += s
    return out


def fundamental_rack(d: LinkDiagram) -> PresentedRack:
    """One generator per arc; ``under_out = under_in^over`` at positive
    crossings and ``under_in = under_out^over`` at negative ones."""
    data = arcs(d)
    rels = []
    for x in sorted(data.incidences):
        a, b, c = data.incidences[x]
        rels.append((a, b, c) if d.signs[x] > 0 else (c, b, a))
    return PresentedRack(tuple(range(len(data))), tuple(rels))


@dataclass(frozen=True)
class Labelling:
    """Assignment arc id -> rack element."""

    labels: dict[int, int]
    rack: Rack

    def violations(self, d: LinkDiagram) -> list[int]:
        data = arcs(d)
        if set(self.labels) != set(range(len(data))):
            raise DiagramError(f"labelling covers arcs {sorted(self.labels)}, diagram has {len(data)}")
        bad = []
        for x in sorted(data.incidences):
            a, b, c = (self.labels[i] for i in data.incidences[x])
            ok = self.rack.op(a, b) == c if d.signs[x] > 0 else self.rack.op(c, b) == a
            if not ok:
                bad.append(x)
        return bad

    def dumps(self, rack_ref: str) -> str:
        return json.dumps({"rack": rack_ref, "labels": {str(k): v for k, v in sorted(self.labels.items())}})


def load_labelling(text: str, base_dir: str | Path = ".") -> Labelling:
    """Read ``{"rack": <path or kind:params>, "labels": {"<arc>": element}}``."""
    doc = json.loads(text)
    ref = doc["rack"]
    path = Path(base_dir) / ref
    rack = load_rack(path.read_text()) if path.is_file() else parse_rack_spec(ref)
    labels = {int(k): int(v) for k, v in doc["labels"].items()}
    for k, v in labels.items():
        if not 0 <= v < rack.size:
            raise DiagramError(f"label {v} of arc {k} is not an element of the rack")
    return Labelling(labels, rack)


def colorings(d: LinkDiagram, rack: Rack, mode: str = "count"):
    """Count or list the labellings of ``d`` by ``rack``."""
    pres = fundamental_rack(d)
    if mode == "count":
        return enumerate_homs(pres, rack, "count")
    if mode == "list":
        return [Labelling(h, rack) for h in enumerate_homs(pres, rack, "list")]
    raise ValueError(f"mode must be 'count' or 'list', not {mode!r}")
