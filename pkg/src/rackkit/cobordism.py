"""Labelled diagram moves, the second-homology class of a labelled diagram,
and a bounded search for reductions.

Labels live on edges (segments between consecutive passages).  They are
constant through over and virtual passages and change at under passages:
``out = in^over`` at a positive crossing and ``in = out^over`` at a negative
one.  Moves act on the Gauss code, so diagrams are virtual and planarity is
never checked.

Move kinds and their sites (edge ids refer to the diagram the move acts on):

=======  ===================  ==========================================
kind     site                 params
=======  ===================  ==========================================
Birth    ``-``                ``label``
Death    edge of a circle
Bridge   two edges            (a single edge splits off a circle)
R2+      over edge, under     ``sign`` of the first crossing met by the
         edge                 over strand, ``parallel``, ``under_first``
R2-      two crossings
R3       three crossings
R11+     edge                 ``sign`` of the first kink, ``first`` = O|U
R11-     two crossings
=======  ===================  ==========================================
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .cubical import build_rack_space
from .diagrams import Labelling, LinkDiagram, Passage, arcs
from .homology import ChainComplex, HomologyClass, chain_complex, cycle_coordinates
from .racks import Rack, make_rack

__all__ = [
    "LabelledDiagram",
    "Move",
    "MoveError",
    "ReduceResult",
    "apply_move",
    "apply_move_with_inverse",
    "canonical_form",
    "compatible_moves",
    "crossing_chain",
    "cycle_class",
    "format_trace",
    "forget_labels",
    "parse_move",
    "parse_trace",
    "reduce",
]

KINDS = ("Birth", "Death", "Bridge", "R2+", "R2-", "R3", "R11+", "R11-")


class MoveError(ValueError):
    """The move does not apply at the requested site."""


class LabellingError(ValueError):
    pass


@dataclass(frozen=True)
class Move:
    kind: str
    site: tuple[int, ...] = ()
    params: tuple[tuple[str, int | str], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MoveError(f"unknown move kind {self.kind!r}")
        object.__setattr__(self, "site", tuple(self.site))
        object.__setattr__(self, "params", tuple(sorted(dict(self.params).items())))

    def param(self, key: str, default=None):
        return dict(self.params).get(key, default)

    def __str__(self) -> str:
        site = ",".join(str(s) for s in self.site) or "-"
        extra = "".join(f" {k}={v}" for k, v in self.params)
        return f"{self.kind} @ {site}{extra}"


def parse_move(line: str) -> Move:
    head, sep, rest = line.partition("@")
    kind = head.strip()
    if not sep:
        raise MoveError(f"move line {line!r} has no '@'")
    parts = rest.split()
    if not parts:
        raise MoveError(f"move line {line!r} has no site")
    site = () if parts[0] == "-" else tuple(int(s) for s in parts[0].split(","))
    params = []
    for tok in parts[1:]:
        key, eq, value = tok.partition("=")
        if not eq:
            raise MoveError(f"bad move parameter {tok!r}")
        params.append((key, int(value) if value.lstrip("+-").isdigit() else value))
    return Move(kind, site, tuple(params))


def format_trace(moves: Iterable[Move]) -> str:
    return "".join(f"{m}\n" for m in moves)


def parse_trace(text: str) -> list[Move]:
    return [parse_move(ln) for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


class LabelledDiagram:
    """A diagram without virtual crossings together with a consistent edge labelling."""

    def __init__(self, diagram: LinkDiagram, rack: Rack, edge_labels: Sequence[int]):
        if diagram.virtual_crossings:
            diagram = diagram.without_virtual()
            if len(edge_labels) != diagram.edge_count:
                raise LabellingError("edge labels were given for the diagram with virtual crossings")
        self.diagram = diagram
        self.rack = rack
        self.edge_labels = tuple(int(v) for v in edge_labels)
        if len(self.edge_labels) != diagram.edge_count:
            raise LabellingError(f"{len(self.edge_labels)} labels for {diagram.edge_count} edges")
        for v in self.edge_labels:
            if not 0 <= v < rack.size:
                raise LabellingError(f"label {v} is not an element of the rack")
        self._check()

    def _check(self) -> None:
        d, lab, rack = self.diagram, self.edge_labels, self.rack
        over = {}
        for c, i, p in d.passages():
            if p.role == "O":
                over[p.crossing] = lab[d.edge_id(c, i)]
        for c, i, p in d.passages():
            lin, lout = lab[d.edge_id(c, i - 1)], lab[d.edge_id(c, i)]
            if p.role == "O":
                if lin != lout:
                    raise LabellingError(f"label changes across the over passage of crossing {p.crossing}")
            elif rack.act(lin, over[p.crossing], d.signs[p.crossing]) != lout:
                raise LabellingError(f"crossing {p.crossing} violates the rack relation")

    @classmethod
    def from_labelling(cls, diagram: LinkDiagram, labelling: Labelling) -> LabelledDiagram:
        d = diagram.without_virtual()
        data = arcs(diagram)
        # arcs of the original diagram become arcs of the virtual-free one edge by edge
        edge_labels = []
        for c, comp in enumerate(diagram.components):
            real = [i for i, p in enumerate(comp) if p.role != "V"] or [0]
            for i in real:
                edge_labels.append(labelling.labels[data.edge_arc[diagram.edge_id(c, i)]])
        return cls(d, labelling.rack, edge_labels)

    @property
    def labelling(self) -> Labelling:
        data = arcs(self.diagram)
        return Labelling({a: self.edge_labels[edges[0]] for a, edges in enumerate(data.arcs)}, self.rack)

    @property
    def crossing_count(self) -> int:
        return len(self.diagram.signs)

    def label(self, edge: int) -> int:
        return self.edge_labels[edge]

    def labels_used(self) -> set[int]:
        return set(self.edge_labels)

    def __repr__(self) -> str:
        from .diagrams import print_gauss
        return f"LabelledDiagram({print_gauss(self.diagram)!r}, labels={list(self.edge_labels)})"


def forget_labels(ld: LabelledDiagram) -> LabelledDiagram:
    """Push the labelling along the unique map to the one-element rack."""
    return LabelledDiagram(ld.diagram, make_rack("trivial", n=1), [0] * len(ld.edge_labels))


# second homology class ----------------------------------------------------------

_complexes: dict[Rack, ChainComplex] = {}


def _rack_complex(rack: Rack) -> ChainComplex:
    cc = _complexes.get(rack)
    if cc is None:
        cc = _complexes[rack] = chain_complex(build_rack_space(rack, 3))
    return cc


def _square(ld: LabelledDiagram, x: int) -> tuple[int, int]:
    """(a, b) with a^b naming the other under label; a is under-in at a
    positive crossing and under-out at a negative one."""
    d = ld.diagram
    under_in = under_out = over = None
    for c, i, p in d.passages():
        if p.crossing == x:
            if p.role == "O":
                over = ld.edge_labels[d.edge_id(c, i)]
            else:
                under_in, under_out = ld.edge_labels[d.edge_id(c, i - 1)], ld.edge_labels[d.edge_id(c, i)]
    return (under_in, over) if d.signs[x] > 0 else (under_out, over)


def crossing_chain(ld: LabelledDiagram) -> list[int]:
    """The 2-chain ``sum sign * (a, b)`` in the rack space, as dense coefficients."""
    n = ld.rack.size
    z = [0] * (n * n)
    d = ld.diagram
    under: dict[int, tuple[int, int]] = {}
    over: dict[int, int] = {}
    for c, i, p in d.passages():
        if p.role == "O":
            over[p.crossing] = ld.edge_labels[d.edge_id(c, i)]
        else:
            under[p.crossing] = (ld.edge_labels[d.edge_id(c, i - 1)], ld.edge_labels[d.edge_id(c, i)])
    for x, s in d.signs.items():
        a = under[x][0] if s > 0 else under[x][1]
        z[a * n + over[x]] += s
    return z


def cycle_class(ld: LabelledDiagram) -> HomologyClass:
    """Class of the crossing chain in H_2 of the rack space of ``ld.rack``."""
    return cycle_coordinates(_rack_complex(ld.rack), 2, crossing_chain(ld))


# mutable working copy -------------------------------------------------------------


class _State:
    def __init__(self, ld: LabelledDiagram):
        d = ld.diagram
        self.rack = ld.rack
        self.signs = dict(d.signs)
        self.comps = [list(c) for c in d.components]
        self.labs = []
        for c, comp in enumerate(d.components):
            self.labs.append([ld.edge_labels[d.edge_id(c, i)] for i in range(max(len(comp), 1))])
        self.diagram = d
        self._where = None

    def locate(self, x: int, role: str) -> tuple[int, int]:
        if self._where is None:
            self._where = {p: (c, i) for c, comp in enumerate(self.comps) for i, p in enumerate(comp)}
        try:
            return self._where[Passage(x, role)]
        except KeyError:
            raise MoveError(f"crossing {x} has no {role} passage") from None

    def entering(self, c: int, i: int) -> int:
        return self.labs[c][(i - 1) % len(self.labs[c])]

    def edge(self, e: int) -> tuple[int, int]:
        try:
            return self.diagram.edge_position(e)
        except IndexError:
            raise MoveError(f"edge {e} does not exist") from None

    def new_ids(self, k: int) -> list[int]:
        top = max(self.signs, default=0)
        return [top + 1 + j for j in range(k)]

    def insert(self, c: int, i: int, items: list[tuple[Passage, int]]) -> None:
        """Insert passages (with leaving labels) on the edge leaving passage i."""
        self._where = None
        comp, labs = self.comps[c], self.labs[c]
        if not comp:
            if items[-1][1] != labs[0]:
                raise AssertionError("inserted block does not close up")
            self.comps[c] = [p for p, _ in items]
            self.labs[c] = [v for _, v in items]
            return
        at = i + 1
        comp[at:at] = [p for p, _ in items]
        labs[at:at] = [v for _, v in items]

    def remove(self, positions: list[tuple[int, int]], starts: dict[int, int]) -> None:
        """Delete passages; a component left empty keeps the label entering
        the removed run that begins at ``starts[c]``."""
        self._where = None
        by_comp: dict[int, list[int]] = {}
        for c, i in positions:
            self.signs.pop(self.comps[c][i].crossing, None)
            by_comp.setdefault(c, []).append(i)
        for c, idxs in by_comp.items():
            comp, labs = self.comps[c], self.labs[c]
            keep = [j for j in range(len(comp)) if j not in set(idxs)]
            if not keep:
                self.comps[c], self.labs[c] = [], [labs[starts[c] - 1]]
            else:
                self.comps[c] = [comp[j] for j in keep]
                self.labs[c] = [labs[j] for j in keep]

    def over_label(self, x: int) -> int:
        c, i = self.locate(x, "O")
        return self.labs[c][i]

    def build(self) -> LabelledDiagram:
        d = LinkDiagram(self.comps, self.signs)
        labels = [v for labs in self.labs for v in labs]
        try:
            return LabelledDiagram(d, self.rack, labels)
        except LabellingError as exc:
            raise AssertionError(f"move produced an inconsistent labelling: {exc}") from None

    def edge_after(self, marker: Passage | None, comp_index: int, ld: LabelledDiagram) -> int:
        """Edge id in ``ld`` leaving ``marker``, or the circle edge of ``comp_index``."""
        d = ld.diagram
        if marker is None:
            return d.edge_id(comp_index, 0)
        for c, i, p in d.passages():
            if p == marker:
                return d.edge_id(c, i)
        raise AssertionError("marker passage vanished")


def _adjacent(st: _State, p: tuple[int, int], q: tuple[int, int]) -> bool:
    """Whether passage q immediately follows passage p on its component."""
    return p[0] == q[0] and (p[1] + 1) % len(st.comps[p[0]]) == q[1]


def _survivor_before(st: _State, c: int, i: int, removed: set[int]) -> Passage | None:
    comp = st.comps[c]
    for step in range(1, len(comp) + 1):
        j = (i - step) % len(comp)
        if j not in removed:
            return comp[j]
    return None


def _solve_kink(rack: Rack, a: int, sign: int, first: str) -> int:
    """Label leaving a one-crossing kink entered with label ``a``."""
    if first == "O":
        return rack.act(a, a, sign)
    # under passage first: under-in a, over and under-out share the label b
    sols = [b for b in range(rack.size) if rack.act(a, b, sign) == b]
    if len(sols) != 1:
        raise AssertionError(f"kink label equation has {len(sols)} solutions")
    return sols[0]


# individual moves -----------------------------------------------------------------


def _birth(st: _State, m: Move, ld: LabelledDiagram):
    x = m.param("label")
    if x is None or not 0 <= int(x) < st.rack.size:
        raise MoveError("birth needs a label that is a rack element")
    st.comps.append([])
    st.labs.append([int(x)])
    out = st.build()
    return out, Move("Death", (out.diagram.edge_count - 1,))


def _death(st: _State, m: Move, ld: LabelledDiagram):
    (e,) = _site(m, 1)
    c, _ = st.edge(e)
    if st.comps[c]:
        raise MoveError(f"death needs a crossingless circle; edge {e} lies on a component with crossings")
    label = st.labs[c][0]
    del st.comps[c], st.labs[c]
    return st.build(), Move("Birth", (), (("label", label),))


def _bridge(st: _State, m: Move, ld: LabelledDiagram):
    e1, e2 = _site(m, 2)
    (c1, i1), (c2, i2) = st.edge(e1), st.edge(e2)
    if ld.edge_labels[e1] != ld.edge_labels[e2]:
        raise MoveError(f"bridge needs equal labels; edges {e1},{e2} carry "
                        f"{ld.edge_labels[e1]},{ld.edge_labels[e2]}")
    label = ld.edge_labels[e1]
    if c1 != c2:
        def rotated(c: int, i: int):
            comp, labs = st.comps[c], st.labs[c]
            if not comp:
                return [], []
            k = (i + 1) % len(comp)
            return comp[k:] + comp[:k], labs[k:] + labs[:k]

        p1, l1 = rotated(c1, i1)
        p2, l2 = rotated(c2, i2)
        lo, hi = min(c1, c2), max(c1, c2)
        merged, mlabs = p1 + p2, l1 + l2
        st.comps[lo], st.labs[lo] = merged, mlabs if merged else [label]
        del st.comps[hi], st.labs[hi]
        out = st.build()
        if p1 and p2:
            inv = (out.diagram.edge_id(lo, len(p1) - 1), out.diagram.edge_id(lo, len(merged) - 1))
        else:
            e = out.diagram.edge_id(lo, len(merged) - 1 if merged else 0)
            inv = (e, e)
        return out, Move("Bridge", inv)
    comp, labs = st.comps[c1], st.labs[c1]
    n = len(comp)
    if n == 0:
        st.comps.append([])
        st.labs.append([label])
    else:
        la = (i2 - i1) % n
        a_idx = [(i1 + 1 + s) % n for s in range(la)]
        b_idx = [(i2 + 1 + s) % n for s in range(n - la)]
        pa, pb = [comp[j] for j in a_idx], [comp[j] for j in b_idx]
        st.comps[c1] = pa
        st.labs[c1] = [labs[j] for j in a_idx] if pa else [label]
        st.comps.append(pb)
        st.labs.append([labs[j] for j in b_idx] if pb else [label])
    out = st.build()
    d = out.diagram
    last = len(st.comps) - 1
    ea = d.edge_id(c1, max(len(st.comps[c1]), 1) - 1)
    eb = d.edge_id(last, max(len(st.comps[last]), 1) - 1)
    return out, Move("Bridge", (ea, eb))


def _r2_plus(st: _State, m: Move, ld: LabelledDiagram):
    eo, eu = _site(m, 2)
    sign = int(m.param("sign", 1))
    parallel = int(m.param("parallel", 1))
    under_first = int(m.param("under_first", 0))
    if sign not in (1, -1):
        raise MoveError("sign must be +1 or -1")
    (co, io), (cu, iu) = st.edge(eo), st.edge(eu)
    b, a = ld.edge_labels[eo], ld.edge_labels[eu]
    x, y = st.new_ids(2)
    st.signs[x], st.signs[y] = sign, -sign
    over_block = [(Passage(x, "O"), b), (Passage(y, "O"), b)]
    first, second = (x, y) if parallel else (y, x)
    s1 = st.signs[first]
    if eo == eu:
        if under_first:
            mid = st.rack.act(a, b, s1)
            block = [(Passage(first, "U"), mid), (Passage(second, "U"), a)]
            # the over strand now enters with the restored label a == b
            block += over_block
        else:
            mid = st.rack.act(a, b, s1)
            block = over_block + [(Passage(first, "U"), mid), (Passage(second, "U"), a)]
        st.insert(co, io, block)
    else:
        mid = st.rack.act(a, b, s1)
        under_block = [(Passage(first, "U"), mid), (Passage(second, "U"), a)]
        jobs = [(co, io, over_block), (cu, iu, under_block)]
        # insert at the later position first so earlier indices stay valid
        jobs.sort(key=lambda j: (j[0], j[1]), reverse=True)
        for c, i, block in jobs:
            st.insert(c, i, block)
    return st.build(), Move("R2-", (x, y))


def _r2_minus(st: _State, m: Move, ld: LabelledDiagram):
    x, y = _site(m, 2)
    if x == y or x not in st.signs or y not in st.signs:
        raise MoveError("R2- needs two distinct real crossings")
    if st.signs[x] != -st.signs[y]:
        raise MoveError(f"R2- needs opposite signs; crossings {x},{y} have equal signs")
    ox, oy, ux, uy = st.locate(x, "O"), st.locate(y, "O"), st.locate(x, "U"), st.locate(y, "U")
    if not (_adjacent(st, ox, oy) or _adjacent(st, oy, ox)):
        raise MoveError(f"over passages of {x},{y} are not adjacent")
    if not (_adjacent(st, ux, uy) or _adjacent(st, uy, ux)):
        raise MoveError(f"under passages of {x},{y} are not adjacent")
    if _square(ld, x) != _square(ld, y):
        raise MoveError(f"crossings {x},{y} carry different squares")
    o_first = x if _adjacent(st, ox, oy) else y
    u_first = x if _adjacent(st, ux, uy) else y
    if len(st.comps[ox[0]]) == 2:
        o_first = st.comps[ox[0]][0].crossing
    if len(st.comps[ux[0]]) == 2:
        u_first = st.comps[ux[0]][0].crossing
    params = {"sign": st.signs[o_first], "parallel": int(o_first == u_first), "under_first": 0}
    removed = {ox, oy, ux, uy}
    same_edge = False
    if ox[0] == ux[0]:
        comp_len = len(st.comps[ox[0]])
        o_start = ox if o_first == x else oy
        u_start = ux if u_first == x else uy
        # the four passages form one run: over pair then under pair or vice versa
        if (o_start[1] + 2) % comp_len == u_start[1]:
            same_edge = True
        elif (u_start[1] + 2) % comp_len == o_start[1]:
            same_edge = True
            params["under_first"] = 1
    o_start = ox if o_first == x else oy
    u_start = ux if u_first == x else uy
    rm_idx = {c: {i for cc, i in removed if cc == c} for c, _ in removed}
    mo = _survivor_before(st, o_start[0], (u_start if params["under_first"] else o_start)[1]
                          if same_edge else o_start[1], rm_idx[o_start[0]])
    mu = _survivor_before(st, u_start[0], u_start[1], rm_idx[u_start[0]])
    starts = {u_start[0]: u_start[1], o_start[0]: o_start[1]}
    if same_edge:
        starts[o_start[0]] = (u_start if params["under_first"] else o_start)[1]
    st.remove(sorted(removed), starts)
    out = st.build()
    eo = st.edge_after(mo, o_start[0], out)
    eu = eo if same_edge else st.edge_after(mu, u_start[0], out)
    return out, Move("R2+", (eo, eu), tuple(params.items()))


def _r3_roles(st: _State, xs: tuple[int, int, int]):
    """Find (TM, TB, MB) and the order bits making a valid triangle, or None."""
    for tm, tb, mb in itertools.permutations(xs):
        pairs = [(st.locate(tm, "O"), st.locate(tb, "O")),
                 (st.locate(tm, "U"), st.locate(mb, "O")),
                 (st.locate(tb, "U"), st.locate(mb, "U"))]
        options = []
        for p, q in pairs:
            opts = []
            if _adjacent(st, p, q):
                opts.append((p, q, 1))
            if _adjacent(st, q, p):
                opts.append((q, p, 0))
            if not opts:
                break
            options.append(opts)
        else:
            s_tm, s_tb, s_mb = st.signs[tm], st.signs[tb], st.signs[mb]
            for (t, mm, bb) in itertools.product(*options):
                o_t, o_m, o_b = t[2], mm[2], bb[2]
                if s_tb * s_mb == (1 if o_t == o_m else -1) and s_tm * s_mb == (1 if o_t == o_b else -1):
                    return (tm, tb, mb), (t, mm, bb)
    return None


def _r3(st: _State, m: Move, ld: LabelledDiagram):
    xs = _site(m, 3)
    if len(set(xs)) != 3 or any(x not in st.signs for x in xs):
        raise MoveError("R3 needs three distinct real crossings")
    found = _r3_roles(st, xs)
    if found is None:
        raise MoveError(f"crossings {xs} do not form a triangle an R3 move can flip")
    (tm, tb, mb), pairs = found
    expected = []
    for first, second, _ in pairs:
        c = first[0]
        expected.append(st.labs[c][second[1]])
        comp = st.comps[c]
        comp[first[1]], comp[second[1]] = comp[second[1]], comp[first[1]]
    st._where = None
    for (first, second, _), out_label in zip(pairs, expected):
        c, i, j = first[0], first[1], second[1]
        lab = st.entering(c, i)
        for pos in (i, j):
            p = st.comps[c][pos]
            if p.role == "U":
                lab = st.rack.act(lab, st.over_label(p.crossing), st.signs[p.crossing])
            st.labs[c][pos] = lab
        if lab != out_label:
            raise AssertionError("R3 changed a label outside the triangle")
    return st.build(), Move("R3", tuple(xs))


def _r11_plus(st: _State, m: Move, ld: LabelledDiagram):
    (e,) = _site(m, 1)
    sign = int(m.param("sign", 1))
    first = str(m.param("first", "O"))
    if sign not in (1, -1) or first not in ("O", "U"):
        raise MoveError("R11+ needs sign=+1|-1 and first=O|U")
    c, i = st.edge(e)
    a = ld.edge_labels[e]
    x, y = st.new_ids(2)
    st.signs[x], st.signs[y] = sign, -sign
    mid = _solve_kink(st.rack, a, sign, first)
    back = _solve_kink(st.rack, mid, -sign, first)
    if back != a:
        raise AssertionError("opposite kinks do not restore the label")
    second = "U" if first == "O" else "O"
    block = []
    for z, lin, lout in ((x, a, mid), (y, mid, back)):
        if first == "O":
            block += [(Passage(z, "O"), lin), (Passage(z, "U"), lout)]
        else:
            block += [(Passage(z, "U"), lout), (Passage(z, "O"), lout)]
    st.insert(c, i, block)
    return st.build(), Move("R11-", (x, y))


def _r11_minus(st: _State, m: Move, ld: LabelledDiagram):
    x, y = _site(m, 2)
    if x == y or x not in st.signs or y not in st.signs:
        raise MoveError("R11- needs two distinct real crossings")
    if st.signs[x] != -st.signs[y]:
        raise MoveError(f"R11- needs opposite signs; crossings {x},{y} have equal signs")
    kinks = {}
    for z in (x, y):
        o, u = st.locate(z, "O"), st.locate(z, "U")
        if _adjacent(st, o, u):
            kinks[z] = ("O", o, u)
        elif _adjacent(st, u, o):
            kinks[z] = ("U", u, o)
        else:
            raise MoveError(f"crossing {z} is not a kink")
    if kinks[x][0] != kinks[y][0]:
        raise MoveError("R11- needs two kinks of the same type")
    if _adjacent(st, kinks[x][2], kinks[y][1]):
        lead = x
    elif _adjacent(st, kinks[y][2], kinks[x][1]):
        lead = y
    else:
        raise MoveError(f"kinks {x},{y} are not consecutive")
    first = kinks[lead][1]
    removed = [kinks[x][1], kinks[x][2], kinks[y][1], kinks[y][2]]
    marker = _survivor_before(st, first[0], first[1], {i for _, i in removed})
    params = (("sign", st.signs[lead]), ("first", kinks[lead][0]))
    st.remove(removed, {first[0]: first[1]})
    out = st.build()
    return out, Move("R11+", (st.edge_after(marker, first[0], out),), params)


def _site(m: Move, n: int) -> tuple[int, ...]:
    if len(m.site) != n:
        raise MoveError(f"{m.kind} needs a site of {n} entries, got {m.site}")
    return m.site


_HANDLERS = {
    "Birth": _birth, "Death": _death, "Bridge": _bridge, "R2+": _r2_plus,
    "R2-": _r2_minus, "R3": _r3, "R11+": _r11_plus, "R11-": _r11_minus,
}


def apply_move_with_inverse(ld: LabelledDiagram, m: Move,
                            allowed_labels: set[int] | None = None) -> tuple[LabelledDiagram, Move]:
    """Apply ``m`` and return the result with a move undoing it."""
    out, inv = _HANDLERS[m.kind](_State(ld), m, ld)
    if allowed_labels is not None:
        extra = out.labels_used() - set(allowed_labels)
        if extra:
            raise MoveError(f"move introduces colours {sorted(extra)} outside the allowed scheme")
    return out, inv


def apply_move(ld: LabelledDiagram, m: Move, allowed_labels: set[int] | None = None) -> LabelledDiagram:
    return apply_move_with_inverse(ld, m, allowed_labels)[0]


# enumeration of compatible moves ---------------------------------------------------


def compatible_moves(ld: LabelledDiagram, kinds: Iterable[str] = KINDS,
                     allowed_labels: set[int] | None = None) -> Iterator[Move]:
    """Every move of the given kinds that applies to ``ld`` (births use the
    allowed labels, or every rack element)."""
    kinds = set(kinds)
    d = ld.diagram
    st = _State(ld)
    labels = sorted(allowed_labels) if allowed_labels is not None else list(range(ld.rack.size))
    xs = sorted(d.signs)
    if "R2-" in kinds:
        for x, y in itertools.combinations(xs, 2):
            if d.signs[x] == -d.signs[y]:
                ox, oy, ux, uy = st.locate(x, "O"), st.locate(y, "O"), st.locate(x, "U"), st.locate(y, "U")
                if ((_adjacent(st, ox, oy) or _adjacent(st, oy, ox))
                        and (_adjacent(st, ux, uy) or _adjacent(st, uy, ux))
                        and _square(ld, x) == _square(ld, y)):
                    yield Move("R2-", (x, y))
    if "R11-" in kinds:
        for x, y in itertools.permutations(xs, 2):
            if d.signs[x] == -d.signs[y]:
                try:
                    _r11_minus(_State(ld), Move("R11-", (x, y)), ld)
                except MoveError:
                    continue
                if x < y:
                    yield Move("R11-", (x, y))
    if "Death" in kinds:
        for c, comp in enumerate(d.components):
            if not comp:
                yield Move("Death", (d.edge_id(c, 0),))
    if "R3" in kinds:
        near: dict[int, set[int]] = {x: set() for x in xs}
        for comp in d.components:
            for p, q in zip(comp, comp[1:] + comp[:1]):
                if p.crossing != q.crossing:
                    near[p.crossing].add(q.crossing)
                    near[q.crossing].add(p.crossing)
        for x in xs:
            for y, z in itertools.combinations(sorted(v for v in near[x] if v > x), 2):
                if z in near[y] and _r3_roles(st, (x, y, z)) is not None:
                    yield Move("R3", (x, y, z))
    edges = range(d.edge_count)
    if "Bridge" in kinds:
        for e1, e2 in itertools.combinations_with_replacement(edges, 2):
            if ld.edge_labels[e1] == ld.edge_labels[e2]:
                yield Move("Bridge", (e1, e2))
    if "R2+" in kinds:
        for eo, eu in itertools.product(edges, repeat=2):
            for sign, parallel in itertools.product((1, -1), (1, 0)):
                params = [("sign", sign), ("parallel", parallel)]
                yield Move("R2+", (eo, eu), tuple(params))
                if eo == eu:
                    yield Move("R2+", (eo, eu), tuple(params + [("under_first", 1)]))
    if "R11+" in kinds:
        for e in edges:
            for sign, first in itertools.product((1, -1), ("O", "U")):
                yield Move("R11+", (e,), (("sign", sign), ("first", first)))
    if "Birth" in kinds:
        for v in labels:
            yield Move("Birth", (), (("label", v),))


# canonical form --------------------------------------------------------------------


def canonical_form(ld: LabelledDiagram) -> tuple:
    """Invariant of the labelled Gauss code under renaming crossings, rotating
    components and reordering components; equal forms mean isomorphic diagrams."""
    st = _State(ld)
    circles = tuple(sorted(st.labs[c][0] for c, comp in enumerate(st.comps) if not comp))
    where: dict[Passage, tuple[int, int]] = {}
    for c, comp in enumerate(st.comps):
        for i, p in enumerate(comp):
            where[p] = (c, i)
    # connected pieces: components sharing crossings
    parent = list(range(len(st.comps)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in st.signs:
        a, b = find(where[Passage(x, "O")][0]), find(where[Passage(x, "U")][0])
        parent[a] = b
    pieces: dict[int, list[int]] = {}
    for c, comp in enumerate(st.comps):
        if comp:
            pieces.setdefault(find(c), []).append(c)

    def encode(c0: int, i0: int) -> tuple:
        ids: dict[int, int] = {}
        out = []
        done = set()
        start = (c0, i0)
        while start is not None:
            c, i = start
            done.add(c)
            comp, labs = st.comps[c], st.labs[c]
            n = len(comp)
            for s in range(n):
                p = comp[(i + s) % n]
                if p.crossing not in ids:
                    ids[p.crossing] = len(ids)
                out.append((ids[p.crossing], p.role, st.signs[p.crossing], labs[(i + s) % n]))
            out.append(None)
            start = None
            for x, _ in sorted(ids.items(), key=lambda kv: kv[1]):
                for role in ("O", "U"):
                    cc, ii = where[Passage(x, role)]
                    if cc not in done:
                        start = (cc, ii)
                        break
                if start is not None:
                    break
        return tuple((-1, "", 0, 0) if t is None else t for t in out)

    codes = []
    for members in pieces.values():
        codes.append(min(encode(c, i) for c in members for i in range(len(st.comps[c]))))
    return tuple(sorted(codes)), circles


# reduction search ------------------------------------------------------------------


@dataclass
class ReduceResult:
    """Outcome of :func:`reduce`.

    ``reduced`` is True when the empty diagram was reached; otherwise
    ``diagram`` is the smallest diagram found (by crossing count) and nothing
    is claimed about the input.  ``complete`` is True when the search stopped
    because every bounded round was exhausted rather than the budget.
    """

    diagram: LabelledDiagram
    trace: list[Move]
    reduced: bool
    steps: int
    complete: bool = False

    @property
    def exhausted(self) -> bool:
        return not self.reduced


def _finish(ld: LabelledDiagram, trace: list[Move]) -> tuple[LabelledDiagram, list[Move]]:
    """Kill crossingless circles once no crossings remain."""
    trace = list(trace)
    while ld.diagram.components:
        m = Move("Death", (0,))
        ld = apply_move(ld, m)
        trace.append(m)
    return ld, trace


def _circles(ld: LabelledDiagram) -> int:
    return sum(1 for comp in ld.diagram.components if not comp)


def reduce(ld: LabelledDiagram, budget: int = 1000, scheme_colours_only: bool = False,
           kinds: Sequence[str] = KINDS, max_slack: int = 8) -> ReduceResult:
    """Search for a move sequence taking ``ld`` to the empty diagram.

    Rounds of best-first search (fewest crossings first) let the crossing
    count exceed the input by 0, 2, ..., ``max_slack`` and allow one more
    crossingless circle per round.  ``budget`` bounds the total number of
    move applications.  With ``scheme_colours_only`` no move may use a label
    absent from the input.
    """
    allowed = ld.labels_used() if scheme_colours_only else None
    start_n = ld.crossing_count
    if start_n == 0:
        out, trace = _finish(ld, [])
        return ReduceResult(out, trace, True, 0, True)
    best = (start_n, ld, [])
    steps = 0
    for slack in range(0, max_slack + 1, 2):
        cap = start_n + slack
        max_circles = _circles(ld) + 1 + slack // 2
        seen = {canonical_form(ld)}
        heap = [(start_n, 0, 0, ld, [])]
        counter = itertools.count(1)
        while heap:
            n, depth, _, cur, trace = heapq.heappop(heap)
            here = [k for k in kinds if not (k in ("R2+", "R11+") and n + 2 > cap)]
            if _circles(cur) >= max_circles:
                here = [k for k in here if k != "Birth"]
            for m in compatible_moves(cur, here, allowed):
                if steps >= budget:
                    return ReduceResult(best[1], best[2], False, steps, False)
                steps += 1
                try:
                    nxt = apply_move(cur, m, allowed)
                except MoveError:
                    continue
                key = canonical_form(nxt)
                if key in seen:
                    continue
                seen.add(key)
                path = trace + [m]
                if nxt.crossing_count < best[0]:
                    best = (nxt.crossing_count, nxt, path)
                if nxt.crossing_count == 0:
                    out, full = _finish(nxt, path)
                    return ReduceResult(out, full, True, steps, False)
                heapq.heappush(heap, (nxt.crossing_count, depth + 1, next(counter), nxt, path))
    return ReduceResult(best[1], best[2], False, steps, True)
