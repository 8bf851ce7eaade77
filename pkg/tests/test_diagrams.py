import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import random_diagram
from rackkit.diagrams import (
    DiagramError,
    LinkDiagram,
    ParseError,
    Passage,
    arcs,
    colorings,
    framings,
    fundamental_rack,
    load_labelling,
    parse_gauss,
    parse_pd,
    print_gauss,
    print_pd,
    writhe,
)
from rackkit.racks import make_rack

TREFOIL = "O1+ U2+ O3+ U1+ O2+ U3+"
TREFOIL_PD = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"
FIGURE_EIGHT_PD = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]"
VIRTUAL_TREFOIL = "O1- O2- U1- U2-"


def brute_colorings(d: LinkDiagram, rack) -> int:
    """Count edge labellings obeying the crossing rules by exhaustive search."""
    n = d.edge_count
    count = 0
    for labels in itertools.product(range(rack.size), repeat=n):
        over = {}
        ok = True
        for c, i, p in d.passages():
            if p.role == "O":
                over[p.crossing] = labels[d.edge_id(c, i)]
        for c, i, p in d.passages():
            lin, lout = labels[d.edge_id(c, i - 1)], labels[d.edge_id(c, i)]
            if p.role in ("O", "V"):
                ok = lin == lout
            elif d.signs[p.crossing] > 0:
                ok = rack.op(lin, over[p.crossing]) == lout
            else:
                ok = rack.op(lout, over[p.crossing]) == lin
            if not ok:
                break
        count += ok
    return count


def test_trefoil_gauss():
    d = parse_gauss(TREFOIL)
    assert writhe(d) == 3
    assert len(arcs(d)) == 3
    assert colorings(d, make_rack("dihedral", n=3)) == 9
    assert brute_colorings(d, make_rack("dihedral", n=3)) == 9


def test_trefoil_pd():
    d = parse_pd(TREFOIL_PD)
    assert len(d.components) == 1
    assert writhe(d) == -3
    assert colorings(d, make_rack("dihedral", n=3)) == 9


def test_figure_eight():
    d = parse_pd(FIGURE_EIGHT_PD)
    assert writhe(d) == 0
    assert colorings(d, make_rack("dihedral", n=3)) == 3
    assert brute_colorings(d, make_rack("dihedral", n=3)) == 3
    assert colorings(d, make_rack("dihedral", n=5)) == 25


@pytest.mark.parametrize("size", [1, 2, 3, 4])
def test_unknot_colorings(size):
    for text in ["o", "O1+ U1+", "U1- O1-"]:
        d = parse_gauss(text)
        for r in (make_rack("dihedral", n=size), make_rack("trivial", n=size)):
            assert colorings(d, r) == size
    # a one-crossing unknot in PD form
    assert colorings(parse_pd("X[1,1,2,2]"), make_rack("dihedral", n=size)) == size


def test_virtual_trefoil():
    d = parse_gauss(VIRTUAL_TREFOIL)
    assert len(arcs(d)) == 2
    assert colorings(d, make_rack("dihedral", n=3)) == brute_colorings(d, make_rack("dihedral", n=3))


def test_virtual_pd_crossing():
    d = parse_pd("X[1,3,2,4] V[2,4,3,1]")
    assert d.virtual_crossings == [2]
    assert d.real_crossings == [1]
    r = make_rack("dihedral", n=3)
    assert colorings(d, r) == brute_colorings(d, r)
    again = parse_pd(print_pd(d))
    assert again.virtual_crossings == [2]


def test_fundamental_rack_of_trefoil():
    pres = fundamental_rack(parse_gauss(TREFOIL))
    assert len(pres.generators) == 3
    assert len(pres.relations) == 3
    assert fundamental_rack(parse_gauss("o / o")).relations == ()


def test_framings():
    d = parse_gauss("O1+ U2- / U1+ O2- / o")
    assert framings(d) == [0, 0, 0]
    assert framings(parse_gauss("O1+ U1+ / O2- U2-")) == [1, -1]


def test_gauss_errors_have_positions():
    with pytest.raises(ParseError) as info:
        parse_gauss("O1+ U1+ X3+")
    assert info.value.position == 2
    with pytest.raises(ParseError):
        parse_gauss("O1+ U1-")
    with pytest.raises(ParseError):
        parse_gauss("O1+ O1+")
    with pytest.raises(DiagramError):
        parse_gauss("O1+ U2+")


def test_pd_errors():
    with pytest.raises(ParseError):
        parse_pd("X[1,2,3]")
    with pytest.raises(DiagramError):
        parse_pd("X[1,2,3,4]")


def test_pd_round_trip():
    for text in (TREFOIL_PD, FIGURE_EIGHT_PD):
        d = parse_pd(text)
        again = parse_pd(print_pd(d))
        assert print_gauss(again).split() and writhe(again) == writhe(d)
        assert colorings(again, make_rack("dihedral", n=5)) == colorings(d, make_rack("dihedral", n=5))


def test_empty_diagram():
    d = parse_gauss("")
    assert d.components == () and print_gauss(d) == ""


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 6), st.integers(1, 3))
def test_gauss_round_trip(seed, k, comps):
    d = random_diagram(random.Random(seed), k, comps)
    assert parse_gauss(print_gauss(d)) == d


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 3), st.integers(1, 2))
def test_colorings_match_brute_force(seed, k, comps):
    rng = random.Random(seed)
    d = random_diagram(rng, k, comps)
    r = rng.choice([make_rack("dihedral", n=3), make_rack("cyclic", n=2), make_rack("dihedral", n=4)])
    assert colorings(d, r) == brute_colorings(d, r)


def test_labelling_file(tmp_path):
    (tmp_path / "d3.json").write_text(json.dumps({"size": 3, "table": [[0, 2, 1], [2, 1, 0], [1, 0, 2]]}))
    d = parse_gauss(TREFOIL)
    lab = load_labelling(json.dumps({"rack": "d3.json", "labels": {"0": 0, "1": 1, "2": 2}}), tmp_path)
    assert lab.violations(d) == []
    bad = load_labelling(json.dumps({"rack": "dihedral:3", "labels": {"0": 0, "1": 0, "2": 1}}))
    assert bad.violations(d)
    with pytest.raises(DiagramError):
        load_labelling(json.dumps({"rack": "dihedral:3", "labels": {"0": 7}}))


def test_passage_roles_validated():
    with pytest.raises(DiagramError):
        LinkDiagram([[Passage(1, "O"), Passage(1, "O")]], {1: 1})


def test_single_crossing_pd_codes():
    # under strand 1 -> 1 and over strand 2 -> 2 close up separately
    d = parse_pd("X[1,2,1,2]")
    assert len(d.components) == 2 and abs(writhe(d)) == 1
    for text in ("X[1,1,2,2]", "X[2,1,1,2]", "X[1,2,2,1]"):
        d = parse_pd(text)
        assert len(d.components) == 1 and abs(writhe(d)) == 1 and len(arcs(d)) == 1
