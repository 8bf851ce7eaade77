import itertools
import random
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import random_rack, small_racks
from rackkit.cubical import (
    CubicalSet,
    Projection,
    build_extended_rack_space,
    build_rack_space,
    dump_cubical,
    james_complex,
    james_level,
    load_cubical,
    trivial_cubical_set,
    validate_cubical,
)
from rackkit.racks import make_rack


def face_by_hand(rack, cell, i, eps):
    """Reference face map on coordinate tuples."""
    x = list(cell)
    xi = x[i - 1]
    rest = x[:i - 1] + x[i:]
    if eps:
        rest = [rack.op(y, xi) for y in x[:i - 1]] + x[i:]
    return tuple(rest)


def index_of(t, n):
    v = 0
    for d in t:
        v = v * n + d
    return v


def test_counts():
    cs = build_rack_space(make_rack("dihedral", n=3), 4)
    assert cs.counts == [1, 3, 9, 27, 81]
    assert cs.cell(2, 5) == (1, 2)


def test_faces_match_definition():
    r = make_rack("dihedral", n=4)
    cs = build_rack_space(r, 3)
    for k in range(1, 4):
        for cell in itertools.product(range(4), repeat=k):
            idx = index_of(cell, 4)
            for i in range(1, k + 1):
                for eps in (0, 1):
                    assert cs.face(k, idx, i, eps) == index_of(face_by_hand(r, cell, i, eps), 4)


def test_extended_faces_shift():
    r = make_rack("cyclic", n=3)
    bx = build_rack_space(r, 4)
    ex = build_extended_rack_space(r, 3)
    for m in range(1, 4):
        assert ex.counts[m] == bx.counts[m + 1]
        for c in range(ex.counts[m]):
            for j in range(1, m + 1):
                for eps in (0, 1):
                    assert ex.face(m, c, j, eps) == bx.face(m + 1, c, j + 1, eps)
    assert ex.cell(1, 4) == (1, (1,))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_rack_spaces_are_cubical(seed):
    r = random_rack(random.Random(seed), 5)
    assert validate_cubical(build_rack_space(r, 3)) == []
    assert validate_cubical(build_extended_rack_space(r, 2)) == []


def test_small_racks_exhaustively_cubical():
    for r in small_racks():
        dim = 4 if r.size <= 3 else 3
        assert validate_cubical(build_rack_space(r, dim)) == []


def test_validator_finds_corruption():
    cs = build_rack_space(make_rack("dihedral", n=3), 3)
    faces = [f.copy() for f in cs.faces]
    faces[2][4, 1, 1] = (faces[2][4, 1, 1] + 1) % 3
    bad = validate_cubical(CubicalSet(faces))
    assert bad and bad[0].dim in (2, 3)
    # a non-rack table breaks the identity
    table = [[1, 0, 0], [2, 1, 1], [0, 2, 2]]
    from rackkit.racks import Rack
    fake = Rack(table, check=False)
    assert validate_cubical(build_rack_space(fake, 3))


def test_trivial_cubical_set():
    cs = trivial_cubical_set(3)
    assert cs.counts == [1, 1, 1, 1]
    assert validate_cubical(cs) == []


def test_projection_faces():
    p = Projection(4, (1, 3))
    assert p.collapsed == (2, 4)
    pick, rest = p.face(2)
    assert pick == 3 and rest == Projection(3, (1,))
    pick, rest = p.face(1)
    assert pick == 1 and rest == Projection(3, (2,))
    assert len(Projection.all(4, 2)) == 6
    with pytest.raises(ValueError):
        Projection(3, (2, 1))


@pytest.mark.parametrize("n", [1, 2])
def test_james_complex(n):
    base = build_rack_space(make_rack("dihedral", n=3), 4)
    jc = james_complex(base, n, 4 - n)
    for k in range(4 - n + 1):
        assert jc.cubical.counts[k] == base.counts[n + k] * comb(n + k, k)
    assert validate_cubical(jc.cubical) == []
    c, lam = jc.cell(1, 7)
    assert jc.index(1, c, lam) == 7
    with pytest.raises(ValueError):
        james_complex(base, n, 5 - n)


def test_james_level_rule():
    base = build_rack_space(make_rack("dihedral", n=3), 4)
    jc = james_complex(base, 1, 3)
    for k in range(jc.max_dim + 1):
        for idx in range(jc.cubical.counts[k]):
            lam = jc.cell(k, idx)[1]
            level = james_level(jc, k, idx)
            assert lam.collapsed == (level,)
            for j in range(1, k + 1):
                for eps in (0, 1):
                    f = jc.cubical.face(k, idx, j, eps)
                    pick = lam.retained[j - 1]
                    assert james_level(jc, k - 1, f) == (level - 1 if pick < level else level)
    jc2 = james_complex(base, 2, 1)
    with pytest.raises(ValueError):
        james_level(jc2, 0, 0)


def test_cache_round_trip():
    cs = build_rack_space(make_rack("dihedral", n=3), 3)
    text = dump_cubical(cs)
    assert text.splitlines()[0] == "CUBSET v1 dims=3"
    back = load_cubical(text)
    assert back.counts == cs.counts
    assert all(np.array_equal(a, b) for a, b in zip(back.faces, cs.faces))
    with pytest.raises(ValueError):
        load_cubical("nope\n")
    with pytest.raises(ValueError):
        load_cubical("\n".join(text.splitlines()[:-1]))
