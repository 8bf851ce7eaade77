import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import random_rack
from rackkit.cubical import CubicalSet, build_extended_rack_space, build_rack_space, trivial_cubical_set
from rackkit.homology import (
    BoundaryError,
    HomologyGroup,
    NotACycleError,
    TruncationError,
    chain_complex,
    cycle_coordinates,
    homology,
    homology_range,
)
from rackkit.racks import make_rack, orbits


def group(rank, *torsion):
    return (rank, tuple(torsion))


def shape(g):
    return g.rank, g.torsion


def test_trivial_rack_boundaries_vanish():
    cc = chain_complex(build_rack_space(make_rack("trivial", n=2), 4))
    for k in range(1, 5):
        assert cc.boundary[k].is_zero()
    assert [homology(cc, k).rank for k in range(4)] == [1, 2, 4, 8]


def test_dihedral_three():
    cc = chain_complex(build_rack_space(make_rack("dihedral", n=3), 4))
    assert shape(homology(cc, 1)) == group(1)
    assert shape(homology(cc, 2)) == group(1)
    assert shape(homology(cc, 3)) == group(1, 3)
    assert str(homology(cc, 3)) == "Z^1 + Z/3"


def test_dihedral_four_torsion():
    cc = chain_complex(build_rack_space(make_rack("dihedral", n=4), 3))
    assert shape(homology(cc, 2)) == group(4, 2, 2)


def test_h0_of_connected_space():
    cc = chain_complex(build_rack_space(make_rack("cyclic", n=4), 2))
    assert shape(homology(cc, 0)) == group(1)


def test_truncation_refused():
    cc = chain_complex(build_rack_space(make_rack("dihedral", n=3), 2))
    with pytest.raises(TruncationError):
        homology(cc, 2)
    with pytest.raises(TruncationError):
        homology(cc, -1)


def test_homology_range_threads():
    cc = chain_complex(build_rack_space(make_rack("dihedral", n=5), 3))
    seq = homology_range(cc, [0, 1, 2], workers=3)
    assert [shape(g) for g in seq] == [group(1), group(1), group(1)]
    assert isinstance(seq[0], HomologyGroup) and seq[2].degree == 2


def test_bad_boundary_detected():
    cs = build_rack_space(make_rack("dihedral", n=3), 3)
    faces = [f.copy() for f in cs.faces]
    faces[3][0, 0, 0] = 1
    with pytest.raises(BoundaryError):
        chain_complex(CubicalSet(faces))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_first_homology_counts_orbits(seed):
    r = random_rack(random.Random(seed), 6)
    cc = chain_complex(build_rack_space(r, 2))
    assert shape(homology(cc, 1)) == group(len(orbits(r)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_extended_space_shift(seed):
    r = random_rack(random.Random(seed), 4)
    bx = chain_complex(build_rack_space(r, 3))
    ex = chain_complex(build_extended_rack_space(r, 2))
    for k in (0, 1):
        assert shape(homology(ex, k)) == shape(homology(bx, k + 1))


def test_cycle_coordinates_of_boundaries_vanish():
    r = make_rack("dihedral", n=4)
    cc = chain_complex(build_rack_space(r, 3))
    rng = random.Random(3)
    for _ in range(10):
        c3 = [rng.randint(-3, 3) for _ in range(cc.dims[3])]
        z = cc.boundary[3].apply(c3)
        assert cycle_coordinates(cc, 2, z).is_zero()


def test_cycle_coordinates_are_linear_and_detect_torsion():
    r = make_rack("dihedral", n=4)
    cc = chain_complex(build_rack_space(r, 3))
    g = homology(cc, 2)
    n = r.size
    rng = random.Random(5)
    # random cycles: kernel vectors built from 2-cells (a, a), which are cycles for a quandle
    basis = []
    for a in range(n):
        z = [0] * (n * n)
        z[a * n + a] = 1
        basis.append(z)
    for _ in range(10):
        coeffs = [rng.randint(-4, 4) for _ in basis]
        z = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(n * n)]
        cls = cycle_coordinates(cc, 2, z)
        assert cls.group.rank == g.rank and cls.group.torsion == g.torsion
        parts = [cycle_coordinates(cc, 2, b) for b in basis]
        free = tuple(sum(c * p.free[i] for c, p in zip(coeffs, parts)) for i in range(g.rank))
        tors = tuple(sum(c * p.torsion[i] for c, p in zip(coeffs, parts)) % d
                     for i, d in enumerate(g.torsion))
        assert cls.free == free and cls.torsion == tors


def test_not_a_cycle():
    cc = chain_complex(build_rack_space(make_rack("dihedral", n=3), 3))
    z = [0] * 9
    z[1] = 1
    with pytest.raises(NotACycleError):
        cycle_coordinates(cc, 2, z)
    with pytest.raises(ValueError):
        cycle_coordinates(cc, 2, [0] * 4)


def test_trivial_cubical_set_homology():
    cc = chain_complex(trivial_cubical_set(3))
    assert [shape(homology(cc, k)) for k in range(3)] == [group(1)] * 3
    assert str(cycle_coordinates(cc, 1, [5])) == "Z^1 [5]"
