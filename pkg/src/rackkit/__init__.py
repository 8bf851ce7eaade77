"""Finite racks, their cubical rack spaces and integral homology, and
rack-labelled (virtual) link diagrams with the cobordism class they carry."""

from .cobordism import LabelledDiagram, Move, MoveError, apply_move, cycle_class, reduce
from .cubical import (
    build_extended_rack_space,
    build_rack_space,
    james_complex,
    validate_cubical,
)
from .diagrams import LinkDiagram, colorings, parse_gauss, parse_pd, writhe
from .homology import chain_complex, cycle_coordinates, homology
from .racks import Rack, make_rack, orbits, parse_rack_spec
from .snf import SparseIntMatrix, smith_normal_form

__all__ = [
    "LabelledDiagram",
    "LinkDiagram",
    "Move",
    "MoveError",
    "Rack",
    "SparseIntMatrix",
    "apply_move",
    "build_extended_rack_space",
    "build_rack_space",
    "chain_complex",
    "colorings",
    "cycle_class",
    "cycle_coordinates",
    "homology",
    "james_complex",
    "make_rack",
    "orbits",
    "parse_gauss",
    "parse_pd",
    "parse_rack_spec",
    "reduce",
    "smith_normal_form",
    "validate_cubical",
    "writhe",
]
