"""Concrete multi-scroll systems and JSON (de)serialisation of PWL systems.

The three factories transcribe the printed branch tables verbatim (including
which implied clauses are left out). :func:`build_scroll_system` assembles the
same kind of system from a :class:`ScrollFamilySpec` using the regular cell
pattern with every bounding clause written out. It is tested against the
transcribed tables.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .errors import DimensionError, SchemaError
from .pwl_core import (
    AffinePiece,
    Clause,
    PWLSystem,
    RegionPredicate,
    ScrollRegions,
    SwitchingPlane,
    as_mat3,
    as_vec3,
)

FORMAT = "scrollforge.pwl/1"


@dataclass(frozen=True)
class WVectorSpec:
    """Coefficients of ``W = k1 a1 + k2 a2`` (a combination of the first two columns of A)."""

    k1: float
    k2: float = 0.0

    def vector(self, a_matrix) -> np.ndarray:
        a = as_mat3(a_matrix)
        return as_vec3(self.k1 * a[:, 0] + self.k2 * a[:, 1])

    @property
    def focus(self) -> tuple[float, float]:
        return (-self.k1, -self.k2)


# Vectors W_1..W_6 (k1, k2)
W_TABLE = (
    WVectorSpec(-0.1, 0.0),
    WVectorSpec(0.1, 0.0),
    WVectorSpec(-1.1, 0.0),
    WVectorSpec(-0.9, 0.0),
    WVectorSpec(-2.1, 0.0),
    WVectorSpec(-1.9, 0.0),
)


@dataclass(frozen=True)
class ScrollFamilySpec:
    """Parameters of a multi-scroll system built from one rotating matrix.

    ``planes`` alternates horizontal and transverse surfaces,
    ``(S1, S2, S3, ..., S_{2s-1})`` for ``s`` scrolls; ``w_specs`` holds two
    W vectors per scroll; ``x1_thresholds`` holds the per-scroll split line
    between the two foci.
    """

    m: float
    n: float
    eta: float
    v: float
    planes: tuple[SwitchingPlane, ...]
    w_specs: tuple[WVectorSpec, ...]
    x1_thresholds: tuple[float, ...]

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("m must be positive")
        if self.n == 0:
            raise ValueError("n must be nonzero")
        scrolls = len(self.x1_thresholds)
        if scrolls < 1:
            raise ValueError("need at least one scroll")
        if len(self.w_specs) != 2 * scrolls:
            raise ValueError("need two W vectors per scroll")
        if len(self.planes) != 2 * scrolls - 1:
            raise ValueError("need 2*scrolls - 1 planes")

    @property
    def scrolls(self) -> int:
        return len(self.x1_thresholds)

    def matrix(self) -> np.ndarray:
        return as_mat3([[self.m, -self.n, 0.0], [self.n, self.m, 0.0], [0.0, 0.0, self.eta]])

    def neutral_vector(self) -> np.ndarray:
        return as_vec3([0.0, 0.0, self.v])

    def horizontal_planes(self):
        return self.planes[0::2]

    def transverse_planes(self):
        return self.planes[1::2]

    def threshold_planes(self):
        return tuple(
            SwitchingPlane((1.0, 0.0, 0.0), th, name=f"x1={th:g}") for th in self.x1_thresholds
        )

    def regions(self, symbols=None) -> ScrollRegions:
        symbols = symbols or [str(2 * i + 1) for i in range(self.scrolls)]
        return ScrollRegions(self.transverse_planes(), symbols)


def example_planes(scrolls: int, on_tolerance: float = 0.0) -> tuple[SwitchingPlane, ...]:
    """S1: x3=0, S2: x1+x3/2=1, S3: x3=2, S4: x1+x3/2=3, S5: x3=4 (first 2s-1 of them)."""
    planes = []
    for i in range(2 * scrolls - 1):
        name = f"S{i + 1}"
        if i % 2 == 0:
            planes.append(SwitchingPlane((0.0, 0.0, 1.0), float(i), on_tolerance, name))
        else:
            planes.append(SwitchingPlane((1.0, 0.0, 0.5), float(i), 0.0, name))
    return tuple(planes)


def example_spec(scrolls: int, eta: float = 0.0, on_tolerance: float = 0.0) -> ScrollFamilySpec:
    return ScrollFamilySpec(
        m=0.5, n=10.0, eta=eta, v=5.0,
        planes=example_planes(scrolls, on_tolerance),
        w_specs=W_TABLE[: 2 * scrolls],
        x1_thresholds=tuple(float(i) for i in range(scrolls)),
    )


# Printed branch tables. Each row: (sign of V, W index (1-based), guard clauses)
# with guard clauses as (plane name, relation). "X0", "X1", "X2" stand for the
# coordinate planes x1 = 0, 1, 2.
DOUBLE_TABLE = (
    (+1, 1, (("S1", "<"), ("X0", "<"))),
    (+1, 2, (("S1", "<"), ("S2", "<"), ("X0", ">="))),
    (0, 1, (("S1", "="), ("X0", "<"))),
    (0, 2, (("S1", "="), ("S2", "<"), ("X0", ">="))),
    (-1, 1, (("S1", ">"), ("S2", "<"), ("X0", "<"))),
    (-1, 2, (("S1", ">"), ("S2", "<"), ("X0", ">="))),
    (+1, 3, (("S3", "<"), ("S2", ">="), ("X1", "<"))),
    (+1, 4, (("S3", "<"), ("S2", ">="), ("X1", ">="))),
    (0, 3, (("S3", "="), ("S2", ">="), ("X1", "<"))),
    (0, 4, (("S3", "="), ("X1", ">="))),
    (-1, 3, (("S3", ">"), ("S2", ">="), ("X1", "<"))),
    (-1, 4, (("S3", ">"), ("X1", ">="))),
)

TRIPLE_TABLE = (
    (+1, 1, (("S1", "<"), ("X0", "<"))),
    (+1, 2, (("S1", "<"), ("S2", "<"), ("X0", ">="))),
    (0, 1, (("S1", "="), ("X0", "<"))),
    (0, 2, (("S1", "="), ("S2", "<"), ("X0", ">="))),
    (-1, 1, (("S1", ">"), ("S2", "<"), ("X0", "<"))),
    (-1, 2, (("S1", ">"), ("S2", "<"), ("X0", ">="))),
    (+1, 3, (("S3", "<"), ("S2", ">="), ("X1", "<"))),
    (+1, 4, (("S3", "<"), ("S2", ">="), ("S4", "<"), ("X1", ">="))),
    (0, 3, (("S3", "="), ("S2", ">="), ("X1", "<"))),
    (0, 4, (("S3", "="), ("S4", "<"), ("X1", ">="))),
    (-1, 3, (("S3", ">"), ("S2", ">="), ("S4", "<"), ("X1", "<"))),
    (-1, 4, (("S3", ">"), ("S4", "<"), ("X1", ">="))),
    (+1, 5, (("S5", "<"), ("S4", ">="), ("X2", "<"))),
    (+1, 6, (("S5", "<"), ("S4", ">="), ("X2", ">="))),
    (0, 5, (("S5", "="), ("S4", ">="), ("X2", "<"))),
    # printed without "x >= S4", which is implied by x3 = 4, x1 >= 2
    (0, 6, (("S5", "="), ("S4", ">="), ("X2", ">="))),
    (-1, 5, (("S5", ">"), ("S4", ">="), ("X2", "<"))),
    (-1, 6, (("S5", ">"), ("X2", ">="))),
)


def _from_table(spec: ScrollFamilySpec, table, name: str) -> PWLSystem:
    a = spec.matrix()
    v = spec.neutral_vector()
    planes = {p.name: p for p in spec.planes}
    for i, p in enumerate(spec.threshold_planes()):
        planes[f"X{i}"] = p
    pieces = []
    for k, (v_sign, w_index, clauses) in enumerate(table, start=1):
        guard = RegionPredicate(tuple(Clause.rel(planes[p], rel) for p, rel in clauses))
        b = v_sign * v + spec.w_specs[w_index - 1].vector(a)
        pieces.append(AffinePiece(guard, a, b, label=f"F{k}"))
    return PWLSystem(tuple(pieces), spec.regions(), name)


def build_example1_double(on_tolerance: float = 0.0) -> PWLSystem:
    """Double-scroll system, singular A (12 branches)."""
    return _from_table(example_spec(2, 0.0, on_tolerance), DOUBLE_TABLE, "example1-double")


def build_example1_triple(on_tolerance: float = 0.0) -> PWLSystem:
    """Triple-scroll system, singular A: the 18-branch layout with eta = 0."""
    return _from_table(example_spec(3, 0.0, on_tolerance), TRIPLE_TABLE, "example1-triple")


def build_example2_triple(on_tolerance: float = 0.0) -> PWLSystem:
    """Triple-scroll system with invertible A (eta = 0.1)."""
    return _from_table(example_spec(3, 0.1, on_tolerance), TRIPLE_TABLE, "example2-triple")


def build_scroll_system(spec: ScrollFamilySpec, name: str = "") -> PWLSystem:
    """Cell-pattern construction: scroll i lives between transverse planes
    T_i and T_{i+1}, spirals about one of two foci split at x1 = theta_i and is
    driven toward its horizontal plane H_i by +-V."""
    a = spec.matrix()
    v = spec.neutral_vector()
    horiz = spec.horizontal_planes()
    trans = spec.transverse_planes()
    split = spec.threshold_planes()
    pieces = []
    for i in range(spec.scrolls):
        cell = []
        if i > 0:
            cell.append(Clause.rel(trans[i - 1], ">="))
        if i < spec.scrolls - 1:
            cell.append(Clause.rel(trans[i], "<"))
        for v_sign, rel in ((+1, "<"), (0, "="), (-1, ">")):
            for j, side in enumerate(("<", ">=")):
                w = spec.w_specs[2 * i + j].vector(a)
                guard = RegionPredicate(
                    (Clause.rel(horiz[i], rel), *cell, Clause.rel(split[i], side))
                )
                pieces.append(AffinePiece(guard, a, v_sign * v + w))
    return PWLSystem(tuple(pieces), spec.regions(), name)


FACTORIES = {
    "example1-double": build_example1_double,
    "example1-triple": build_example1_triple,
    "example2-triple": build_example2_triple,
}


# --- JSON documents -------------------------------------------------------

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM}
_MATRIX = {"type": "array", "items": {"anyOf": [_NUM, _VEC]}}

SYSTEM_SCHEMA = {
    "type": "object",
    "required": ["matrix", "planes", "pieces"],
    "properties": {
        "format": {"const": FORMAT},
        "name": {"type": "string"},
        "matrix": _MATRIX,
        "planes": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["normal", "offset"],
                "properties": {
                    "normal": _VEC,
                    "offset": _NUM,
                    "tolerance": {"type": "number", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "pieces": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["guard", "b_vector"],
                "properties": {
                    "guard": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["plane", "rel"],
                            "properties": {
                                "plane": {"type": "string"},
                                "rel": {"enum": ["<", "=", ">", "<=", ">=", "*"]},
                            },
                            "additionalProperties": False,
                        },
                    },
                    "b_vector": _VEC,
                    "matrix": _MATRIX,
                    "label": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "regions": {
            "type": "object",
            "required": ["planes", "symbols"],
            "properties": {
                "planes": {"type": "array", "items": {"type": "string"}},
                "symbols": {"type": "array", "items": {"type": "string"}},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def _path(parts) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in parts)


def _matrix(value, where):
    try:
        return as_mat3(value)
    except DimensionError as exc:
        raise DimensionError(f"{where}: {exc}") from None
    except ValueError as exc:  # ragged nesting or non-finite entries
        raise DimensionError(f"{where}: {exc}") from None


def save_system(sys: PWLSystem) -> dict:
    """System -> JSON-compatible document.

    The most common piece matrix becomes the top-level ``matrix``; pieces
    with a different matrix carry their own.
    """
    mats = [p.a_matrix for p in sys.pieces]
    shared = max(mats, key=lambda m: sum(np.array_equal(m, o) for o in mats))
    names: dict[int, str] = {}
    planes = {}
    for i, plane in enumerate(sys.planes):
        name = plane.name or f"P{i}"
        while name in planes:
            name += "'"
        names[id(plane)] = name
        planes[name] = {
            "normal": plane.normal.tolist(),
            "offset": plane.offset,
            "tolerance": plane.on_tolerance,
        }
    pieces = []
    for piece in sys.pieces:
        entry = {
            "guard": [{"plane": names[id(c.plane)], "rel": c.relation} for c in piece.guard.clauses],
            "b_vector": piece.b_vector.tolist(),
        }
        if not np.array_equal(piece.a_matrix, shared):
            entry["matrix"] = piece.a_matrix.ravel().tolist()
        if piece.label:
            entry["label"] = piece.label
        pieces.append(entry)
    doc = {
        "format": FORMAT,
        "name": sys.name,
        "matrix": shared.ravel().tolist(),
        "planes": planes,
        "pieces": pieces,
    }
    if sys.regions is not None:
        for plane in sys.regions.planes:
            if id(plane) not in names:
                name = plane.name or f"R{len(planes)}"
                names[id(plane)] = name
                planes[name] = {
                    "normal": plane.normal.tolist(),
                    "offset": plane.offset,
                    "tolerance": plane.on_tolerance,
                }
        doc["regions"] = {
            "planes": [names[id(p)] for p in sys.regions.planes],
            "symbols": list(sys.regions.symbols),
        }
    return doc


def load_system(document) -> PWLSystem:
    """JSON document (dict, JSON text or path) -> PWLSystem.

    Raises SchemaError (with a JSON path) for structural problems and
    DimensionError for matrices or vectors that are not 3-dimensional.
    """
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from None
    errors = sorted(
        jsonschema.Draft202012Validator(SYSTEM_SCHEMA).iter_errors(document),
        key=lambda e: list(e.absolute_path),
    )
    if errors:
        err = errors[0]
        raise SchemaError(_path(err.absolute_path), err.message)

    shared = _matrix(document["matrix"], "$.matrix")
    planes = {}
    for name, spec in document["planes"].items():
        where = f"$.planes.{name}"
        if len(spec["normal"]) != 3:
            raise DimensionError(f"{where}.normal: expected 3 components")
        try:
            planes[name] = SwitchingPlane(spec["normal"], spec["offset"], spec.get("tolerance", 0.0), name)
        except ValueError as exc:
            raise SchemaError(where, str(exc)) from None

    def plane_ref(name, where):
        try:
            return planes[name]
        except KeyError:
            raise SchemaError(where, f"unknown plane {name!r}") from None

    pieces = []
    for k, entry in enumerate(document["pieces"]):
        where = f"$.pieces[{k}]"
        clauses = tuple(
            Clause.rel(plane_ref(c["plane"], f"{where}.guard[{j}].plane"), c["rel"])
            for j, c in enumerate(entry["guard"])
        )
        if len(entry["b_vector"]) != 3:
            raise DimensionError(f"{where}.b_vector: expected 3 components")
        a = _matrix(entry["matrix"], f"{where}.matrix") if "matrix" in entry else shared
        pieces.append(AffinePiece(RegionPredicate(clauses), a, entry["b_vector"], entry.get("label", "")))

    regions = None
    if "regions" in document:
        r = document["regions"]
        rplanes = [plane_ref(p, f"$.regions.planes[{j}]") for j, p in enumerate(r["planes"])]
        try:
            regions = ScrollRegions(rplanes, r["symbols"])
        except ValueError as exc:
            raise SchemaError("$.regions", str(exc)) from None
    return PWLSystem(tuple(pieces), regions, document.get("name", ""))


def write_system(sys: PWLSystem, path) -> None:
    Path(path).write_text(json.dumps(save_system(sys), indent=2) + "\n")


def resolve_system(ref: str) -> PWLSystem:
    """Factory name (``example1-double`` ...) or ``file:<path>``."""
    if ref.startswith("file:"):
        path = Path(ref[5:])
        try:
            text = path.read_text()
        except OSError as exc:
            raise SchemaError("$", f"cannot read {path}: {exc.strerror}") from None
        return load_system(text)
    try:
        return FACTORIES[ref]()
    except KeyError:
        raise SchemaError("$", f"unknown system {ref!r}; choose one of {sorted(FACTORIES)} or file:<path>") from None


def systems_equal(a: PWLSystem, b: PWLSystem) -> bool:
    """Structural equality (same pieces, guards, planes and region scheme)."""
    if len(a.pieces) != len(b.pieces) or a.name != b.name:
        return False
    for pa, pb in zip(a.pieces, b.pieces):
        if not (np.array_equal(pa.a_matrix, pb.a_matrix) and np.array_equal(pa.b_vector, pb.b_vector)):
            return False
        if pa.label != pb.label or len(pa.guard.clauses) != len(pb.guard.clauses):
            return False
        for ca, cb in zip(pa.guard.clauses, pb.guard.clauses):
            if ca.sides != cb.sides or not ca.plane.same_as(cb.plane):
                return False
    ra, rb = a.regions, b.regions
    if (ra is None) != (rb is None):
        return False
    if ra is not None:
        if ra.symbols != rb.symbols or len(ra.planes) != len(rb.planes):
            return False
        if not all(p.same_as(q) for p, q in zip(ra.planes, rb.planes)):
            return False
    return True
