"""Core types for piecewise-linear (PWL) systems on R^3.

A PWL system is an ordered list of affine pieces ``xdot = A x + B``, each
guarded by a conjunction of side conditions on oriented planes. Dispatch is
first-match-wins. Coordinate thresholds such as ``x1 < 0`` are ordinary planes
with normal ``(1, 0, 0)``.

The module also carries the equilibrium checks for affine pieces and the
closed-form solution of the rotating/drifting subsystem, which the integrator
tests use as an oracle.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionError, NoMatchingRegion, NotSingleZeroEigenvalue

# singular values below RANK_RTOL * s_max count as zero
RANK_RTOL = 1e-10


def as_vec3(x, name="vector") -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.shape != (3,):
        raise DimensionError(f"{name} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr}")
    arr.setflags(write=False)
    return arr


def as_mat3(a, name="matrix") -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.shape == (9,):
        arr = arr.reshape(3, 3)
    if arr.shape != (3, 3):
        raise DimensionError(f"{name} must be 3x3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


class Side(enum.IntFlag):
    BELOW = 1
    ON = 2
    ABOVE = 4


# relation string <-> allowed sides; only contiguous side sets are convex
RELATIONS = {
    "<": Side.BELOW,
    "=": Side.ON,
    ">": Side.ABOVE,
    "<=": Side.BELOW | Side.ON,
    ">=": Side.ON | Side.ABOVE,
    "*": Side.BELOW | Side.ON | Side.ABOVE,
}
_REL_OF_SIDES = {int(v): k for k, v in RELATIONS.items()}


@dataclass(frozen=True, eq=False)
class SwitchingPlane:
    """Oriented plane ``normal . x = offset``.

    A point is ``On`` the plane when ``|normal . x - offset| <= on_tolerance``,
    ``Above`` when the signed value exceeds the tolerance and ``Below``
    otherwise.
    """

    normal: np.ndarray
    offset: float
    on_tolerance: float = 0.0
    name: str = ""

    def __post_init__(self):
        normal = as_vec3(self.normal, "plane normal")
        if not np.any(normal):
            raise ValueError("plane normal must be nonzero")
        if not (self.on_tolerance >= 0 and math.isfinite(self.on_tolerance)):
            raise ValueError("on_tolerance must be a finite nonnegative number")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "on_tolerance", float(self.on_tolerance))

    def signed_value(self, x) -> float:
        n = self.normal
        # explicit expression so the compiled kernel reproduces it bit for bit
        return n[0] * x[0] + n[1] * x[1] + n[2] * x[2] - self.offset

    def classify(self, x) -> Side:
        g = self.signed_value(x)
        if abs(g) <= self.on_tolerance:
            return Side.ON
        return Side.ABOVE if g > self.on_tolerance else Side.BELOW

    def classify_many(self, states) -> np.ndarray:
        """Vectorised classification; returns an int array of ``Side`` values."""
        states = np.asarray(states, dtype=float)
        n = self.normal
        g = n[0] * states[:, 0] + n[1] * states[:, 1] + n[2] * states[:, 2] - self.offset
        out = np.full(g.shape, int(Side.BELOW))
        out[g > self.on_tolerance] = int(Side.ABOVE)
        out[np.abs(g) <= self.on_tolerance] = int(Side.ON)
        return out

    def same_as(self, other: "SwitchingPlane") -> bool:
        return (
            np.array_equal(self.normal, other.normal)
            and self.offset == other.offset
            and self.on_tolerance == other.on_tolerance
            and self.name == other.name
        )


def classify(plane: SwitchingPlane, x) -> Side:
    return plane.classify(x)


@dataclass(frozen=True, eq=False)
class Clause:
    plane: SwitchingPlane
    sides: Side

    def __post_init__(self):
        sides = Side(self.sides)
        if int(sides) not in _REL_OF_SIDES:
            raise ValueError(f"clause side set {sides!r} is not a contiguous range")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def rel(cls, plane: SwitchingPlane, relation: str) -> "Clause":
        try:
            return cls(plane, RELATIONS[relation])
        except KeyError:
            raise ValueError(f"unknown relation {relation!r}") from None

    @property
    def relation(self) -> str:
        return _REL_OF_SIDES[int(self.sides)]

    def holds(self, x) -> bool:
        return bool(self.plane.classify(x) & self.sides)


@dataclass(frozen=True, eq=False)
class RegionPredicate:
    """Conjunction of clauses. The empty conjunction holds everywhere."""

    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))

    def holds(self, x) -> bool:
        return all(c.holds(x) for c in self.clauses)


@dataclass(frozen=True, eq=False)
class AffinePiece:
    guard: RegionPredicate
    a_matrix: np.ndarray
    b_vector: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a_matrix", as_mat3(self.a_matrix, "a_matrix"))
        object.__setattr__(self, "b_vector", as_vec3(self.b_vector, "b_vector"))

    def field(self, x) -> np.ndarray:
        a, b = self.a_matrix, self.b_vector
        return np.array([
            a[i, 0] * x[0] + a[i, 1] * x[1] + a[i, 2] * x[2] + b[i] for i in range(3)
        ])


class ScrollRegions:
    """Labels states by the band they occupy between ordered transverse planes.

    With planes ``(S2, S4)`` and symbols ``"135"`` a state gets ``"1"`` when it
    is below S2, ``"3"`` when ``S2 <= x < S4`` and ``"5"`` when ``x >= S4``.
    """

    def __init__(self, planes: Sequence[SwitchingPlane], symbols: Sequence[str]):
        self.planes = tuple(planes)
        self.symbols = tuple(str(s) for s in symbols)
        if len(self.symbols) != len(self.planes) + 1:
            raise ValueError("need exactly one more symbol than planes")

    def label(self, x) -> str:
        for plane, sym in zip(self.planes, self.symbols):
            if plane.classify(x) == Side.BELOW:
                return sym
        return self.symbols[-1]

    def __call__(self, states) -> np.ndarray:
        states = np.atleast_2d(np.asarray(states, dtype=float))
        labels = np.full(len(states), self.symbols[-1], dtype=object)
        unresolved = np.ones(len(states), dtype=bool)
        for plane, sym in zip(self.planes, self.symbols):
            below = (plane.classify_many(states) == Side.BELOW) & unresolved
            labels[below] = sym
            unresolved &= ~below
        return labels.astype(str)

    def to_dict(self) -> dict:
        return {"planes": [p.name for p in self.planes], "symbols": list(self.symbols)}


class NeighborhoodRegions:
    """Labels states lying within ``eps`` of one of the given planes.

    States outside every neighbourhood get the empty label, so a symbol is
    emitted each time the orbit enters a neighbourhood.
    """

    def __init__(self, planes: Sequence[SwitchingPlane], symbols: Sequence[str], eps: float):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.planes = tuple(planes)
        self.symbols = tuple(str(s) for s in symbols)
        if len(self.symbols) != len(self.planes):
            raise ValueError("need one symbol per plane")
        self.eps = float(eps)

    def __call__(self, states) -> np.ndarray:
        states = np.atleast_2d(np.asarray(states, dtype=float))
        labels = np.full(len(states), "", dtype=object)
        for plane, sym in zip(self.planes, self.symbols):
            n = plane.normal
            dist = np.abs(states @ n - plane.offset) / np.linalg.norm(n)
            labels[(dist <= self.eps) & (labels == "")] = sym
        return labels.astype(str)


@dataclass(frozen=True, eq=False)
class PWLSystem:
    pieces: tuple[AffinePiece, ...]
    regions: ScrollRegions | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ValueError("a PWL system needs at least one piece")

    def __len__(self):
        return len(self.pieces)

    @cached_property
    def planes(self) -> tuple[SwitchingPlane, ...]:
        """Distinct planes referenced by guards, in first-use order."""
        seen: dict[int, SwitchingPlane] = {}
        for piece in self.pieces:
            for clause in piece.guard.clauses:
                seen.setdefault(id(clause.plane), clause.plane)
        return tuple(seen.values())

    def piece_indices(self, points) -> np.ndarray:
        """Dispatch many states at once (compiled); -1 marks points no guard covers."""
        from . import _kernels

        pts = np.ascontiguousarray(np.atleast_2d(points), dtype=float)
        return _kernels.dispatch_many(pts, self.compiled)

    def piece_index(self, x) -> int:
        for k, piece in enumerate(self.pieces):
            if piece.guard.holds(x):
                return k
        raise NoMatchingRegion(np.asarray(x))

    @cached_property
    def compiled(self) -> tuple:
        """Flat array form consumed by the numba kernels."""
        planes = self.planes
        index = {id(p): i for i, p in enumerate(planes)}
        normals = np.array([p.normal for p in planes], dtype=float).reshape(-1, 3)
        offsets = np.array([p.offset for p in planes], dtype=float)
        tols = np.array([p.on_tolerance for p in planes], dtype=float)
        cplane, cmask, start = [], [], [0]
        for piece in self.pieces:
            for clause in piece.guard.clauses:
                cplane.append(index[id(clause.plane)])
                cmask.append(int(clause.sides))
            start.append(len(cplane))
        a = np.array([p.a_matrix for p in self.pieces], dtype=float)
        b = np.array([p.b_vector for p in self.pieces], dtype=float)
        return (
            normals, offsets, tols,
            np.array(cplane, dtype=np.int64), np.array(cmask, dtype=np.int64),
            np.array(start, dtype=np.int64), a, b,
        )


def vector_field_at(sys: PWLSystem, x) -> np.ndarray:
    """Field of the first piece whose guard holds at ``x``."""
    return sys.pieces[sys.piece_index(x)].field(x)


def numerical_rank(m, rtol=RANK_RTOL) -> int:
    s = np.linalg.svd(np.atleast_2d(np.asarray(m, dtype=float)), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def has_equilibrium(a_matrix, b_vector, rtol=RANK_RTOL) -> bool:
    """True iff ``A x = -B`` is solvable (rank of A equals rank of [A | -B])."""
    a = as_mat3(a_matrix)
    b = as_vec3(b_vector)
    return numerical_rank(a, rtol) == numerical_rank(np.column_stack([a, -b]), rtol)


def _zero_eigen_count(a, rtol) -> int:
    scale = max(np.linalg.norm(a, 2), 1.0)
    return int(np.sum(np.abs(np.linalg.eigvals(a)) <= rtol * scale))


def neutral_vector_independent(a_matrix, v, rtol=RANK_RTOL) -> bool:
    """Check that ``v`` is a 0-eigenvector of ``A`` lying outside its column space.

    Raises NotSingleZeroEigenvalue unless zero is a simple eigenvalue of ``A``.
    """
    a = as_mat3(a_matrix)
    v = as_vec3(v)
    if _zero_eigen_count(a, rtol) != 1:
        raise NotSingleZeroEigenvalue("zero must be a simple eigenvalue of the matrix")
    vnorm = np.linalg.norm(v)
    if vnorm == 0.0:
        return False
    scale = max(np.linalg.norm(a, 2), 1.0)
    if np.linalg.norm(a @ v) > rtol * scale * vnorm:
        return False
    return numerical_rank(np.column_stack([a, v]), rtol) > numerical_rank(a, rtol)


@dataclass(frozen=True)
class SubsystemParams:
    """Parameters of ``xdot = A x + k1 a1 + k2 a2 + (0, 0, v)``.

    ``A`` rotates with rate ``n`` and expands with rate ``m`` in the
    ``(x1, x2)`` plane; ``eta`` is the axial eigenvalue.
    """

    m: float
    n: float
    eta: float = 0.0
    k1: float = 0.0
    k2: float = 0.0
    v: float = 0.0

    def matrix(self) -> np.ndarray:
        return as_mat3([[self.m, -self.n, 0.0], [self.n, self.m, 0.0], [0.0, 0.0, self.eta]])

    def b_vector(self) -> np.ndarray:
        a = self.matrix()
        return as_vec3(self.k1 * a[:, 0] + self.k2 * a[:, 1] + np.array([0.0, 0.0, self.v]))

    def piece(self, guard: RegionPredicate | None = None) -> AffinePiece:
        return AffinePiece(guard or RegionPredicate(), self.matrix(), self.b_vector())


def subsystem_solution(params: SubsystemParams, x0, t):
    """Closed-form state of the subsystem at time(s) ``t``.

    The planar part spirals about ``(-k1, -k2)``; the axial part drifts
    linearly when ``eta == 0`` and relaxes/grows exponentially otherwise.
    Scalar ``t`` gives shape ``(3,)``; an array gives ``(len(t), 3)``.
    """
    x0 = as_vec3(x0, "x0")
    t_arr = np.asarray(t, dtype=float)
    p = params
    growth = np.exp(p.m * t_arr)
    c, s = np.cos(p.n * t_arr), np.sin(p.n * t_arr)
    y1, y2 = x0[0] + p.k1, x0[1] + p.k2
    x1 = growth * (c * y1 - s * y2) - p.k1
    x2 = growth * (s * y1 + c * y2) - p.k2
    if p.eta == 0.0:
        x3 = x0[2] + p.v * t_arr
    else:
        # e^{eta t} x3(0) + v (e^{eta t} - 1) / eta, written to stay finite as eta -> 0
        z = p.eta * t_arr
        small = np.abs(z) < 1e-8
        phi1 = np.where(small, 1.0 + z / 2.0, np.expm1(z) / np.where(small, 1.0, z))
        x3 = x0[2] * np.exp(z) + p.v * t_arr * phi1
    return np.stack([x1, x2, x3], axis=-1)


@dataclass(frozen=True)
class VirtualEquilibrium:
    piece_index: int
    point: np.ndarray | None
    inside_guard: bool | None
    singular: bool


def virtual_equilibria(sys: PWLSystem) -> list[VirtualEquilibrium]:
    """Affine equilibrium ``-A^{-1} B`` of every invertible piece and whether it
    satisfies that piece's own guard. Singular pieces carry no point."""
    out = []
    for k, piece in enumerate(sys.pieces):
        if numerical_rank(piece.a_matrix) < 3:
            out.append(VirtualEquilibrium(k, None, None, True))
            continue
        point = np.linalg.solve(piece.a_matrix, -piece.b_vector)
        out.append(VirtualEquilibrium(k, point, piece.guard.holds(point), False))
    return out


@dataclass(frozen=True)
class PieceEquilibria:
    """Equilibrium set of one piece's affine map and its overlap with the guard.

    ``kind`` is ``"none"`` (Ax = -B unsolvable), ``"point"`` (invertible A) or
    ``"affine"`` (a line or plane ``point + span(directions)``).
    """

    piece_index: int
    kind: str
    point: np.ndarray | None
    directions: np.ndarray | None
    inside_guard: bool


def _bounds_for(clause: Clause):
    """(lower, lower_strict, upper, upper_strict) bounds on the signed value."""
    tol = clause.plane.on_tolerance
    lo, lo_strict, hi, hi_strict = -math.inf, False, math.inf, False
    sides = clause.sides
    if not sides & Side.BELOW:
        lo, lo_strict = (-tol, False) if sides & Side.ON else (tol, True)
    if not sides & Side.ABOVE:
        hi, hi_strict = (tol, False) if sides & Side.ON else (-tol, True)
    return lo, lo_strict, hi, hi_strict


def _guard_meets_affine_set(guard: RegionPredicate, point, basis) -> bool:
    """Does ``{point + basis @ s}`` intersect the guard region?"""
    k = basis.shape[1]
    if k == 0:
        return guard.holds(point)
    rows = []  # (coeffs over s, constant, lo, lo_strict, hi, hi_strict)
    for clause in guard.clauses:
        plane = clause.plane
        coeff = plane.normal @ basis
        const = plane.signed_value(point)
        rows.append((coeff, const) + _bounds_for(clause))
    if k == 1:
        s_lo, s_lo_strict, s_hi, s_hi_strict = -math.inf, False, math.inf, False
        for coeff, const, lo, lo_s, hi, hi_s in rows:
            a = float(coeff[0])
            if abs(a) <= 1e-12 * max(1.0, abs(const)):
                if const < lo or (lo_s and const == lo) or const > hi or (hi_s and const == hi):
                    return False
                continue
            # lo <(=) const + a s <(=) hi
            cand_lo, cand_hi = (lo - const) / a, (hi - const) / a
            cl_s, ch_s = lo_s, hi_s
            if a < 0:
                cand_lo, cand_hi, cl_s, ch_s = cand_hi, cand_lo, hi_s, lo_s
            if cand_lo > s_lo or (cand_lo == s_lo and cl_s):
                s_lo, s_lo_strict = cand_lo, cl_s
            if cand_hi < s_hi or (cand_hi == s_hi and ch_s):
                s_hi, s_hi_strict = cand_hi, ch_s
        return s_lo < s_hi or (s_lo == s_hi and not (s_lo_strict or s_hi_strict))
    # k >= 2: maximise a slack t shared by all strict inequalities
    a_ub, b_ub, any_strict = [], [], False
    for coeff, const, lo, lo_s, hi, hi_s in rows:
        if lo > -math.inf:
            a_ub.append(np.append(-coeff, 1.0 if lo_s else 0.0))
            b_ub.append(const - lo)
            any_strict |= lo_s
        if hi < math.inf:
            a_ub.append(np.append(coeff, 1.0 if hi_s else 0.0))
            b_ub.append(hi - const)
            any_strict |= hi_s
    if not a_ub:
        return True
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                  bounds=[(None, None)] * k + [(0.0, 1.0)])
    if res.status != 0:
        return False
    return (not any_strict) or res.x[-1] > 1e-12


def equilibrium_report(sys: PWLSystem) -> list[PieceEquilibria]:
    out = []
    for k, piece in enumerate(sys.pieces):
        a, b = piece.a_matrix, piece.b_vector
        rank = numerical_rank(a)
        if not has_equilibrium(a, b):
            out.append(PieceEquilibria(k, "none", None, None, False))
            continue
        point = np.linalg.lstsq(a, -b, rcond=None)[0]
        if rank == 3:
            out.append(PieceEquilibria(k, "point", point, None, piece.guard.holds(point)))
            continue
        _, _, vt = np.linalg.svd(a)
        basis = vt[rank:].T
        inside = _guard_meets_affine_set(piece.guard, point, basis)
        out.append(PieceEquilibria(k, "affine", point, basis, inside))
    return out


def is_equilibrium_free(sys: PWLSystem) -> bool:
    """No piece has an equilibrium inside its own guard region."""
    return not any(r.inside_guard for r in equilibrium_report(sys))
