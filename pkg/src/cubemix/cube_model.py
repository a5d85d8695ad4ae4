"""Cubie slots, faces, moves and whole-cube rotations.

Geometry convention: every cubie slot has integer coordinates (x, y, z) with
x pointing to F, y pointing to R and z pointing to U.  Corner slots have all
three coordinates in {-1, 1}; edge slots have exactly one zero coordinate.
The axis perpendicular to B/F is X, to L/R is Y and to D/U is Z.

The corner quarter-turn table ``M`` is taken verbatim; the 3x3 rotation matrix
of each face turn is recovered from it so that edges and orientations follow
the same turning direction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Iterable

import numpy as np


class Face(IntEnum):
    B = 0
    D = 1
    F = 2
    L = 3
    R = 4
    U = 5


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2


FACE_AXIS = {
    Face.B: Axis.X,
    Face.F: Axis.X,
    Face.L: Axis.Y,
    Face.R: Axis.Y,
    Face.D: Axis.Z,
    Face.U: Axis.Z,
}

OPPOSITE = {
    Face.B: Face.F,
    Face.F: Face.B,
    Face.D: Face.U,
    Face.U: Face.D,
    Face.L: Face.R,
    Face.R: Face.L,
}

# outward normal of each face
FACE_NORMAL = {
    Face.B: (-1, 0, 0),
    Face.F: (1, 0, 0),
    Face.L: (0, -1, 0),
    Face.R: (0, 1, 0),
    Face.D: (0, 0, -1),
    Face.U: (0, 0, 1),
}

CORNER_NAMES = ("DFR", "FRU", "BRU", "BDR", "FLU", "DFL", "BLU", "BDL")
DFR, FRU, BRU, BDR, FLU, DFL, BLU, BDL = range(8)

# M[f][c] is the slot reached by the cubie in slot c after one quarter turn of f.
M = (
    (DFR, FRU, BLU, BRU, FLU, DFL, BDL, BDR),  # B
    (BDR, FRU, BRU, BDL, FLU, DFR, BLU, DFL),  # D
    (DFL, DFR, BRU, BDR, FRU, FLU, BLU, BDL),  # F
    (DFR, FRU, BRU, BDR, DFL, BDL, FLU, BLU),  # L
    (FRU, BRU, BDR, DFR, FLU, DFL, BLU, BDL),  # R
    (DFR, FLU, FRU, BDR, BLU, DFL, BRU, BDL),  # U
)

# lexicographic by face-pair name
EDGE_NAMES = ("BD", "BL", "BR", "BU", "DF", "DL", "DR", "FL", "FR", "FU", "LU", "RU")


def _coords(name: str) -> tuple[int, int, int]:
    v = [0, 0, 0]
    for ch in name:
        n = FACE_NORMAL[Face[ch]]
        for i in range(3):
            v[i] += n[i]
    return tuple(v)


CORNER_COORDS = tuple(_coords(n) for n in CORNER_NAMES)
EDGE_COORDS = tuple(_coords(n) for n in EDGE_NAMES)
_CORNER_INDEX = {c: i for i, c in enumerate(CORNER_COORDS)}
_EDGE_INDEX = {c: i for i, c in enumerate(EDGE_COORDS)}


@dataclass(frozen=True, order=True)
class Move:
    face: Face
    quarters: int

    def __post_init__(self):
        if self.quarters not in (1, 2, 3):
            raise ValueError(f"quarters must be 1, 2 or 3, got {self.quarters}")

    @property
    def index(self) -> int:
        return 3 * int(self.face) + self.quarters - 1

    def inverse(self) -> "Move":
        return Move(self.face, 4 - self.quarters)

    def __str__(self):
        return f"{self.face.name}{self.quarters}"


# move order used by every table: (B,D,F,L,R,U) x (1,2,3)
MOVES = tuple(Move(f, q) for f in Face for q in (1, 2, 3))


def _axis_rotation(axis: int, sign: int) -> np.ndarray:
    """Quarter rotation about a coordinate axis; sign=+1 is counter-clockwise
    seen from the positive end of the axis."""
    r = np.zeros((3, 3), dtype=int)
    i, j = [k for k in range(3) if k != axis]
    r[axis, axis] = 1
    r[i, j] = -sign
    r[j, i] = sign
    return r


def _fit_face_rotation(face: Face) -> np.ndarray:
    axis = int(FACE_AXIS[face])
    for sign in (1, -1):
        r = _axis_rotation(axis, sign)
        if all(
            _CORNER_INDEX[tuple(r @ np.array(CORNER_COORDS[c]))] == M[face][c]
            for c in face_members(face)
        ):
            return r
    raise AssertionError(f"row {face.name} of M is not a quarter turn")


def face_members(face: Face, model: str = "corners-only") -> frozenset[int]:
    """Slots lying on ``face``.

    With ``model="full"`` edge slots are returned offset by 8 so corners and
    edges share one index space (0..7 corners, 8..19 edges).
    """
    face = Face(face)
    axis = int(FACE_AXIS[face])
    side = FACE_NORMAL[face][axis]
    corners = {i for i, c in enumerate(CORNER_COORDS) if c[axis] == side}
    if model == "corners-only":
        return frozenset(corners)
    if model == "full":
        edges = {8 + i for i, c in enumerate(EDGE_COORDS) if c[axis] == side}
        return frozenset(corners | edges)
    raise ValueError(f"unknown model {model!r}")


FACE_ROTATION = {f: _fit_face_rotation(f) for f in Face}


def corner_image(face: Face, slot: int) -> int:
    return M[face][slot]


# --- orientation -----------------------------------------------------------
#
# The facelets of a corner slot are numbered 0, 1, 2 clockwise (seen from
# outside the cube) starting from the one on the U or D face, e.g. U, R, F for
# FRU.  A cubie's orientation is the number of the facelet holding its U/D
# sticker.


def _facelet_normals(slot: int) -> tuple[tuple[int, int, int], ...]:
    x, y, z = CORNER_COORDS[slot]
    nz, nx, ny = (0, 0, z), (x, 0, 0), (0, y, 0)
    # clockwise from outside <=> negative triple product
    if np.dot(np.cross(nz, nx), ny) < 0:
        return (nz, nx, ny)
    return (nz, ny, nx)


FACELETS = tuple(_facelet_normals(s) for s in range(8))


def _twist_for(r: np.ndarray, slot: int) -> tuple[int, int]:
    """Destination slot and orientation increment when rotation ``r`` moves
    the cubie in ``slot``."""
    dest = _CORNER_INDEX[tuple(r @ np.array(CORNER_COORDS[slot]))]
    deltas = set()
    for k, n in enumerate(FACELETS[slot]):
        k2 = FACELETS[dest].index(tuple(int(v) for v in r @ np.array(n)))
        deltas.add((k2 - k) % 3)
    assert len(deltas) == 1, "orientation increment depends on facelet"
    return dest, deltas.pop()


def _matpow(r: np.ndarray, k: int) -> np.ndarray:
    out = np.eye(3, dtype=int)
    for _ in range(k):
        out = r @ out
    return out


# MOVE_PERM[m][s]: destination slot; MOVE_TWIST[m][s]: orientation increment
MOVE_PERM = np.zeros((18, 8), dtype=np.int64)
MOVE_TWIST = np.zeros((18, 8), dtype=np.int64)
for _m in MOVES:
    _r = _matpow(FACE_ROTATION[_m.face], _m.quarters)
    _on_face = face_members(_m.face)
    for _s in range(8):
        if _s in _on_face:
            MOVE_PERM[_m.index, _s], MOVE_TWIST[_m.index, _s] = _twist_for(_r, _s)
        else:
            MOVE_PERM[_m.index, _s] = _s

# EDGE_MOVE_PERM[m][e]: destination edge slot
EDGE_MOVE_PERM = np.zeros((18, 12), dtype=np.int64)
for _m in MOVES:
    _r = _matpow(FACE_ROTATION[_m.face], _m.quarters)
    _axis = int(FACE_AXIS[_m.face])
    _side = FACE_NORMAL[_m.face][_axis]
    for _e, _c in enumerate(EDGE_COORDS):
        if _c[_axis] == _side:
            EDGE_MOVE_PERM[_m.index, _e] = _EDGE_INDEX[tuple(_r @ np.array(_c))]
        else:
            EDGE_MOVE_PERM[_m.index, _e] = _e


@dataclass(frozen=True)
class PocketState:
    """Corner arrangement: ``perm[s]`` is the cubie in slot ``s`` and
    ``ori[s]`` that cubie's orientation."""

    perm: tuple[int, ...] = tuple(range(8))
    ori: tuple[int, ...] = (0,) * 8

    def __post_init__(self):
        if sorted(self.perm) != list(range(8)):
            raise ValueError(f"perm is not a permutation of 0..7: {self.perm}")
        if len(self.ori) != 8 or any(o not in (0, 1, 2) for o in self.ori):
            raise ValueError(f"bad orientation vector: {self.ori}")

    def slot_of(self, cubie: int) -> int:
        return self.perm.index(cubie)

    def twist(self) -> int:
        return sum(self.ori) % 3


SOLVED = PocketState()


def _act(state: PocketState, dest: Iterable[int], inc: Iterable[int]) -> PocketState:
    perm = [0] * 8
    ori = [0] * 8
    for s, (d, t) in enumerate(zip(dest, inc)):
        perm[int(d)] = state.perm[s]
        ori[int(d)] = int((state.ori[s] + t) % 3)
    return PocketState(tuple(perm), tuple(ori))


def apply_move(state: PocketState, move: Move) -> PocketState:
    return _act(state, MOVE_PERM[move.index], MOVE_TWIST[move.index])


def apply_moves(state: PocketState, moves: Iterable[Move]) -> PocketState:
    for m in moves:
        state = apply_move(state, m)
    return state


@dataclass(frozen=True)
class RubiksPositions:
    """Positions only: ``cperm[s]`` is the corner cubie in corner slot ``s``,
    ``eperm[e]`` the edge cubie in edge slot ``e``."""

    cperm: tuple[int, ...] = tuple(range(8))
    eperm: tuple[int, ...] = tuple(range(12))

    def __post_init__(self):
        if sorted(self.cperm) != list(range(8)) or sorted(self.eperm) != list(range(12)):
            raise ValueError("cperm/eperm must be bijections")


def apply_move_positions(state: RubiksPositions, move: Move) -> RubiksPositions:
    cperm = [0] * 8
    for s, d in enumerate(MOVE_PERM[move.index].tolist()):
        cperm[d] = state.cperm[s]
    eperm = [0] * 12
    for e, d in enumerate(EDGE_MOVE_PERM[move.index].tolist()):
        eperm[d] = state.eperm[e]
    return RubiksPositions(tuple(cperm), tuple(eperm))


# --- whole-cube rotations --------------------------------------------------


@dataclass(frozen=True)
class CubeRotation:
    matrix: tuple[tuple[int, ...], ...]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=int)

    def __matmul__(self, other: "CubeRotation") -> "CubeRotation":
        return _rotation(self.array @ other.array)

    def inverse(self) -> "CubeRotation":
        return _rotation(self.array.T)

    @property
    def slot_map(self) -> tuple[int, ...]:
        return _slot_action(self.matrix)[0]

    @property
    def twist(self) -> tuple[int, ...]:
        return _slot_action(self.matrix)[1]


def _rotation(a: np.ndarray) -> CubeRotation:
    return CubeRotation(tuple(tuple(int(v) for v in row) for row in a))


@lru_cache(maxsize=None)
def _slot_action(matrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    r = np.array(matrix, dtype=int)
    pairs = [_twist_for(r, s) for s in range(8)]
    return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)


def _all_rotations() -> tuple[CubeRotation, ...]:
    out = []
    for p in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            a = np.zeros((3, 3), dtype=int)
            for i in range(3):
                a[i, p[i]] = signs[i]
            if round(np.linalg.det(a)) == 1:
                out.append(_rotation(a))
    out.sort(key=lambda r: (r.matrix != _rotation(np.eye(3)).matrix, r.matrix))
    return tuple(out)


ROTATIONS = _all_rotations()
IDENTITY = ROTATIONS[0]


def rotation_action(rot: CubeRotation, state: PocketState) -> PocketState:
    return _act(state, rot.slot_map, rot.twist)


def rotation_mapping_face(src: Face, dst: Face) -> list[CubeRotation]:
    n_src = np.array(FACE_NORMAL[src])
    n_dst = np.array(FACE_NORMAL[dst])
    return [r for r in ROTATIONS if np.array_equal(r.array @ n_src, n_dst)]
