"""Rotation-canonical Pocket cube states and their dense index.

A state is canonical when the cubie whose home is BDL sits in slot BDL with
orientation 0.  Canonical states are ranked as

    rank = lehmer(perm[0:7]) * 3**6 + sum(ori[s] * 3**(5 - s) for s < 6)

with ``ori[6]`` recovered from the twist constraint, so the index space is
exactly ``[0, 7! * 3**6)``.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cube_model import (
    BDL,
    MOVE_PERM,
    MOVE_TWIST,
    MOVES,
    ROTATIONS,
    CubeRotation,
    Move,
    PocketState,
    rotation_action,
)

log = logging.getLogger(__name__)

REF_CUBIE = BDL
N_STATES = math.factorial(7) * 3**6  # 3,674,160

CACHE_MAGIC = b"CMLX1"
CACHE_NAME = "pocket_move_tables.bin"

ROT_SLOT = np.array([r.slot_map for r in ROTATIONS], dtype=np.int64)
ROT_TWIST = np.array([r.twist for r in ROTATIONS], dtype=np.int64)


def _canon_rotation_table() -> np.ndarray:
    # CANON_ROT[slot, ori] -> rotation taking the reference cubie home untwisted
    table = np.full((8, 3), -1, dtype=np.int64)
    for k in range(len(ROTATIONS)):
        for s in range(8):
            if ROT_SLOT[k, s] == REF_CUBIE:
                o = (-ROT_TWIST[k, s]) % 3
                assert table[s, o] == -1
                table[s, o] = k
    assert (table >= 0).all()
    return table


CANON_ROT = _canon_rotation_table()

_FACT = np.array([math.factorial(6 - i) for i in range(7)], dtype=np.int64)
_POW3 = np.array([3 ** (5 - s) for s in range(6)], dtype=np.int64)


class CorruptStateError(ValueError):
    pass


# --- scalar API ------------------------------------------------------------


def canonicalize(state: PocketState) -> tuple[PocketState, CubeRotation]:
    s = state.slot_of(REF_CUBIE)
    rot = ROTATIONS[CANON_ROT[s, state.ori[s]]]
    return rotation_action(rot, state), rot


def is_canonical(state: PocketState) -> bool:
    return state.perm[REF_CUBIE] == REF_CUBIE and state.ori[REF_CUBIE] == 0


def rank(state: PocketState) -> int:
    if not is_canonical(state):
        raise ValueError("rank() needs a canonical state")
    if state.twist() != 0:
        raise CorruptStateError(f"twist constraint violated: {state}")
    perm = np.array([state.perm], dtype=np.int64)
    ori = np.array([state.ori], dtype=np.int64)
    return int(rank_arrays(perm, ori)[0])


def unrank(i: int) -> PocketState:
    if not 0 <= i < N_STATES:
        raise IndexError(f"index {i} outside [0, {N_STATES})")
    perm, ori = unrank_arrays(np.array([i], dtype=np.int64))
    return PocketState(tuple(int(v) for v in perm[0]), tuple(int(v) for v in ori[0]))


# --- vectorised API --------------------------------------------------------


def rank_arrays(perm: np.ndarray, ori: np.ndarray) -> np.ndarray:
    """Rank canonical states given as (n, 8) arrays."""
    p = perm[:, :7]
    lehmer = np.zeros(len(p), dtype=np.int64)
    for i in range(6):
        smaller = (p[:, i + 1 :] < p[:, i : i + 1]).sum(axis=1)
        lehmer += smaller * _FACT[i]
    return lehmer * 729 + ori[:, :6] @ _POW3


def unrank_arrays(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.asarray(idx, dtype=np.int64)
    n = len(idx)
    lehmer, code = np.divmod(idx, 729)
    perm = np.empty((n, 8), dtype=np.int64)
    available = np.ones((n, 7), dtype=bool)
    rows = np.arange(n)
    for i in range(7):
        digit, lehmer = np.divmod(lehmer, _FACT[i])
        # position of the (digit+1)-th remaining element
        pick = np.argmax(np.cumsum(available, axis=1) > digit[:, None], axis=1)
        perm[:, i] = pick
        available[rows, pick] = False
    perm[:, 7] = REF_CUBIE
    ori = np.zeros((n, 8), dtype=np.int64)
    for s in range(6):
        ori[:, s], code = np.divmod(code, _POW3[s])
    ori[:, 6] = (-ori[:, :6].sum(axis=1)) % 3
    return perm, ori


def apply_move_arrays(perm: np.ndarray, ori: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    dest = MOVE_PERM[m]
    out_perm = np.empty_like(perm)
    out_ori = np.empty_like(ori)
    out_perm[:, dest] = perm
    out_ori[:, dest] = (ori + MOVE_TWIST[m]) % 3
    return out_perm, out_ori


def canonicalize_arrays(perm: np.ndarray, ori: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rows = np.arange(len(perm))
    s = np.argmax(perm == REF_CUBIE, axis=1)
    r = CANON_ROT[s, ori[rows, s]]
    dest = ROT_SLOT[r]
    out_perm = np.empty_like(perm)
    out_ori = np.empty_like(ori)
    out_perm[rows[:, None], dest] = perm
    out_ori[rows[:, None], dest] = (ori + ROT_TWIST[r]) % 3
    return out_perm, out_ori


# --- reachable-space enumeration --------------------------------------------


def _pack(perm: np.ndarray, ori: np.ndarray) -> np.ndarray:
    # key independent of rank(): base-24 digits (perm*3 + ori) per slot
    return ((perm * 3 + ori) * (24 ** np.arange(8, dtype=np.int64))).sum(axis=1)


def _unpack(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    digits = (keys[:, None] // (24 ** np.arange(8, dtype=np.int64))) % 24
    return digits // 3, digits % 3


@dataclass
class Enumeration:
    count: int
    depth_histogram: list[int]
    keys: np.ndarray  # sorted packed keys of every reachable canonical state
    twist_ok: bool

    @property
    def max_depth(self) -> int:
        return len(self.depth_histogram) - 1


def enumerate_reachable() -> Enumeration:
    """Breadth-first search from solved over the 18 moves, modulo rotation."""
    start = np.array([list(range(8))], dtype=np.int64), np.zeros((1, 8), dtype=np.int64)
    visited = _pack(*start)
    frontier = visited.copy()
    histogram = [1]
    twist_ok = True
    while len(frontier):
        perm, ori = _unpack(frontier)
        cand = []
        for m in range(18):
            p2, o2 = canonicalize_arrays(*apply_move_arrays(perm, ori, m))
            twist_ok &= bool((o2.sum(axis=1) % 3 == 0).all())
            cand.append(_pack(p2, o2))
        cand = np.unique(np.concatenate(cand))
        frontier = cand[~np.isin(cand, visited, assume_unique=True)]
        if len(frontier):
            visited = np.union1d(visited, frontier)
            histogram.append(len(frontier))
        log.info("# bfs depth %d: %d new states", len(histogram) - 1, len(frontier))
    return Enumeration(len(visited), histogram, visited, twist_ok)


# --- move tables ------------------------------------------------------------


class MoveTables:
    """``table[m][i]``: index reached from state ``i`` by move ``m``."""

    def __init__(self, tables: np.ndarray):
        if tables.shape != (18, N_STATES):
            raise ValueError(f"bad table shape {tables.shape}")
        self.tables = tables

    def __getitem__(self, m: Move | int) -> np.ndarray:
        if isinstance(m, Move):
            m = m.index
        return self.tables[m]

    def inverse_index(self, m: int) -> int:
        return MOVES[m].inverse().index

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(struct.pack("<Q", N_STATES))
            self.tables.astype("<u4", copy=False).tofile(fh)
        tmp.replace(path)

    @classmethod
    def load(cls, path: Path) -> "MoveTables | None":
        """Read a cache file; ``None`` when the header or size does not match."""
        path = Path(path)
        header = len(CACHE_MAGIC) + 8
        try:
            with open(path, "rb") as fh:
                head = fh.read(header)
        except OSError:
            return None
        if len(head) != header or head[: len(CACHE_MAGIC)] != CACHE_MAGIC:
            return None
        (n,) = struct.unpack("<Q", head[len(CACHE_MAGIC) :])
        if n != N_STATES or path.stat().st_size != header + 18 * n * 4:
            return None
        data = np.fromfile(path, dtype="<u4", offset=header).reshape(18, n)
        return cls(data)


def build_move_tables(chunk: int = 1 << 18) -> MoveTables:
    tables = np.empty((18, N_STATES), dtype=np.uint32)
    for lo in range(0, N_STATES, chunk):
        idx = np.arange(lo, min(lo + chunk, N_STATES), dtype=np.int64)
        perm, ori = unrank_arrays(idx)
        for m in range(18):
            p2, o2 = canonicalize_arrays(*apply_move_arrays(perm, ori, m))
            tables[m, idx] = rank_arrays(p2, o2)
        log.info("# move tables: %d / %d", idx[-1] + 1, N_STATES)
    return MoveTables(tables)


def load_or_build_tables(cache_dir: Path | str | None = None) -> MoveTables:
    """Load the move-table cache, rebuilding it when absent or mismatched."""
    if cache_dir is None:
        return build_move_tables()
    path = Path(cache_dir) / CACHE_NAME
    tables = MoveTables.load(path)
    if tables is not None:
        return tables
    log.info("# building move tables into %s", path)
    tables = build_move_tables()
    tables.save(path)
    return tables
