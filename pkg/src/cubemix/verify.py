"""Self-checks behind ``cubemix verify group``."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import canonical_index as ci
from .cube_model import (
    EDGE_MOVE_PERM,
    M,
    MOVE_PERM,
    MOVE_TWIST,
    MOVES,
    OPPOSITE,
    ROTATIONS,
    Face,
    face_members,
    rotation_mapping_face,
)


def _compose(first: np.ndarray, then: np.ndarray) -> np.ndarray:
    return then[first]


def check_move_table_rows() -> bool:
    return all(sorted(row) == list(range(8)) for row in M)


def check_order_four() -> bool:
    for f in Face:
        quarter = MOVE_PERM[3 * f]
        tw = MOVE_TWIST[3 * f]
        perm = np.arange(8)
        ori = np.zeros(8, dtype=int)
        edges = np.arange(12)
        for _ in range(4):
            ori = ori + tw[perm]
            perm = quarter[perm]
            edges = EDGE_MOVE_PERM[3 * f][edges]
        if not (np.array_equal(perm, np.arange(8)) and (ori % 3 == 0).all()):
            return False
        if not np.array_equal(edges, np.arange(12)):
            return False
    return True


def check_opposite_commute() -> bool:
    for f in Face:
        g = OPPOSITE[f]
        for table in (MOVE_PERM, EDGE_MOVE_PERM):
            a, b = table[3 * f], table[3 * g]
            if not np.array_equal(_compose(a, b), _compose(b, a)):
                return False
    return True


def check_face_members() -> bool:
    return all(
        {s for s in range(8) if M[f][s] != s} == set(face_members(f)) for f in Face
    )


def check_conjugation() -> bool:
    for f in Face:
        for g in Face:
            for rot in rotation_mapping_face(f, g):
                rho = np.array(rot.slot_map)
                conj = np.empty(8, dtype=int)
                # rho . M[f] . rho^-1
                conj[rho] = rho[np.array(M[f])]
                if not np.array_equal(conj, np.array(M[g])):
                    return False
    return True


def check_rotation_group() -> bool:
    mats = {r.matrix for r in ROTATIONS}
    closed = all((a @ b).matrix in mats for a in ROTATIONS for b in ROTATIONS)
    return len(mats) == 24 and closed


def check_tables(tables: ci.MoveTables) -> dict:
    bijective = all(
        np.bincount(tables[m], minlength=ci.N_STATES).max() == 1 for m in range(18)
    )
    idx = np.arange(ci.N_STATES)
    inverse = all(
        np.array_equal(tables[m.inverse().index][tables[m.index]], idx) for m in MOVES
    )
    return {"tables_bijective": bool(bijective), "tables_inverse_moves": bool(inverse)}


def verify_group(cache_dir: Path | str | None = None, with_tables: bool = True) -> dict:
    enum = ci.enumerate_reachable()
    report = {
        "reachable_states": enum.count,
        "expected_states": math.factorial(7) * 3**6,
        "bfs_depth_histogram": enum.depth_histogram,
        "bfs_max_depth": enum.max_depth,
        "twist_constraint": enum.twist_ok,
        "m_rows_are_permutations": check_move_table_rows(),
        "quarter_turn_order_4": check_order_four(),
        "opposite_faces_commute": check_opposite_commute(),
        "face_members_match_m": check_face_members(),
        "rotation_conjugation": check_conjugation(),
        "rotation_group_order_24": check_rotation_group(),
    }
    if with_tables:
        report.update(check_tables(ci.load_or_build_tables(cache_dir)))
    report["ok"] = bool(
        enum.count == report["expected_states"]
        and enum.max_depth <= 14
        and all(v for v in report.values() if isinstance(v, bool))
    )
    return report
