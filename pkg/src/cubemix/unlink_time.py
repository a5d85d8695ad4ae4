"""Unlinked pairs of cubies and the stopping time T.

A pair is unlinked along an axis once a face perpendicular to that axis has
been turned while holding exactly one cubie of the pair.  ``T`` is the first
step at which every pair is unlinked along all three axes.

Cubies and slots share one index space: corners 0..7 then (for the full cube)
edges 8..19.  Trajectories are simulated in fixed-size blocks; block ``k``
draws its moves from ``SeedSequence([seed, k])`` so results depend only on
``(seed, trials)``, never on the number of workers.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cube_model import EDGE_MOVE_PERM, FACE_AXIS, MOVE_PERM, MOVES, Face, Move, face_members

BLOCK = 8192
DEFAULT_STEP_CAP = 10_000

MODELS = {"corners": 8, "rubiks-all": 20}
_ALIASES = {"corners-only": "corners", "rubiks": "rubiks-all", "full": "rubiks-all"}


class StepCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class UnlinkModel:
    name: str

    def __post_init__(self):
        object.__setattr__(self, "name", _ALIASES.get(self.name, self.name))
        if self.name not in MODELS:
            raise ValueError(f"unknown model {self.name!r}; expected one of {sorted(MODELS)}")

    @property
    def n_cubies(self) -> int:
        return MODELS[self.name]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(self.n_cubies), 2))

    @property
    def n_pairs(self) -> int:
        return math.comb(self.n_cubies, 2)

    def move_dest(self) -> np.ndarray:
        """(18, k) destination slot of each slot under each move."""
        if self.n_cubies == 8:
            return MOVE_PERM.copy()
        return np.hstack([MOVE_PERM, EDGE_MOVE_PERM + 8])

    def on_face(self) -> np.ndarray:
        """(6, k) membership of each slot in each face."""
        scope = "corners-only" if self.n_cubies == 8 else "full"
        out = np.zeros((6, self.n_cubies), dtype=bool)
        for f in Face:
            out[f, sorted(face_members(f, scope))] = True
        return out


CORNERS = UnlinkModel("corners")
RUBIKS_ALL = UnlinkModel("rubiks-all")

_MOVE_FACE = np.array([int(m.face) for m in MOVES])
_MOVE_AXIS = np.array([int(FACE_AXIS[m.face]) for m in MOVES])


@dataclass(frozen=True)
class UnlinkFlags:
    """Bit ``(pair, axis)`` set means the pair is unlinked along ``axis``."""

    bits: np.ndarray  # (n_pairs, 3) bool

    @classmethod
    def empty(cls, model: UnlinkModel) -> "UnlinkFlags":
        return cls(np.zeros((model.n_pairs, 3), dtype=bool))

    def all_set(self) -> bool:
        return bool(self.bits.all())

    def __eq__(self, other):
        return isinstance(other, UnlinkFlags) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())


def update_flags(positions, move: Move, flags: UnlinkFlags, model: UnlinkModel = CORNERS) -> UnlinkFlags:
    """Flags after ``move``; ``positions[c]`` is the slot of cubie ``c``
    before the move."""
    members = face_members(move.face, "corners-only" if model.n_cubies == 8 else "full")
    axis = int(FACE_AXIS[move.face])
    bits = flags.bits.copy()
    for k, (a, b) in enumerate(model.pairs):
        if (positions[a] in members) != (positions[b] in members):
            bits[k, axis] = True
    return UnlinkFlags(bits)


def _simulate_block(model_name: str, seed: int, block: int, size: int, step_cap: int) -> np.ndarray:
    model = UnlinkModel(model_name)
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    dest = model.move_dest()
    on_face = model.on_face()
    pi, pj = np.array(model.pairs).T
    pos = np.tile(np.arange(model.n_cubies), (size, 1))
    flags = np.zeros((size, model.n_pairs), dtype=np.uint8)
    T = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    t = 0
    while len(active):
        if t >= step_cap:
            raise StepCapExceeded(f"{len(active)} trajectories still linked after {step_cap} steps")
        t += 1
        # draw for every trial so the stream does not depend on which trials finished
        moves = rng.integers(0, 18, size=size)[active]
        p = pos[active]
        member = on_face[_MOVE_FACE[moves][:, None], p]
        split = member[:, pi] != member[:, pj]
        f = flags[active] | (split.astype(np.uint8) << _MOVE_AXIS[moves][:, None].astype(np.uint8))
        flags[active] = f
        pos[active] = dest[moves[:, None], p]
        done = (f == 7).all(axis=1)
        T[active[done]] = t
        active = active[~done]
    return T


def simulate_T_many(
    model: UnlinkModel | str,
    trials: int,
    seed: int,
    jobs: int = 1,
    step_cap: int = DEFAULT_STEP_CAP,
) -> np.ndarray:
    """Per-trial stopping times for ``trials`` trajectories started at solved."""
    model = UnlinkModel(model) if isinstance(model, str) else model
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [
        (model.name, seed, k, min(BLOCK, trials - lo), step_cap)
        for k, lo in enumerate(range(0, trials, BLOCK))
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_simulate_block, *zip(*tasks)))
    else:
        parts = [_simulate_block(*task) for task in tasks]
    return np.concatenate(parts)


def simulate_T(model: UnlinkModel | str, seed: int, step_cap: int = DEFAULT_STEP_CAP) -> int:
    return int(simulate_T_many(model, 1, seed, step_cap=step_cap)[0])


@dataclass
class SurvivalCurve:
    t: np.ndarray
    p: np.ndarray  # estimate of P(t < T)
    stderr: np.ndarray
    trials: int

    @classmethod
    def from_times(cls, T: np.ndarray, t_max: int) -> "SurvivalCurve":
        t = np.arange(t_max + 1)
        counts = np.bincount(T, minlength=t_max + 2)
        # number of trials with T > t
        alive = len(T) - np.cumsum(counts)[: t_max + 1]
        p = alive / len(T)
        se = np.sqrt(p * (1 - p) / len(T))
        return cls(t, p, se, len(T))

    def rows(self):
        for t, p, se in zip(self.t, self.p, self.stderr):
            yield int(t), float(p), float(se), self.trials


def survival_curve(model, trials: int, seed: int, t_max: int, jobs: int = 1) -> SurvivalCurve:
    return SurvivalCurve.from_times(simulate_T_many(model, trials, seed, jobs), t_max)


class NoCrossing(ValueError):
    pass


def heuristic_mixing_bound(curve: SurvivalCurve, threshold: float = 0.25) -> int:
    """Smallest t with estimated P(t < T) <= threshold.

    Only heuristic: the bound d(t) <= P(t < T) needs T to be a strong uniform
    time, which it is not.
    """
    hit = np.flatnonzero(curve.p <= threshold)
    if not len(hit):
        raise NoCrossing(f"P(t<T) stays above {threshold} up to t={curve.t[-1]}; raise t_max")
    return int(curve.t[hit[0]])


@dataclass
class UnlinkStats:
    model: str
    trials: int
    seed: int
    mean_T: float
    stderr_T: float
    heuristic_bound: int | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def unlink_stats(model, trials: int, seed: int, jobs: int = 1, threshold: float = 0.25) -> UnlinkStats:
    model = UnlinkModel(model) if isinstance(model, str) else model
    T = simulate_T_many(model, trials, seed, jobs)
    curve = SurvivalCurve.from_times(T, int(T.max()))
    return UnlinkStats(
        model=model.name,
        trials=trials,
        seed=seed,
        mean_T=float(T.mean()),
        stderr_T=float(T.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan"),
        heuristic_bound=heuristic_mixing_bound(curve, threshold),
    )
