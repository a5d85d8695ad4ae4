"""Graph over (corner pair, unlink flags) and the order of two corners at T.

Vertices are ``(a, b, x, y, z)``: the slots of two tracked corners and whether
they have been unlinked along each axis.  Vertices with all three flags set
are sinks carrying a unit self-loop.  Two edge weightings are supported:

``chain``
    each of the 18 moves contributes 1/18 to its successor.
``paper``
    the successors of a vertex are the set obtained from every face and
    1..4 quarter turns (the fourth restoring the positions with updated
    flags); mass is split evenly over that set.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cube_model import FACE_AXIS, M, MOVE_PERM, MOVES, Face, face_members

SEMANTICS = ("chain", "paper")
METHODS = ("exact", "iterate")

Vertex = tuple  # (a, b, x, y, z)

_ON_FACE = [face_members(f) for f in Face]


def _flags_after(a: int, b: int, flags: tuple[bool, bool, bool], face: Face):
    fl = list(flags)
    if (a in _ON_FACE[face]) != (b in _ON_FACE[face]):
        fl[FACE_AXIS[face]] = True
    return tuple(fl)


def _successors(v: Vertex, semantics: str) -> dict[Vertex, float]:
    a, b, *flags = v
    if semantics == "chain":
        out: dict[Vertex, int] = {}
        for m in MOVES:
            fl = _flags_after(a, b, flags, m.face)
            w = (int(MOVE_PERM[m.index, a]), int(MOVE_PERM[m.index, b])) + fl
            out[w] = out.get(w, 0) + 1
        return {w: c / 18 for w, c in out.items()}
    succ = set()
    for face in Face:
        fl = _flags_after(a, b, flags, face)
        a2, b2 = a, b
        for _ in range(4):
            a2, b2 = M[face][a2], M[face][b2]
            succ.add((a2, b2) + fl)
    return {w: 1 / len(succ) for w in sorted(succ)}


def is_sink(v: Vertex) -> bool:
    return bool(v[2] and v[3] and v[4])


@dataclass
class PairGraph:
    root: Vertex
    semantics: str
    vertices: list[Vertex]
    edges: dict[Vertex, dict[Vertex, float]]
    index: dict[Vertex, int] = field(init=False)

    def __post_init__(self):
        self.index = {v: i for i, v in enumerate(self.vertices)}

    @property
    def sinks(self) -> list[Vertex]:
        return [v for v in self.vertices if is_sink(v)]

    def transition_matrix(self) -> np.ndarray:
        n = len(self.vertices)
        P = np.zeros((n, n))
        for v, out in self.edges.items():
            for w, p in out.items():
                P[self.index[v], self.index[w]] += p
        return P


def build_pair_graph(a0: int, b0: int, semantics: str = "chain") -> PairGraph:
    if a0 == b0:
        raise ValueError("a0 and b0 must be distinct corner slots")
    if semantics not in SEMANTICS:
        raise ValueError(f"semantics must be one of {SEMANTICS}")
    root = (a0, b0, False, False, False)
    vertices = [root]
    edges: dict[Vertex, dict[Vertex, float]] = {}
    stack = [root]
    seen = {root}
    while stack:
        v = stack.pop()
        if is_sink(v):
            edges[v] = {v: 1.0}
            continue
        edges[v] = _successors(v, semantics)
        for w in edges[v]:
            if w not in seen:
                seen.add(w)
                vertices.append(w)
                stack.append(w)
    g = PairGraph(root, semantics, vertices, edges)
    _check_reaches_sink(g)
    return g


def _check_reaches_sink(g: PairGraph) -> None:
    reverse: dict[Vertex, list[Vertex]] = {v: [] for v in g.vertices}
    for v, out in g.edges.items():
        for w in out:
            reverse[w].append(v)
    ok = set(g.sinks)
    stack = list(ok)
    while stack:
        for u in reverse[stack.pop()]:
            if u not in ok:
                ok.add(u)
                stack.append(u)
    if len(ok) != len(g.vertices):
        raise AssertionError("some vertices cannot reach a sink")


@dataclass
class MassState:
    mass: np.ndarray
    residuals: list[float]
    iterations: int
    converged: bool
    epsilon: float

    @property
    def residual(self) -> float:
        return self.residuals[-1]


class NotConverged(RuntimeError):
    pass


def spread_mass(g: PairGraph, epsilon: float = 1e-9, max_iters: int = 10_000) -> MassState:
    """Push mass from the root along the edges until less than ``epsilon``
    remains outside the sinks."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    P = g.transition_matrix()
    transient = np.array([not is_sink(v) for v in g.vertices])
    mass = np.zeros(len(g.vertices))
    mass[g.index[g.root]] = 1.0
    residuals = [float(mass[transient].sum())]
    it = 0
    while residuals[-1] >= epsilon and it < max_iters:
        mass = mass @ P
        residuals.append(float(mass[transient].sum()))
        it += 1
    return MassState(mass, residuals, it, residuals[-1] < epsilon, epsilon)


@dataclass
class Absorption:
    probabilities: np.ndarray  # per vertex; zero on transient vertices
    expected_time: float  # mean number of steps from the root to a sink


def absorption_exact(g: PairGraph) -> Absorption:
    P = g.transition_matrix()
    n = len(g.vertices)
    sink = np.array([is_sink(v) for v in g.vertices])
    root = g.index[g.root]
    out = np.zeros(n)
    if sink[root]:
        out[root] = 1.0
        return Absorption(out, 0.0)
    tr = np.flatnonzero(~sink)
    sk = np.flatnonzero(sink)
    A = np.eye(len(tr)) - P[np.ix_(tr, tr)]
    rhs = np.column_stack([P[np.ix_(tr, sk)], np.ones(len(tr))])
    sol = np.linalg.solve(A, rhs)
    r = int(np.flatnonzero(tr == root)[0])
    out[sk] = sol[r, :-1]
    return Absorption(out, float(sol[r, -1]))


@dataclass
class OrderResult:
    a0: int
    b0: int
    semantics: str
    method: str
    z: float  # absorbed mass
    q: float  # absorbed mass with a < b
    ci_low: float
    ci_high: float

    @property
    def p_before(self) -> float:
        return self.q / self.z

    @property
    def deviation(self) -> float:
        return abs(self.p_before - 0.5)

    def row(self) -> dict:
        return {
            "a0": self.a0,
            "b0": self.b0,
            "semantics": self.semantics,
            "method": self.method,
            "z": self.z,
            "p_before": self.p_before,
            "deviation": self.deviation,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }


def order_probability(
    g: PairGraph,
    method: str = "exact",
    epsilon: float = 1e-9,
    max_iters: int = 10_000,
) -> OrderResult:
    """Probability that the corner started at ``a0`` sits before the one
    started at ``b0`` when the pair first becomes fully unlinked.

    The interval ``[q, q + 1 - z]`` brackets the unconditional probability
    whatever the unabsorbed mass eventually does.
    """
    if method == "exact":
        mass = absorption_exact(g).probabilities
    elif method == "iterate":
        state = spread_mass(g, epsilon, max_iters)
        if not state.converged:
            raise NotConverged(
                f"residual {state.residual:.3g} >= {epsilon} after {max_iters} iterations"
            )
        mass = state.mass
    else:
        raise ValueError(f"method must be one of {METHODS}")
    sinks = [g.index[v] for v in g.sinks]
    before = [g.index[v] for v in g.sinks if v[0] < v[1]]
    z = float(mass[sinks].sum())
    q = float(mass[before].sum())
    a0, b0 = g.root[:2]
    return OrderResult(a0, b0, g.semantics, method, z, q, q, min(1.0, q + (1 - z)))


def _scan_one(args):
    a0, b0, semantics, method, epsilon, max_iters = args
    return order_probability(build_pair_graph(a0, b0, semantics), method, epsilon, max_iters)


@dataclass
class Scan:
    results: list[OrderResult]

    @property
    def max_deviation(self) -> float:
        return max(r.deviation for r in self.results)

    @property
    def argmax(self) -> OrderResult:
        return max(self.results, key=lambda r: r.deviation)


def scan_all_pairs(
    semantics: str = "chain",
    method: str = "exact",
    epsilon: float = 1e-9,
    jobs: int = 1,
    max_iters: int = 10_000,
) -> Scan:
    tasks = [
        (a, b, semantics, method, epsilon, max_iters)
        for a in range(8)
        for b in range(8)
        if a != b
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, tasks))
    else:
        results = [_scan_one(t) for t in tasks]
    return Scan(results)


# --- Monte Carlo cross-check --------------------------------------------------

MC_BLOCK = 1 << 16

_FACE_OF_MOVE = np.array([int(m.face) for m in MOVES])
_AXIS_OF_MOVE = np.array([int(FACE_AXIS[m.face]) for m in MOVES], dtype=np.uint8)
_ON_FACE_ARR = np.array([[s in _ON_FACE[f] for s in range(8)] for f in Face])


def _mc_block(a0: int, b0: int, seed: int, block: int, size: int):
    rng = np.random.default_rng(np.random.SeedSequence([seed, a0, b0, block]))
    a = np.full(size, a0)
    b = np.full(size, b0)
    flags = np.zeros(size, dtype=np.uint8)
    T = np.zeros(size, dtype=np.int64)
    before = np.zeros(size, dtype=bool)
    active = np.arange(size)
    t = 0
    while len(active):
        t += 1
        moves = rng.integers(0, 18, size=size)[active]
        fa = _ON_FACE_ARR[_FACE_OF_MOVE[moves], a[active]]
        fb = _ON_FACE_ARR[_FACE_OF_MOVE[moves], b[active]]
        flags[active] |= (fa != fb).astype(np.uint8) << _AXIS_OF_MOVE[moves]
        a[active] = MOVE_PERM[moves, a[active]]
        b[active] = MOVE_PERM[moves, b[active]]
        done = flags[active] == 7
        fin = active[done]
        T[fin] = t
        before[fin] = a[fin] < b[fin]
        active = active[~done]
    return int(before.sum()), T


@dataclass
class MonteCarloOrder:
    a0: int
    b0: int
    trials: int
    seed: int
    p_before: float
    stderr: float
    mean_T: float
    stderr_T: float


def monte_carlo_order_check(a0: int, b0: int, trials: int, seed: int, jobs: int = 1) -> MonteCarloOrder:
    """Simulate the chain tracking two corners until the pair is fully
    unlinked and record how often the first precedes the second."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [
        (a0, b0, seed, k, min(MC_BLOCK, trials - lo))
        for k, lo in enumerate(range(0, trials, MC_BLOCK))
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_mc_block, *zip(*tasks)))
    else:
        parts = [_mc_block(*t) for t in tasks]
    hits = sum(p[0] for p in parts)
    T = np.concatenate([p[1] for p in parts])
    p = hits / trials
    return MonteCarloOrder(
        a0,
        b0,
        trials,
        seed,
        p,
        math.sqrt(p * (1 - p) / trials),
        float(T.mean()),
        float(T.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan"),
    )
