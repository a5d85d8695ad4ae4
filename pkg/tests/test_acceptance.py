"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line, printed in the terminal summary.
"""

import csv
import io
import json

import numpy as np
import pytest

from cubemix import canonical_index as ci
from cubemix import distribution_engine as de
from cubemix import pair_graph as pg
from cubemix import verify
from cubemix.cli import run

from conftest import ACCEPTANCE_LINES
from test_distribution_engine import brute_force

TRIALS = 100_000
MC_TRIALS = 1_000_000


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def _cli(capsys, *argv):
    code = run([*argv, "-q"])
    out = capsys.readouterr().out
    assert code == 0
    return out


@pytest.fixture(scope="module")
def corners_stats(capsys_module):
    return capsys_module("unlink", "stats", "--model", "corners", "--trials", str(TRIALS), "--seed", "1")


@pytest.fixture(scope="module")
def capsys_module(tmp_path_factory):
    def call(*argv):
        out = tmp_path_factory.mktemp("acc") / "out.json"
        assert run([*argv, "--out", str(out), "-q"]) == 0
        return json.loads(out.read_text())

    return call


def test_1_pocket_mixing_time(capsys, cache_dir, tables):
    out = _cli(capsys, "mixing", "exact-pocket", "--cache-dir", str(cache_dir))
    rows = list(csv.DictReader(io.StringIO(out)))
    d = {int(r["t"]): float(r["tv_distance"]) for r in rows}
    last = int(rows[-1]["t"])
    ok = last == 19 and d[19] <= 0.25 < d[18]
    record(1, ok, f"tau={last}, d(18)={d[18]:.6f}, d(19)={d[19]:.6f}")


def test_2_reachable_state_count(capsys, cache_dir, tables):
    report = json.loads(_cli(capsys, "verify", "group", "--cache-dir", str(cache_dir)))
    ok = report["reachable_states"] == 3_674_160 and report["ok"]
    record(2, ok, f"BFS states={report['reachable_states']}, checks ok={report['ok']}")


def test_3_expected_unlink_time_corners(corners_stats):
    m = corners_stats["mean_T"]
    record(3, 26.5 <= m <= 27.5, f"corners mean T={m:.3f} (+-{corners_stats['stderr_T']:.3f}), target [26.5, 27.5]")


def test_4_expected_unlink_time_all(capsys_module):
    s = capsys_module("unlink", "stats", "--model", "rubiks-all", "--trials", str(TRIALS), "--seed", "1")
    m = s["mean_T"]
    record(4, 40 <= m <= 42, f"all-cubies mean T={m:.3f} (+-{s['stderr_T']:.3f}), target [40, 42]")


def test_5_heuristic_bounds(capsys_module):
    c = capsys_module("bound", "heuristic", "--model", "corners", "--trials", str(TRIALS), "--seed", "1")
    r = capsys_module("bound", "heuristic", "--model", "rubiks-all", "--trials", str(TRIALS), "--seed", "1")
    bc, br = c["heuristic_bound"], r["heuristic_bound"]
    ok = abs(bc - 31) <= 1 and abs(br - 46) <= 1
    record(5, ok, f"bounds corners={bc} (target 31+-1), all-cubies={br} (target 46+-1)")


def test_6_refutation(capsys):
    paper = json.loads(_cli(capsys, "pairgraph", "scan", "--semantics", "paper", "--format", "json"))
    chain = json.loads(
        _cli(capsys, "pairgraph", "scan", "--semantics", "chain", "--method", "exact", "--format", "json")
    )
    worst = max(chain["rows"], key=lambda r: r["deviation"])
    mc = pg.monte_carlo_order_check(worst["a0"], worst["b0"], MC_TRIALS, 1)
    within = abs(mc.p_before - worst["p_before"]) <= 3 * mc.stderr
    # the simulated deviation itself is many standard errors from 1/2
    off_half = abs(mc.p_before - 0.5) > 3 * mc.stderr
    ok = paper["max_deviation"] > 0.026 and chain["max_deviation"] > 10 * 1e-9 and within and off_half
    record(
        6,
        ok,
        f"paper max dev={paper['max_deviation']:.6f}, chain max dev={chain['max_deviation']:.6f} "
        f"at ({worst['a0']},{worst['b0']}), MC p={mc.p_before:.5f}+-{mc.stderr:.5f} vs exact {worst['p_before']:.5f}",
    )


def test_7_oracle_equivalence():
    worst_mass, worst_sym = 0.0, 0.0
    for sem in pg.SEMANTICS:
        p = {}
        for a0 in range(8):
            for b0 in range(8):
                if a0 == b0:
                    continue
                g = pg.build_pair_graph(a0, b0, sem)
                exact = pg.absorption_exact(g).probabilities
                it = pg.spread_mass(g, 1e-9).mass
                sinks = [g.index[v] for v in g.sinks]
                worst_mass = max(worst_mass, float(np.abs(exact[sinks] - it[sinks]).max()))
                p[(a0, b0)] = pg.order_probability(g, "exact").p_before
        worst_sym = max(worst_sym, max(abs(p[(a, b)] + p[(b, a)] - 1) for a, b in p))
    ok = worst_mass < 1e-8 and worst_sym < 1e-9
    record(7, ok, f"max |iterate-exact|={worst_mass:.2e} (<1e-8), max symmetry error={worst_sym:.2e} (<1e-9)")


def test_8_property_suite(tables):
    checks = {
        "m rows": verify.check_move_table_rows(),
        "order 4": verify.check_order_four(),
        "opposite commute": verify.check_opposite_commute(),
        "conjugation": verify.check_conjugation(),
    }
    checks.update(verify.check_tables(tables))

    # flag monotonicity along pair-graph edges, both semantics
    mono = True
    for sem in pg.SEMANTICS:
        g = pg.build_pair_graph(1, 7, sem)
        mono &= all(all(w[i] >= v[i] for i in (2, 3, 4)) for v, out in g.edges.items() for w in out)
    checks["flag monotonicity"] = mono

    p = de.initial_distribution(0)
    conserved = True
    for _ in range(20):
        p = de.step(p, tables)
        conserved &= abs(p.sum() - 1) < 1e-9
    checks["mass conservation"] = conserved

    u = np.full(ci.N_STATES, 1 / ci.N_STATES)
    checks["stationarity"] = bool(np.abs(de.step(u, tables) - u).max() < 1e-12)

    two = de.step(de.step(de.initial_distribution(0), tables), tables)
    expected = brute_force(2)
    checks["two-step brute force"] = np.count_nonzero(two) == len(expected) and all(
        abs(two[i] - v) < 1e-15 for i, v in expected.items()
    )
    failed = [k for k, v in checks.items() if not v]
    record(8, not failed, f"{len(checks) - len(failed)}/{len(checks)} properties hold" + (f"; failed {failed}" if failed else ""))


def test_9_determinism(tmp_path, cache_dir, tables):
    commands = [
        ["unlink", "stats", "--model", "corners", "--trials", "30000", "--seed", "7"],
        ["unlink", "curve", "--model", "rubiks-all", "--trials", "20000", "--seed", "7", "--tmax", "80"],
        ["bound", "heuristic", "--model", "corners", "--trials", "30000", "--seed", "7"],
        ["pairgraph", "scan", "--semantics", "paper", "--method", "iterate"],
        ["pairgraph", "mc", "--a0", "1", "--b0", "7", "--trials", "200000", "--seed", "7"],
        ["mixing", "exact-pocket", "--cache-dir", str(cache_dir)],
    ]
    mismatched = []
    for k, cmd in enumerate(commands):
        blobs = []
        for rep, jobs in enumerate(("1", "2", "1")):
            out = tmp_path / f"{k}_{rep}.out"
            assert run([*cmd, "--jobs", jobs, "--out", str(out), "-q"]) == 0
            blobs.append(out.read_bytes())
        if len(set(blobs)) != 1:
            mismatched.append(" ".join(cmd[:2]))
    record(9, not mismatched, f"{len(commands) - len(mismatched)}/{len(commands)} commands byte-identical across runs and --jobs")
