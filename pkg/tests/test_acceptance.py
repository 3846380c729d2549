"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import contextlib
import math
import time

import numpy as np
import pytest

from activegear import (AircraftParams, BeesConfig, SearchSpace, State, assemble_matrices,
                        bees_optimize, improvement_pct, itae, psd, simulate, step, three_point,
                        tune_controller)
from activegear.analysis import change_pct, rms
from activegear.cli import cmd_compare, cmd_simulate
from activegear.config import ExperimentConfig, dumps_config, loads_config
from activegear.dynamics import SystemMatrices, mechanical_energy
from activegear.scenarios import (METRICS, Configuration, reference_configurations,
                                  run_comparison, sensitivity_variant, tuned_configuration)
from activegear.tuning import baseline_vector, make_fitness
from activegear.controller import Controller


@pytest.fixture
def gate(capsys, request):
    """Run the body, check its runtime budget, print one verdict line."""
    @contextlib.contextmanager
    def run(number, title, budget_s):
        start = time.perf_counter()
        ok, detail, notes = False, "", {}
        try:
            yield notes
            elapsed = time.perf_counter() - start
            if elapsed > budget_s:
                raise AssertionError(f"runtime {elapsed:.1f} s over budget {budget_s} s")
            ok = True
        except BaseException as exc:
            detail = f" ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
            raise
        finally:
            elapsed = time.perf_counter() - start
            with capsys.disabled():
                extra = "".join(f" {k}={v}" for k, v in notes.items())
                print(f"\nCRITERION {number} {'PASS' if ok else 'FAIL'} [{elapsed:.1f} s] {title}{extra}{detail}")
    return run


# -- 1 -----------------------------------------------------------------------

def _closed_form(p):
    a, b, d, e = p.a, p.b, p.d, p.e
    de = d - e

    def block(s1, s2, s3, t1, t2, t3):
        l1 = s1 + s2 + s3
        l2 = -a * s1 + b * s2 + b * s3
        l3 = -de * s1 - d * s2 + e * s3
        l4 = a * a * s1 + b * b * s2 + b * b * s3
        l5 = de * a * s1 - d * b * s2 + e * b * s3
        l6 = de * de * s1 + d * d * s2 + e * e * s3
        return np.array([
            [l1, l2, l3, -s1, -s2, -s3],
            [l2, l4, l5, a * s1, -b * s2, -b * s3],
            [l3, l5, l6, de * s1, d * s2, -e * s3],
            [-s1, a * s1, de * s1, s1 + t1, 0, 0],
            [-s2, -b * s2, d * s2, 0, s2 + t2, 0],
            [-s3, -b * s3, -e * s3, 0, 0, s3 + t3],
        ])
    mass = np.diag([p.sprung_mass, p.pitch_inertia, p.roll_inertia, p.m1, p.m2, p.m3])
    damping = block(p.cs1, p.cs2, p.cs3, 0, 0, 0)
    stiffness = block(p.ks1, p.ks2, p.ks3, p.kt1, p.kt2, p.kt3)
    return mass, damping, stiffness


def test_criterion_1_matrix_assembly(gate):
    with gate(1, "matrix assembly matches closed forms", 1.0):
        p = AircraftParams.a320()
        mats = assemble_matrices(p)
        for got, want in zip((mats.mass, mats.damping, mats.stiffness), _closed_form(p)):
            assert got.shape == (6, 6)
            scale = np.abs(want).max()
            assert np.abs(got - want).max() <= 4 * np.finfo(float).eps * scale
        assert mats.mass[0, 0] == 64_500 and mats.mass[1, 1] == 3_781_268


# -- 2 -----------------------------------------------------------------------

PASSIVE_ACTIVE = {  # metric: passive, ZN, BA1, BA2
    "bounce_displacement": (0.0643, 0.0344, 0.0220, 0.0062),
    "bounce_momentum": (2.6240e4, 2.1692e4, 1.6822e4, 8.3978e3),
    "pitch_displacement": (0.0080, 0.0037, 0.0022, 0.0005),
    "pitch_momentum": (1.5959e5, 6.1059e4, 5.0750e4, 1.4606e4),
    "suspension_travel": (0.0528, 0.0245, 0.0120, 0.0096),
    "suspension_force": (8.7877e4, 4.3360e4, 2.1936e4, 1.5568e4),
}
IMPROVEMENT = {
    "bounce_displacement": (46, 65, 90),
    "bounce_momentum": (17, 35, 68),
    "pitch_displacement": (53, 72, 93),
    "pitch_momentum": (61, 68, 90),
    "suspension_travel": (53, 77, 82),
    "suspension_force": (50, 75, 82),
}
TAIL_DOWN = {"bounce_displacement": ((0.2128, 0.0718, 0.0430), (66, 80)),
             "bounce_momentum": ((7.1912e4, 2.4720e4, 2.7421e4), (65, 61))}
ONE_WHEEL = {"bounce_displacement": ((0.2346, 0.0894, 0.0620), (62, 74)),
             "bounce_momentum": ((7.3763e4, 3.5133e4, 4.5592e4), (52, 38))}


def test_criterion_2_improvement_arithmetic(gate):
    with gate(2, "improvement tables reproduce within one point", 1.0):
        checks = []
        for m, (base, *active) in PASSIVE_ACTIVE.items():
            for value, expected in zip(active, IMPROVEMENT[m]):
                checks.append((m, improvement_pct(base, value), expected))
        for table in (TAIL_DOWN, ONE_WHEEL):
            for m, ((base, *active), expected) in table.items():
                for value, pub in zip(active, expected):
                    checks.append((m, improvement_pct(base, value), pub))
        assert len(checks) == 18 + 4 + 4
        bad = [c for c in checks if abs(c[1] - c[2]) > 1]
        assert not bad, bad


# -- 3 -----------------------------------------------------------------------

def test_criterion_3_qualitative_ordering(gate):
    with gate(3, "three-point ordering passive > ZN > BA1 > BA2, every metric improved >= 20%", 30.0):
        rep = run_comparison(three_point(), reference_configurations())
        bounce = [rep.rms[k]["bounce_displacement"] for k in ("passive", "zn", "ba1", "ba2")]
        improvements = {k: rep.improvement[k] for k in ("zn", "ba1", "ba2")}
        low = {(k, m): v for k, row in improvements.items() for m, v in row.items() if v < 20}
        assert bounce[0] > bounce[1] > bounce[2] > bounce[3], f"bounce RMS {bounce}"
        assert not low, f"improvements below 20%: {low}"


# -- 4 -----------------------------------------------------------------------

def test_criterion_4_sensitivity(gate):
    with gate(4, "+20% sprung mass changes each BA2 metric by at most 30%", 30.0):
        ba2 = tuned_configuration(2)
        nominal = run_comparison(three_point(), [Configuration("passive"), ba2])
        heavy = run_comparison(sensitivity_variant(three_point(), 0.2), [Configuration("passive"), ba2])
        changes = {m: change_pct(nominal.rms["ba2"][m], heavy.rms["ba2"][m]) for m in METRICS}
        assert all(abs(v) <= 30.0 for v in changes.values()), changes


# -- 5 -----------------------------------------------------------------------

def _sphere(x):
    return float(np.dot(x, x))


def test_criterion_5_optimizer(gate):
    with gate(5, "Bees: sphere 10/10 seeds, evaluation count, monotone history, parallel determinism", 60.0):
        space = SearchSpace.box(14, -5.0, 5.0)
        finals = []
        for seed in range(10):
            cfg = BeesConfig(max_iterations=100, rng_seed=seed)
            calls = []
            res = bees_optimize(lambda x: calls.append(1) or _sphere(x), space, cfg)
            finals.append(res.best.fitness)
            per = cfg.n_elite * cfg.recruits_elite + (cfg.n_selected - cfg.n_elite) * cfg.recruits_other \
                + (cfg.n_scouts - cfg.n_selected)
            assert res.evaluations[1:] == [per] * 99 and per == 452
            assert len(calls) == cfg.n_scouts + 99 * per
            assert all(b <= a for a, b in zip(res.history, res.history[1:]))
        assert max(finals) < 1e-2, finals
        cfg = BeesConfig(max_iterations=20, rng_seed=11)
        serial = bees_optimize(_sphere, space, cfg, workers=1)
        parallel = bees_optimize(_sphere, space, cfg, workers=8)
        assert serial.history == parallel.history and serial.mean_history == parallel.mean_history
        assert serial.best.position.tobytes() == parallel.best.position.tobytes()


# -- 6 -----------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_6_tuning_beats_baseline(gate):
    with gate(6, "type-1 tuning (30 iterations, N=60) is no worse than Ziegler-Nichols", 600.0) as notes:
        params = AircraftParams.a320()
        res = tune_controller(three_point(), 1, cfg=BeesConfig(n_scouts=60, max_iterations=30),
                              params=params, workers=4)
        zn = make_fitness(three_point(), 1, params)(baseline_vector(params))
        notes["best"], notes["zn"] = f"{res.fitness:.6g}", f"{zn:.6g}"
        assert math.isfinite(res.fitness) and res.fitness <= zn


# -- 7 -----------------------------------------------------------------------

def _rk4_error(dt, m=1.0, c=2.0, k=100.0, T=1.0):
    mats = SystemMatrices(np.diag([m, 1, 1, 1, 1, 1.0]), np.diag([c, 0, 0, 0, 0, 0.0]),
                          np.diag([k, 1, 1, 1, 1, 1.0]))
    p = AircraftParams.a320()
    s = State([0.1, 0, 0, 0, 0, 0], [0.5, 0, 0, 0, 0, 0])
    for i in range(int(round(T / dt))):
        s = step(s, i * dt, dt, lambda t, x: (0.0, 0.0, 0.0), p, mats)
    wn, zeta = math.sqrt(k / m), c / (2 * math.sqrt(k * m))
    wd, sig = wn * math.sqrt(1 - zeta ** 2), zeta * wn
    exact = math.exp(-sig * T) * (0.1 * math.cos(wd * T) + (0.5 + sig * 0.1) / wd * math.sin(wd * T))
    return abs(s.q[0] - exact)


def test_criterion_7_numerical_properties(gate):
    with gate(7, "RK4 order, energy decay, roll symmetry, Parseval, ITAE order", 60.0):
        errs = [_rk4_error(dt) for dt in (0.01, 0.005, 0.0025)]
        slopes = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert all(3.7 <= s <= 4.3 for s in slopes), slopes

        p = AircraftParams.a320()
        traj = simulate(p, State([0, 0.05, 0.02, 0, 0, 0], [3, 0, 0, 3, 3, 3]), None, duration=5.0)
        E = mechanical_energy(traj.states, assemble_matrices(p))
        assert np.max(np.diff(E)) <= 1e-6 * E[0]

        for config in reference_configurations():
            t = simulate(p, three_point().initial_state(),
                         None if config.passive else Controller(config.controller), duration=5.0)
            assert np.abs(t.coords[:, 2]).max() <= 1e-9
            assert np.abs(t.states[:, 4] - t.states[:, 5]).max() <= 1e-9

        rng = np.random.default_rng(0)
        for n in (64, 501, 1000):
            x = rng.normal(size=n)
            spec = psd(x, 1e-3)
            total = np.sum(spec.psd) / (n * 1e-3)
            assert abs(total - np.mean(x * x)) <= 1e-6 * np.mean(x * x)

        def itae_err(n):
            tt = np.linspace(0, 2, n)
            return abs(itae(np.exp(-tt), tt) - (1 - 3 * math.exp(-2)))
        ie = [itae_err(n) for n in (101, 201, 401)]
        assert all(1.9 <= math.log2(ie[i] / ie[i + 1]) <= 2.1 for i in range(2))


# -- 8 -----------------------------------------------------------------------

def test_criterion_8_determinism_io(gate, tmp_path):
    with gate(8, "simulate/compare reruns byte-identical, config round-trip, report recomputes", 60.0):
        cfg = ExperimentConfig()
        assert loads_config(dumps_config(cfg)) == cfg
        assert dumps_config(loads_config(dumps_config(cfg))) == dumps_config(cfg)
        for d in ("a", "b"):
            cmd_simulate(cfg, tmp_path / d)
            cmd_compare(cfg, tmp_path / d)
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
        for name in files:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

        lines = (tmp_path / "a" / "report_three_point.csv").read_text().splitlines()
        header = lines[0].split(",")
        table = {row.split(",")[0]: row.split(",")[1:] for row in lines[1:]}
        for m in METRICS:
            base = float(table[m][0])
            for j in range(len(header) - 1):
                assert int(table[f"improvement_{m}"][j]) == improvement_pct(base, float(table[m][j]))
        traj = np.loadtxt(tmp_path / "a" / "trajectory_passive.csv", delimiter=",", skiprows=1)
        metrics = {row.split(",")[0]: row.split(",")[1:] for row in
                   (tmp_path / "a" / "metrics_three_point.csv").read_text().splitlines()[1:]}
        assert float(metrics["bounce_displacement"][0]) == pytest.approx(rms(traj[:, 1]), rel=1e-12)
        assert float(table["bounce_displacement"][0]) == float(metrics["bounce_displacement"][0])
