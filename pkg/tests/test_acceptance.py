"""Exit criteria. Each test records a one-line detail shown in the
"acceptance criteria" section of the pytest summary."""
import math
import time

import numpy as np
import pytest

from scrollforge import (
    AffinePiece,
    Chaos01Config,
    Divergence,
    IntegrationConfig,
    PWLSystem,
    RegionPredicate,
    SubsystemParams,
    chaos01_K,
    has_equilibrium,
    integrate,
    lle_benettin,
    subsystem_solution,
    symbol_sequence,
    virtual_equilibria,
)
from scrollforge.cli import main


# 1. 0-1 test ----------------------------------------------------------------

@pytest.mark.parametrize("fixture,x0,expected", [
    ("ex1_triple", (0.0, 0.0, 0.0), 0.9930),
    ("ex2_triple", (0.1, 0.1, 0.1), 0.9962),
])
def test_c1_zero_one_test(fixture, x0, expected, request, record_property):
    sys = request.getfixturevalue(fixture)
    start = time.perf_counter()
    # step 0.01, tau = 0.25 -> every 25th step, N = 2000 samples of x3
    traj = integrate(sys, IntegrationConfig(x0, 2000 * 0.25, 0.01, 25))
    k, per_c = chaos01_K(traj, Chaos01Config.seeded(42, series_length=2000))
    elapsed = time.perf_counter() - start
    record_property("detail", f"{sys.name}: K = {k:.4f} (target {expected} +- 0.05), {elapsed:.1f} s")
    assert abs(k - expected) <= 0.05
    assert elapsed < 60


# 2. Largest Lyapunov exponent --------------------------------------------

@pytest.mark.parametrize("fixture,expected", [("ex1_double", 0.97), ("ex1_triple", 1.056)])
def test_c2_lyapunov(fixture, expected, request, record_property):
    sys = request.getfixturevalue(fixture)
    lle = lle_benettin(sys, IntegrationConfig((0, 0, 0), 500.0, 0.01), transient=50.0)
    record_property("detail", f"{sys.name}: LLE = {lle:.3f} (target {expected} +- 0.2)")
    assert abs(lle - expected) <= 0.2


def test_c2_lyapunov_contracting_control(record_property):
    sys = PWLSystem((AffinePiece(RegionPredicate(), np.diag([-1.0, -2.0, -3.0]), (0, 0, 0)),))
    lle = lle_benettin(sys, IntegrationConfig((1, 1, 1), 500.0, 0.01))
    record_property("detail", f"linear control: LLE = {lle:.4f} (analytic -1 +- 0.05)")
    assert abs(lle + 1.0) <= 0.05


# 3. Equilibrium-freeness -------------------------------------------------

@pytest.mark.parametrize("name", ["example1-double", "example1-triple", "example2-triple"])
def test_c3_equilibrium_free(name, capsys, record_property):
    assert main(["verify", "--system", name]) == 0
    out = capsys.readouterr().out
    verdict = out.strip().splitlines()[-1]
    record_property("detail", f"{name}: {verdict}")
    assert verdict == "equilibrium-free: yes"


def test_c3_mechanisms(ex1_double, ex1_triple, ex2_triple, record_property):
    # singular A: every off-plane piece fails the rank condition
    for sys in (ex1_double, ex1_triple):
        off_plane = [p for p in sys.pieces if p.b_vector[2] != 0]
        assert off_plane and not any(has_equilibrium(p.a_matrix, p.b_vector) for p in off_plane)
    # invertible A: every virtual equilibrium lies outside its own guard
    eqs = virtual_equilibria(ex2_triple)
    record_property("detail", f"example2-triple: {sum(not e.inside_guard for e in eqs)}/18 virtual equilibria outside")
    assert len(eqs) == 18 and all(e.inside_guard is False for e in eqs)


# 4. Closed-form oracle ---------------------------------------------------

def test_c4_oracle_equivalence(record_property):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        params = SubsystemParams(
            m=rng.uniform(-1, 1), n=rng.uniform(-20, 20), eta=rng.uniform(-1, 1),
            k1=rng.uniform(-2, 2), k2=rng.uniform(-2, 2), v=rng.uniform(-5, 5),
        )
        x0 = rng.uniform(-1, 1, 3)
        sys = PWLSystem((params.piece(),))
        traj = integrate(sys, IntegrationConfig(x0, 0.1, 1e-4, 1))
        exact = subsystem_solution(params, x0, traj.times)
        worst = max(worst, float(np.max(np.abs(traj.states - exact))))
    record_property("detail", f"100 draws, max |RK4 - closed form| = {worst:.2e} (tol 1e-6)")
    assert worst < 1e-6


# 5 & 6. Symbol grammar and boundedness ------------------------------------

@pytest.fixture(scope="module")
def long_runs(ex1_triple, ex2_triple):
    rng = np.random.default_rng(99)
    runs = []
    for sys in (ex1_triple, ex2_triple):
        for _ in range(10):
            x0 = rng.uniform(-0.1, 0.1, 3)
            try:
                traj = integrate(sys, IntegrationConfig(x0, 500.0, 0.01, 1))
            except Divergence as exc:
                runs.append((sys.name, x0, exc))
                continue
            runs.append((sys.name, x0, traj))
    return runs


def test_c5_symbol_grammar(long_runs, record_property):
    failures = []
    for name, x0, traj in long_runs:
        if isinstance(traj, Exception):
            failures.append((name, x0, "diverged"))
            continue
        s = symbol_sequence(traj)
        if set(s) != set("135") or "15" in s or "51" in s:
            failures.append((name, x0, s[:40]))
    record_property("detail", f"{len(long_runs) - len(failures)}/{len(long_runs)} runs over {{1,3,5}} "
                              "with all symbols and no 15/51")
    assert not failures


def test_c6_boundedness(long_runs, record_property):
    diverged = [r for r in long_runs if isinstance(r[2], Exception)]
    assert not diverged
    worst = max(traj.max_abs for _, _, traj in long_runs)
    record_property("detail", f"{len(long_runs)} runs of 500 s, max |x_i| = {worst:.3f} (bound 20)")
    assert worst < 20


# 7. Perturbed axial eigenvalue ------------------------------------------

def test_c7_eta_negative_reaches_plane(record_property):
    eta, speed = -0.01, 5.0
    details = []
    for x3_0, v in ((1.0, -speed), (-1.0, speed)):  # v points toward x3 = 0
        params = SubsystemParams(0.5, 10.0, eta, 0.0, 0.0, v)
        # x3(t) = e^{eta t}(x3_0 + v/eta) - v/eta = 0
        t_hit = math.log((v / eta) / (x3_0 + v / eta)) / eta
        assert math.isfinite(t_hit) and t_hit > 0
        np.testing.assert_allclose(subsystem_solution(params, (0, 0, x3_0), t_hit)[2], 0.0, atol=1e-12)
        h = 0.001
        traj = integrate(PWLSystem((params.piece(),)), IntegrationConfig((0, 0, x3_0), 1.0, h))
        crossed = np.flatnonzero(np.sign(traj.states[:, 2]) != np.sign(x3_0))
        assert crossed.size
        t_num = traj.times[crossed[0]]
        assert t_hit <= t_num < t_hit + h + 1e-12
        np.testing.assert_allclose(traj.states, subsystem_solution(params, (0, 0, x3_0), traj.times),
                                   atol=1e-9)
        details.append(f"x3(0)={x3_0:+g}: t_hit {t_hit:.5f} vs RK4 {t_num:.3f}")
    record_property("detail", "; ".join(details))


def test_c7_eta_positive_diverges(record_property):
    eta, v = 0.1, -5.0  # flow toward S1 from above, x3(0) beyond |v|/eta = 50
    params = SubsystemParams(0.5, 10.0, eta, 0.0, 0.0, v)
    x3_0 = 60.0
    ts = np.array([0.0, 50.0, 100.0, 150.0])
    x3 = subsystem_solution(params, (0, 0, x3_0), ts)[:, 2]
    assert np.all(np.diff(x3) > 0) and x3[-1] > 1e7
    # numerically the orbit leaves |x| < 1e6 where 10 e^{0.1 t} + 50 = 1e6
    t_exit = math.log((1e6 - 50.0) / 10.0) / eta
    with pytest.raises(Divergence) as exc:
        integrate(PWLSystem((params.piece(),)), IntegrationConfig((0, 0, x3_0), 300.0, 0.01, bound=1e6))
    assert abs(exc.value.time - t_exit) < 0.02
    record_property("detail", f"closed form x3(150) = {x3[-1]:.3g}; RK4 exits 1e6 at t = "
                              f"{exc.value.time:.2f} (analytic {t_exit:.2f})")
