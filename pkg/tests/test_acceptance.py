"""Acceptance criteria, one test per criterion, each printing a PASS line.

Heavy runs (the reference multistart, the level comparison, the far-field
experiment) are module-scoped fixtures shared by the criteria that assert on
them; their wall-clock budgets are asserted alongside the numerics.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from helmdual import (
    BumpDescriptor,
    Coefficient,
    DescentConfig,
    Exponents,
    Field,
    FunctionalContext,
    GridSpec,
    build_asymptotic_coefficient,
    compare_levels,
    decay_and_expansion_check,
    equal_area_directions,
    farfield_amplitude,
    multistart_search,
    odd_power,
    ps_boundedness_check,
    orbit_distance,
    resolvent_apply,
    spectral_laplacian,
)
from conftest import make_sine_context, mode_field, random_field

REFERENCE_SEED = 12345


def _report(number, name):
    print(f"\nACCEPTANCE {number:02d} {name}: PASS")


# ---------------------------------------------------------------------------
# shared heavy fixtures
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def reference_run():
    """Standard configuration: N=2, p=7, L=6, n=96, Q = 1 + 0.5 sin sin."""
    ctx = make_sine_context(n=96, L=6.0, p=7.0)
    cfg = DescentConfig(multistart_count=20, rng_seed=REFERENCE_SEED,
                        tol_residual=1e-8, max_iters=2000)
    t0 = time.time()
    result = multistart_search(ctx, cfg)
    elapsed = time.time() - t0
    return ctx, cfg, result, elapsed


@pytest.fixture(scope="module")
def compare_run():
    ctx = make_sine_context(n=96, L=6.0, p=7.0)
    bump = BumpDescriptor(center=(3.0, 3.0), radius=1.2, amplitude=0.3)
    pair = build_asymptotic_coefficient(ctx.coefficient, bump)
    cfg = DescentConfig(multistart_count=20, rng_seed=REFERENCE_SEED)
    t0 = time.time()
    report = compare_levels(pair, ctx.exponents, cfg)
    elapsed = time.time() - t0
    return ctx, pair, report, elapsed


@pytest.fixture(scope="module")
def farfield_run():
    grid = GridSpec(3, 16.0, 64, shell_epsilon=1.0)
    mesh = grid.coordinate_mesh()
    center = (9.2, 8.7, 8.4)  # off-center source decoheres shell phases
    r2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    s2 = r2 / 1.6 ** 2
    q = np.where(s2 < 1.0, 2.0 * np.exp(1.0 - 1.0 / np.maximum(1e-300, 1.0 - s2)), 0.0)
    coeff = Coefficient.build(Field(grid, q), 5.0, periodic=False)
    ctx = FunctionalContext(grid, Exponents(3, 5.0), coeff)
    cfg = DescentConfig(multistart_count=2, rng_seed=REFERENCE_SEED)
    t0 = time.time()
    result = multistart_search(ctx, cfg)
    rec = result.records[0]
    dirs = equal_area_directions(3, 200)
    samples = farfield_amplitude(ctx, rec.u_star, dirs)
    attenuated = farfield_amplitude(
        ctx, rec.u_star, dirs, wavenumber=complex(np.sqrt(1.0 + 1.0j))
    )
    report = decay_and_expansion_check(ctx, rec.u_star, attenuated)
    elapsed = time.time() - t0
    return ctx, rec, samples, report, elapsed


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_criterion_01_operator_exactness():
    t0 = time.time()
    grid = GridSpec(2, 6.0, 32)
    n = grid.points_per_axis
    scale = (2.0 * np.pi / grid.box_length) ** 2
    worst = 0.0
    for mx in range(-n // 2, n // 2):
        for my in range(-n // 2, n // 2):
            if mx == 0 and my == 0:
                continue
            sigma = 1.0 / (scale * (mx * mx + my * my) - 1.0)
            for kind in ("cos", "sin"):
                f = mode_field(grid, (mx, my), kind)
                norm = f.inner(f)
                if norm < 1e-12 * grid.box_length ** 2:
                    continue  # Nyquist sine samples to zero; no such grid mode
                factor = f.inner(resolvent_apply(f)) / norm
                worst = max(worst, abs(factor - sigma) / abs(sigma))
    assert worst <= 1e-13

    rng = np.random.default_rng(1)
    f = random_field(grid, rng)
    rf = resolvent_apply(f)
    identity = (-spectral_laplacian(rf) - rf).values - f.values
    rel = np.max(np.abs(identity)) / np.max(np.abs(f.values))
    assert rel <= 1e-12

    elapsed = time.time() - t0
    assert elapsed < 5.0
    _report(1, f"operator exactness (eig {worst:.1e}, identity {rel:.1e}, {elapsed:.1f}s)")


def test_criterion_02_k_symmetry():
    t0 = time.time()
    ctx = make_sine_context(n=48)
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        v, w = random_field(ctx, rng), random_field(ctx, rng)
        defect = abs(v.inner(ctx.apply_k(w)) - w.inner(ctx.apply_k(v)))
        worst = max(worst, defect / (v.lp_norm(2) * w.lp_norm(2)))
    assert worst <= 1e-11
    elapsed = time.time() - t0
    assert elapsed < 5.0
    _report(2, f"K symmetry ({worst:.1e}, {elapsed:.1f}s)")


def test_criterion_03_gradient_correctness():
    t0 = time.time()
    ctx = make_sine_context(n=48)
    rng = np.random.default_rng(3)
    h = 1e-5
    worst = 0.0
    for _ in range(10):
        base = random_field(ctx, rng)
        v = Field(ctx.grid, np.sign(base.values + 1e-12) * (0.1 + np.abs(base.values)))
        w = random_field(ctx, rng, scale=0.5)
        fd = (ctx.energy(v + h * w) - ctx.energy(v - h * w)) / (2.0 * h)
        pairing = ctx.gradient(v).inner(w)
        worst = max(worst, abs(fd - pairing) / max(abs(fd), 1e-30))
    assert worst <= 1e-5
    elapsed = time.time() - t0
    assert elapsed < 30.0
    _report(3, f"gradient vs central differences ({worst:.1e}, {elapsed:.1f}s)")


def test_criterion_04_fibering_maximum():
    ctx = make_sine_context(n=48)
    rng = np.random.default_rng(4)
    pc = ctx.exponents.p_conj
    checked = 0
    worst_slack = np.inf
    while checked < 10:
        v = random_field(ctx, rng)
        v = (1.0 / v.lp_norm(pc)) * v
        if ctx.quadratic_form(v) <= 0.0:
            continue
        checked += 1
        t = ctx.fibering_scale(v)
        peak = ctx.energy(t * v)
        for s in np.geomspace(t / 10.0, 10.0 * t, 50):
            worst_slack = min(worst_slack, peak - ctx.energy(float(s) * v))
        level = ctx.nehari_energy(v)
        assert abs(ctx.nehari_energy(3.0 * v) - level) <= 1e-12 * level
        assert abs(level - peak) <= 1e-12 * max(1.0, abs(peak))
    assert worst_slack >= -1e-12
    _report(4, f"fibering maximum (slack {worst_slack:.1e})")


def test_criterion_05_reverse_hoelder():
    ctx = make_sine_context(n=48)
    pc = ctx.exponents.p_conj
    rng = np.random.default_rng(5)
    a = rng.uniform(1e-3, 1e3, size=100_000)
    b = rng.uniform(1e-3, 1e3, size=100_000)
    scalar_slack = float((
        (a ** (pc - 1.0) - b ** (pc - 1.0)) * (a - b)
        - (pc - 1.0) * (a - b) ** 2 * (a + b) ** (pc - 2.0)
    ).min())
    assert scalar_slack >= -1e-12

    field_slack = np.inf
    for _ in range(100):
        v, w = random_field(ctx, rng), random_field(ctx, rng)
        diff = v.values - w.values
        lhs = ctx.inner(odd_power(v.values, pc - 1.0) - odd_power(w.values, pc - 1.0), diff)
        rhs = (pc - 1.0) * ctx.lp_norm(diff, pc) ** 2 * ctx.lp_norm(
            np.abs(v.values) + np.abs(w.values), pc
        ) ** (pc - 2.0)
        field_slack = min(field_slack, lhs - rhs)
    assert field_slack >= -1e-12
    _report(5, f"reverse Hoelder (scalar {scalar_slack:.1e}, field {field_slack:.1e})")


def test_criterion_06_reference_solver_run(reference_run):
    ctx, cfg, result, elapsed = reference_run
    assert elapsed < 300.0

    converged = [status for status, _ in result.outcomes]
    assert converged.count("converged") == 20

    for rec in result.records:
        assert rec.dual_residual <= 1e-8
        assert rec.iterations <= 2000
        assert rec.level > 0.0
        if len(rec.j_values) > 1:
            assert float(np.max(np.diff(rec.j_values))) <= 1e-12

    assert len(result.records) >= 2  # geometrically distinct pairs
    pc = ctx.exponents.p_conj
    for i, a in enumerate(result.records):
        for b in result.records[i + 1:]:
            scale = max(a.v_star.lp_norm(pc), b.v_star.lp_norm(pc))
            assert orbit_distance(ctx, a.v_star, b.v_star) > cfg.dedup_rel_threshold * scale

    _report(6, (f"solver run (20/20 converged, {len(result.records)} distinct, "
                f"c={result.level_estimate:.9f}, {elapsed:.0f}s)"))


def test_criterion_07_primal_consistency(reference_run):
    _, _, result, _ = reference_run
    worst = max(rec.primal_residual for rec in result.records)
    assert worst <= 1e-6
    _report(7, f"primal consistency (worst residual {worst:.1e})")


def test_criterion_08_palais_smale_bound(reference_run):
    ctx, _, result, _ = reference_run
    pc = ctx.exponents.p_conj
    for rec in result.records:
        assert ps_boundedness_check(ctx, rec.iterate_snapshots, rec.bound_constant)
        bound = max(1.0, rec.bound_constant / (1.0 / pc - 0.5))
        assert np.all(rec.v_norms ** (pc - 1.0) <= bound)
    _report(8, "Palais-Smale norm bound on all trajectories")


def test_criterion_09_asymptotic_comparison(compare_run):
    ctx, pair, report, elapsed = compare_run
    assert elapsed < 600.0
    assert report.c_est <= report.c_inf_est + 1e-3 * abs(report.c_inf_est)
    assert report.transplant_check

    # transplant identity, exact to 1e-12 relative
    from helmdual import transplant

    w = report.records_inf[0].v_star
    v = transplant(pair, w)
    lhs = pair.coefficient.q_root.values * v.values
    rhs = pair.coefficient_inf.q_root.values * w.values
    ident = np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))
    assert ident <= 1e-12

    # energy chain J_Q(t_v v) <= J_inf(t_v w) <= J_inf(w), slack 1e-10
    j_q, j_inf_t, j_inf = report.level_chain
    assert j_q <= j_inf_t + 1e-10
    assert j_inf_t <= j_inf + 1e-10
    assert j_q <= j_inf + 1e-10

    _report(9, (f"level comparison (c {report.c_est:.6f} <= c_inf {report.c_inf_est:.6f}, "
                f"transplant ok, {elapsed:.0f}s)"))


def test_criterion_10_farfield(farfield_run):
    ctx, rec, samples, report, elapsed = farfield_run
    assert elapsed < 300.0
    assert not report.degenerate
    assert 0.8 * report.target_exponent <= report.decay_exponent <= 1.2 * report.target_exponent
    tail = report.expansion_errors[-3:]
    assert np.all(np.diff(tail) <= 1e-12 * max(1.0, tail.max()))

    # conjugate antisymmetry of the reported amplitude for the real solution
    half = len(samples.values) // 2
    anti = np.abs(samples.values[half:] + np.conj(samples.values[:half])).max()
    assert anti <= 1e-10 * np.abs(samples.values).max()

    _report(10, (f"far field (exponent {report.decay_exponent:.3f}, "
                 f"errors decreasing, {elapsed:.0f}s)"))


def test_criterion_11_selftest_cli(tmp_path):
    t0 = time.time()
    proc = subprocess.run(
        [sys.executable, "-m", "helmdual.cli", "selftest", "--out", str(tmp_path / "selftest")],
        capture_output=True,
        text=True,
        timeout=1200,
    )
    elapsed = time.time() - t0
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert elapsed < 1200.0
    assert (tmp_path / "selftest" / "selftest.csv").exists()
    _report(11, f"CLI selftest exit 0 ({elapsed:.0f}s)")
