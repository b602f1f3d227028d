"""The ten acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (shown even
without ``-s``) and then asserts the same condition.
"""
import math
import time

import numpy as np
import pytest

from casimirkit.analytic import (
    ATOM_HALF_SPACE,
    atom_half_space_pairwise,
    plate_plate_pairwise_pressure,
)
from casimirkit.cli import main
from casimirkit.extractor import PureTermConfig, pure_term, pure_term_report
from casimirkit.geometry import Ball, Cube, Cylinder, HalfSpace, PointAtom, interaction_energy_disjoint
from casimirkit.kernel import Material, casimir_plate_pressure, casimir_polder_potential
from casimirkit.mems import (
    GAP_CRITICAL,
    LAMBDA_CRITICAL,
    OscillatorConfig,
    equilibria_for_lambda,
    linear_period,
    pressure_at_gap,
    simulate,
    stable_gap,
)
from casimirkit.spectra import Planck, ScaledVacuum, TwoLevelAtom, Vacuum, drag_force, unruh_acceleration, vacuum_energy_budget
from casimirkit.constants import HBAR_C

CONDUCTOR = Material.perfect_conductor()


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, started):
        elapsed = time.perf_counter() - started
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  ({elapsed:.2f} s)")
        return elapsed

    return emit


def test_criterion_01_ratio_identities(report):
    t0 = time.perf_counter()
    wall = atom_half_space_pairwise(1.0, 1.0, 3 / (4 * math.pi)) / casimir_polder_potential(1.0, 1.0)
    plates = plate_plate_pairwise_pressure(1.0) / casimir_plate_pressure(1.0)
    exact_plates = 207 * 240 / (640 * math.pi**4)
    ok = abs(wall - 1.15) < 1e-12 and abs(plates - exact_plates) < 1e-12
    elapsed = report(
        1, ok, f"atom-wall ratio {wall:.13f} (1.15); plate ratio {plates:.13f} (77.625/pi^4; quoted 0.79687)", t0
    )
    assert ok and elapsed < 1


def test_criterion_02_atom_half_space_quadrature(report):
    t0 = time.perf_counter()
    mat = Material.from_epsilon(3.0)
    errs = []
    for d in (0.5, 1.0, 2.0):
        numeric = interaction_energy_disjoint(PointAtom((0, 0, d), 0.7), HalfSpace(0.0), mat)
        errs.append(abs(numeric / atom_half_space_pairwise(d, 0.7, mat.n_alpha) - 1))
    ok = max(errs) < 1e-6
    elapsed = report(2, ok, f"max relative error {max(errs):.2e} at d in (0.5, 1, 2)", t0)
    assert ok and elapsed < 10


def test_criterion_03_sphere_pure_term(report):
    t0 = time.perf_counter()
    exact = 207 / (1536 * math.pi)
    analytic = pure_term(Ball(1.0), CONDUCTOR, PureTermConfig(method="analytic"))[0].b0
    grid = pure_term(Ball(1.0), CONDUCTOR, PureTermConfig(resolution=256))[0].b0
    ok = abs(analytic - exact) < 1e-10 and grid > 0 and abs(grid / exact - 1) < 0.02
    elapsed = report(
        3, ok, f"analytic b0 {analytic:.12f} vs {exact:.12f}; grid-256 b0 {grid:.7f} ({grid / exact - 1:+.2e})", t0
    )
    assert ok and elapsed < 300


def test_criterion_04_cube_pure_term_sign(report):
    t0 = time.perf_counter()
    values = {}
    for res in (128, 256):
        values[f"{res}"] = pure_term(Cube(1.0), CONDUCTOR, PureTermConfig(resolution=res))[0].b0
    values["256 shifted"] = pure_term(Cube(1.0), CONDUCTOR, PureTermConfig(resolution=256, s_min=0.03, s_max=0.45))[0].b0
    ok = all(v < 0 for v in values.values())
    detail = ", ".join(f"{k}: {v:.6f}" for k, v in values.items())
    elapsed = report(4, ok, f"b0 (hbar c/a) {detail}", t0)
    assert ok and elapsed < 600


def test_criterion_05_cylinder_pure_term(report):
    t0 = time.perf_counter()
    row = pure_term_report(Cylinder(1.0), CONDUCTOR, PureTermConfig(resolution=256, check_resolution=True))
    b_lo, b_hi = row.convergence["b0"]
    ok = abs(b_lo) < 0.002 and abs(b_hi) < 0.002 and abs(b_hi) < abs(b_lo)
    elapsed = report(5, ok, f"b0 (hbar c/a^2) grid 256: {b_lo:.3e}, grid 512: {b_hi:.3e}", t0)
    assert ok and elapsed < 600


def test_criterion_06_drag(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    atom0 = TwoLevelAtom(1e14, 1e21, 0.8, 0.2)
    zero = drag_force(atom0, Vacuum(), 123.0) == 0.0 and drag_force(atom0, ScaledVacuum(7.5), 123.0) == 0.0
    products = []
    for _ in range(20):
        omega = 10 ** rng.uniform(11, 15)
        v = rng.uniform(-1e3, 1e3)
        atom = TwoLevelAtom.thermal(omega, 1e21, 300.0)
        products.append(drag_force(atom, Planck(300.0), v) * v)
    ok = zero and all(p < 0 for p in products)
    elapsed = report(6, ok, f"vacuum drag exactly 0: {zero}; Planck 300 K F*v < 0 at {sum(p < 0 for p in products)}/20", t0)
    assert ok and elapsed < 1


def test_criterion_07_unruh(report):
    t0 = time.perf_counter()
    a = unruh_acceleration(1e-12)
    ok = round(a, -6) == 2.47e8 and abs(a / 2.5e8 - 1) < 0.02
    elapsed = report(7, ok, f"a(1 pK) = {a:.5e} m/s^2 ({a / 2.5e8 - 1:+.2%} from 2.5e8)", t0)
    assert ok and elapsed < 1


def test_criterion_08_cosmology(report):
    t0 = time.perf_counter()
    b = vacuum_energy_budget(1e-35)
    lm, lo = math.log10(b.mass_density), math.log10(b.observed_mass_density)
    ok = 94 <= lm <= 97 and -30 <= lo <= -29 and 118 <= b.orders_of_magnitude_gap <= 126
    elapsed = report(
        8, ok, f"log10 rho_vac {lm:.2f} g/cm^3, log10 rho_obs {lo:.2f} g/cm^3, gap {b.orders_of_magnitude_gap:.2f}", t0
    )
    assert ok and elapsed < 1


def test_criterion_09_mems(report):
    t0 = time.perf_counter()
    below = equilibria_for_lambda(LAMBDA_CRITICAL - 1e-9)
    at = equilibria_for_lambda(LAMBDA_CRITICAL)
    above = equilibria_for_lambda(LAMBDA_CRITICAL + 1e-9)
    boundary = len(below) == 2 and len(at) == 1 and at[0].gap == GAP_CRITICAL and not above

    lam = 0.04
    d0, area = 1e-6, 1e-8
    cfg = OscillatorConfig(math.pi**2 * HBAR_C * area / (240 * lam * d0**5), d0, area)
    period = linear_period(cfg)
    x0 = stable_gap(lam)
    traj = simulate(cfg, 1.01 * x0 * d0, 0.0, 1e4 * period, period / 400, record_every=1)
    drift = traj.max_energy_drift()
    atm = pressure_at_gap(10e-9)[1]
    ok = boundary and not traj.contact and drift < 1e-6 and 1.2 <= atm <= 1.4
    elapsed = report(
        9, ok, f"two/one/zero roots at lambda*-1e-9/lambda*/lambda*+1e-9: {boundary}; "
        f"energy drift {drift:.2e} over 1e4 periods; P(10 nm) = {atm:.4f} atm", t0
    )
    assert ok and elapsed < 60


def test_criterion_10_determinism(report, tmp_path):
    t0 = time.perf_counter()
    runs = [
        ["pure-term", "--body", "cube", "--method", "monte_carlo", "--seed", "10", "--samples", "2000000"],
        ["pairwise", "--body", "ball", "--method", "monte_carlo", "--seed", "10", "--samples", "1000000"],
        ["pure-term", "--body", "cylinder", "--method", "grid", "--resolution", "256"],
    ]
    mismatches, compared = [], 0
    for i, argv in enumerate(runs):
        dirs = []
        for workers in ("1", "4"):
            out = tmp_path / f"run{i}-w{workers}"
            assert main([*argv, "--workers", workers, "--out", str(out), "--quiet"]) == 0
            dirs.append(out)
        for f in sorted(dirs[0].iterdir()):
            compared += 1
            if f.read_bytes() != (dirs[1] / f.name).read_bytes():
                mismatches.append(f"{dirs[0].name}/{f.name}")
    ok = not mismatches
    elapsed = report(10, ok, f"{compared} JSON/CSV files compared across 1 vs 4 workers, mismatches: {mismatches}", t0)
    assert ok and elapsed < 300
