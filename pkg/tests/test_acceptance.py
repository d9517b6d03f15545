"""Acceptance suite: one test (and one printed line) per criterion.

Every numeric bar here is asserted at its stated tolerance against
pinned reference values; the module tests elsewhere pin the same
quantities far more tightly.
"""

import math
import time
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from curieweiss import (
    ModelParams,
    MomentVector,
    SpinQuantum,
    TOLERANCES,
    critical_coupling,
    critical_temperature,
    enumerate_ensemble,
    exact_free_energy,
    free_energy,
    minimize,
    orbit,
    permutation_map_m,
    raw_config_free_energy,
    run_symmetry_suite,
    spinodal_temperature,
    trig_poly,
)
from curieweiss import cli as cw_cli

from test_order_params import INV_MATRIX, INV_OFFSET, MAP_MATRIX, MAP_OFFSET
from test_spectrum import COS_TABLE, SIN_TABLE
from test_thermo import fd_gradient, fd_hessian, generic_params, interior_points

L1 = SpinQuantum(2)
FIVE = (1, 2, 3, 4, 5)


def _report(number, checks):
    bad = [name for name, ok in checks if not ok]
    status = "FAIL" if bad else "PASS"
    print(f"criterion {number}: {status}"
          + (f" ({', '.join(bad)})" if bad else f" ({len(checks)} checks)"))
    assert not bad, f"criterion {number}: {bad}"


def test_criterion_1_critical_values():
    start = time.perf_counter()
    ms = spinodal_temperature(ModelParams(L1, temperature=0.3, j4=1.0))
    tc = critical_temperature(ModelParams(L1, temperature=0.3, j4=1.0))
    gc = critical_coupling(ModelParams(L1, temperature=0.4, j4=1.0))
    elapsed = time.perf_counter() - start
    _report(1, [
        ("T_ms", abs(ms.value - 0.328257) < 5e-6),
        ("m2_ms", abs(ms.order_param.values[1] - 0.0634132) < 5e-6),
        ("T_c", abs(tc.value - 0.228165) < 5e-6),
        ("m2_c", abs(tc.order_param.values[1] - 0.00304442) < 5e-6),
        ("g_c", abs(gc.value - 0.170642) < 5e-6),
        ("barrier", abs(gc.order_param.values[1] - 0.4352046) < 5e-6),
        ("runtime<5s", elapsed < 5.0),
    ])


def test_criterion_2_ordered_landscape():
    pr = ModelParams(L1, temperature=0.2, j4=1.0)
    found = minimize(pr)
    glob = [r for r in found if r.classification == "global"]
    loc = [r for r in found if r.classification == "local"]
    center = min(glob, key=lambda r: abs(r.m_star.values[0]))
    m2s = center.m_star.values[1]
    images = orbit(center)
    degenerate = all(
        abs(free_energy(pr, mv).free_energy - center.f_value) < 1e-8
        for mv in images
    )
    broken = sorted(mv.values[0] for mv in images if abs(mv.values[0]) > 0.1)
    want_m1 = sorted([1.0 - 1.5 * m2s, -(1.0 - 1.5 * m2s)])
    placed = (
        len(broken) == 2
        and all(abs(a - b) < 1e-8 for a, b in zip(broken, want_m1))
        and all(
            abs(mv.values[1] - (1.0 - 0.5 * m2s)) < 1e-8
            for mv in images
            if abs(mv.values[0]) > 0.1
        )
    )
    _report(2, [
        ("global location", abs(center.m_star.values[0]) < 1e-6
         and abs(m2s - 0.00114849) < 1e-6),
        ("global F", abs(center.f_value - (-0.2502251)) < 1e-6),
        ("paramagnet local F",
         bool(loc) and abs(loc[0].f_value - (-0.219722)) < 1e-6),
        ("orbit degenerate 1e-8", degenerate),
        ("orbit image locations", placed),
    ])


def test_criterion_3_symmetry_suite():
    start = time.perf_counter()
    worst = {}
    for twice_l in FIVE:
        dev = run_symmetry_suite(SpinQuantum(twice_l), samples=1000, seed=42)
        for key, value in dev.items():
            worst[key] = max(worst.get(key, 0.0), value)
    elapsed = time.perf_counter() - start
    checks = [
        (key, worst[key] < TOLERANCES[key]) for key in sorted(TOLERANCES)
    ]
    checks.append(("runtime<10s", elapsed < 10.0))
    _report(3, checks)


def test_criterion_4_printed_closed_forms():
    checks = []
    for twice_l in FIVE:
        l = SpinQuantum(twice_l)
        tp = trig_poly(l)
        amap = permutation_map_m(l)
        ok_trig = (
            np.max(np.abs(tp.cos_coeffs - np.array(COS_TABLE[twice_l]))) < 1e-10
            and np.max(np.abs(tp.sin_coeffs - np.array(SIN_TABLE[twice_l]))) < 1e-10
        )
        ok_map = (
            np.max(np.abs(amap.matrix - np.array(MAP_MATRIX[twice_l]))) < 1e-10
            and np.max(np.abs(amap.offset - np.array(MAP_OFFSET[twice_l]))) < 1e-10
        )
        # inversion rows: compare the affine chart on a moment basis probe
        mat = np.array(INV_MATRIX[twice_l])
        off = np.array(INV_OFFSET[twice_l])
        from curieweiss import moments_to_weights_array, paramagnet_moments

        base = paramagnet_moments(l).values
        probes = [base] + [base + 1e-3 * e for e in np.eye(twice_l)]
        ok_inv = all(
            np.max(np.abs(moments_to_weights_array(l, m[None, :])[0]
                          - (off + mat @ m))) < 1e-10
            for m in probes
        )
        checks.append((f"trig l={twice_l}/2", ok_trig))
        checks.append((f"inversion l={twice_l}/2", ok_inv))
        checks.append((f"shift map l={twice_l}/2", ok_map))
    _report(4, checks)


def test_criterion_5_derivatives():
    checks = []
    for twice_l in FIVE:
        l, points = interior_points(twice_l, 100, seed=500 + twice_l)
        pr = generic_params(twice_l, with_field=True)

        def f(m):
            return free_energy(pr, MomentVector(l, m)).free_energy

        worst_g, worst_h = 0.0, 0.0
        for m in points:
            ev = free_energy(pr, MomentVector(l, m))
            hg = 1e-6 * np.maximum(1.0, np.abs(m))
            fd_g = fd_gradient(f, m, hg)
            worst_g = max(
                worst_g,
                np.linalg.norm(fd_g - ev.gradient)
                / max(np.linalg.norm(ev.gradient), 1.0),
            )
            hh = 1e-4 * np.maximum(1.0, np.abs(m))
            fd_h = fd_hessian(f, m, hh)
            worst_h = max(
                worst_h,
                np.linalg.norm(fd_h - ev.hessian) / np.linalg.norm(ev.hessian),
            )
        checks.append((f"gradient l={twice_l}/2", worst_g < 1e-5))
        checks.append((f"hessian l={twice_l}/2", worst_h < 1e-4))

    # printed stability diagonals on the m1 = 0 line
    t, j2, j4 = 0.4, 0.3, 1.0
    pr = ModelParams(L1, temperature=t, j2=j2, j4=j4)
    ok_diag = True
    for m2 in (0.05, 0.2, 0.5, 2.0 / 3.0):
        p = 1.0 - 1.5 * m2
        ev = free_energy(pr, MomentVector(L1, (0.0, m2)))
        ok_diag &= abs(ev.hessian[0, 0]
                       - (t / m2 - 0.75 * j2 - 0.75 * j4 * p * p)) < 1e-8
        ok_diag &= abs(ev.hessian[1, 1]
                       - (t / (m2 * (1 - m2)) - 2.25 * j2 - 6.75 * j4 * p * p)) < 1e-8
        ok_diag &= abs(ev.hessian[0, 1]) < 1e-8
    checks.append(("printed diagonals", bool(ok_diag)))
    _report(5, checks)


def test_criterion_6_oracle_equivalence():
    pr = ModelParams(
        L1, temperature=0.35, j2=0.2, j4=1.0, g=0.15, sector=Fraction(1), h0=0.1
    )
    worst = 0.0
    for n in range(2, 9):
        a = exact_free_energy(enumerate_ensemble(L1, n, params=pr))
        b = raw_config_free_energy(pr, n)
        worst = max(worst, abs(a - b) / abs(b))

    worst_count = 0.0
    for twice_l, n in ((1, 12), (2, 9), (3, 7), (4, 6), (5, 5)):
        l = SpinQuantum(twice_l)
        ens = enumerate_ensemble(l, n)
        total = logsumexp(ens.log_degeneracy)
        worst_count = max(
            worst_count,
            abs(total - n * math.log(l.n_states)) / (n * math.log(l.n_states)),
        )

    pr02 = ModelParams(L1, temperature=0.2, j4=1.0)
    f400 = exact_free_energy(enumerate_ensemble(L1, 400, params=pr02))
    _report(6, [
        ("raw brute force 1e-12", worst < 1e-12),
        ("degeneracy totals 1e-9", worst_count < 1e-9),
        ("N=400 near limit", abs(f400 - (-0.2502251)) < 0.01),
    ])


def test_criterion_7_paramagnet_fluctuations():
    n = 1000
    ens = enumerate_ensemble(L1, n)
    w = np.exp(ens.log_degeneracy - logsumexp(ens.log_degeneracy))
    mean = w @ ens.moments
    var = w @ (ens.moments - mean) ** 2
    _report(7, [
        ("Var m1", abs(var[0] - 2.0 / (3.0 * n)) < 0.02 * 2.0 / (3.0 * n)),
        ("Var m2", abs(var[1] - 2.0 / (9.0 * n)) < 0.02 * 2.0 / (9.0 * n)),
    ])


def test_criterion_8_cli_determinism(capsys):
    rc1 = cw_cli.main(["symcheck", "--seed", "42"])
    out1 = capsys.readouterr().out
    rc2 = cw_cli.main(["symcheck", "--seed", "42"])
    out2 = capsys.readouterr().out

    start = time.perf_counter()
    rc3 = cw_cli.main(["landscape", "--resolution", "201", "--temp", "0.2"])
    elapsed = time.perf_counter() - start
    grid = capsys.readouterr().out
    rows = [ln for ln in grid.splitlines() if ln and not ln.startswith("#")]
    with capsys.disabled():
        _report(8, [
            ("exit codes", rc1 == rc2 == rc3 == 0),
            ("symcheck byte-identical",
             out1.encode("utf-8") == out2.encode("utf-8") and len(out1) > 0),
            ("landscape 201 rows", len(rows) == 201 * 201 + 1),
            ("landscape runtime<10s", elapsed < 10.0),
        ])
