"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All stochastic criteria use the single master seed ``SEED`` fixed before any
run was inspected. A summary table is printed at the end of the pytest
session; run ``pytest tests/test_acceptance.py -v`` to see it.
"""

import json
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_RESULTS
from scipy import stats

from toroidal.cardioid import CardioidParams, cdf, sample_exact
from toroidal.circular import TWO_PI, angular_distance
from toroidal.cli import main
from toroidal.data import fixture_path
from toroidal.dependent import (ToroidalParams, coefficient_A, conditional_phi_mean_direction,
                                conditional_phi_pdf, conditional_theta_pdf, joint_pdf,
                                marginal_phi_pdf_closed, marginal_phi_pdf_numeric,
                                marginal_theta_pdf, sample_joint)
from toroidal.inference import (FitConfig, aic, bic, fit_mle, log_likelihood, parameter_errors,
                                score)
from toroidal.quadrature import integrate
from toroidal.regression import RegressionModel, regression_curve_gap
from toroidal.torus import TorusGeometry, quadrant_frequency_test, sample_area_uniform

SEED = 0

# Recovery scenarios: truth, sample size, reported standard errors, reported
# (logL, AIC, BIC).
RECOVERY_SCENARIOS = [
    (ToroidalParams.canonical(0.3, -0.4, 1.3, 0.0, 0.0), 50,
     [0.21, 0.17, 0.14, 0.5, 0.93], (-179.94, 369.89, 379.455)),
    (ToroidalParams.canonical(0.4, -0.6, -3.8, 0.0, 4.25), 100,
     [0.13, 0.11, 0.12, 0.23, 0.14], (-353.06, 716.11, 729.14)),
    (ToroidalParams(0.4, 0.8, -1.57, 0.8, 3.6), 500,
     [0.06, 0.04, 0.04, 0.13, 0.22], (-1817.86, 3645.72, 3666.79)),
    (ToroidalParams(0.8, 0.7, 2.1, 1.5, 1.5), 1000,
     [0.03, 0.03, 0.03, 0.05, 0.09], (-3515.15, 7040.31, 7064.85)),
]
# The real-data table: logL, AIC, BIC at n = 39.
REAL_DATA_CRITERIA = (-112.89, 235.79, 244.11, 39)
# logL is quoted to 2 decimals (error <= 0.005, doubled in -2 logL) and the
# criterion itself is rounded to 2 decimals (<= 0.005).
REPORTED_ROUNDING = 0.015


def record(k, ok, detail):
    ACCEPTANCE_RESULTS[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _dataset(i):
    truth, n, _, _ = RECOVERY_SCENARIOS[i]
    phi, theta = sample_joint(truth, n, np.random.default_rng([SEED, i]))
    return truth, phi, theta


_FITS = {}


def _fit(i):
    if i not in _FITS:
        truth, phi, theta = _dataset(i)
        _FITS[i] = (truth, phi, theta, fit_mle(phi, theta, FitConfig(n_starts=32, seed=SEED)))
    return _FITS[i]


def test_criterion_01_sampler_benchmark(tmp_path):
    t0 = time.perf_counter()
    code = main(["bench-sampler", "--n", "10000", "--seed", str(SEED), "--out", str(tmp_path)])
    elapsed = time.perf_counter() - t0
    rows = np.genfromtxt(tmp_path / "bench_sampler.csv", delimiter=",", names=True)
    acc = rows["aur_acceptance_percent"]
    ok = (code == 0 and len(rows) == 10 and np.all((acc >= 48.5) & (acc <= 51.5))
          and np.all(rows["exact_rejections"] == 0) and elapsed < 5.0)
    record(1, ok, f"AUR acceptance {acc.min():.2f}-{acc.max():.2f}%, exact rejections "
                  f"{int(rows['exact_rejections'].max())}, {elapsed:.2f}s")


def test_criterion_02_exact_sampler_ks():
    worst, slowest = 0.0, 0.0
    for j, rho in enumerate((0.1, 0.5, 1.0)):
        p = CardioidParams(0.0, rho)
        t0 = time.perf_counter()
        y = sample_exact(p, 100_000, np.random.default_rng([SEED, j]))
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, stats.kstest(y, lambda t: cdf(p, t)).statistic)
    record(2, worst < 0.0062 and slowest < 2.0, f"max KS distance {worst:.5f}, slowest {slowest:.3f}s")


def _double_integral(f, atol=1e-11):
    inner = lambda t: integrate(lambda x: f(x[None, :], t[:, None]), 0.0, TWO_PI, atol=atol).value
    return integrate(inner, 0.0, TWO_PI, atol=atol).value


def test_criterion_03_normalisation():
    g = np.random.default_rng([SEED, 3])
    draws = [ToroidalParams(1.0, 1.0, 10.0, 0.5, 1.0), ToroidalParams(1.0, -1.0, -10.0, 3.0, 6.0),
             ToroidalParams(1.0, 1.0, 0.37, 0.0, 0.0), ToroidalParams(0.2, -1.0, 7.7, 5.0, 2.0)]
    while len(draws) < 50:
        draws.append(ToroidalParams(g.uniform(1e-3, 1.0), g.uniform(-1, 1), g.uniform(-10, 10),
                                    *g.uniform(0, TWO_PI, 2)))
    t0 = time.perf_counter()
    errs = [abs(_double_integral(lambda f, t: joint_pdf(p, f, t)) - 1.0) for p in draws]
    elapsed = time.perf_counter() - t0
    record(3, max(errs) < 1e-8 and elapsed < 30, f"max |integral - 1| = {max(errs):.2e} over 50 draws, "
                                                  f"{elapsed:.1f}s")


def test_criterion_04_closed_vs_quadrature_marginal():
    g = np.random.default_rng([SEED, 4])
    phi = np.linspace(0, TWO_PI, 256, endpoint=False)
    worst = 0.0
    count = 0
    while count < 20:
        lam = g.uniform(-6, 6)
        if min(abs(lam - k) for k in (-1, 0, 1)) <= 0.05:
            continue
        p = ToroidalParams(g.uniform(0.01, 1), g.uniform(-1, 1), lam)
        worst = max(worst, np.max(np.abs(marginal_phi_pdf_closed(p, phi) - marginal_phi_pdf_numeric(p, phi))))
        count += 1
    worst_limit = 0.0
    for lam in (-1.0, 0.0, 1.0):
        p = ToroidalParams(g.uniform(0.01, 1), g.uniform(-1, 1), lam)
        worst_limit = max(worst_limit, np.max(np.abs(marginal_phi_pdf_closed(p, phi)
                                                     - marginal_phi_pdf_numeric(p, phi))))
    record(4, worst < 1e-8 and worst_limit < 1e-6,
           f"sup-norm {worst:.2e} (20 generic), {worst_limit:.2e} at lambda in {{-1,0,1}}")


def test_criterion_05_A_bound():
    lam = np.linspace(-50, 50, 1000)
    peak = max(np.max(np.abs(coefficient_A(nu, kappa, lam)))
               for kappa in (-1.0, 1.0) for nu in (0.1, 1.0))
    record(5, peak <= 1 + 1e-12, f"max |A| = {peak:.15f}")


def test_criterion_06_score():
    g = np.random.default_rng([SEED, 6])
    worst = 0.0
    for _ in range(100):
        p = ToroidalParams(g.uniform(0.05, 0.95), g.uniform(-0.95, 0.95), g.uniform(-8, 8),
                           *g.uniform(0, TWO_PI, 2))
        phi, theta = sample_joint(p, int(g.integers(5, 200)), g)
        s = score(p, phi, theta)
        x = p.as_array()
        for i in range(5):
            h = np.zeros(5)
            h[i] = 1e-6
            fd = (log_likelihood(ToroidalParams(*(x + h)), phi, theta)
                  - log_likelihood(ToroidalParams(*(x - h)), phi, theta)) / 2e-6
            worst = max(worst, abs(fd - s[i]) / max(1.0, abs(s[i])))
    record(6, worst < 1e-5, f"max relative error {worst:.2e} over 100 configurations")


def test_criterion_07_table2_recovery():
    t0 = time.perf_counter()
    misses, notes = [], []
    formulas_ok = True
    for i, (_, n, reported_se, _) in enumerate(RECOVERY_SCENARIOS):
        truth, phi, theta, fit = _fit(i)
        err = parameter_errors(fit.params, truth)
        z = err / np.array(reported_se)
        names = ("nu", "kappa", "lambda", "mu1", "mu2")
        misses += [f"n={n} {k} off by {zk:+.1f} reported SE" for k, zk in zip(names, z) if abs(zk) > 4]
        formulas_ok &= fit.aic == 10 - 2 * fit.log_likelihood
        formulas_ok &= fit.bic == 5 * np.log(n) - 2 * fit.log_likelihood
        notes.append(f"n={n}:max|z|={np.max(np.abs(z)):.1f}")
    reported = [(ll, a, b, n) for (_, n, _, (ll, a, b)) in RECOVERY_SCENARIOS] + [REAL_DATA_CRITERIA]
    table_gap = max(max(abs(aic(ll, 5) - a), abs(bic(ll, 5, n) - b)) for ll, a, b, n in reported)
    elapsed = time.perf_counter() - t0
    ok = not misses and formulas_ok and table_gap <= REPORTED_ROUNDING and elapsed < 180
    detail = (f"{' '.join(notes)}; reported AIC/BIC max gap {table_gap:.4f}; {elapsed:.0f}s"
              + (f"; misses: {'; '.join(misses)}" if misses else ""))
    record(7, ok, detail)


def test_criterion_08_conditioning():
    g = np.random.default_rng([SEED, 8])
    ident, integ, mean_dir = 0.0, 0.0, 0.0
    for _ in range(10):
        p = ToroidalParams(g.uniform(0.05, 1), g.uniform(0.05, 1), g.uniform(-6, 6),
                           *g.uniform(0, TWO_PI, 2))
        f, t = g.uniform(0, TWO_PI, (2, 200))
        ident = max(ident, np.max(np.abs(joint_pdf(p, f, t)
                                         - conditional_phi_pdf(p, f, t) * marginal_theta_pdf(p, t))))
        t0, f0 = g.uniform(0, TWO_PI, 2)
        integ = max(integ,
                    abs(integrate(lambda x: conditional_phi_pdf(p, x, t0), 0, TWO_PI).value - 1),
                    abs(integrate(lambda x: conditional_theta_pdf(p, x, f0), 0, TWO_PI).value - 1))
        c = integrate(lambda x: np.cos(x) * conditional_phi_pdf(p, x, t0), 0, TWO_PI, atol=1e-13).value
        s = integrate(lambda x: np.sin(x) * conditional_phi_pdf(p, x, t0), 0, TWO_PI, atol=1e-13).value
        mean_dir = max(mean_dir, angular_distance(np.arctan2(s, c), conditional_phi_mean_direction(p, t0)))
    ok = ident < 1e-12 and integ < 1e-8 and mean_dir < 1e-8
    record(8, ok, f"identity {ident:.1e}, normalisation {integ:.1e}, mean direction {mean_dir:.1e}")


def test_criterion_09_regression_self_consistency():
    truth, _, _, fit = _fit(2)
    gap = regression_curve_gap(RegressionModel.from_fit(fit),
                               RegressionModel(truth.mu1, truth.mu2, truth.lam))
    record(9, gap < 0.1, f"sup-norm gap between true and fitted curves {gap:.4f} rad")


def test_criterion_10_quadrant_diagnostic():
    g = TorusGeometry(3.0, 1.5)
    phi, theta = sample_area_uniform(g, 10_000, np.random.default_rng([SEED, 10]))
    p_area = quadrant_frequency_test(phi, theta, g).p_value
    flat = np.random.default_rng([SEED, 11]).uniform(0, TWO_PI, (2, 10_000))
    p_flat = quadrant_frequency_test(*flat, TorusGeometry.from_nu(0.9)).p_value
    record(10, p_area > 0.01 and p_flat < 0.001,
           f"area-uniform p={p_area:.3f}, flat-uniform p={p_flat:.1e}")


def test_criterion_11_synthetic_end_to_end(tmp_path):
    fit_dir, pred_dir, diag_dir = tmp_path / "fit", tmp_path / "pred", tmp_path / "diag"
    codes = [
        main(["fit", "--input", str(fixture_path()), "--unit", "deg", "--axial-mult", "4",
              "--impute", "--seed", str(SEED), "--out", str(fit_dir)]),
        main(["predict", "--model", str(fit_dir / "fit.json"), "--theta", str(fit_dir / "data.csv"),
              "--out", str(pred_dir)]),
        main(["diagnose", "--observed", str(fit_dir / "data.csv"),
              "--predicted", str(pred_dir / "predictions.csv"), "--out", str(diag_dir)]),
    ]
    rec = json.loads((fit_dir / "fit.json").read_text())
    consistent = (rec["aic"] == 10 - 2 * rec["logL"] and rec["bic"] == 5 * np.log(rec["n"]) - 2 * rec["logL"]
                  and rec["n"] == 39)
    record(11, codes == [0, 0, 0] and consistent,
           f"exit codes {codes}, n={rec['n']}, AIC/BIC consistent={consistent}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
