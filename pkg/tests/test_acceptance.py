"""Acceptance gate: one test per criterion, each at its stated tolerance,
printing one pass/fail line (run with ``pytest -s`` to see the lines).

All Monte-Carlo criteria run under master seed 42.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from condana import cli
from condana.closed_forms import (
    ball_moments,
    cos_moments,
    expected_log_uniform_sum,
    normal_cdf,
    shifted_entropy_raw_sum,
    snc_wnc_exact,
)
from condana.problems import evaluate, fd_jacobian, get_problem, jacobian, list_problems
from condana.sampling import BallRegion, SampleStream, sample_ball
from condana.verify import SuiteConfig, check_berry_esseen, check_lemma5, run_suite

SEED = 42


@contextmanager
def criterion(num, budget_seconds, description):
    start = time.time()
    try:
        yield
    except BaseException as exc:
        print(f"[criterion {num}] FAIL ({description}): {exc}")
        raise
    elapsed = time.time() - start
    print(f"[criterion {num}] PASS ({description}) in {elapsed:.1f}s")
    assert elapsed < budget_seconds, (
        f"criterion {num} took {elapsed:.1f}s, budget {budget_seconds}s")


def test_criterion_1_exact_ratio_and_monte_carlo_match():
    with criterion(1, 30, "exact one-output ratios and MC agreement, m=1..10"):
        ratio2, _ = snc_wnc_exact(2)
        ratio3, _ = snc_wnc_exact(3)
        assert ratio2 == pytest.approx(4.0 / (3.0 * math.pi), rel=1e-14)
        assert ratio3 == pytest.approx(3.0 / 8.0, rel=1e-14)
        suite = run_suite(SuiteConfig(seed=SEED, samples=100_000,
                                      groups=("corollary1",)))
        mc = [c for c in suite.checks if c.name == "corollary1/mc_ratio_vs_exact"]
        assert len(mc) == 10  # m = 1..10, each within 4 half-widths
        assert all(c.passed for c in suite.checks)


def test_criterion_2_ball_sampling_matches_closed_moments():
    with criterion(2, 30, "empirical ball/cosine moments within 4 sigma, m=3..10"):
        n = 100_000
        stream = SampleStream(SEED)
        for m, sub in zip(range(3, 11), stream.split(8)):
            pts = sample_ball(BallRegion(np.zeros(m), 1.0), sub, size=n)
            radii = np.linalg.norm(pts, axis=1)
            cosines = np.abs(pts[:, 0]) / radii
            e_norm, e_norm_sq, e_log_norm = ball_moments(m)
            e_cos, e_cos_sq, e_log_cos = cos_moments(m)
            samples = [
                (radii, e_norm),
                (radii**2, e_norm_sq),
                (np.log(radii), e_log_norm),
                (cosines, e_cos),
                (cosines**2, e_cos_sq),
                (np.log(cosines), e_log_cos),
            ]
            for values, exact in samples:
                se = values.std(ddof=1) / math.sqrt(n)
                assert abs(values.mean() - exact) < 4.0 * se, (m, exact)


def test_criterion_3_norm_wise_bound_suite():
    with criterion(3, 300, "100 random problems m,n<=30, ratio and gap bounds"):
        suite = run_suite(SuiteConfig(seed=SEED, samples=100_000, trials=100,
                                      groups=("theorem1",)))
        assert len(suite.checks) == 400  # 4 bound checks per instance
        assert suite.failed_count == 0


def test_criterion_4_componentwise_bound_suite():
    with criterion(4, 300, "componentwise bounds for m=2..50 over weight patterns"):
        suite = run_suite(SuiteConfig(seed=SEED, samples=100_000,
                                      theorem2_random_g=50, groups=("theorem2",)))
        assert suite.failed_count == 0
        attained = [c for c in suite.checks
                    if c.name == "theorem2/ratio_onehot_attained"]
        assert len(attained) == 49 and all(c.passed for c in attained)
        all_ones_m2 = [c for c in suite.checks
                       if c.name == "theorem2/ratio_vs_exact"
                       and c.instance == "m=2;g=all-ones"]
        assert len(all_ones_m2) == 1
        assert all_ones_m2[0].bound == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_criterion_5_shift_identity():
    with criterion(5, 10, "log-moment shift identity for 1..4 terms"):
        checks = check_lemma5(4)
        assert all(c.passed for c in checks)
        assert all(c.tolerance_or_halfwidth == 1e-6 for c in checks)
        # zero-sum base case: both sides exactly -1
        assert expected_log_uniform_sum(1) == -1.0
        assert shifted_entropy_raw_sum(0, 1.0) - 1.0 == -1.0


def test_criterion_6_normal_approximation_bound():
    with criterion(6, 10, "sup CDF gap <= 1/sqrt(m) for m=1..12"):
        checks = check_berry_esseen(range(1, 13))
        assert len(checks) == 12
        assert all(c.passed for c in checks)


def test_criterion_6_small_m_observed_sup():
    # Stated alongside the bound: the observed m=1 supremum should fall
    # below 0.05. The exact supremum of |uniform CDF - normal CDF| is
    # 0.05720672... (attained where the densities cross, not at the
    # support edge, whose smaller gap is 1 - Phi(sqrt 3) = 0.0416). The
    # assertion is kept as stated and fails against correct mathematics.
    with criterion("6b", 10, "observed m=1 sup below 0.05"):
        sup_m1 = check_berry_esseen(range(1, 2))[0].computed
        assert sup_m1 <= 1.0  # the bound itself holds with huge margin
        assert sup_m1 < 0.05, (
            f"observed sup {sup_m1:.6f}; the true supremum 0.0572 exceeds "
            f"0.05, only the support-edge gap {1 - float(normal_cdf(math.sqrt(3))):.6f} is below it")


def test_criterion_7_inequality_grids():
    with criterion(7, 120, "entropy and log-moment inequality grids"):
        suite = run_suite(SuiteConfig(seed=SEED, samples=100_000,
                                      groups=("corollary2", "entropy_lemmas")))
        assert suite.failed_count == 0
        assert all(c.slack > 0.0 for c in suite.checks)
        names = {c.name for c in suite.checks}
        assert "corollary2/monte_carlo" in names
        assert "lemma4/entropy_term_lower" in names
        assert "lemma7/tail_log_positive" in names


def test_criterion_8_determinism(tmp_path):
    with criterion(8, 120, "byte-identical verify reports: reruns and threads"):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["--command", "verify", "--seed", "42", "--samples", "5000",
                "--trials", "5"]
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

        t1, t8 = tmp_path / "t1.csv", tmp_path / "t8.csv"
        assert cli.main(args + ["--threads", "1", "--out", str(t1)]) == 0
        assert cli.main(args + ["--threads", "8", "--out", str(t8)]) == 0
        assert t1.read_bytes() == t8.read_bytes() == a.read_bytes()


def test_criterion_9_jacobian_contract():
    with criterion(9, 60, "analytic vs central differences, Taylor slope"):
        stream = SampleStream(SEED)
        for problem in list_problems():
            for _ in range(20):
                x = 4.0 * stream.uniforms(problem.m) - 2.0
                analytic = jacobian(problem, x).matrix
                numeric = fd_jacobian(problem, x, 1e-5).matrix
                scale = np.maximum(np.abs(analytic), 1.0)
                assert np.max(np.abs(analytic - numeric) / scale) < 1e-6

        for name in ("product", "polynomial"):
            problem = get_problem(name)
            x = 0.5 + stream.uniforms(problem.m)
            direction = stream.normals(problem.m)
            direction /= np.linalg.norm(direction)
            mat = jacobian(problem, x).matrix
            deltas = [1e-2 / 2**i for i in range(6)]
            residuals = [
                np.linalg.norm(evaluate(problem, x + d * direction)
                               - evaluate(problem, x) - mat @ (d * direction))
                for d in deltas
            ]
            slope = np.polyfit(np.log2(deltas), np.log2(residuals), 1)[0]
            assert slope >= 1.9, name
