"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with `pytest -s tests/test_acceptance.py` to see the lines as they
print. Criteria 5 and 8 contain one bound each that exact mathematics puts
out of reach (the hitting-time tail decays like t^(-1/2), so cumulative
success approaches 1 only polynomially); those asserts are kept as stated
and fail honestly rather than being loosened. Details sit next to the
asserts.
"""
import math
import time
from fractions import Fraction

import numpy as np

from qrewind import cli
from qrewind.analytics import (cumulative_profile, first_passage_pmf,
                               first_passage_profile, genfunc_closed,
                               genfunc_series, return_pmf)
from qrewind.engine import ProtocolConfig, RunOutcome, monte_carlo, run_quantum_protocol
from qrewind.mat2 import (HADAMARD, SIGMA_Z, branch_prob_invariant, commutator,
                          ginibre, haar_unitary, shared_eigenvector_pair,
                          verify_word_identities)
from qrewind.qgate import random_state
from qrewind.walk import (dp_first_passage, dp_return_time, run_walk_protocol,
                          sample_first_passage_batch)


def _report(num, name):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            print(f"\nACCEPTANCE {num} ({name}): {verdict}")
            return False
    return _Ctx()


def test_criterion_1_identity_suite():
    with _report(1, "identity suite, 3 x 10^4 instances"):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        samplers = [
            lambda: (haar_unitary(rng), haar_unitary(rng)),
            lambda: (ginibre(rng), ginibre(rng)),
            lambda: shared_eigenvector_pair(rng),
        ]
        for sampler in samplers:
            for _ in range(10**4):
                v, w = sampler()
                rep = verify_word_identities(v, w, s_max=8, n_max=6, tol=1e-9)
                assert rep.all_passed
        elapsed = time.perf_counter() - start
        print(f"  identity suite elapsed: {elapsed:.1f} s")
        assert elapsed < 30.0


def test_criterion_2_branch_probability_invariance():
    with _report(2, "branch-probability invariance"):
        rng = np.random.default_rng(7)
        for _ in range(10**3):
            v, w = haar_unitary(rng), haar_unitary(rng)
            states = rng.standard_normal((2, 100)) + 1j * rng.standard_normal((2, 100))
            states /= np.sqrt((abs(states) ** 2).sum(axis=0))
            amps = commutator(v, w) @ states
            vals = (abs(amps) ** 2).sum(axis=0) / 4.0
            assert vals.max() - vals.min() < 1e-11
            assert abs(vals[0] - branch_prob_invariant(v, w)) < 1e-11


def test_criterion_3_formula_equals_oracle():
    with _report(3, "closed formulas match the exact DP oracle"):
        for k in range(0, 11):
            p = Fraction(k, 10)
            fp = dp_first_passage(p, 41)
            ret = dp_return_time(p, 41)
            for t in range(1, 42):
                assert fp.prob(t) == first_passage_pmf(p, t)
                assert ret.prob(t) == return_pmf(p, t)
            assert first_passage_pmf(p, 1) == p
            assert first_passage_pmf(p, 3) == p * (1 - p) ** 2
            assert first_passage_pmf(p, 5) == p * (1 - p) ** 2 * (2 * p * p - 2 * p + 1)
            assert return_pmf(p, 2) == p ** 2
            assert return_pmf(p, 4) == 2 * p ** 2 * (1 - p) ** 2
        half = Fraction(1, 2)
        assert first_passage_pmf(half, 1) == Fraction(1, 2)
        assert first_passage_pmf(half, 3) == Fraction(1, 8)
        assert first_passage_pmf(half, 5) == Fraction(1, 16)


def test_criterion_4_three_way_series_agreement():
    with _report(4, "series == formula == DP, t <= 201"):
        for p in (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)):
            series = genfunc_series(p, 201)
            dp = dp_first_passage(p, 201)
            for t in range(1, 202):
                value = first_passage_pmf(p, t)
                assert series[t - 1] == value
                assert dp.prob(t) == value
        t_cut = 201
        for pf in (0.1, 0.5, 0.9):
            prof = first_passage_profile(pf, t_cut)
            for alpha in (0.3, 0.7, 0.95):
                partial = sum(prof[t] * alpha ** t for t in range(1, t_cut + 1))
                bound = alpha ** t_cut / (1 - alpha)
                assert abs(genfunc_closed(pf, alpha) - partial) < bound + 1e-12


def test_criterion_5_completeness():
    with _report(5, "completeness: 0.999 mass within 10^5 steps"):
        horizon = 10**5
        reached = {}
        for k in range(1, 11):
            p = k / 10
            fp_cum, _ = cumulative_profile(p, horizon)
            assert np.all(np.diff(fp_cum) >= -1e-15)  # partial sums monotone
            reached[p] = float(fp_cum[-1])
        print("  cumulative at 1e5:",
              {p: round(v, 6) for p, v in reached.items()})
        for p, value in reached.items():
            # Unattainable for p <= 0.8: the first-passage tail is
            # K/sqrt(pi t) with K = sqrt(2(1-p)/p), so the cumulative at
            # t = 1e5 is 0.9924 (p=0.1) .. 0.9987 (p=0.8); at p=0.5 the
            # exact symmetric-walk value is 1 - C(1e5,5e4)/4^5e4 = 0.99748.
            # Asserted as stated, not loosened.
            assert value >= 0.999, f"p={p}: cumulative at 1e5 is {value}"


def test_criterion_6_monte_carlo_concordance():
    with _report(6, "Monte Carlo concordance, classical and quantum"):
        start = time.perf_counter()
        cap = 61
        n = 10**6
        for p in (0.25, 0.5, 0.9):
            sample = sample_first_passage_batch(p, runs=n, cap=cap, seed=99,
                                                workers=4)
            pmf_hat = sample.empirical_pmf()
            exact = dp_first_passage(p, cap)
            for t in range(1, cap + 1):
                mu = exact.prob(t)
                sigma = math.sqrt(max(mu * (1 - mu), 1e-12) / n)
                assert abs(pmf_hat[t] - mu) < 5 * sigma, (p, t)

        # quantum mode at the p = 1/2 pair reproduces the classical
        # trimmed-protocol q_count histogram (two-sample 5 sigma per bin)
        m = 12
        n_q, n_c = 15 * 10**4, 4 * 10**5
        stats = monte_carlo(ProtocolConfig(v=HADAMARD, w=SIGMA_Z, m=m,
                                           seed=1234, runs=n_q, workers=4))
        rng = np.random.default_rng(4321)
        classical = {}
        for _ in range(n_c):
            out = run_walk_protocol(0.5, m, rng)
            classical[out.q_count] = classical.get(out.q_count, 0) + 1
        for q in sorted(set(stats.q_count_hist) | set(classical)):
            f_q = stats.q_count_hist.get(q, 0) / n_q
            f_c = classical.get(q, 0) / n_c
            pooled = (stats.q_count_hist.get(q, 0) + classical.get(q, 0)) / (n_q + n_c)
            sigma = math.sqrt(max(pooled * (1 - pooled), 1e-12)
                              * (1 / n_q + 1 / n_c))
            assert abs(f_q - f_c) < 5 * sigma, q
        elapsed = time.perf_counter() - start
        print(f"  concordance elapsed: {elapsed:.1f} s")
        assert elapsed < 120.0


def test_criterion_7_rewinding_certificate():
    with _report(7, "rewinding certificate at desk scale"):
        rng = np.random.default_rng(31)
        successes = 0
        attempts = 0
        while successes < 10**4:
            attempts += 1
            assert attempts < 10**5
            v, w = haar_unitary(rng), haar_unitary(rng)
            s = int(rng.integers(0, 11))
            cfg = ProtocolConfig(v=v, w=w, s=s, m=200)
            rec = run_quantum_protocol(cfg, rng, psi0=random_state(rng))
            if rec.outcome is RunOutcome.SUCCESS:
                successes += 1
                assert rec.fidelity >= 1 - 1e-9
        print(f"  {successes} successes out of {attempts} runs")

        # contraction-mode spot checks: post-selected V of operator norm 0.9
        cfg = ProtocolConfig(v=0.9 * HADAMARD, w=SIGMA_Z, s=4, m=60,
                             mode="contraction")
        found = 0
        for _ in range(4000):
            rec = run_quantum_protocol(cfg, rng)
            if rec.outcome is RunOutcome.SUCCESS:
                found += 1
                assert rec.fidelity >= 1 - 1e-8
        assert found > 50


def test_criterion_8_success_curve_reproduction(tmp_path):
    with _report(8, "success-curve shape via the CLI"):
        out = tmp_path / "curve.csv"
        assert cli.main(["curve", "--p", "0.5", "--mmax", "100",
                         "--out", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        ms = [int(r[0]) for r in rows]
        comm = [float(r[1]) for r in rows]
        full = [float(r[2]) for r in rows]
        assert ms == list(range(1, 101))
        assert all(b >= a - 1e-15 for a, b in zip(comm, comm[1:]))
        assert all(b >= a - 1e-15 for a, b in zip(full, full[1:]))
        assert abs(full[1] - 0.25) < 1e-12
        assert abs(comm[0] - 0.5) < 1e-12
        # full(4) = 3/8 while comm(4)^2 = 25/64: the two-phase success is
        # not the square of the single-phase success
        assert abs(full[3] - 3 / 8) < 1e-12
        assert abs(comm[3] ** 2 - 25 / 64) < 1e-12
        assert abs(full[3] - comm[3] ** 2) > 0.01
        # Unattainable: the exact full-success value at m = 100, p = 0.5 is
        # 0.84238 (heavy t^(-1/2) tail); asserted as stated, not loosened.
        assert full[-1] > 0.95, f"prob_full(100) = {full[-1]}"


def test_criterion_9_byte_identical_outputs(tmp_path):
    with _report(9, "determinism: byte-identical outputs"):
        mats = tmp_path / "mats.json"
        cli.save_matrices(HADAMARD, SIGMA_Z, mats)

        pairs = []
        for tag in ("a", "b"):
            dist_p = tmp_path / f"dist_{tag}.csv"
            curve_p = tmp_path / f"curve_{tag}.csv"
            svg_p = tmp_path / f"curve_{tag}.svg"
            sim_p = tmp_path / f"sim_{tag}.json"
            assert cli.main(["dist", "--p", "0.5", "--tmax", "41",
                             "--method", "mc", "--runs", "20000",
                             "--seed", "5", "--workers", "3",
                             "--out", str(dist_p)]) == 0
            assert cli.main(["curve", "--p", "0.5", "--mmax", "60",
                             "--out", str(curve_p), "--svg", str(svg_p)]) == 0
            assert cli.main(["simulate", "--matrices", str(mats), "--s", "2",
                             "--m", "10", "--runs", "5000", "--seed", "17",
                             "--workers", "4", "--out", str(sim_p)]) == 0
            pairs.append((dist_p.read_bytes(), curve_p.read_bytes(),
                          svg_p.read_bytes(), sim_p.read_bytes()))
        assert pairs[0] == pairs[1]
