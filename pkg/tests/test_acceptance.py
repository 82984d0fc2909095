"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed in the terminal summary.

The full N <= 1000 scan runs only with CERESA_FULL_SCAN=1.
"""
import json
import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from ceresa_check.chen import BetaForm, check_path_product, integral_len1, integral_len2, shuffle_residual
from ceresa_check.fermat import holo_index_set, index_set, is_prime
from ceresa_check.selftest import dixon_cases, gauss_cases, periods_suite
from ceresa_check.specfun import Hyp3F2Params, beta, hyp3f2_unit
from ceresa_check.volume import RANGE_CAVEAT, closed_iterated_integral, f_value

FIXTURE = Path(__file__).parent / "fixtures" / "bruteforce_f7.json"
CLI = [sys.executable, "-m", "ceresa_check"]


def cli(*args, timeout=None):
    t0 = time.perf_counter()
    proc = subprocess.run(CLI + list(args), capture_output=True, text=True, timeout=timeout, check=False)
    return proc, time.perf_counter() - t0


def scan_certs(lo, hi, threads=1, timeout=None):
    proc, secs = cli("scan", "--from", str(lo), "--to", str(hi), "--output", "json",
                     "--threads", str(threads), timeout=timeout)
    return proc, [json.loads(line) for line in proc.stdout.splitlines()], secs


def check_scan_rows(certs, min_frac=1e-3):
    bad = []
    for c in certs:
        n = c["curve"]["n"]
        ok = (c["verdict"] == "nontrivial_numerical" and c["frac_distance"] > min_frac and c["abs_error"] < 1e-9)
        if n == 4:
            ok = ok and RANGE_CAVEAT in c["notes"]
        if not ok:
            bad.append(n)
    return bad


def test_criterion_1_scan(criterion):
    proc, certs, secs = scan_certs(4, 200)
    bad = check_scan_rows(certs)
    ns = [c["curve"]["n"] for c in certs]
    ok = proc.returncode == 0 and ns == list(range(4, 201)) and not bad and secs < 60
    worst = min(certs[1:], key=lambda c: c["frac_distance"])
    criterion(
        1, ok,
        f"N=4..200: {len(certs)} rows, failing N={bad}, min frac_distance={worst['frac_distance']:.4g} "
        f"(N={worst['curve']['n']}), max abs_error={max(c['abs_error'] for c in certs):.3g}, {secs:.1f} s (< 60 s)",
    )
    assert ok


@pytest.mark.skipif(os.environ.get("CERESA_FULL_SCAN") != "1", reason="set CERESA_FULL_SCAN=1 for N <= 1000")
def test_criterion_1_full_scan(criterion):
    threads = os.cpu_count() or 1
    proc, certs, secs = scan_certs(4, 1000, threads=threads, timeout=1800)
    # the 1e-3 margin is required on N <= 200 only; beyond that the verdict's own
    # margin (frac_distance > 10 * abs_error) applies
    bad = check_scan_rows(certs, min_frac=0.0)
    ok = proc.returncode == 0 and len(certs) == 997 and not bad and secs < 1800
    worst = min(certs[1:], key=lambda c: c["frac_distance"])
    criterion(
        1, ok,
        f"full N=4..1000: failing N={bad}, min frac_distance={worst['frac_distance']:.4g} "
        f"(N={worst['curve']['n']}), {secs:.0f} s on {threads} worker(s) (< 1800 s)",
    )
    assert ok


def test_criterion_2_higher_k(criterion):
    details, ok = [], True
    for n in (7, 8):
        proc, secs = cli("verify", "fermat", "--n", str(n), "--k", "2", "--output", "json")
        c = json.loads(proc.stdout)
        good = (proc.returncode == 0 and c["verdict"] == "nontrivial_numerical"
                and c["frac_distance"] > 1e-3 and c["abs_error"] < 1e-9 and secs < 5)
        ok = ok and good
        details.append(f"f({n},2)={c['value']!r} frac={c['frac_distance']:.4g} err={c['abs_error']:.2g} {secs:.2f} s")
    criterion(2, ok, "; ".join(details))
    assert ok


def test_criterion_3_klein_quartic(criterion):
    proc, secs = cli("verify", "quotient", "--n", "7", "--m", "2", "--output", "json")
    c = json.loads(proc.stdout)
    ok = (proc.returncode == 0 and c["verdict"] == "nontrivial_numerical"
          and c["frac_distance"] > 1e-3 and c["abs_error"] < 1e-9 and secs < 5)
    criterion(3, ok, f"Klein quartic trace={c['value']!r} frac={c['frac_distance']:.4g} "
                     f"err={c['abs_error']:.2g} {secs:.2f} s")
    assert ok


def test_criterion_4_dual_path(criterion):
    rng = random.Random(404)
    worst = 0.0
    for _ in range(50):
        N = rng.randint(5, 31)
        holo = holo_index_set(N)
        x1, x2 = rng.choice(holo), rng.choice(holo)
        closed = closed_iterated_integral(N, x1, x2, target=1e-12)
        raw = integral_len2(BetaForm(x1.alpha, x1.beta), BetaForm(x2.alpha, x2.beta))
        oracle = raw.value / (beta(x1.alpha, x1.beta).value * beta(x2.alpha, x2.beta).value)
        worst = max(worst, abs(float(closed.value) - oracle))
    ok = worst <= 1e-9
    criterion(4, ok, f"50 random holomorphic pairs, max |closed - quadrature| = {worst:.3g} (<= 1e-9)")
    assert ok


def _gamma(q):
    return mpmath.gamma(mpmath.mpf(q.numerator) / q.denominator)


def test_criterion_5_gauss_dixon(criterion):
    worst_g = worst_d = 0.0
    with mpmath.workdps(40):
        for a, b, c, d in gauss_cases(20):
            got = hyp3f2_unit(Hyp3F2Params(a, b, c, d, c), 1e-12)
            want = _gamma(d) * _gamma(d - a - b) / (_gamma(d - a) * _gamma(d - b))
            worst_g = max(worst_g, float(abs(got.value - want)))
        for a, b, c in dixon_cases(20):
            got = hyp3f2_unit(Hyp3F2Params(a, b, c, 1 + a - b, 1 + a - c), 1e-12)
            want = (_gamma(1 + a / 2) * _gamma(1 + a - b) * _gamma(1 + a - c) * _gamma(1 + a / 2 - b - c)
                    / (_gamma(1 + a) * _gamma(1 + a / 2 - b) * _gamma(1 + a / 2 - c) * _gamma(1 + a - b - c)))
            worst_d = max(worst_d, float(abs(got.value - want)))
    ok = worst_g <= 1e-11 and worst_d <= 1e-11
    criterion(5, ok, f"Gauss 20 sets max err {worst_g:.3g}; Dixon 20 sets max err {worst_d:.3g} (<= 1e-11)")
    assert ok


def test_criterion_6_periods(criterion):
    rng = random.Random(606)
    worst = 0.0
    for _ in range(20):
        N = rng.randint(4, 50)
        idx = rng.choice(index_set(N))
        numeric = integral_len1(BetaForm(idx.alpha, idx.beta)).value / N
        closed = beta(idx.alpha, idx.beta).value / N
        worst = max(worst, abs(numeric - closed) / closed)
    integral = periods_suite(count=1, max_prime=31)
    primes = [p for p in range(5, 32) if is_prime(p)]
    ok = worst <= 1e-8 and integral.passed
    criterion(6, ok, f"gamma_0 periods max rel err {worst:.3g} (<= 1e-8); integer cyclotomic coordinates "
                     f"for all indices at N in {primes}: {'yes' if integral.passed else integral.failures[:3]}")
    assert ok


def test_criterion_7_properties(criterion):
    rng = random.Random(707)

    def form():
        q1, q2 = rng.randint(2, 50), rng.randint(2, 50)
        return BetaForm(Fraction(rng.randint(1, q1 - 1), q1), Fraction(rng.randint(1, q2 - 1), q2))

    shuffle_fail = path_fail = 0
    for _ in range(500):
        res, bound = shuffle_residual(form(), form())
        shuffle_fail += res > bound
    for i in range(500):
        split = rng.uniform(0.001, 0.999)
        path_fail += not check_path_product(form(), form(), split).passed
    worst_k = 0.0
    for N in (7, 8, 11):
        base = f_value(N, 1).value.value
        for k in range(2, (N - 3) // 2 + 1):
            want = base * math.factorial(k) * N ** (2 * (k - 1))
            worst_k = max(worst_k, float(abs(f_value(N, k).value.value - want) / want))
    ok = shuffle_fail == 0 and path_fail == 0 and worst_k <= 1e-12
    criterion(7, ok, f"shuffle 500 trials, {shuffle_fail} failures; path product 500 trials, {path_fail} failures; "
                     f"k-scaling max rel err {worst_k:.3g} (<= 1e-12)")
    assert ok


def test_criterion_8_bruteforce(criterion):
    fixture = json.loads(FIXTURE.read_text())
    got = f_value(7, 1).value
    gap = abs(float(got.value) - fixture["value"])
    ok = fixture["terms_summed"] >= 10**7 and gap <= 1e-8
    criterion(8, ok, f"f(7,1) accelerated {float(got.value)!r} vs direct summation of "
                     f"{fixture['terms_summed']} terms {fixture['value']!r}: gap {gap:.3g} (<= 1e-8)")
    assert ok


def test_criterion_9_determinism(criterion):
    p1, _ = cli("scan", "--from", "4", "--to", "80", "--output", "csv", "--threads", "1")
    p4, _ = cli("scan", "--from", "4", "--to", "80", "--output", "csv", "--threads", "4")
    ok = p1.returncode == 0 and p1.stdout == p4.stdout and len(p1.stdout.splitlines()) == 78
    criterion(9, ok, f"scan N=4..80 with 1 and 4 workers: {'byte-identical' if p1.stdout == p4.stdout else 'DIFFERENT'}")
    assert ok
