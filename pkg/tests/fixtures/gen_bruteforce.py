"""Regenerate bruteforce_f7.json: f(7, 1) by plain summation of the 3F2 series.

Each h-term's series is summed to M terms with numpy (ratios cumulated in
chunks, each chunk re-anchored from mpmath's loggamma), then a two-step
Richardson extrapolation on S(M/4), S(M/2), S(M) removes the 1/M and 1/M^2
tail. Shares no code with ceresa_check.

    python tests/fixtures/gen_bruteforce.py [M]
"""
import json
import math
import sys
from pathlib import Path

import mpmath
import numpy as np

CHUNK = 200_000


def log_term(n, x):
    a, c = mpmath.mpf(x), 1 - 2 * mpmath.mpf(x)
    return (2 * mpmath.loggamma(n + a) - 2 * mpmath.loggamma(a)
            + mpmath.loggamma(n + c) - mpmath.loggamma(c) - 3 * mpmath.loggamma(n + 1))


def partial_sums(x, marks):
    """Sum_{n < M} (x)_n^2 (1-2x)_n / n!^3 for each M in marks."""
    out, pieces, start = {}, [], 0
    c = 1 - 2 * x
    for M in sorted(marks):
        while start < M:
            stop = min(start + CHUNK, M)
            n = np.arange(start, stop - 1, dtype=np.float64)
            ratios = (n + x) ** 2 * (n + c) / (n + 1) ** 3
            anchor = math.exp(float(log_term(start, x))) if start else 1.0
            terms = anchor * np.concatenate(([1.0], np.cumprod(ratios)))
            pieces.append(math.fsum(terms))
            start = stop
        out[M] = math.fsum(pieces)
    return out


def hyp_unit(x, M):
    s = partial_sums(x, [M // 4, M // 2, M])
    r_hi = 2 * s[M] - s[M // 2]
    r_lo = 2 * s[M // 2] - s[M // 4]
    return (4 * r_hi - r_lo) / 3, abs(r_hi - r_lo)


def main(M=10_000_000, N=7):
    hs = [h for h in range(1, (N + 1) // 2) if math.gcd(h, N) == 1]
    total, terms = mpmath.mpf(0), []
    mpmath.mp.dps = 30
    for h in hs:
        x = h / N
        xq = mpmath.mpf(h) / N
        pref = mpmath.gamma(1 - xq) ** 4 / mpmath.gamma(1 - 2 * xq) ** 2
        series, spread = hyp_unit(x, M)
        term = pref * series
        total += term
        terms.append({"h": h, "value": float(term), "richardson_spread": spread})
    f = 2 * N**2 * total
    data = {
        "N": N,
        "k": 1,
        "terms_summed": M,
        "value": float(f),
        "h_terms": terms,
    }
    path = Path(__file__).with_name("bruteforce_f7.json")
    path.write_text(json.dumps(data, indent=2) + "\n")
    print(json.dumps(data, indent=2))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10_000_000)
