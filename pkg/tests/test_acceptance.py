"""Acceptance checks, one test per numbered criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible without ``-s``)
and then asserts the same condition.  Run directly with
``python3 tests/test_acceptance.py`` for just the summary lines.
"""

import csv
import io
import math
import time
from fractions import Fraction

import pytest

from _oracles import (
    abs_mgf_enumerated,
    binomial_weights,
    capped_ramp_expectation,
    capped_square_expectation,
    exact_mad,
    exact_pmf,
    saturating_expectation,
)
from conftest import CAPPED_RAMP, CAPPED_SQUARE, HALF, PSI_GRID, SATURATING, X_GRID, pw
from opbound import (
    SymmetricSpec,
    a_n,
    associated_g,
    b_n,
    bernstein_apply,
    binom_mad,
    binom_pmf,
    check_theorem6_a,
    check_theorem6_b,
    cn_beta,
    corollary10_bound,
    corollary11_bound,
    exp_expectation,
    exp_expectation_primitive,
    kn_sandwich,
    modulus_vs_tv_gap,
    primitive_phi,
    validity_sweep,
    zeng_bound,
)
from opbound import cli, verify

BETAS = [0.5, 1.0, 2.0]
NS = [1, 4, 25, 100]
MS = [2, 10, 100, 1000]
SWEEP_N = list(range(4, 257, 4))
SWEEP_X = [Fraction(1, 4), HALF, Fraction(2, 3), Fraction(5, 8)]

CLOSED_FORMS = {
    CAPPED_RAMP.name: capped_ramp_expectation,
    SATURATING.name: saturating_expectation,
    CAPPED_SQUARE.name: capped_square_expectation,
}


def record(capsys, number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}"
    if detail:
        line += f" [{detail}]"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_bernstein_reproduces_low_moments(capsys):
    xs = [Fraction(1, 7), Fraction(1, 3), HALF, Fraction(9, 10)]
    one, ident, square = pw(["1"]), pw(["t"]), pw(["t**2"])
    worst = 0.0
    start = time.perf_counter()
    for n in range(1, 201):
        for x in xs:
            want = (1.0, float(x), float(x * x + x * (1 - x) / n))
            got = (bernstein_apply(one, n, x), bernstein_apply(ident, n, x), bernstein_apply(square, n, x))
            worst = max(worst, *(abs(g - w) for g, w in zip(got, want)))
    elapsed = time.perf_counter() - start
    record(capsys, 1, "Bernstein moments 1, t, t^2", worst <= 1e-12 and elapsed < 1.0,
           f"max err {worst:.2e}, {elapsed:.2f}s")


def test_modulus_expectation_sandwich(capsys):
    start = time.perf_counter()
    worst_gap, worst_oracle, order_ok = 0.0, 0.0, True
    for psi in PSI_GRID:
        for beta in BETAS:
            for n in NS:
                value = exp_expectation(psi, beta, n)
                worst_oracle = max(worst_oracle, abs(value - CLOSED_FORMS[psi.name](beta, n)))
                for m in MS:
                    lower, upper = kn_sandwich(psi, beta, n, m)
                    order_ok &= lower <= value <= upper
                    worst_gap = max(worst_gap, abs((upper - lower) - psi.sup_value / m))
    lower, upper = kn_sandwich(CAPPED_RAMP, 1.0, 1, 2)
    middle = exp_expectation(CAPPED_RAMP, 1.0, 1)
    spot = all(abs(a - b) <= 1e-4 for a, b in zip((lower, middle, upper), (0.34657, 0.63212, 0.84657)))
    elapsed = time.perf_counter() - start
    ok = order_ok and worst_gap <= 1e-12 and worst_oracle <= 1e-10 and spot and elapsed < 5.0
    record(capsys, 2, "sandwich lower <= E psi <= upper, gap psi(inf)/m", ok,
           f"gap err {worst_gap:.1e}, spot ({lower:.5f}, {middle:.5f}, {upper:.5f}), {elapsed:.2f}s")


def test_primitive_expectation_identity(capsys):
    # SATURATING and CAPPED_SQUARE carry no closed-form primitive
    worst = 0.0
    for psi in PSI_GRID:
        for beta in BETAS:
            for n in NS:
                scale = beta * math.sqrt(n)
                lhs = exp_expectation_primitive(psi, beta, n)
                worst = max(worst, abs(lhs - CLOSED_FORMS[psi.name](beta, n) / scale),
                            abs(lhs - exp_expectation(psi, beta, n) / scale))
    lhs = exp_expectation_primitive(CAPPED_RAMP, 1.0, 1)
    rhs = exp_expectation(CAPPED_RAMP, 1.0, 1)
    spot = abs(lhs - 0.63212) <= 1e-4 and abs(rhs - 0.63212) <= 1e-4
    record(capsys, 3, "E Psi = E psi / (beta sqrt n)", worst <= 1e-9 and spot,
           f"max err {worst:.1e}, spot {lhs:.5f} = {rhs:.5f}")


def test_binomial_constants_dominate(capsys):
    start = time.perf_counter()
    failures = []
    for n in range(1, 301):
        for x in X_GRID:
            row = weights, total = binomial_weights(n, x)
            nx = n * x
            p_zero = weights[int(nx)] / total if nx.denominator == 1 else 0.0
            pos = sum(w for k, w in enumerate(weights) if k > nx)
            # |P(Z>0) - 1/2| computed exactly, then rounded once
            sign_dev = abs(Fraction(2 * pos - total, 2 * total))
            if p_zero > a_n(n, x) + 1e-12:
                failures.append(("a_n", n, x))
            if float(sign_dev) > b_n(n, x) + 1e-12:
                failures.append(("b_n", n, x))
            for beta in BETAS:
                if abs_mgf_enumerated(n, x, beta, row) > cn_beta(n, x, beta) + 1e-12:
                    failures.append(("cn_beta", n, x, beta))
    spots = (
        float(exact_pmf(4, 2, HALF)), a_n(4, HALF),
        abs(float(sum(exact_pmf(4, k, HALF) for k in (3, 4))) - 0.5), b_n(4, HALF),
        abs_mgf_enumerated(4, HALF, 1.0), cn_beta(4, HALF, 1.0),
    )
    spot_ok = (
        abs(spots[0] - 0.375) <= 1e-12 and abs(spots[1] - 0.39894) <= 1e-5
        and abs(spots[2] - 0.1875) <= 1e-12 and abs(spots[3] - 0.2345) <= 1e-12
        and abs(spots[4] - 1.53915) <= 1e-5 and abs(spots[5] - 2.3057) <= 2e-4
        and spots[0] <= spots[1] and spots[2] <= spots[3] and spots[4] <= spots[5]
    )
    elapsed = time.perf_counter() - start
    record(capsys, 4, "P(Z=0) <= a_n, |P(Z>0)-1/2| <= b_n, E e^{beta|Z|} <= cn_beta",
           not failures and spot_ok and elapsed < 30.0,
           f"{len(failures)} failures, spot {spots[0]:.4f}<={spots[1]:.5f} {spots[2]:.4f}<={spots[3]:.4f} "
           f"{spots[4]:.5f}<={spots[5]:.5f}, {elapsed:.1f}s")


def test_jump_bound_validity(capsys, jump_corpus):
    results = validity_sweep(jump_corpus, SWEEP_N, SWEEP_X, "corollary10")
    failures = [r for r in results if not r.passed]
    sign_total = corollary10_bound(jump_corpus["sign"], 4, HALF).total
    ok = len(jump_corpus) >= 6 and len(results) == len(jump_corpus) * 64 * 4 and not failures
    ok &= abs(sign_total - 0.86794) <= 1e-4
    record(capsys, 5, "jump bound holds over the corpus", ok,
           f"{len(results)} points, {len(failures)} failures, sign total {sign_total:.5f}")


def test_primitive_bound_validity(capsys, corpus):
    results = validity_sweep(corpus, SWEEP_N, SWEEP_X, "corollary11")
    failures = [r for r in results if not r.passed]
    phi = pw([("abs(t - 1/2)", ["1/2"])])
    main, remainder = corollary11_bound(phi, corpus["sign"], 2, HALF)
    actual = abs(bernstein_apply(phi, 2, HALF) - phi(HALF) - main)
    # independent spot check on a primitive built here rather than in the sweep
    f, x = corpus["exp_oscillating"], Fraction(5, 8)
    psi = primitive_phi(f, x)
    m2, r2 = corollary11_bound(psi, f, 100, x)
    extra_ok = abs(bernstein_apply(psi, 100, x) - psi(x) - m2) <= r2
    ok = not failures and main == 0.25 and remainder == 0.0 and actual <= remainder and extra_ok
    record(capsys, 6, "primitive decomposition holds over the corpus", ok,
           f"{len(results)} points, {len(failures)} failures, main {main}, remainder {remainder}")


def test_mean_absolute_deviation_identity(capsys):
    worst = 0.0
    for n in range(1, 501):
        for x in X_GRID:
            brute = float(exact_mad(n, x))
            closed = 2 * float(x) * float(1 - x) * binom_pmf(n - 1, math.floor(n * x), x)
            worst = max(worst, abs(brute - closed), abs(brute - binom_mad(n, x)))
    record(capsys, 7, "E|S_n/n - x| = 2x(1-x) P(S_{n-1} = floor(nx))", worst <= 1e-12,
           f"max err {worst:.1e}")


def test_convolution_sharpness(capsys):
    specs = verify.shipped_profiles() + [
        SymmetricSpec(Fraction(1, 3), SATURATING, 0.25, "saturating_third"),
        SymmetricSpec(Fraction(3, 5), CAPPED_SQUARE, -1.0, "square_three_fifths"),
    ]
    worst = 0.0
    for spec in specs:
        for beta in BETAS:
            for n in NS:
                for check in (check_theorem6_a, check_theorem6_b):
                    worst = max(worst, check(spec, n, beta).gap)
    ramp = SymmetricSpec(HALF, CAPPED_RAMP, 0.0, "capped_ramp")
    target = 1 - math.exp(-1)
    spot = check_theorem6_a(ramp, 1, 1.0)
    spot_ok = abs(spot.lhs - target) <= 1e-8 and abs(spot.rhs - target) <= 1e-8
    record(capsys, 8, "convolution operators attain the modulus term",
           len(specs) >= 3 and worst <= 2e-9 and spot_ok,
           f"{len(specs)} profiles, max gap {worst:.1e}, spot {spot.lhs:.9f} / {spot.rhs:.9f}")


def test_modulus_beats_variation(capsys, corpus):
    violations = []
    for f in corpus.values():
        for x in SWEEP_X:
            g = associated_g(f, x)
            for n in (4, 16, 64, 256):
                mod, tv = modulus_vs_tv_gap(g, x, n)
                if mod > tv + 1e-12:
                    violations.append((f.name, x, n))
    ours = corollary10_bound(corpus["sign"], 4, HALF).total
    theirs = zeng_bound(corpus["sign"], 4, HALF)
    ok = not violations and ours < theirs and abs(theirs - 3.0) <= 1e-12 and abs(ours - 0.868) <= 1e-3
    record(capsys, 9, "modulus sums never exceed variation sums", ok,
           f"{len(violations)} violations, sign at n=4: {ours:.4f} < {theirs:.1f}")


def test_main_term_asymptotics(capsys):
    n, x = 10_000, HALF
    start = time.perf_counter()
    pmf = binom_pmf(n - 1, math.floor(n * x), x)
    elapsed = time.perf_counter() - start
    exact = float(exact_pmf(n - 1, math.floor(n * x), x))
    xf = float(x)
    ratio = xf * (1 - xf) * pmf / math.sqrt(xf * (1 - xf) / (2 * math.pi * n))
    ok = 0.98 <= ratio <= 1.02 and abs(pmf - exact) <= 1e-12 * exact and elapsed < 10.0
    record(capsys, 10, "main term against its normal approximation", ok,
           f"ratio {ratio:.6f}, {elapsed * 1e3:.1f}ms")


def test_cli_determinism_and_broken_bound(capsys, tmp_path, monkeypatch):
    args = ["sweep", "--n", "4", "8", "16", "--x", "1/4", "1/2", "2/3", "5/8"]
    codes = []
    for name in ("first.csv", "second.csv"):
        codes.append(cli.main(args + ["-o", str(tmp_path / name)]))
    same = (tmp_path / "first.csv").read_bytes() == (tmp_path / "second.csv").read_bytes()

    original = verify.BOUND_REGISTRY["corollary10"]

    def shrunk(f, n, x):
        actual, total, detail = original(f, n, x)
        return actual, 0.1 * total, detail

    monkeypatch.setitem(verify.BOUND_REGISTRY, "corollary10", shrunk)
    broken = cli.main(args)
    out = capsys.readouterr().out
    failed_rows = sum(r["pass"] == "false" for r in csv.DictReader(io.StringIO(out)))
    ok = codes == [0, 0] and same and broken == 2 and failed_rows > 0
    record(capsys, 11, "CLI sweep is byte-stable and flags a broken bound", ok,
           f"exit codes {codes} then {broken}, {failed_rows} failing rows")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
