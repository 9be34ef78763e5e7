"""End-to-end acceptance suite: one test (and one verdict line) per criterion."""

import cmath
import itertools
import time

import numpy as np
import pytest

from dirac_torus import (
    GOLDEN,
    ElementSpec,
    FredholmContext,
    GNSVector,
    MeasureCoeffs,
    Symbol,
    assemble_block,
    block_spectrum,
    circle_example,
    deformed_derivation,
    growth_sequence,
    hill_compare,
    inverse_norm_report,
    modular_apply,
    radon_nikodym,
    state_omega,
    trace_tau,
    weyl_mul,
    weyl_star,
)
from dirac_torus.algebra import sigma
from dirac_torus.dirac import undeformed_block
from dirac_torus.fredholm import circle_general, connes_bound, connes_operator

GENERATORS = {
    "z^1": lambda N: ElementSpec.monomial(1, N),
    "z^2": lambda N: ElementSpec.monomial(2, N),
    "z^-1": lambda N: ElementSpec.monomial(-1, N),
    "shift^1": lambda N: ElementSpec.shift(1, N),
    "shift^2": lambda N: ElementSpec.shift(2, N),
    "shift^-1": lambda N: ElementSpec.shift(-1, N),
}
FREDHOLM_N = 4


@pytest.fixture(scope="module")
def contexts(sine_diffeo):
    cache = {}

    def get(M, eta):
        if (M, eta) not in cache:
            cache[(M, eta)] = FredholmContext(sine_diffeo, FREDHOLM_N, M, eta)
        return cache[(M, eta)]
    return get


def exact_spectrum(n, M):
    k = np.arange(-M, M + 1)
    r = np.sqrt(k * k + n * n)
    return np.sort(np.r_[r, -r])


def three_way(f, eta, printed=False):
    start = time.perf_counter()
    rows = [r for n in (1, 2, 3) for r in hill_compare(f, n, eta, 64, 10, printed_coefficient=printed)]
    return rows, time.perf_counter() - start


def three_way_summary(rows):
    return (max(r.rel_gap for r in rows), max(r.periodicity_residual for r in rows),
            max(r.reconstruction_residual for r in rows))


def test_criterion_01_undeformed_exactness(rotation, acceptance):
    start = time.perf_counter()
    err = 0.0
    for n in range(-3, 4):
        w = block_spectrum(assemble_block(rotation, n, 32)).eigenvalues
        err = max(err, np.abs(np.sort(w) - exact_spectrum(n, 32)).max())
    elapsed = time.perf_counter() - start
    ok = err <= 1e-10 and elapsed < 1.0
    acceptance(1, ok, f"max abs error {err:.2e} (<= 1e-10), runtime {elapsed:.2f}s (< 1s)")
    assert ok


def test_criterion_02_tracial_reduction(rotation, acceptance):
    err = max(np.abs(assemble_block(rotation, n, 32, eta).matrix - undeformed_block(n, 32)).max()
              for n in range(-3, 4) for eta in (0.0, 0.5, 1.0))
    ok = err <= 1e-12
    acceptance(2, ok, f"max entrywise deviation {err:.2e} over eta in {{0, 1/2, 1}} (<= 1e-12)")
    assert ok


def test_criterion_03_three_way_agreement(sine_diffeo, acceptance):
    rows, elapsed = three_way(sine_diffeo, 0.0)
    gap, per, rec = three_way_summary(rows)
    ok = len(rows) == 30 and gap <= 1e-5 and per <= 1e-6 and rec <= 1e-6 and elapsed < 30
    acceptance(3, ok, f"rel gap {gap:.1e}, periodicity {per:.1e}, reconstruction {rec:.1e}, "
                      f"runtime {elapsed:.1f}s")
    assert ok


def test_criterion_04_inverse_norm_bound(sine_diffeo, acceptance):
    rows = inverse_norm_report(sine_diffeo, range(1, 21), 64)
    violations = [r.n for r in rows if not r.bound_satisfied]
    worst = max(r.inverse_norm / r.bound for r in rows)
    ok = not violations and len(rows) == 20
    acceptance(4, ok, f"{len(violations)} violations over n = 1..20, max ratio {worst:.4f}")
    assert ok


def test_criterion_05_derivation_bounds(sine_diffeo, acceptance):
    msgs, ok = [], True
    for m in (1, 2, 3):
        norm = deformed_derivation(ElementSpec.monomial(m, 4), sine_diffeo, 4, 64).norm
        ok &= norm <= m * (1 + 1e-12)
        msgs.append(f"z^{m}: {norm:.6f}")
    gamma = growth_sequence(sine_diffeo, 4).running_max(4)
    for l in (1, 2):
        norm = deformed_derivation(ElementSpec.shift(l, 4), sine_diffeo, 4, 64).norm
        ok &= norm <= l * gamma
        msgs.append(f"shift^{l}: {norm:.5f} <= {l * gamma:.5f}")
    acceptance(5, ok, "; ".join(msgs))
    assert ok


def test_criterion_06_two_way_equality(contexts, acceptance):
    worst, count = 0.0, 0
    for M in (64, 128):
        for eta in (0.0, 0.5):
            ctx = contexts(M, eta)
            for make in GENERATORS.values():
                worst = max(worst, ctx.commutator(make(FREDHOLM_N)).gap)
                count += 1
    ok = count == 24 and worst <= 1e-7
    acceptance(6, ok, f"max gap {worst:.2e} over {count} runs (<= 1e-7)")
    assert ok


def test_criterion_07_circle_fixtures(rng, acceptance):
    dev = max(np.abs(circle_general(l, 10, d) - circle_example(l, 10, d).matrix).max()
              for l in range(-4, 5) for d in (True, False))
    entry_err = 0.0
    for l in (-3, -2, -1, 1, 2, 3):
        ex = circle_example(l, 12, True)
        for k in range(-10, 11):
            if k and k + l and abs(k + l) <= 12:
                entry_err = max(entry_err, abs(ex.entry(k + l, k) - l * (1 / abs(k + l) + 1 / abs(k))))
    ranks = all(circle_example(l, 12, False).rank == max(abs(l) - 1, 0) for l in range(-6, 7))
    connes = 0
    for _ in range(20):
        degree = int(rng.integers(1, 6))
        poly = {j: complex(rng.normal(), rng.normal()) for j in range(-degree, degree + 1) if j}
        connes += np.linalg.norm(connes_operator(poly, 12), 2) <= connes_bound(poly) * (1 + 1e-12)
    ok = dev <= 1e-12 and entry_err <= 1e-12 and ranks and connes == 20
    acceptance(7, ok, f"machinery deviation {dev:.1e}, entry error {entry_err:.1e}, "
                      f"ranks {'ok' if ranks else 'wrong'}, Connes bound {connes}/20")
    assert ok


def test_criterion_08_algebra_suite(sine_diffeo, rng, acceptance):
    alpha = sine_diffeo.weyl_alpha
    grid = list(itertools.product(range(-10, 11), repeat=2))
    weyl_err = 0.0
    deltas = {a: Symbol.delta(*a) for a in grid}
    for a in grid:
        for b in grid[::7]:
            prod = weyl_mul(deltas[a], deltas[b], alpha)
            s = (a[0] + b[0], a[1] + b[1])
            if prod.support() != {s}:
                weyl_err = np.inf
                break
            weyl_err = max(weyl_err, abs(prod[s] - cmath.exp(2j * cmath.pi * alpha * sigma(a, b))))
    assoc = 0.0
    for _ in range(100):
        f, g, h = (Symbol.random(rng, int(rng.integers(1, 6))) for _ in range(3))
        assoc = max(assoc, weyl_mul(weyl_mul(f, g, alpha), h, alpha)
                    .max_abs_diff(weyl_mul(f, weyl_mul(g, h, alpha), alpha)))
    mu = MeasureCoeffs.pushforward(sine_diffeo, 8)
    min_eig = np.inf
    for _ in range(20):
        fam = [Symbol.random(rng, 3, radius=2) for _ in range(5)]
        gram = np.array([[state_omega(mu, weyl_mul(weyl_star(a), b, alpha)) for b in fam] for a in fam])
        min_eig = min(min_eig, np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)).min())
    haar = all(state_omega(MeasureCoeffs.haar(), f) == trace_tau(f)
               for f in (Symbol.random(rng, 8, radius=4) for _ in range(50)))
    ok = weyl_err <= 4e-15 and assoc <= 1e-12 and min_eig >= -1e-10 and haar
    acceptance(8, ok, f"Weyl relation {weyl_err:.1e}, associativity {assoc:.1e}, "
                      f"Gram min eigenvalue {min_eig:.2e}, Haar = trace {'exact' if haar else 'NO'}")
    assert ok


def test_criterion_09_modular_suite(sine_diffeo, two_mode_diffeo, rng, acceptance):
    s2 = polar = 0.0
    for f in (sine_diffeo, two_mode_diffeo):
        for _ in range(5):
            x = GNSVector.random(rng, 3, 64, 8)
            scale = np.abs(x.coeffs).max()
            sx = modular_apply("S", f, x)
            s2 = max(s2, np.abs(modular_apply("S", f, sx).coeffs - x.coeffs).max() / scale)
            jd = modular_apply("J", f, modular_apply("Delta", f, x, 0.5))
            polar = max(polar, np.abs(sx.coeffs - jd.coeffs).max() / scale)
    theta = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    cocycle = mean = 0.0
    for m, n in itertools.product(range(-5, 6), repeat=2):
        Fn, dn = two_mode_diffeo.power(n, theta)
        cocycle = max(cocycle, np.abs(two_mode_diffeo.power(m + n, theta)[1]
                                      - two_mode_diffeo.power(m, Fn)[1] * dn).max())
    for n in range(-6, 7):
        mean = max(mean, abs(radon_nikodym(two_mode_diffeo, n, 1024).mean() - 1))
    ok = max(s2, polar, cocycle, mean) <= 1e-8
    acceptance(9, ok, f"S^2 {s2:.1e}, S vs J Delta^1/2 {polar:.1e}, cocycle {cocycle:.1e}, "
                      f"mean one {mean:.1e}")
    assert ok


def test_criterion_10a_inverse_norm_decrease(sine_diffeo, acceptance):
    norms = [r.inverse_norm for r in inverse_norm_report(sine_diffeo, range(1, 21), 64)]
    rises = [n for n in range(1, 20) if norms[n] > norms[n - 1]]
    ok = not rises
    acceptance(10, ok, "||D_n^-1|| nonincreasing in n = 1..20; increases after n = "
               + (", ".join(map(str, rises)) if rises else "none"), part="a")
    assert ok, f"inverse norms increase from n to n+1 at n = {rises}: {np.round(norms, 4)}"


def test_criterion_10b_singular_value_proxy(contexts, acceptance):
    msgs, ok = [], True
    for name in ("z^1", "shift^1"):
        A = GENERATORS[name](FREDHOLM_N)
        sv = {M: contexts(M, 0.0).commutator(A).singular_values for M in (32, 64, 128)}
        top = abs(sv[128][0] - sv[64][0]) / sv[64][0]
        at_2m = [sv[M][2 * M - 1] for M in (32, 64, 128)]
        ok &= top <= 0.01 and at_2m[0] > at_2m[1] > at_2m[2]
        msgs.append(f"{name}: sigma_1 drift {top:.1e}, sigma_2M at M=32/64/128 "
                    + "/".join(f"{t:.3f}" for t in at_2m))
    acceptance(10, ok, "; ".join(msgs), part="b")
    assert ok


def test_criterion_11_eta_adjudication(sine_diffeo, acceptance):
    verdicts, ok = [], True
    for eta in (0.5, 1.0):
        rows, elapsed = three_way(sine_diffeo, eta)
        gap, per, rec = three_way_summary(rows)
        good = gap <= 1e-5 and per <= 1e-6 and rec <= 1e-6 and elapsed < 30
        ok &= good
        verdicts.append(f"eta={eta}: gap {gap:.1e}, periodicity {per:.1e}, reconstruction {rec:.1e}")
    acceptance(11, ok, "corrected coefficient: " + "; ".join(verdicts))
    printed = []
    for eta in (0.5, 1.0):
        rows, _ = three_way(sine_diffeo, eta, printed=True)
        for n in (1, 2, 3):
            printed.append(f"eta={eta} n={n}: {max(r.rel_gap for r in rows if r.n == n):.1e}")
    acceptance(11, "REPORT", "coefficient without factor n, max rel gap: " + ", ".join(printed), part="r")
    assert ok
