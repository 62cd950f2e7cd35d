"""Acceptance gate.

One test (or a small group) per criterion, each tagged with
``@pytest.mark.criterion``; the session summary prints a PASS/FAIL line per
criterion.  Runtime limits are asserted inside the tests.
"""

import io
import json
import random
import time
from contextlib import contextmanager

import pytest

from oracles import dual_type_from_kernel, pfaffian_expansion
from polardual import complex_torus as ct
from polardual.cli import main
from polardual.exact_core import IntMatrix, det, inverse_rational, pfaffian, random_unimodular
from polardual.fourier_mukai import (
    FM_SIGN,
    fm_transform_on_a,
    line_bundle_class,
    pullback,
    pushforward_isogeny,
    verify_fm_identities,
    wit_index_shadow,
)
from polardual.moduli_types import TypeVector, d_dual_type, delta_type, enumerate_types, orbit_report
from polardual.polarization import (
    degree,
    dual_d_form,
    dual_delta_form,
    exponent,
    kernel_invariants,
    standard_form,
    type_of,
)

TYPES = [(1,), (2,), (1, 1), (1, 2), (2, 2), (2, 4), (1, 1, 2), (1, 2, 4), (2, 4, 8), (1, 1, 2, 4)]
CORPUS_SIZE = 200


@contextmanager
def within(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.2f}s, limit {seconds}s"


def random_chain(rng, max_g=10, bound=10**9):
    g = rng.randint(1, max_g)
    d = [rng.randint(1, 1000)]
    for _ in range(g - 1):
        room = bound // d[-1]
        factor = rng.choice([1, 1, 2, 3, rng.randint(1, 50)])
        d.append(d[-1] * (factor if factor <= room else 1))
    return TypeVector(tuple(d))


@pytest.fixture(scope="module")
def corpus():
    out = []
    for k in range(CORPUS_SIZE):
        t = TYPES[k % len(TYPES)]
        P = standard_form(t).conjugate(random_unimodular(2 * len(t), 1000 + k))
        out.append((TypeVector(t), P))
    return out


@pytest.mark.criterion(1, "delta_type is an involution")
def test_c1_involution():
    with within(5):
        n = 0
        for g in range(1, 7):
            for t in enumerate_types(g, 60):
                assert delta_type(delta_type(t)) == t
                n += 1
        rng = random.Random(20240601)
        for _ in range(1000):
            t = random_chain(rng)
            assert max(t) <= 10**9
            assert delta_type(delta_type(t)) == t
    assert n > 6000


@pytest.mark.criterion(2, "(e E^-1) E = E (e E^-1) = e I on 200 conjugates")
def test_c2_matrix_duality(corpus):
    with within(10):
        for t, P in corpus:
            # conjugation inside the fixture is not part of the timed work, the duals are
            e = exponent(P)
            ED = dual_d_form(P).E
            eI = IntMatrix.identity(2 * t.g) * e
            assert e == t.exponent
            assert ED @ P.E == eI and P.E @ ED == eI


@pytest.mark.criterion(3, "dual type and kernel invariants of e E^-1")
def test_c3_dual_types(corpus):
    for t, P in corpus:
        ED = dual_d_form(P)
        expected = d_dual_type(t)
        assert type_of(ED) == expected
        assert tuple(expected) == dual_type_from_kernel(tuple(t), False)
        doubled = tuple(x for x in expected for _ in range(2))
        assert kernel_invariants(ED).factors == doubled


@pytest.mark.criterion(4, "delta_type agrees with the type of the delta-dual matrix")
def test_c4_label_matrix():
    n = 0
    for g in range(1, 6):
        for t in enumerate_types(g, 30):
            assert type_of(dual_delta_form(standard_form(t))) == delta_type(t)
            n += 1
    assert n > 1000


@pytest.mark.criterion(5, "|Pf E| = degree and Pf^2 = det")
def test_c5_pfaffian(corpus):
    for t, P in corpus:
        pf = pfaffian(P.E)
        assert abs(pf) == t.degree == degree(P)
        assert pf * pf == det(P.E)
        if t.g <= 2:
            assert pf == pfaffian_expansion(P.E.tolist())


def fm_types():
    out = []
    for g in range(1, 4):
        out += [t for t in enumerate_types(g, 64) if t.degree <= 64]
    return out


@pytest.mark.criterion(6, "Fourier-Mukai identities for g <= 3, d <= 64")
def test_c6_fourier_mukai():
    types = fm_types()
    isogenies = {g: [IntMatrix.identity(2 * g) * 2, IntMatrix.identity(2 * g) * 3] for g in (1, 2, 3)}
    with within(60):
        for t in types:
            P = standard_form(t)
            d, g = t.degree, t.g
            r = verify_fm_identities(P, isogenies[g])
            assert r.rank_component == d
            assert r.c1_form == (inverse_rational(P.E) * (FM_SIGN * d)).to_int()
            assert r.checks["thm31"] and r.checks["prop34"] and r.checks["lemma32"]
            assert wit_index_shadow(P) == (-1) ** g * d
            assert r.passed
    assert len(types) > 100


@pytest.mark.criterion(6, "Fourier-Mukai identities for g <= 3, d <= 64")
def test_c6_lemma_shadow_direct():
    # the isogeny shadow written out once more, outside the report
    for t in [(2,), (1, 2), (1, 1, 2)]:
        P = standard_form(t).conjugate(random_unimodular(2 * len(t), 4))
        chL = line_bundle_class(P)
        for k in (2, 3):
            M = IntMatrix.identity(2 * len(t)) * k
            assert fm_transform_on_a(pushforward_isogeny(chL, M)) == pullback(fm_transform_on_a(chL), M.T)


@pytest.mark.criterion(7, "analytic duality on 50 Siegel instances per type")
def test_c7_analytic():
    worst = {"r1": 0.0, "pair": 0.0, "dd": 0.0}
    with within(60):
        for t in TYPES:
            for seed in range(50):
                T = ct.random_siegel(t, seed)
                rep = ct.dual_polarization_verify(T, ct.DEFAULT_TOL)
                assert rep.passed, (t, seed, rep.to_json())
                v = rep.values
                assert v["base"]["r1_residual"] < 1e-9
                assert v["dual"]["r1_residual"] < 1e-9
                assert v["pairing_residual"] < 1e-8
                assert v["double_dual_residual"] < 1e-6
                worst["r1"] = max(worst["r1"], v["base"]["r1_residual"], v["dual"]["r1_residual"])
                worst["pair"] = max(worst["pair"], v["pairing_residual"])
                worst["dd"] = max(worst["dd"], v["double_dual_residual"])
    print("worst residuals", worst)


@pytest.mark.criterion(8, "orbit structure for g = 2 and g = 3")
def test_c8_orbits():
    with within(5):
        r2 = orbit_report(2, 50)
        assert r2.fixed_count == len(r2.types) and r2.swap_count == 0
        r3 = orbit_report(3, 20)
        flat = [t for o in r3.orbits for t in o]
        assert sorted(flat) == sorted(r3.types) and len(flat) == len(set(flat))
        assert r3.closed
        for o in r3.orbits:
            assert len(o) in (1, 2)
            for t in o:
                assert (len(o) == 1) == (t[1] ** 2 == t[0] * t[2])
        assert r3.swap_count > 0


def _cli(argv, stdin, monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    return code, capsys.readouterr().out


@pytest.mark.criterion(9, "CLI round trips and random -> verify pipeline")
def test_c9_cli(monkeypatch, capsys):
    for k, t in enumerate(TYPES):
        arg = ",".join(map(str, t))
        code, src = _cli(["random", "--type", arg, "--seed", str(k)], "", monkeypatch, capsys)
        assert code == 0
        _, once = _cli(["dual", "--mode", "delta"], src, monkeypatch, capsys)
        _, twice = _cli(["dual", "--mode", "delta"], once, monkeypatch, capsys)
        assert twice == src, t
        code, out = _cli(["verify", "--all"], src, monkeypatch, capsys)
        assert code == 0 and json.loads(out)["passed"], t
