from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_fm, naive_mul, pfaffian_expansion
from polardual import fourier_mukai as fmod
from polardual.errors import GeneratorMismatch, OddDegreeInput, RankMismatch, ShapeMismatch, Singular
from polardual.exact_core import IntMatrix, det, inverse_rational, pfaffian, random_unimodular
from polardual.fourier_mukai import (
    FM_SIGN,
    ExteriorClass,
    chern_class_of_form,
    dual_bundle_form,
    exp_class,
    fm_transform,
    fm_transform_on_a,
    line_bundle_class,
    poincare_class,
    pullback,
    pushforward_isogeny,
    two_form,
    verify_fm_identities,
    wedge,
    wit_index_shadow,
)
from polardual.polarization import dual_d_form, exponent, standard_form, type_of


def X(n, *idx, c=1):
    return ExteriorClass.monomial(n, idx, c)


def classes(n, max_terms=6):
    mono = st.sets(st.integers(0, n - 1), max_size=n).map(lambda s: tuple(sorted(s)))
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(mono, coeff, max_size=max_terms).map(lambda d: ExteriorClass(n, d))


def homogeneous(n, k):
    mono = st.sets(st.integers(0, n - 1), min_size=k, max_size=k).map(lambda s: tuple(sorted(s)))
    return st.dictionaries(mono, st.integers(-4, 4), max_size=4).map(lambda d: ExteriorClass(n, d))


class TestWedge:
    def test_examples(self):
        x1, x2 = ExteriorClass.generator(2, 0), ExteriorClass.generator(2, 1)
        assert (x1 * x2).terms == {(0, 1): 1}
        assert (x2 * x1).terms == {(0, 1): -1}
        assert (x1 * x1).is_zero()

    def test_mismatch(self):
        with pytest.raises(GeneratorMismatch):
            wedge(ExteriorClass.scalar(2), ExteriorClass.scalar(3))

    @given(classes(6), classes(6), classes(6))
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(classes(6), classes(6), classes(6))
    def test_bilinear(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a * 3) * b == (a * b) * 3

    @given(st.integers(0, 4), st.integers(0, 4), st.data())
    def test_graded_commutative(self, k, l, data):
        u = data.draw(homogeneous(6, k))
        v = data.draw(homogeneous(6, l))
        assert u * v == (v * u) * (-1) ** (k * l)

    @given(homogeneous(6, 1))
    def test_odd_squares_vanish(self, u):
        assert (u * u).is_zero()

    @given(classes(5), classes(5))
    def test_matches_naive(self, a, b):
        assert (a * b).terms == naive_mul(a.terms, b.terms)


class TestExp:
    def test_examples(self):
        assert exp_class(ExteriorClass.zero(4)) == ExteriorClass.scalar(4, 1)
        c = chern_class_of_form(standard_form((2,)))
        assert exp_class(c).terms == {(): 1, (0, 1): 2}

    def test_type_11_top_coefficient(self):
        E = standard_form((1, 1)).E
        c = chern_class_of_form(standard_form((1, 1)))
        # (x1x3 + x2x4)^2 / 2 = x1x3x2x4 = -x1x2x3x4
        top = exp_class(c).coefficient((0, 1, 2, 3))
        assert top == -1 == pfaffian(E) == pfaffian_expansion(E.tolist())

    def test_errors(self):
        with pytest.raises(OddDegreeInput):
            exp_class(X(2, 0))
        with pytest.raises(ValueError):
            exp_class(ExteriorClass.scalar(2, 1))

    @settings(max_examples=25)
    @given(st.integers(1, 3), st.integers(0, 10**5))
    def test_top_power_is_pfaffian(self, g, seed):
        P = standard_form((1, 2, 6)[:g]).conjugate(random_unimodular(2 * g, seed))
        top = exp_class(chern_class_of_form(P)).coefficient(range(2 * g))
        assert top == pfaffian(P.E)


class TestClasses:
    def test_chern_class(self):
        assert chern_class_of_form(standard_form((2,))).terms == {(0, 1): 2}
        assert chern_class_of_form(standard_form((1, 2))).terms == {(0, 2): 1, (1, 3): 2}

    def test_poincare(self):
        assert poincare_class(1).terms == {(0, 2): 1, (1, 3): 1}
        assert poincare_class(2).terms == {(0, 4): 1, (1, 5): 1, (2, 6): 1, (3, 7): 1}
        # setting every y to zero kills it
        P = poincare_class(2)
        assert all(max(k) >= 4 for k in P.terms)

    def test_two_form_round_trip(self):
        E = standard_form((1, 2)).conjugate(random_unimodular(4, 2)).E
        assert fmod.two_form_matrix(two_form(E)).to_int() == E


class TestTransform:
    def test_line_bundle_g1(self):
        # exp(x1y1 + x2y2)(1 + 2x1x2): x1x2-coefficient is 2 - y1y2
        fm = fm_transform_on_a(line_bundle_class(standard_form((2,))))
        assert fm.terms == {(): 2, (0, 1): -1}

    def test_structure_sheaf_g1(self):
        assert fm_transform_on_a(ExteriorClass.scalar(2, 1)).terms == {(0, 1): -1}

    def test_requires_4g(self):
        with pytest.raises(GeneratorMismatch):
            fm_transform(ExteriorClass.scalar(6))

    @settings(max_examples=40)
    @given(st.sampled_from([1, 2]), st.data())
    def test_matches_naive(self, g, data):
        c = data.draw(classes(4 * g, max_terms=8))
        assert fm_transform(c).terms == naive_fm(c.terms, g)

    @given(classes(8), classes(8), st.integers(-3, 3))
    def test_linear(self, a, b, r):
        assert fm_transform(a + b) == fm_transform(a) + fm_transform(b)
        assert fm_transform(a * r) == fm_transform(a) * r

    @given(st.integers(0, 8), st.data())
    def test_degree_bookkeeping(self, k, data):
        # homogeneous input of degree k lands in degree k - 2g + 2|R|, i.e. y-degree of the
        # term plus the number of paired generators: parity is preserved
        c = data.draw(homogeneous(8, k))
        out = fm_transform(c)
        assert all((deg - k) % 2 == 0 for deg in out.degrees())

    @settings(max_examples=20)
    @given(st.integers(1, 3), st.integers(0, 10**5))
    def test_gaussian_closed_form(self, g, seed):
        P = standard_form((1, 2, 4)[:g]).conjugate(random_unimodular(2 * g, seed))
        expected = exp_class(two_form(inverse_rational(P.E))) * pfaffian(P.E)
        assert fm_transform_on_a(line_bundle_class(P)) == expected


class TestPullPush:
    def test_pullback_examples(self):
        c = X(4, 0, 2, c=3) + X(4, 1)
        assert pullback(c, IntMatrix.identity(4)) == c
        two = X(4, 0, 1) + X(4, 2, 3, c=5)
        assert pullback(two, IntMatrix.identity(4) * 3) == two * 9
        E = standard_form((2,)).E
        assert pullback(X(2, 0, 1), E) == X(2, 0, 1) * det(E) == X(2, 0, 1) * 4

    def test_pullback_two_forms(self):
        E = standard_form((1, 2)).E
        M = random_unimodular(4, 6)
        assert pullback(two_form(E), M) == two_form(M.T @ E @ M)

    def test_pullback_shape(self):
        with pytest.raises(ShapeMismatch):
            pullback(X(2, 0), IntMatrix.identity(3))

    def test_functorial(self):
        A, B = random_unimodular(4, 1), IntMatrix([[2, 1, 0, 0], [0, 1, 0, 0], [0, 0, 3, 0], [1, 0, 0, 1]])
        c = X(4, 0, 3) + X(4, 1, c=2) + X(4, 0, 1, 2)
        assert pullback(pullback(c, A), B) == pullback(c, A @ B)

    def test_pushforward_identity(self):
        c = X(2, 0) + X(2, 0, 1, c=3)
        assert pushforward_isogeny(c, IntMatrix.identity(2)) == c

    @pytest.mark.parametrize("M", [IntMatrix.identity(2) * 2, IntMatrix([[1, 0], [0, 2]]), IntMatrix([[2, 1], [1, 3]])])
    def test_composition(self, M):
        dM = det(M)
        for c in [ExteriorClass.scalar(2, 1), X(2, 0), X(2, 0, 1) + X(2, 1, c=Fraction(1, 3))]:
            assert pushforward_isogeny(pullback(c, M), M) == c * dM
            assert pullback(pushforward_isogeny(c, M), M) == c * dM
        assert dM == 4 or M != IntMatrix.identity(2) * 2

    def test_singular(self):
        with pytest.raises(Singular):
            pushforward_isogeny(X(2, 0), IntMatrix([[1, 1], [1, 1]]))

    def test_lemma_shadow_diag_12(self):
        chL = line_bundle_class(standard_form((2,)))
        M = IntMatrix([[1, 0], [0, 2]])
        lhs = fm_transform_on_a(pushforward_isogeny(chL, M))
        rhs = pullback(fm_transform_on_a(chL), M.T)
        assert lhs == rhs
        assert lhs.terms == {(): 2, (0, 1): -2}


class TestDualBundle:
    def test_g1_type2(self):
        rank, Ehat = dual_bundle_form(standard_form((2,)))
        assert rank == 2
        assert Ehat.tolist() == [[0, 1], [-1, 0]]
        assert type_of(Ehat).d == (1,)

    def test_type_12(self):
        rank, Ehat = dual_bundle_form(standard_form((1, 2)))
        assert rank == 2 and type_of(Ehat).d == (1, 2)

    def test_type_22(self):
        P = standard_form((2, 2))
        rank, Ehat = dual_bundle_form(P)
        assert rank == 4
        assert Ehat == dual_d_form(P).E * (2 * FM_SIGN)
        assert type_of(Ehat).d == (2, 2)

    def test_global_sign(self):
        for t in [(1,), (3,), (1, 2), (2, 4), (1, 1, 2)]:
            P = standard_form(t).conjugate(random_unimodular(2 * len(t), 8))
            rank, Ehat = dual_bundle_form(P)
            assert Ehat @ P.E == IntMatrix.identity(2 * len(t)) * (FM_SIGN * rank)

    def test_rank_mismatch(self, monkeypatch):
        monkeypatch.setattr(fmod, "degree", lambda P: 5)
        with pytest.raises(RankMismatch):
            dual_bundle_form(standard_form((2,)))

    @pytest.mark.parametrize("t, value", [((2,), -2), ((1, 1), 1), ((1, 2, 2), -4)])
    def test_wit_shadow(self, t, value):
        assert wit_index_shadow(standard_form(t)) == value


class TestVerify:
    def test_g1_prop34(self):
        P = standard_form((2,))
        fm = fm_transform_on_a(line_bundle_class(P))
        assert pullback(fm, P.E).terms == {(): 2, (0, 1): -4}
        assert verify_fm_identities(P).passed

    def test_type_12_with_2I(self):
        r = verify_fm_identities(standard_form((1, 2)), [IntMatrix.identity(4) * 2])
        assert r.checks["lemma32"]

    def test_type_3(self):
        P = standard_form((3,))
        r = verify_fm_identities(P)
        assert r.passed
        assert exponent(P) == 3 == r.rank_component
        assert r.c1_form == dual_d_form(P).E * FM_SIGN

    def test_report_json(self):
        out = verify_fm_identities(standard_form((1, 2, 4))).to_json((1, 2, 4))
        assert set(out) >= {"type", "rank", "Ehat", "thm31", "prop34", "lemma32", "wit_sign"}
        assert out["thm31"] and out["prop34"] and out["lemma32"] and out["wit_sign"]
        assert out["rank"] == "8"
