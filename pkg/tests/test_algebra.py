import json
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salemshift.algebra import (
    IntPolynomial,
    RootClass,
    TorusPoint,
    classify,
    companion_apply,
    find_roots,
    has_root_of_unity,
    partial_fractions,
)
from salemshift.errors import Inconclusive, NonSquarefree, NotInvertible, NotMonic

from conftest import CUBE_ROOTS, GOLDEN, LEHMER, SALEM4, TWO, roots_of

# 50-digit values from an independent sympy nroots computation
with mp.workdps(60):
    GOLDEN_PLUS = mp.mpf("1.6180339887498948482045868343656381177203091798058")
    SALEM4_PLUS = mp.mpf("1.7220838057390422450270692121538314620701165557516")
    SALEM4_MINUS = mp.mpf("0.58069183199295240153254142158141651105553173117107")
    LEHMER_PLUS = mp.mpf("1.1762808182599175065440703384740350506934158065647")
SALEM4_B_ZERO = complex(0.1386750490563072805, 0.11905349344231934613)  # 1/f'(w), w in lower half plane


class TestIntPolynomial:
    def test_invariants(self):
        with pytest.raises(ValueError):
            IntPolynomial((1,))
        with pytest.raises(ValueError):
            IntPolynomial((1, -1))
        with pytest.raises(ValueError):
            IntPolynomial((0, 1))

    def test_parse_and_json(self):
        f = IntPolynomial.parse("1,-1,-1,-1,1")
        assert f == SALEM4
        assert IntPolynomial.from_json(json.dumps(f.to_json())) == f
        assert f.degree == 4 and f.l1 == 5

    def test_reciprocal_flag_is_exact(self):
        assert SALEM4.is_reciprocal and LEHMER.is_reciprocal
        assert not GOLDEN.is_reciprocal


class TestFindRoots:
    def test_golden(self):
        r = roots_of(GOLDEN)
        plus, = r.select(RootClass.PLUS)
        minus, = r.select(RootClass.MINUS)
        with mp.workdps(50):
            assert abs(plus.value - GOLDEN_PLUS) < mp.mpf(10) ** -45
            assert abs(minus.value + 1 / GOLDEN_PLUS) < mp.mpf(10) ** -45

    def test_cube_roots_on_circle(self):
        r = roots_of(CUBE_ROOTS)
        assert [x.cls for x in r.roots] == [RootClass.ZERO, RootClass.ZERO]

    def test_salem4(self):
        r = roots_of(SALEM4)
        assert r.count(RootClass.ZERO) == 2
        with mp.workdps(50):
            assert abs(r.select(RootClass.PLUS)[0].value - SALEM4_PLUS) < mp.mpf(10) ** -45
            assert abs(r.select(RootClass.MINUS)[0].value - SALEM4_MINUS) < mp.mpf(10) ** -45

    def test_lehmer(self):
        r = roots_of(LEHMER)
        with mp.workdps(50):
            assert abs(r.dominant.value - LEHMER_PLUS) < mp.mpf(10) ** -45
        assert r.count(RootClass.ZERO) == 8

    @pytest.mark.parametrize("f", [GOLDEN, SALEM4, LEHMER, TWO, CUBE_ROOTS])
    def test_root_residual_and_conjugates(self, f):
        r = roots_of(f)
        assert len(r.roots) == f.degree
        with mp.workdps(r.digits):
            for x in r.roots:
                assert abs(f(x.value)) < mp.mpf(10) ** (-r.digits / 2)
        zs = np.array([x.z for x in r.roots])
        bs = np.array([x.bz for x in r.roots])
        for z, b in zip(zs, bs):
            j = np.argmin(np.abs(zs - np.conj(z)))
            assert abs(bs[j] - np.conj(b)) < 1e-14

    def test_reciprocal_pairs(self):
        for f in (SALEM4, LEHMER):
            r = roots_of(f)
            zs = [x.value for x in r.roots]
            with mp.workdps(r.digits):
                for x in r.select(RootClass.MINUS, RootClass.PLUS):
                    assert min(abs(z - 1 / x.value) for z in zs) < 1e-40

    def test_squarefree_required(self):
        with pytest.raises(NonSquarefree):
            find_roots(IntPolynomial((1, 2, 1)))

    def test_digits_floor(self):
        with pytest.raises(ValueError):
            find_roots(GOLDEN, digits=20)

    def test_json_shape(self):
        rows = roots_of(SALEM4).to_json()
        assert set(rows[0]) == {"re", "im", "cls", "b_re", "b_im"}


class TestPartialFractions:
    def test_linear(self):
        r = roots_of(TWO)
        assert r.roots[0].bz == 1
        assert r.pf_residual([0.5, 3 + 1j]) < 1e-40

    def test_golden_at_three(self):
        r = roots_of(GOLDEN)
        total = sum(x.bz / (3 - x.z) for x in r.roots) / GOLDEN.leading
        assert abs(total - 1 / 5) < 1e-15
        for x in r.roots:
            assert abs(x.bz - 1 / (2 * x.z - 1)) < 1e-15

    def test_salem4_matches_oracle(self):
        r = roots_of(SALEM4)
        lower = [x for x in r.select(RootClass.ZERO) if x.z.imag < 0][0]
        assert abs(lower.bz - SALEM4_B_ZERO) < 1e-15

    @pytest.mark.parametrize("f", [GOLDEN, SALEM4, LEHMER, CUBE_ROOTS])
    def test_identity_at_random_points(self, f):
        rng = np.random.default_rng(3)
        pts = []
        zs = np.array([x.z for x in roots_of(f).roots])
        while len(pts) < 16:
            z = complex(*rng.normal(size=2) * 1.5)
            if np.min(np.abs(zs - z)) > 0.05:
                pts.append(z)
        r = partial_fractions(f, roots_of(f))
        assert r.pf_residual(pts) < 1e-10


class TestClassify:
    def test_flags(self):
        pc = classify(GOLDEN, roots_of(GOLDEN))
        assert pc.hyperbolic and pc.pisot and not pc.cyclotomic and not pc.salem
        pc = classify(CUBE_ROOTS, roots_of(CUBE_ROOTS))
        assert pc.cyclotomic and not pc.hyperbolic
        for f in (SALEM4, LEHMER):
            pc = classify(f, roots_of(f))
            assert pc.salem and pc.reciprocal and not pc.cyclotomic and not pc.hyperbolic
            assert f.degree % 2 == 0
            assert roots_of(f).count(RootClass.ZERO) == f.degree - 2

    def test_cyclotomic_exact(self):
        assert has_root_of_unity(IntPolynomial((1, 0, 0, 0, 0, 0, 1)))  # u^6 + 1
        assert has_root_of_unity(IntPolynomial((1, 1, 1, 1, 1)))  # fifth cyclotomic
        assert not has_root_of_unity(SALEM4)
        assert not has_root_of_unity(LEHMER)
        # reducible: Salem quartic times u^2 + u + 1
        prod = np.convolve(SALEM4.coeffs, (1, 1, 1)).tolist()
        assert has_root_of_unity(IntPolynomial(tuple(prod)))

    def test_inconclusive_near_circle(self):
        # a loose tolerance stands in for a root hugging the circle
        f = IntPolynomial((2, 0, 3))  # roots of modulus sqrt(2/3)
        r = find_roots(f, tol_circle=0.5)
        with pytest.raises(Inconclusive):
            classify(f, r)

    def test_rational_root_warns(self):
        f = IntPolynomial((-6, -1, 1))  # (u - 3)(u + 2)
        with pytest.warns(UserWarning):
            classify(f, find_roots(f))


class TestCompanion:
    def test_zero_fixed(self):
        for n in (-3, 0, 5):
            assert companion_apply(SALEM4, (0, 0, 0, 0), n).coords == (0.0,) * 4

    def test_golden_step(self):
        assert companion_apply(GOLDEN, (0.25, 0.5), 1).coords == (0.5, 0.75)

    def test_round_trip(self):
        x = TorusPoint((0.1234, 0.98765, 0.5, 0.333))
        y = companion_apply(SALEM4, companion_apply(SALEM4, x, 3), -3)
        assert np.max(np.abs(np.array(y.coords) - x.coords)) < 1e-12

    def test_errors(self):
        with pytest.raises(NotInvertible):
            companion_apply(IntPolynomial((2, 0, 1)), (0.1, 0.2), -1)
        with pytest.raises(NotMonic):
            companion_apply(IntPolynomial((1, 0, 2)), (0.1, 0.2), 1)

    def test_reduced_coordinates(self):
        assert TorusPoint((1.0, -0.25, 2.5)).coords == (0.0, 0.75, 0.5)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(0, 1, exclude_max=True), min_size=4, max_size=4),
        st.integers(-6, 6),
        st.integers(-6, 6),
    )
    def test_group_action(self, coords, a, b):
        x = TorusPoint(tuple(coords))
        lhs = np.array(companion_apply(SALEM4, x, a + b).coords)
        rhs = np.array(companion_apply(SALEM4, companion_apply(SALEM4, x, a), b).coords)
        d = np.abs(lhs - rhs)
        assert np.all(np.minimum(d, 1 - d) < 1e-12)


def test_no_warning_for_irreducible():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        classify(SALEM4, roots_of(SALEM4))
