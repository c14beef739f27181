import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salemshift.algebra import RootClass
from salemshift.errors import EmptyResult, NotReal
from salemshift.seqspace import (
    CentralVector,
    Growth,
    Window,
    apply_poly,
    central_eval,
    central_sup_norm,
    central_values,
    shift,
    shift_central,
)

from conftest import GOLDEN, LEHMER, SALEM4, TWO, roots_of

int_windows = st.builds(
    lambda lo, vals: Window.from_values(lo, vals),
    st.integers(-20, 20),
    st.lists(st.integers(-5, 5), min_size=6, max_size=30),
)


def circle_pair(theta, c=0.5):
    w = np.exp(1j * theta)
    return CentralVector(np.array([w, np.conj(w)]), np.array([c, np.conj(c)]))


class TestWindow:
    def test_json_round_trip(self):
        v = Window.from_values(-3, [1, 0, 2, 5])
        back = Window.from_json(json.dumps(v.to_json()))
        assert back.equals(v) and back.growth is Growth.BOUNDED
        assert v.to_json()["hi"] == 0

    def test_implicit_zeros(self):
        v = Window.from_values(2, [7, 8])
        assert v[1] == 0 and v[3] == 8 and v[9] == 0
        assert v.get(0, 4).tolist() == [0, 0, 7, 8, 0]

    def test_length_checked(self):
        with pytest.raises(ValueError):
            Window(0, 3, np.zeros(3))


class TestShift:
    def test_impulse_moves_left(self):
        d = shift(Window.impulse(0), 1)
        assert d.lo == d.hi == -1 and d[-1] == 1

    @given(int_windows, st.integers(-10, 10))
    def test_group_action(self, v, k):
        assert shift(v, 0).equals(v)
        assert shift(shift(v, k), -k).equals(v)
        w = shift(v, k)
        assert all(w[n] == v[n + k] for n in range(w.lo, w.hi + 1))


class TestApplyPoly:
    def test_impulse(self):
        out = apply_poly(TWO, Window.impulse(0), strict=False)
        assert out.lo == -1 and out.values.tolist() == [1, -2]

    def test_zero(self):
        assert not np.any(apply_poly(SALEM4, Window.zeros(-5, 5)).values)

    def test_strict_empty(self):
        with pytest.raises(EmptyResult):
            apply_poly(SALEM4, Window.zeros(0, 2))

    def test_kernel_of_golden(self):
        phi = roots_of(GOLDEN).dominant.z.real
        n = np.arange(-10, 11)
        out = apply_poly(GOLDEN, Window(-10, 10, phi ** n.astype(float)))
        assert np.max(np.abs(out.values)) < 1e-10

    @given(int_windows, st.integers(-6, 6))
    def test_commutes_with_shift(self, v, k):
        a = apply_poly(SALEM4, shift(v, k))
        b = shift(apply_poly(SALEM4, v), k)
        assert a.lo == b.lo and np.array_equal(a.values, b.values)

    @given(int_windows)
    def test_direct_formula(self, v):
        out = apply_poly(SALEM4, v)
        for n in range(out.lo, out.hi + 1):
            assert out[n] == sum(c * v[n + k] for k, c in enumerate(SALEM4.coeffs))


class TestCentral:
    def test_zero(self):
        c = CentralVector.zero(np.exp(1j * np.array([1.0, -1.0])))
        assert central_eval(c, 7) == 0
        assert central_sup_norm(c) == (0.0, 0.0)

    def test_cosine(self):
        theta = 0.7
        c = circle_pair(theta)
        for n in range(-20, 20):
            assert abs(central_eval(c, n) - np.cos(n * theta)) < 1e-12

    def test_not_real(self):
        c = CentralVector(np.array([1j, -1j]), np.array([1.0, 0.0]))
        with pytest.raises(NotReal):
            central_eval(c, 1)

    def test_shift_relation(self):
        c = circle_pair(2.1, 0.3 - 0.2j)
        for n in range(-5, 5):
            assert abs(central_eval(shift_central(c, 1), n) - central_eval(c, n + 1)) < 1e-12
        assert np.allclose(np.abs(shift_central(c, 17).coeffs), np.abs(c.coeffs))
        lhs = shift_central(shift_central(c, 4), -9).coeffs
        assert np.max(np.abs(lhs - shift_central(c, -5).coeffs)) < 1e-12

    def test_sup_norm_dense_orbit(self):
        c = circle_pair(np.sqrt(2))  # theta / pi irrational
        lo, hi = central_sup_norm(c, 100_000)
        assert hi == pytest.approx(1.0)
        assert 1 - lo < 1e-6

    def test_sup_norm_monotone_in_horizon(self):
        c = circle_pair(1.3, 0.2 + 0.4j)
        lows = [central_sup_norm(c, h)[0] for h in (1, 10, 100, 1000)]
        assert lows == sorted(lows)

    def test_json(self):
        c = circle_pair(0.4, 1 + 2j)
        back = CentralVector.from_json(json.dumps(c.to_json()))
        assert np.allclose(back.coeffs, c.coeffs) and np.allclose(back.omegas, c.omegas)
        assert set(c.to_json()[0]) == {"omega_re", "omega_im", "c_re", "c_im"}

    @pytest.mark.parametrize("f", [SALEM4, LEHMER])
    def test_in_kernel(self, f):
        om = roots_of(f).omegas(RootClass.ZERO)
        rng = np.random.default_rng(5)
        for _ in range(20):
            c = np.zeros(len(om), dtype=complex)
            for i, w in enumerate(om):
                if w.imag > 0:
                    c[i] = complex(*rng.normal(size=2))
                    c[np.argmin(np.abs(om - np.conj(w)))] = np.conj(c[i])
            cv = CentralVector(om, c)
            ns = np.arange(-30, 30)
            vals = central_values(cv, np.arange(-30, 30 + f.degree))
            res = sum(fk * vals[k : k + len(ns)] for k, fk in enumerate(f.coeffs))
            assert np.max(np.abs(res)) < 1e-9

    def test_bracket_ratio_salem4(self):
        om = roots_of(SALEM4).omegas(RootClass.ZERO)
        rng = np.random.default_rng(11)
        for _ in range(50):
            z = complex(*rng.normal(size=2))
            c = CentralVector(om, np.array([z, np.conj(z)]) if om[0].imag > 0 else np.array([np.conj(z), z]))
            lo, hi = central_sup_norm(c, 4096)
            assert lo <= hi and hi / lo < 3
