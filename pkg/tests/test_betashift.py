import threading

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salemshift.algebra import IntPolynomial
from salemshift.betashift import (
    BetaSystem,
    beta_expand,
    estar_prefix,
    eta_eval,
    first_violation,
    is_admissible,
    perturbation_witnesses,
    sofic_probe,
    splice,
)
from salemshift.errors import DigitOutOfRange, PreconditionViolated
from salemshift.hofbauer import rng_for, sample_path
from salemshift.seqspace import Window, shift

from conftest import GOLDEN, LEHMER, SALEM4, TWO, beta_of, chain_of

# greedy digits of 1 from a 400-digit floating iteration of x -> beta x mod 1
ORACLE_GREEDY = {
    "salem4": "110010010010010010010010010010010010010010010010010010010010"
    "010010010010010010010010010010010010010010010010010010010010",
    "lehmer": "100000000001000000000000000000100000000000010000000000000000"
    "001000000000000000000000010000000000000000001000000000000100",
}


class TestEstar:
    def test_golden(self):
        bs = beta_of(GOLDEN)
        assert estar_prefix(bs, 10) == [1, 0] * 5
        with mp.workdps(30):
            s = mp.fsum(bs.beta ** -(2 * k + 1) for k in range(200))
            assert abs(s - 1) < mp.mpf(10) ** -28

    def test_two_is_quasi_greedy(self):
        assert estar_prefix(beta_of(TWO), 8) == [1] * 8
        assert estar_prefix(BetaSystem.from_value(2), 8) == [1] * 8

    def test_oracles(self):
        assert "".join(map(str, estar_prefix(beta_of(SALEM4), 120))) == ORACLE_GREEDY["salem4"]
        assert "".join(map(str, estar_prefix(beta_of(LEHMER), 120))) == ORACLE_GREEDY["lehmer"]
        assert beta_of(SALEM4).estar_digit(1) == 1

    def test_float_path_matches_exact(self):
        bs = BetaSystem.from_value(str(beta_of(SALEM4).beta), digits=60)
        assert estar_prefix(bs, 60) == estar_prefix(beta_of(SALEM4), 60)

    @pytest.mark.parametrize("f", [GOLDEN, SALEM4, LEHMER, TWO])
    def test_invariants(self, f):
        bs = beta_of(f)
        e = bs.estar(400)
        assert e.min() >= 0 and e.max() <= bs.digit_max
        for k in range(1, 201):
            tail, head = e[k:], e[: 400 - k]
            diff = np.nonzero(tail != head)[0]
            assert len(diff) == 0 or tail[diff[0]] < head[diff[0]]
        for k in range(0, 400, 50):
            assert e[k:].any()
        with mp.workdps(40):
            partial = [mp.fsum(int(d) * bs.beta ** -(i + 1) for i, d in enumerate(e[:n])) for n in (10, 50, 150)]
        assert partial[0] <= partial[1] <= partial[2] <= 1
        assert 1 - partial[2] < 1e-9

    def test_concurrent_extension(self):
        bs = BetaSystem.from_polynomial(LEHMER)
        out = []
        threads = [threading.Thread(target=lambda n=n: out.append(bs.estar(n)[:100].tolist())) for n in (300, 500, 800, 200)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(o == out[0] for o in out)


class TestExpand:
    def test_zero(self):
        assert beta_expand(beta_of(SALEM4), 0, 12) == [0] * 12

    def test_golden_inverse(self):
        bs = beta_of(GOLDEN)
        with mp.workdps(80):
            x = 1 / bs.beta
            assert beta_expand(bs, x, 6) == [1, 0, 0, 0, 0, 0]

    @pytest.mark.parametrize("f", [GOLDEN, SALEM4, TWO])
    def test_greedy_remainder(self, f):
        bs = beta_of(f)
        rng = np.random.default_rng(1)
        for x in rng.random(100):
            d = beta_expand(bs, x, 40)
            val, _ = eta_eval(bs, Window.from_values(1, d))
            assert x - bs.value ** -40 <= val <= x + 1e-15
            assert is_admissible(bs, Window.from_values(1, d))


class TestAdmissible:
    def test_zero_word(self):
        assert is_admissible(beta_of(SALEM4), Window.zeros(-5, 5))

    def test_golden_forbids_11(self):
        bs = beta_of(GOLDEN)
        assert not is_admissible(bs, Window.from_values(0, [0, 1, 1, 0]))
        assert is_admissible(bs, Window.from_values(0, [1, 0, 1, 0, 0, 1]))

    def test_digit_range(self):
        with pytest.raises(DigitOutOfRange):
            is_admissible(beta_of(GOLDEN), Window.from_values(0, [2]))

    def test_one_sided_ignores_past(self):
        bs = beta_of(GOLDEN)
        v = Window.from_values(-1, [1, 1, 0, 1])
        assert not is_admissible(bs, v)
        assert is_admissible(bs, v, two_sided=False)

    @pytest.mark.parametrize("f", [GOLDEN, SALEM4])
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=20))
    def test_automaton_matches_brute_force(self, f, word):
        bs = beta_of(f)
        v = Window.from_values(0, word)
        assert is_admissible(bs, v) == (first_violation(bs, v) is None)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10_000), st.integers(-15, 15))
    def test_shift_invariance(self, seed, k):
        bs = beta_of(SALEM4)
        rng = np.random.default_rng(seed)
        v = Window(0, 29, rng.integers(0, 2, 30))
        assert is_admissible(bs, v) == is_admissible(bs, shift(v, k))


class TestEta:
    def test_basic(self):
        bs = beta_of(SALEM4)
        assert eta_eval(bs, Window.zeros(1, 5))[0] == 0
        val, tail = eta_eval(bs, Window.impulse(1))
        assert val == pytest.approx(1 / bs.value, rel=1e-15)
        assert tail == pytest.approx(bs.value**-2 / (1 - 1 / bs.value), rel=1e-12)

    def test_expansion_round_trip(self):
        bs = beta_of(SALEM4)
        rng = np.random.default_rng(7)
        for x in rng.random(50):
            val, _ = eta_eval(bs, Window.from_values(1, beta_expand(bs, x, 50)))
            assert abs(val - x) < bs.value**-49


class TestSplice:
    def test_zero_future(self):
        bs = beta_of(GOLDEN)
        v = Window.from_values(-2, [1, 0, 0, 1, 0])
        out = splice(bs, v, Window.zeros(-2, 2))
        assert out.get(-2, 0).tolist() == [1, 0, 0] and not out.get(1, 2).any()

    def test_golden_example(self):
        bs = beta_of(GOLDEN)
        v = Window.from_values(-1, [0, 0, 1, 0, 0])
        w = Window.from_values(-1, [1, 0, 0, 1, 0])
        out = splice(bs, v, w)
        assert out.get(-1, 3).tolist() == [0, 0, 0, 1, 0]

    def test_strictness(self):
        bs = beta_of(GOLDEN)
        v = Window.from_values(0, [0, 1, 0])
        with pytest.raises(PreconditionViolated):
            splice(bs, v, v)


class TestSoficProbe:
    def test_known_periods(self):
        assert sofic_probe(beta_of(GOLDEN), 50) == (0, 2)
        assert sofic_probe(beta_of(TWO), 50) == (0, 1)
        assert sofic_probe(beta_of(SALEM4), 10_000) == (1, 3)

    def test_prefix_scan_for_inexact(self):
        bs = BetaSystem.from_value("1.6180339887498948482045868343656381177203091798058")
        assert sofic_probe(bs, 40) == (0, 2)

    def test_unknown_within_short_horizon(self):
        # Lehmer's e* repeats only after 75 digits
        assert sofic_probe(beta_of(LEHMER), 60) is None
        assert sofic_probe(beta_of(LEHMER), 200) == (1, 74)


class TestPerturbation:
    def test_only_trivial_h(self):
        bs = beta_of(SALEM4)
        chain = chain_of(SALEM4)
        for i in range(3):
            v = sample_path(chain, 41, rng_for(21, i), lo=-20)
            assert perturbation_witnesses(bs, SALEM4, v) == []

    def test_enumeration_finds_moves(self):
        # with the difference operator u - 1, moving a digit along is a valid perturbation
        bs = beta_of(TWO)
        v = Window.from_values(-8, [0, 1] * 8 + [0])
        found = perturbation_witnesses(bs, IntPolynomial((-1, 1)), v, radius=1, support=(-2, 2))
        assert found and all(any(h) for h in found)

    def test_beta_two_has_no_finite_carry(self):
        bs = beta_of(TWO)
        v = Window.from_values(-8, [0, 1] * 8 + [0])
        assert perturbation_witnesses(bs, TWO, v, radius=2, support=(-3, 3)) == []
