"""Beta-expansions, the maximal sequence ``e*``, and Parry admissibility."""

from __future__ import annotations

import functools
import threading
import warnings
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .algebra import DEFAULT_DIGITS, IntPolynomial, RootClass, find_roots
from .errors import DigitOutOfRange, PrecisionExhausted, PreconditionViolated
from .seqspace import Window, apply_poly


class _ExactOrbit:
    """Orbit of 1 under ``x -> beta x mod 1`` with elements of ``Q(beta)``.

    Elements are coefficient tuples in the basis ``1, beta, ..., beta^{m-1}``;
    this assumes ``f`` is irreducible, so that the basis is independent.
    """

    def __init__(self, f: IntPolynomial, beta: mp.mpf, digits: int):
        self.f = f
        self.m = f.degree
        self.digits = digits
        with mp.workdps(digits + 20):
            self.powers = [beta**i for i in range(self.m)]
        self.red = [Fraction(-c, f.leading) for c in f.coeffs[:-1]]  # beta^m in the basis
        self.current = (Fraction(1),) + (Fraction(0),) * (self.m - 1)
        self.seen = {self.current: 0}
        self.n = 0
        self.period: tuple[int, int] | None = None
        self.finite = False

    def _value(self, elem):
        with mp.workdps(self.digits + 20):
            return mp.fsum(mp.mpf(c.numerator) / c.denominator * p for c, p in zip(elem, self.powers))

    def step(self) -> int:
        """Advance one step and return the greedy digit."""
        c = self.current
        top = c[-1]
        nxt = [Fraction(0)] + list(c[:-1])
        if top:
            for i in range(self.m):
                nxt[i] += top * self.red[i]
        val = self._value(nxt)
        d = int(mp.floor(val))
        near = int(mp.nint(val))
        if abs(val - near) < mp.mpf(10) ** (-self.digits // 2):
            is_int = nxt[0] == near and all(x == 0 for x in nxt[1:])
            if is_int:
                d = near
            elif abs(val - near) < mp.mpf(10) ** (-self.digits + 5):
                raise PrecisionExhausted("cannot decide the floor of an orbit point")
        nxt[0] -= d
        self.current = tuple(nxt)
        self.n += 1
        if all(x == 0 for x in self.current):
            self.finite = True
            self.period = (0, self.n)
        elif self.current in self.seen:
            i = self.seen[self.current]
            self.period = (i, self.n - i)
        else:
            self.seen[self.current] = self.n
        return d


class BetaSystem:
    """A base ``beta > 1`` with a lazily extended cache of ``e*``.

    ``e*`` is the quasi-greedy expansion of 1.  Readers may share an instance;
    extension of the cache happens under a lock.
    """

    def __init__(self, beta, poly: IntPolynomial | None = None, digits: int = DEFAULT_DIGITS, exact: bool = True):
        self.digits = digits
        with mp.workdps(digits + 20):
            self.beta = mp.mpf(beta)
        if self.beta <= 1:
            raise ValueError("beta must exceed 1")
        self.poly = poly
        with mp.workdps(digits + 20):
            self.digit_max = int(mp.ceil(self.beta - 1))
        self._lock = threading.Lock()
        self._estar: list[int] = []
        self._greedy: list[int] = []
        self.period_info: tuple[int, int] | None = None
        self._orbit = _ExactOrbit(poly, self.beta, digits) if (poly is not None and exact) else None
        self._float_r = mp.mpf(1)
        self._finite_greedy = False

    @classmethod
    def from_polynomial(cls, f: IntPolynomial, digits: int = DEFAULT_DIGITS) -> BetaSystem:
        r = find_roots(f, digits)
        plus = [x for x in r.select(RootClass.PLUS) if x.value.imag == 0 and x.value.real > 1]
        if not plus:
            raise ValueError(f"{f} has no real root greater than 1")
        beta = max(plus, key=lambda x: x.value.real).value.real
        return cls(beta, poly=f, digits=digits)

    @classmethod
    def from_value(cls, beta, digits: int = DEFAULT_DIGITS) -> BetaSystem:
        """Exploratory constructor from a decimal value (no exact orbit)."""
        if isinstance(beta, float) and beta != int(beta):
            warnings.warn("beta given as a binary float; lexicographic data may be unreliable", stacklevel=2)
        if isinstance(beta, (int, np.integer)) or (isinstance(beta, float) and beta == int(beta)):
            return cls(int(beta), poly=IntPolynomial((-int(beta), 1)), digits=digits)
        return cls(mp.mpf(beta) if not isinstance(beta, str) else beta, poly=None, digits=digits, exact=False)

    @property
    def value(self) -> float:
        return float(self.beta)

    @property
    def log_beta(self) -> float:
        return float(mp.log(self.beta))

    def _greedy_step(self) -> int | None:
        """Next greedy digit of 1, or None once the greedy expansion has terminated."""
        if self._finite_greedy:
            return None
        if self._orbit is not None:
            d = self._orbit.step()
            if self._orbit.period is not None and self.period_info is None:
                self.period_info = self._orbit.period
            if self._orbit.finite:
                self._finite_greedy = True
            return d
        with mp.workdps(self.digits + 20):
            t = self.beta * self._float_r
            d = int(mp.floor(t))
            self._float_r = t - d
            # without exact arithmetic a remainder this small is read as a terminated expansion
            if abs(self._float_r) < mp.mpf(10) ** (-self.digits // 2):
                self._finite_greedy = True
                self.period_info = (0, len(self._greedy) + 1)
        return d

    def _extend(self, n: int) -> None:
        with self._lock:
            while len(self._estar) < n:
                if self.period_info is not None and len(self._estar) >= sum(self.period_info):
                    p, q = self.period_info
                    k = len(self._estar)
                    self._estar.append(self._estar[p + (k - p) % q])
                    continue
                d = self._greedy_step()
                self._greedy.append(d)
                if self._finite_greedy:
                    # quasi-greedy: (d_1 ... d_{p-1} (d_p - 1)) repeated
                    word = self._greedy[:-1] + [self._greedy[-1] - 1]
                    self._estar = word[:]
                    self.period_info = (0, len(word))
                elif self.period_info is not None:
                    self._estar = self._greedy[:]
                else:
                    self._estar.append(d)

    def estar(self, n: int) -> np.ndarray:
        """First ``n`` digits of ``e*`` (1-based digits ``e*_1 .. e*_n``)."""
        if len(self._estar) < n:
            self._extend(n)
        return np.array(self._estar[:n], dtype=np.int64)

    def estar_digit(self, k: int) -> int:
        """``e*_k`` for ``k >= 1``."""
        if len(self._estar) < k:
            self._extend(max(k, 2 * len(self._estar)))
        return self._estar[k - 1]

    def __repr__(self):
        return f"BetaSystem(beta={mp.nstr(self.beta, 15)}, digit_max={self.digit_max})"


def estar_prefix(bs: BetaSystem, n: int) -> list[int]:
    if n < 1:
        raise ValueError("n must be positive")
    return bs.estar(n).tolist()


def beta_expand(bs: BetaSystem, x, n: int) -> list[int]:
    """First ``n`` greedy digits of ``x`` in ``[0, 1)``."""
    if n < 1:
        raise ValueError("n must be positive")
    with mp.workdps(bs.digits + 20):
        r = mp.mpf(x)
        if not 0 <= r < 1:
            raise ValueError("x must lie in [0, 1)")
        out = []
        for _ in range(n):
            t = bs.beta * r
            d = int(mp.floor(t))
            out.append(d)
            r = t - d
    return out


def _check_digits(bs: BetaSystem, vals: np.ndarray) -> None:
    if len(vals) and (vals.min() < 0 or vals.max() > bs.digit_max):
        raise DigitOutOfRange(f"digits must lie in 0..{bs.digit_max}")


def is_admissible(bs: BetaSystem, v: Window | Sequence[int], two_sided: bool = True) -> bool:
    """Does every suffix of ``v`` compare ``<= e*`` lexicographically?

    Two-sided mode checks suffixes starting anywhere in the window, one-sided
    mode only those starting at index ``>= 1``.  Suffixes that run past the
    window end and agree with ``e*`` so far count as admissible; since ``e*``
    has no zero tail this is the same verdict as padding with zeros.
    """
    if not isinstance(v, Window):
        v = Window.from_values(1, list(v))
    vals = np.asarray(v.values, dtype=np.int64)
    _check_digits(bs, vals)
    start = 0 if two_sided else max(0, 1 - v.lo)
    state = 0
    est = bs._estar
    for a in vals[start:].tolist():
        if state >= len(est):
            bs.estar(max(2 * state + 16, 64))
            est = bs._estar
        e = est[state]
        if a < e:
            state = 0
        elif a == e:
            state += 1
        else:
            return False
    return True


def first_violation(bs: BetaSystem, v: Window) -> int | None:
    """Index of the first suffix found to exceed ``e*`` (brute force), or None."""
    vals = np.asarray(v.values, dtype=np.int64)
    est = bs.estar(len(vals) + 1)
    for i in range(len(vals)):
        tail = vals[i:]
        diff = np.nonzero(tail != est[: len(tail)])[0]
        if len(diff) and tail[diff[0]] > est[diff[0]]:
            return v.lo + i
    return None


def eta_eval(bs: BetaSystem, v: Window, precise: bool = False):
    """``sum_n v_n beta^{-n}`` over the window, plus a bound on unseen coordinates past ``hi``.

    ``precise=True`` returns both numbers as ``mpf`` at the working precision of ``bs``.
    """
    with mp.workdps(bs.digits + 20):
        total = mp.fsum(int(d) * bs.beta ** (-n) for n, d in zip(range(v.lo, v.hi + 1), v.values.tolist()) if d)
        tail = bs.digit_max * bs.beta ** (-(v.hi + 1)) / (1 - 1 / bs.beta)
    if precise:
        return total, tail
    return float(total), float(tail)


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.nonzero(a != b)[0]
    return bool(len(diff)) and a[diff[0]] < b[diff[0]]


def splice(bs: BetaSystem, v: Window, w: Window) -> Window:
    """Past of ``v`` (indices ``<= 0``) followed by the future of ``w`` (indices ``> 0``)."""
    lo, hi = min(v.lo, w.lo, 0), max(v.hi, w.hi, 1)
    vf, wf = v.get(1, hi), w.get(1, hi)
    if not _lex_less(wf, vf):
        raise PreconditionViolated("the future of w must be strictly below the future of v")
    if not (is_admissible(bs, v) and is_admissible(bs, w)):
        raise PreconditionViolated("both inputs must be admissible")
    out = np.concatenate([v.get(lo, 0), wf])
    result = Window(lo, hi, out)
    assert is_admissible(bs, result)
    return result


def sofic_probe(bs: BetaSystem, n_max: int) -> tuple[int, int] | None:
    """Smallest ``(preperiod, period)`` visible in the first ``n_max`` digits of ``e*``.

    An exactly detected orbit period is returned when it fits in the horizon.
    Otherwise the prefix is scanned for a nonzero block repeating at least twice.
    None means nothing was found; it does not mean the shift is not sofic.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    est = bs.estar(n_max)
    if bs.period_info is not None and sum(bs.period_info) <= n_max:
        return bs.period_info
    for q in range(1, n_max // 2 + 1):
        mism = np.nonzero(est[q:] != est[:-q])[0]
        p = int(mism[-1]) + 1 if len(mism) else 0
        # e* has no zero tail, so an all-zero repeating block is an artefact of the horizon
        if p + 2 * q <= n_max and est[p : p + q].any():
            return p, q
    return None


@functools.lru_cache(maxsize=8)
def _candidate_grid(radius: int, width: int) -> np.ndarray:
    """All integer vectors in ``[-radius, radius]^width``, one per row (read-only, cached)."""
    side = 2 * radius + 1
    grid = np.indices((side,) * width, dtype=np.int16).reshape(width, -1).T - radius
    grid.setflags(write=False)
    return grid


def perturbation_witnesses(
    bs: BetaSystem, f: IntPolynomial, v: Window, radius: int = 2, support: tuple[int, int] = (-4, 4)
) -> list[tuple[int, ...]]:
    """Nonzero ``h`` with ``|h| <= radius`` on ``support`` such that ``v + f(shift) h`` stays admissible.

    Exhaustive over all ``(2 radius + 1)^len(support)`` candidates; the digit
    range filter is vectorized and only survivors get a full admissibility check.
    """
    s_lo, s_hi = support
    width = s_hi - s_lo + 1
    m = f.degree
    lo, hi = s_lo - m, s_hi  # support of f(shift) h
    if v.lo > lo or v.hi < hi:
        raise ValueError("v must cover the perturbed coordinates")
    H = _candidate_grid(radius, width)
    # (f(shift) h)_n = sum_k f_k h_{n+k}
    F = np.zeros((width, hi - lo + 1), dtype=np.int16)
    for j in range(width):
        for k, c in enumerate(f.coeffs):
            n = s_lo + j - k
            F[j, n - lo] += c
    U = H @ F + v.get(lo, hi).astype(np.int16)
    ok = np.all((U >= 0) & (U <= bs.digit_max), axis=1) & np.any(H != 0, axis=1)
    found = []
    for idx in np.nonzero(ok)[0]:
        vals = np.array(v.values, dtype=np.int64)
        vals[lo - v.lo : hi - v.lo + 1] = U[idx]
        if is_admissible(bs, Window(v.lo, v.hi, vals)):
            found.append(tuple(int(t) for t in H[idx]))
    return found


def perturb(f: IntPolynomial, v: Window, h: Window) -> Window:
    """``v + f(shift) h`` with ``h`` zero-extended."""
    return v + apply_poly(f, h, strict=False)
