"""Homoclinic sequences, the coding map on bounded integer sequences, and the cocycle ``d``.

With ``a_w = b_w / f_m`` the three basic sequences are

* ``wdelta_plus(n)``  = ``sum_{minus} a_w w^{n-1}`` for ``n >= 1`` and
  ``-sum_{zero, plus} a_w w^{n-1}`` for ``n <= 0``;
* ``wdelta_minus(n)`` = ``sum_{minus, zero} a_w w^{n-1}`` for ``n >= 1`` and
  ``-sum_{plus} a_w w^{n-1}`` for ``n <= 0``;
* ``wdelta0(n)``      = ``sum_{zero} a_w w^{n-1}``.

``xi_bar_star(v)`` glues them: coordinates ``n >= 0`` of ``v`` use
``wdelta_minus``, coordinates ``n < 0`` use ``wdelta_plus``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import IntPolynomial, RootClass, RootData, TorusPoint, has_root_of_unity
from .errors import CyclotomicInput, NonIntegerResidual, NotInvertible, NotMonic, NotReal, WindowTooSmall
from .seqspace import CentralVector, Growth, Window, apply_poly, central_values

IMAG_TOL = 1e-9


def _powers(omegas: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """``omegas[j] ** ks[i]`` as a ``(len(ks), len(omegas))`` array."""
    if len(omegas) == 0:
        return np.zeros((len(ks), 0), dtype=complex)
    return np.exp(np.outer(ks, np.log(omegas)))


def _real(vals: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
    if np.max(np.abs(vals.imag), initial=0.0) > IMAG_TOL * scale:
        raise NotReal(f"{what}: imaginary residual {np.max(np.abs(vals.imag)):.2e}")
    return vals.real


@dataclass(frozen=True, eq=False)
class HomoclinicData:
    f: IntPolynomial
    roots: RootData

    def __post_init__(self):
        get = lambda c: (self.roots.omegas(c), self.roots.pf_coeffs(c))  # noqa: E731
        object.__setattr__(self, "_parts", {c: get(c) for c in RootClass})

    def part(self, cls: RootClass) -> tuple[np.ndarray, np.ndarray]:
        """Roots of class ``cls`` and their coefficients ``a_w = b_w / f_m``."""
        return self._parts[cls]

    def _sum(self, classes, ks: np.ndarray) -> np.ndarray:
        out = np.zeros(len(ks), dtype=complex)
        for c in classes:
            om, a = self.part(c)
            if len(om):
                out += _powers(om, ks - 1) @ a
        return out

    def wdelta_plus(self, n) -> np.ndarray | float:
        ns = np.atleast_1d(np.asarray(n, dtype=np.int64))
        pos = ns >= 1
        out = np.empty(len(ns), dtype=complex)
        out[pos] = self._sum([RootClass.MINUS], ns[pos])
        out[~pos] = -self._sum([RootClass.ZERO, RootClass.PLUS], ns[~pos])
        out = _real(out, "wdelta_plus")
        return float(out[0]) if np.ndim(n) == 0 else out

    def wdelta_minus(self, n) -> np.ndarray | float:
        ns = np.atleast_1d(np.asarray(n, dtype=np.int64))
        pos = ns >= 1
        out = np.empty(len(ns), dtype=complex)
        out[pos] = self._sum([RootClass.MINUS, RootClass.ZERO], ns[pos])
        out[~pos] = -self._sum([RootClass.PLUS], ns[~pos])
        out = _real(out, "wdelta_minus")
        return float(out[0]) if np.ndim(n) == 0 else out

    @property
    def wdelta0(self) -> CentralVector:
        om, a = self.part(RootClass.ZERO)
        return CentralVector(om, a / om if len(om) else a)

    def window(self, which: str, lo: int, hi: int) -> Window:
        fn = {"plus": self.wdelta_plus, "minus": self.wdelta_minus}[which]
        return Window(lo, hi, fn(np.arange(lo, hi + 1)), Growth.LINEAR)

    @property
    def contraction(self) -> float:
        """``max |w|`` over roots inside the circle (0 when there are none)."""
        om, _ = self.part(RootClass.MINUS)
        return float(np.max(np.abs(om))) if len(om) else 0.0

    @property
    def expansion(self) -> float:
        """``min |w|`` over roots outside the circle (inf when there are none)."""
        om, _ = self.part(RootClass.PLUS)
        return float(np.min(np.abs(om))) if len(om) else math.inf


def homoclinic(f: IntPolynomial, r: RootData) -> HomoclinicData:
    if r.count(RootClass.ZERO) and has_root_of_unity(f):
        raise CyclotomicInput(f"{f} has a root of unity")
    return HomoclinicData(f, r)


def _convolve_part(h_fn, vals: np.ndarray, vlo: int, out_lo: int, out_hi: int) -> np.ndarray:
    """``out_k = sum_n vals[n - vlo] * h_fn(k - n)`` for ``k`` in ``[out_lo, out_hi]``."""
    n_out = out_hi - out_lo + 1
    if len(vals) == 0 or not np.any(vals):
        return np.zeros(n_out)
    vhi = vlo + len(vals) - 1
    klo, khi = out_lo - vhi, out_hi - vlo
    kernel = h_fn(np.arange(klo, khi + 1))
    full = np.convolve(vals.astype(float), kernel)
    start = len(vals) - 1
    return full[start : start + n_out]


def _tail_terms(h: HomoclinicData, bound: float, lo: int, hi: int, ks: np.ndarray) -> np.ndarray:
    """Geometric bound on the terms of ``xi_bar_star`` lost outside ``[lo, hi]``."""
    om_m, a_m = h.part(RootClass.MINUS)
    om_p, a_p = h.part(RootClass.PLUS)
    out = np.zeros(len(ks))
    if len(om_m):
        lam = h.contraction
        out += np.sum(np.abs(a_m)) * lam ** (ks - lo).astype(float) / (1 - lam)
    if len(om_p):
        lam = h.expansion
        out += np.sum(np.abs(a_p)) * lam ** (-(hi - ks + 2)).astype(float) / (1 - 1 / lam)
    return bound * out


def xi_bar_star(
    h: HomoclinicData,
    v: Window,
    window: tuple[int, int] | None = None,
    sup_bound: float | None = None,
    tol: float = 1e-9,
) -> tuple[Window, float]:
    """Evaluate ``xi_bar_star(v)`` on an output window.

    Without ``sup_bound``, ``v`` is taken to vanish outside its window and the
    result is exact (``tail_bound = 0``); the default output window pads ``v``'s
    by ``deg f`` on each side.

    With ``sup_bound = B``, ``v`` is read as a view of a longer sequence bounded
    by ``B``; then ``lo <= 0 <= hi`` is required and the returned bound covers the
    unseen coordinates.  The default output window is then the largest interior
    range on which that bound is below ``tol``.
    """
    if v.growth is not Growth.BOUNDED:
        raise ValueError("xi_bar_star needs a bounded sequence")
    m = h.f.degree
    vals = np.asarray(v.values)
    if sup_bound is None:
        lo, hi = window if window is not None else (v.lo - m, v.hi + m)
        tail = 0.0
    else:
        if not (v.lo <= 0 <= v.hi + 1):
            raise WindowTooSmall("a windowed view must straddle index 0")
        if window is None:
            ks = np.arange(v.lo, v.hi + 2)
            ok = ks[_tail_terms(h, sup_bound, v.lo, v.hi, ks) < tol]
            if len(ok) == 0:
                raise WindowTooSmall("window too short for the requested tail tolerance")
            lo, hi = int(ok[0]), int(ok[-1])
        else:
            lo, hi = window
            if lo < v.lo or hi > v.hi + 1:
                raise WindowTooSmall("output window must lie inside the input view")
        tail = float(np.max(_tail_terms(h, sup_bound, v.lo, v.hi, np.arange(lo, hi + 1))))

    neg = vals[: max(0, min(len(vals), -v.lo))]  # indices v.lo .. -1
    pos_start = max(0, -v.lo)
    pos = vals[pos_start:]
    out = np.zeros(hi - lo + 1)
    if len(neg):
        out += _convolve_part(h.wdelta_plus, neg, v.lo, lo, hi)
    if len(pos):
        out += _convolve_part(h.wdelta_minus, pos, v.lo + pos_start, lo, hi)
    return Window(lo, hi, out, Growth.LINEAR), tail


def cocycle_d(h: HomoclinicData, n: int, v: Window) -> CentralVector:
    """``d(n, v) = shift^n xi_bar_star(v) - xi_bar_star(shift^n v)`` in coefficient form.

    For ``n > 0``: ``c_w = a_w sum_{j=0}^{n-1} v_j w^{n-1-j}``.
    For ``n < 0``: ``c_w = -a_w sum_{i=n}^{-1} v_i w^{n-1-i}``.
    """
    om, a = h.part(RootClass.ZERO)
    if n == 0 or len(om) == 0:
        return CentralVector(om, np.zeros(len(om), dtype=complex))
    if n > 0:
        first, last, sign = 0, n - 1, 1.0
    else:
        first, last, sign = n, -1, -1.0
    if v.lo > first or v.hi < last:
        raise WindowTooSmall(f"d({n}, v) needs coordinates [{first}, {last}], window is [{v.lo}, {v.hi}]")
    idx = np.arange(first, last + 1)
    vals = np.asarray(v.values[first - v.lo : last - v.lo + 1], dtype=float)
    coeff = sign * a * (vals @ _powers(om, n - 1 - idx))
    return CentralVector(om, coeff)


def prefix_sums(h: HomoclinicData, v: Window) -> np.ndarray:
    """``P[p, w] = sum_{q < p} v_{lo+q} w^{-q}`` for ``p = 0..len(v)``.

    The upper norm of ``d(k, shift^{j'} v)`` is then
    ``sum_w |a_w| |P[q0 + k] - P[q0]|`` with ``q0 = j' - lo``, for either sign of ``k``.
    """
    om, _ = h.part(RootClass.ZERO)
    q = np.arange(len(v))
    terms = np.asarray(v.values, dtype=float)[:, None] * _powers(om, -q)
    out = np.zeros((len(v) + 1, len(om)), dtype=complex)
    np.cumsum(terms, axis=0, out=out[1:])
    return out


def d_upper_norms(h: HomoclinicData, v: Window, jprime: int, ks: np.ndarray, P: np.ndarray | None = None) -> np.ndarray:
    """Upper-bracket norms of ``d(k, shift^{jprime} v)`` for each ``k`` in ``ks``."""
    _, a = h.part(RootClass.ZERO)
    ks = np.asarray(ks, dtype=np.int64)
    q0 = jprime - v.lo
    if q0 + ks.min(initial=0) < 0 or q0 + ks.max(initial=0) > len(v):
        raise WindowTooSmall("shifted cocycle needs coordinates outside the window")
    if P is None:
        P = prefix_sums(h, v)
    return np.abs(P[q0 + ks] - P[q0]) @ np.abs(a)


# -- torus orbits ---------------------------------------------------------------

def _frac(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def torus_orbit(f: IntPolynomial, x: TorusPoint | Sequence[float], lo: int, hi: int) -> list[Fraction]:
    """Exact ``(M_f^n x)_0 mod 1`` for ``n`` in ``[lo, hi]`` (binary value of ``x``)."""
    if not f.is_monic:
        raise NotMonic("torus orbits need a monic polynomial")
    if not isinstance(x, TorusPoint):
        x = TorusPoint(tuple(x))
    m = f.degree
    c = f.coeffs
    seq = {i: _frac(Fraction(x.coords[i])) for i in range(m)}
    for n in range(m, hi + 1):
        seq[n] = _frac(-sum(c[i] * seq[n - m + i] for i in range(m)))
    if lo < 0:
        if abs(c[0]) != 1:
            raise NotInvertible("backward orbit needs |f_0| = 1")
        for n in range(-1, lo - 1, -1):
            seq[n] = _frac(-sum(c[i] * seq[n + i] for i in range(1, m + 1)) * c[0])
    return [seq[n] for n in range(lo, hi + 1)]


def torus_lift(f: IntPolynomial, x, lo: int, hi: int) -> Window:
    """The ``[0, 1)``-valued lift ``w_n = (M_f^n x)_0`` on ``[lo, hi]``."""
    return Window(lo, hi, np.array([float(t) for t in torus_orbit(f, x, lo, hi)]), Growth.BOUNDED)


def encode_torus(f: IntPolynomial, x, window: tuple[int, int], exact: bool = True) -> Window:
    """Integer sequence ``v = f(shift) w`` on ``window`` for the ``[0, 1)`` lift ``w`` of ``x``."""
    lo, hi = window
    m = f.degree
    if exact:
        orbit = torus_orbit(f, x, lo, hi + m)
        vals = []
        for n in range(hi - lo + 1):
            s = sum(f.coeffs[k] * orbit[n + k] for k in range(m + 1))
            if s.denominator != 1:
                raise NonIntegerResidual("exact orbit produced a non-integer symbol")
            vals.append(int(s))
        return Window(lo, hi, np.array(vals, dtype=np.int64))
    return _encode_float(f, x, lo, hi)


def _encode_float(f: IntPolynomial, x, lo: int, hi: int) -> Window:
    if not f.is_monic:
        raise NotMonic("torus orbits need a monic polynomial")
    if lo < 0 and abs(f.coeffs[0]) != 1:
        raise NotInvertible("backward orbit needs |f_0| = 1")
    x = x if isinstance(x, TorusPoint) else TorusPoint(tuple(x))
    m = f.degree
    c = f.coeffs
    seq = {i: x.coords[i] for i in range(m)}
    for n in range(m, hi + m + 1):
        seq[n] = (-sum(c[i] * seq[n - m + i] for i in range(m))) % 1.0
    for n in range(-1, lo - 1, -1):
        seq[n] = (-sum(c[i] * seq[n + i] for i in range(1, m + 1)) * c[0]) % 1.0
    w = np.array([seq[n] for n in range(lo, hi + m + 1)])
    raw = apply_poly(f, Window(lo, hi + m, w)).values
    vals = np.rint(raw)
    if np.max(np.abs(raw - vals), initial=0.0) > 1e-6:
        raise NonIntegerResidual(f"rounding residual {np.max(np.abs(raw - vals)):.2e}")
    return Window(lo, hi, vals.astype(np.int64))


def pseudocover_residual(h: HomoclinicData, x, window: tuple[int, int]) -> float:
    """``sup |f(shift)(xi_bar_star(v) - w)|`` over ``window`` where ``v`` encodes ``x``."""
    lo, hi = window
    m = h.f.degree
    v = encode_torus(h.f, x, (lo, hi + m))
    w = torus_lift(h.f, x, lo, hi + m)
    xi, _ = xi_bar_star(h, v, window=(lo, hi + m))
    return apply_poly(h.f, xi - w).sup()


def lift_defect(h: HomoclinicData, x, half_width: int = 200, tol: float = 1e-9) -> tuple[CentralVector, float]:
    """Central vector ``c`` with ``xi_bar_star(v) - w`` close to ``n -> sum c_w w^n``.

    ``v`` encodes ``x`` on ``[-half_width, half_width]``; the fit runs on the
    interior range where the truncation tail is below ``tol``.  Returns ``c``
    and the fit residual plus tail bound.
    """
    om, _ = h.part(RootClass.ZERO)
    v = encode_torus(h.f, x, (-half_width, half_width))
    xi, tail = xi_bar_star(h, v, sup_bound=float(h.f.l1), tol=tol)
    w = torus_lift(h.f, x, xi.lo, xi.hi)
    diff = (xi - w).values
    basis = _powers(om, np.arange(xi.lo, xi.hi + 1))
    if basis.shape[1] == 0:
        return CentralVector(om, np.zeros(0, dtype=complex)), float(np.max(np.abs(diff))) + tail
    coef, *_ = np.linalg.lstsq(basis, diff.astype(complex), rcond=None)
    c = CentralVector(om, coef)
    resid = float(np.max(np.abs(central_values(c, np.arange(xi.lo, xi.hi + 1), tol=1e-6) - diff)))
    return c, resid + tail


def weak_dbound_diagnostic(
    h: HomoclinicData, samples: Sequence[Window], K_grid: Sequence[float], k_max: int
) -> list[dict]:
    """Fraction of samples with ``||d(k, v)|| <= K`` for each ``K`` and ``k`` in ``[-k_max, k_max]``."""
    ks = np.arange(-k_max, k_max + 1)
    norms = np.empty((len(samples), len(ks)))
    for i, v in enumerate(samples):
        if v.lo > -k_max or v.hi < k_max - 1:
            raise WindowTooSmall("each sample must cover [-k_max, k_max]")
        norms[i] = d_upper_norms(h, v, 0, ks)
    rows = []
    for K in K_grid:
        frac = np.mean(norms <= K, axis=0) if len(samples) else np.ones(len(ks))
        rows += [{"K": float(K), "k": int(k), "fraction": float(p)} for k, p in zip(ks, frac)]
    return rows


def ceiling_example(h: HomoclinicData, coeffs: Sequence[complex], window: tuple[int, int]) -> tuple[Window, Window]:
    """Round a central sequence up coordinatewise.

    ``coeffs`` gives ``c_w`` for the roots of the upper half plane (their
    conjugates get the conjugate values).  Returns ``v = ceil(w)`` and
    ``f(shift) v``; the latter equals ``f(shift)(ceil(w) - w)`` and so stays
    below ``||f||_1`` however large ``w`` is.
    """
    om, _ = h.part(RootClass.ZERO)
    upper = [i for i, z in enumerate(om) if z.imag > 0]
    if len(coeffs) != len(upper):
        raise ValueError(f"need {len(upper)} coefficients, one per circle pair")
    c = np.zeros(len(om), dtype=complex)
    for i, val in zip(upper, coeffs):
        c[i] = val
        c[int(np.argmin(np.abs(om - np.conj(om[i]))))] = np.conj(val)
    lo, hi = window
    w = central_values(CentralVector(om, c), np.arange(lo, hi + 1))
    v = Window(lo, hi, np.ceil(w).astype(np.int64))
    return v, apply_poly(h.f, v)
