"""Integer polynomials, multiprecision roots and the companion-matrix action.

A polynomial ``f = f_0 + f_1 u + ... + f_m u^m`` is stored low-to-high.  Roots
are refined by Newton iteration in :mod:`mpmath` and split by modulus into
``minus`` (inside the unit circle), ``zero`` (on it) and ``plus`` (outside).
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp
import numpy as np

from .errors import (
    Inconclusive,
    NonSquarefree,
    NotInvertible,
    NotMonic,
    PrecisionExhausted,
)

DEFAULT_DIGITS = 60
TOL_CIRCLE = 1e-12


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial with ``m > 0``, ``f_m > 0`` and ``f_0 != 0``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        if any(int(x) != x for x in self.coeffs):
            raise ValueError("coefficients must be integers")
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2:
            raise ValueError("degree must be positive")
        if c[-1] <= 0:
            raise ValueError("leading coefficient must be positive")
        if c[0] == 0:
            raise ValueError("constant coefficient must be nonzero")

    @classmethod
    def parse(cls, text: str) -> IntPolynomial:
        """Parse ``"f_0,f_1,...,f_m"``."""
        return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))

    @classmethod
    def from_json(cls, obj) -> IntPolynomial:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj["coeffs"]))

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs)}

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def l1(self) -> int:
        return sum(abs(c) for c in self.coeffs)

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    @property
    def is_reciprocal(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    @property
    def is_self_reciprocal(self) -> bool:
        """True when ``f_i = f_{m-i}`` or ``f_i = -f_{m-i}`` for all ``i``."""
        rev = self.coeffs[::-1]
        return self.coeffs == rev or self.coeffs == tuple(-c for c in rev)

    def derivative_coeffs(self) -> tuple[int, ...]:
        return tuple(k * c for k, c in enumerate(self.coeffs))[1:]

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self, z):
        acc = 0
        for c in reversed(self.derivative_coeffs()):
            acc = acc * z + c
        return acc

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*u^{k}")
        return " + ".join(terms)


class RootClass(str, enum.Enum):
    MINUS = "minus"
    ZERO = "zero"
    PLUS = "plus"


@dataclass(frozen=True)
class Root:
    value: mp.mpc
    cls: RootClass
    b: mp.mpc

    @property
    def z(self) -> complex:
        return complex(self.value)

    @property
    def bz(self) -> complex:
        return complex(self.b)


@dataclass(frozen=True)
class RootData:
    """Classified roots of ``poly`` with partial-fraction coefficients ``b``.

    ``1/f(u) = (1/f_m) * sum_w b_w / (u - w)``.
    """

    poly: IntPolynomial
    roots: tuple[Root, ...]
    digits: int
    ambiguous: bool = False

    def select(self, *classes: RootClass) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if r.cls in classes)

    def count(self, cls: RootClass) -> int:
        return len(self.select(cls))

    def omegas(self, *classes: RootClass) -> np.ndarray:
        return np.array([r.z for r in self.select(*classes)], dtype=complex)

    def pf_coeffs(self, *classes: RootClass) -> np.ndarray:
        """``b_w / f_m`` for the selected roots, in the same order as :meth:`omegas`."""
        fm = self.poly.leading
        return np.array([r.bz / fm for r in self.select(*classes)], dtype=complex)

    @property
    def dominant(self) -> Root:
        return max(self.roots, key=lambda r: abs(r.z))

    def pf_residual(self, points: Iterable[complex]) -> float:
        """Largest deviation of the partial-fraction sum from ``1/f`` at ``points``."""
        worst = 0.0
        with mp.workdps(self.digits):
            for z in points:
                z = mp.mpc(z)
                lhs = 1 / self.poly(z)
                rhs = mp.fsum(r.b / (z - r.value) for r in self.roots) / self.poly.leading
                worst = max(worst, float(abs(lhs - rhs)))
        return worst

    def to_json(self) -> list[dict]:
        return [
            {
                "re": float(r.value.real),
                "im": float(r.value.imag),
                "cls": r.cls.value,
                "b_re": float(r.b.real),
                "b_im": float(r.b.imag),
            }
            for r in self.roots
        ]


@dataclass(frozen=True)
class PolyClass:
    hyperbolic: bool
    cyclotomic: bool
    pisot: bool
    salem: bool
    reciprocal: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TorusPoint:
    """Point of ``T^m``; every coordinate is reduced into ``[0, 1)``."""

    coords: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        red = []
        for c in self.coords:
            r = float(c) % 1.0
            red.append(0.0 if r == 1.0 else r)
        object.__setattr__(self, "coords", tuple(red))

    def __len__(self):
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


# -- rational polynomial arithmetic (low-to-high lists of Fractions) ---------

def _trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _deg(p: Sequence) -> int:
    if len(p) == 1 and p[0] == 0:
        return -1
    return len(p) - 1


def _polymod(a: list, b: list) -> list:
    a = _trim(list(a))
    db = _deg(b)
    lead = b[db]
    while _deg(a) >= db:
        q = a[-1] / lead
        shift = len(a) - 1 - db
        for i in range(db + 1):
            a[shift + i] -= q * b[i]
        a.pop()
        _trim(a)
        if not a:
            return [Fraction(0)]
    return a


def _polygcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while _deg(b) >= 0:
        a, b = b, _polymod(a, b)
    return a


def is_squarefree(f: IntPolynomial) -> bool:
    fq = [Fraction(c) for c in f.coeffs]
    dq = [Fraction(c) for c in f.derivative_coeffs()]
    return _deg(_polygcd(fq, dq)) == 0


def has_root_of_unity(f: IntPolynomial) -> bool:
    """Exact test: does ``gcd(f, u^k - 1)`` have positive degree for some ``k``?

    A primitive ``k``-th root of unity has degree ``phi(k)`` and
    ``phi(k) >= sqrt(k/2)``, so only ``k <= 2 m^2`` needs checking.
    """
    m = f.degree
    fq = [Fraction(c) for c in f.coeffs]
    lead = fq[-1]
    power = [Fraction(1)] + [Fraction(0)] * (m - 1)  # u^0 mod f
    for _ in range(2 * m * m):
        # multiply by u and reduce modulo f
        top = power[-1]
        power = [Fraction(0)] + power[:-1]
        if top:
            for i in range(m):
                power[i] -= top * fq[i] / lead
        rem = list(power)
        rem[0] -= 1
        if all(c == 0 for c in rem):
            return True
        if _deg(_polygcd(fq, rem)) > 0:
            return True
    return False


def rational_roots(f: IntPolynomial) -> list[Fraction]:
    def divisors(n):
        n = abs(n)
        return [d for d in range(1, n + 1) if n % d == 0]

    found = []
    for p in divisors(f.coeffs[0]):
        for q in divisors(f.leading):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if r not in found and sum(c * r**k for k, c in enumerate(f.coeffs)) == 0:
                    found.append(r)
    return found


# -- roots --------------------------------------------------------------------

def _newton(f: IntPolynomial, z, digits: int, maxiter: int = 200):
    eps = mp.mpf(10) ** (-digits)
    for _ in range(maxiter):
        fz = f(z)
        dz = f.derivative(z)
        if dz == 0:
            raise NonSquarefree(f"vanishing derivative near {mp.nstr(z, 10)}")
        step = fz / dz
        z = z - step
        if abs(step) <= eps * max(1, abs(z)):
            return z
    raise PrecisionExhausted(f"Newton refinement stagnated near {mp.nstr(z, 10)}")


def _all_distinct(zs, sep) -> bool:
    for i in range(len(zs)):
        for j in range(i):
            if abs(zs[i] - zs[j]) < sep:
                return False
    return True


def _conjugate_symmetrize(zs, tol):
    """Make real roots exactly real and pair the others as exact conjugates."""
    out = [None] * len(zs)
    used = set()
    for i, z in enumerate(zs):
        if i in used:
            continue
        if abs(z.imag) <= tol * max(1, abs(z)):
            out[i] = mp.mpc(z.real, 0)
            used.add(i)
            continue
        j = min(
            (k for k in range(len(zs)) if k != i and k not in used),
            key=lambda k: abs(zs[k] - mp.conj(z)),
        )
        if abs(zs[j] - mp.conj(z)) > tol ** 0.5:
            raise PrecisionExhausted("non-real root without a conjugate partner")
        zz = (z + mp.conj(zs[j])) / 2
        out[i], out[j] = zz, mp.conj(zz)
        used.update((i, j))
    return out


def find_roots(f: IntPolynomial, digits: int = DEFAULT_DIGITS, tol_circle: float = TOL_CIRCLE) -> RootData:
    """All roots of ``f`` to ``digits`` decimal digits, classified and with ``b`` filled.

    Companion eigenvalues seed a Newton refinement in multiprecision; for a
    self-reciprocal ``f`` a root counts as unimodular exactly when it is its own
    partner under ``w -> 1/conj(w)``.
    """
    if digits < 30:
        raise ValueError("digits must be at least 30")
    if not is_squarefree(f):
        raise NonSquarefree(f"{f} has a repeated factor")
    m = f.degree
    guesses = np.roots(np.array(f.coeffs[::-1], dtype=float)) if m > 1 else [-f.coeffs[0] / f.coeffs[1]]
    with mp.workdps(digits + 10):
        zs = [_newton(f, mp.mpc(complex(g)), digits) for g in guesses]
        if not _all_distinct(zs, mp.mpf(10) ** (-digits // 4)):
            approx = mp.polyroots(f.coeffs[::-1], maxsteps=500, extraprec=4 * digits)
            zs = [_newton(f, mp.mpc(z), digits) for z in approx]
            if not _all_distinct(zs, mp.mpf(10) ** (-digits // 4)):
                raise PrecisionExhausted("could not separate the roots")
        zs = _conjugate_symmetrize(zs, mp.mpf(10) ** (-digits // 2))
        bound = mp.mpf(10) ** (-digits / 2)
        for z in zs:
            if abs(f(z)) >= bound * max(1, abs(z)) ** m:
                raise PrecisionExhausted(f"residual too large at {mp.nstr(z, 10)}")
            if abs(f.derivative(z)) < mp.mpf(10) ** (-digits / 3):
                raise NonSquarefree(f"f' nearly vanishes at {mp.nstr(z, 10)}")

        classes, ambiguous = _classify_moduli(f, zs, digits, tol_circle)
        zs = [z / abs(z) if c is RootClass.ZERO and f.is_self_reciprocal else z for z, c in zip(zs, classes)]
        order = sorted(
            range(m),
            key=lambda i: (list(RootClass).index(classes[i]), float(abs(zs[i])), float(mp.arg(zs[i]))),
        )
        roots = tuple(Root(zs[i], classes[i], f.leading / f.derivative(zs[i])) for i in order)
    return RootData(f, roots, digits, ambiguous)


def _classify_moduli(f, zs, digits, tol_circle):
    classes = []
    ambiguous = False
    if f.is_self_reciprocal:
        tol_pair = mp.mpf(10) ** (-digits / 3)
        for z in zs:
            target = 1 / mp.conj(z)
            nearest = min(zs, key=lambda w: abs(w - target))
            if nearest is z or abs(nearest - z) < tol_pair:
                classes.append(RootClass.ZERO)
            else:
                classes.append(RootClass.MINUS if abs(z) < 1 else RootClass.PLUS)
                if min(abs(w - 1 / z) for w in zs) > tol_pair:
                    raise PrecisionExhausted("reciprocal root partner not found")
    else:
        for z in zs:
            gap = float(abs(z)) - 1.0
            if abs(gap) <= tol_circle:
                classes.append(RootClass.ZERO)
                ambiguous = True
            else:
                classes.append(RootClass.MINUS if gap < 0 else RootClass.PLUS)
    return classes, ambiguous


def partial_fractions(f: IntPolynomial, r: RootData) -> RootData:
    """Recompute ``b_w = f_m / f'(w)`` for every root in ``r``."""
    with mp.workdps(r.digits + 10):
        roots = []
        for root in r.roots:
            d = f.derivative(root.value)
            if abs(d) < mp.mpf(10) ** (-r.digits / 3):
                raise NonSquarefree(f"f' nearly vanishes at {mp.nstr(root.value, 10)}")
            roots.append(Root(root.value, root.cls, f.leading / d))
    return RootData(f, tuple(roots), r.digits, r.ambiguous)


def classify(f: IntPolynomial, r: RootData) -> PolyClass:
    if r.ambiguous:
        raise Inconclusive(f"{f}: a root lies within the circle tolerance but f is not self-reciprocal")
    if f.degree > 1:
        rat = rational_roots(f)
        if rat:
            warnings.warn(f"{f} has rational roots {rat}; it is reducible", stacklevel=2)
    minus = r.select(RootClass.MINUS)
    zero = r.select(RootClass.ZERO)
    plus = r.select(RootClass.PLUS)
    cyclotomic = bool(zero) and has_root_of_unity(f)
    pisot = len(plus) == 1 and not zero
    salem = (
        len(plus) == 1
        and len(minus) == 1
        and len(zero) >= 1
        and not cyclotomic
        and abs(plus[0].value.imag) == 0
        and plus[0].value.real > 1
        and abs(plus[0].value * minus[0].value - 1) < 1e-20
    )
    return PolyClass(
        hyperbolic=not zero,
        cyclotomic=cyclotomic,
        pisot=pisot,
        salem=salem,
        reciprocal=f.is_reciprocal,
    )


# -- companion matrix ----------------------------------------------------------

def companion_matrix(f: IntPolynomial) -> list[list[int]]:
    if not f.is_monic:
        raise NotMonic("the companion matrix needs a monic polynomial")
    m = f.degree
    rows = [[1 if j == i + 1 else 0 for j in range(m)] for i in range(m - 1)]
    rows.append([-c for c in f.coeffs[:-1]])
    return rows


def companion_inverse(f: IntPolynomial) -> list[list[int]]:
    if abs(f.coeffs[0]) != 1:
        raise NotInvertible("M_f is invertible over Z only when |f_0| = 1")
    m = f.degree
    s = f.coeffs[0]  # 1/f_0 == f_0 for a unit
    # x_0 = -(y_{m-1} + sum_{i>=1} f_i y_{i-1}) / f_0, x_i = y_{i-1}
    first = [-s * f.coeffs[j + 1] for j in range(m)]
    first[m - 1] = -s
    rows = [first]
    rows += [[1 if j == i - 1 else 0 for j in range(m)] for i in range(1, m)]
    return rows


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _matpow(a, n):
    size = len(a)
    result = [[int(i == j) for j in range(size)] for i in range(size)]
    base = a
    while n:
        if n & 1:
            result = _matmul(result, base)
        base = _matmul(base, base)
        n >>= 1
    return result


def companion_apply(f: IntPolynomial, x: TorusPoint | Sequence[float], n: int) -> TorusPoint:
    """``M_f^n x (mod 1)``, computed exactly on the binary value of ``x``."""
    if not isinstance(x, TorusPoint):
        x = TorusPoint(tuple(x))
    if len(x) != f.degree:
        raise ValueError("torus dimension must equal deg f")
    mat = companion_matrix(f) if n >= 0 else companion_inverse(f)
    mat = _matpow(mat, abs(n))
    xq = [Fraction(c) for c in x.coords]
    out = []
    for row in mat:
        s = sum(a * c for a, c in zip(row, xq))
        out.append(float(s - (s.numerator // s.denominator)))
    return TorusPoint(tuple(out))
