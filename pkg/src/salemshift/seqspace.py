"""Finite windows onto two-sided sequences, and central vectors in coefficient form."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .algebra import IntPolynomial
from .errors import EmptyResult, NotReal

NOT_REAL_TOL = 1e-10


class Growth(str, enum.Enum):
    BOUNDED = "bounded"
    LINEAR = "linear"


@dataclass(frozen=True, eq=False)
class Window:
    """Values of a sequence on ``[lo, hi]``; zero everywhere else."""

    lo: int
    hi: int
    values: np.ndarray
    growth: Growth = Growth.BOUNDED

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1 or len(vals) != self.hi - self.lo + 1:
            raise ValueError(f"expected {self.hi - self.lo + 1} values, got shape {vals.shape}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "growth", Growth(self.growth))

    @classmethod
    def from_values(cls, lo: int, values: Iterable, growth: Growth = Growth.BOUNDED) -> Window:
        vals = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        return cls(lo, lo + len(vals) - 1, vals, growth)

    @classmethod
    def zeros(cls, lo: int, hi: int, dtype=np.int64) -> Window:
        return cls(lo, hi, np.zeros(hi - lo + 1, dtype=dtype))

    @classmethod
    def impulse(cls, at: int = 0, lo: int | None = None, hi: int | None = None, value=1) -> Window:
        lo = at if lo is None else lo
        hi = at if hi is None else hi
        vals = np.zeros(hi - lo + 1, dtype=np.int64)
        vals[at - lo] = value
        return cls(lo, hi, vals)

    def __len__(self):
        return len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def __getitem__(self, n: int):
        if self.lo <= n <= self.hi:
            return self.values[n - self.lo]
        return self.values.dtype.type(0)

    def get(self, lo: int, hi: int) -> np.ndarray:
        """Values on ``[lo, hi]`` with implicit zeros outside the stored range."""
        out = np.zeros(hi - lo + 1, dtype=self.values.dtype)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.values[a - self.lo : b - self.lo + 1]
        return out

    def restrict(self, lo: int, hi: int) -> Window:
        return Window(lo, hi, self.get(lo, hi), self.growth)

    def _combine(self, other: Window, op) -> Window:
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        growth = Growth.LINEAR if Growth.LINEAR in (self.growth, other.growth) else Growth.BOUNDED
        return Window(lo, hi, op(self.get(lo, hi), other.get(lo, hi)), growth)

    def __add__(self, other: Window) -> Window:
        return self._combine(other, np.add)

    def __sub__(self, other: Window) -> Window:
        return self._combine(other, np.subtract)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def equals(self, other: Window) -> bool:
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return bool(np.array_equal(self.get(lo, hi), other.get(lo, hi)))

    def to_json(self) -> dict:
        vals = self.values.tolist()
        return {"lo": self.lo, "hi": self.hi, "values": vals, "growth": self.growth.value}

    @classmethod
    def from_json(cls, obj) -> Window:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["lo"]), int(obj["hi"]), np.asarray(obj["values"]), Growth(obj.get("growth", "bounded")))


def shift(v: Window, k: int) -> Window:
    """``(shift(v, k))_n = v_{n+k}``."""
    return Window(v.lo - k, v.hi - k, v.values, v.growth)


def apply_poly(f: IntPolynomial | tuple, v: Window, strict: bool = True) -> Window:
    """``(f(shift) v)_n = sum_k f_k v_{n+k}``.

    Strict mode keeps only ``n`` whose inputs ``v_n..v_{n+m}`` all lie inside
    ``[lo, hi]``, i.e. ``[lo, hi - m]``.  Lenient mode zero-extends and returns
    ``[lo - m, hi]``.
    """
    coeffs = f.coeffs if isinstance(f, IntPolynomial) else tuple(f)
    m = len(coeffs) - 1
    vals = v.values
    if not np.issubdtype(vals.dtype, np.complexfloating) and not np.issubdtype(vals.dtype, np.floating):
        kernel = np.array(coeffs[::-1], dtype=np.int64)
        vals = vals.astype(np.int64)
    else:
        kernel = np.array(coeffs[::-1], dtype=float)
    full = np.convolve(vals, kernel)  # full[j] is the value at index lo - m + j
    if strict:
        if v.hi - m < v.lo:
            raise EmptyResult(f"window of length {len(v)} is shorter than deg f + 1 = {m + 1}")
        return Window(v.lo, v.hi - m, full[m : len(vals)], v.growth)
    return Window(v.lo - m, v.hi, full, v.growth)


@dataclass(frozen=True, eq=False)
class CentralVector:
    """The real sequence ``n -> sum_w c_w w^n`` for unimodular roots ``w``."""

    omegas: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=complex).copy()
        co = np.asarray(self.coeffs, dtype=complex).copy()
        if om.shape != co.shape or om.ndim != 1:
            raise ValueError("omegas and coeffs must be 1-d arrays of equal length")
        om.setflags(write=False)
        co.setflags(write=False)
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "coeffs", co)

    @classmethod
    def zero(cls, omegas) -> CentralVector:
        om = np.asarray(omegas, dtype=complex)
        return cls(om, np.zeros_like(om))

    @classmethod
    def from_mapping(cls, mapping: Mapping[complex, complex]) -> CentralVector:
        keys = list(mapping)
        return cls(np.array(keys, dtype=complex), np.array([mapping[k] for k in keys], dtype=complex))

    def __add__(self, other: CentralVector) -> CentralVector:
        self._check_basis(other)
        return CentralVector(self.omegas, self.coeffs + other.coeffs)

    def __sub__(self, other: CentralVector) -> CentralVector:
        self._check_basis(other)
        return CentralVector(self.omegas, self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> CentralVector:
        return CentralVector(self.omegas, self.coeffs * s)

    __rmul__ = __mul__

    def _check_basis(self, other):
        if not np.allclose(self.omegas, other.omegas, atol=1e-12):
            raise ValueError("central vectors use different root bases")

    def conjugate_symmetry_error(self) -> float:
        """How far the coefficients are from ``c_{conj w} = conj(c_w)``."""
        worst = 0.0
        for i, w in enumerate(self.omegas):
            j = int(np.argmin(np.abs(self.omegas - np.conj(w))))
            worst = max(worst, abs(self.coeffs[j] - np.conj(self.coeffs[i])))
        return worst

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    @property
    def max_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def to_json(self) -> list[dict]:
        return [
            {"omega_re": w.real, "omega_im": w.imag, "c_re": c.real, "c_im": c.imag}
            for w, c in zip(self.omegas.tolist(), self.coeffs.tolist())
        ]

    @classmethod
    def from_json(cls, obj) -> CentralVector:
        if isinstance(obj, str):
            obj = json.loads(obj)
        om = [complex(r["omega_re"], r["omega_im"]) for r in obj]
        co = [complex(r["c_re"], r["c_im"]) for r in obj]
        return cls(np.array(om, dtype=complex), np.array(co, dtype=complex))


def central_values(c: CentralVector, ns, tol: float = NOT_REAL_TOL) -> np.ndarray:
    """Vectorized :func:`central_eval` over the integer array ``ns``."""
    ns = np.asarray(ns)
    if len(c.omegas) == 0:
        return np.zeros(ns.shape)
    powers = np.exp(1j * np.outer(ns, np.angle(c.omegas))) * np.abs(c.omegas) ** ns[:, None]
    vals = powers @ c.coeffs
    scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
    if np.max(np.abs(vals.imag), initial=0.0) > tol * scale:
        raise NotReal(f"imaginary residual {np.max(np.abs(vals.imag)):.3e}")
    return vals.real


def central_eval(c: CentralVector, n: int) -> float:
    return float(central_values(c, np.array([n]))[0])


def shift_central(c: CentralVector, k: int) -> CentralVector:
    """Diagonal shift action ``c_w -> w^k c_w``."""
    return CentralVector(c.omegas, c.coeffs * c.omegas**k)


def central_sup_norm(c: CentralVector, horizon: int = 4096) -> tuple[float, float]:
    """Bracket ``(lower, upper)`` around ``sup_n |sum_w c_w w^n|``.

    ``lower`` samples ``n`` in ``[0, horizon)``; ``upper`` is the coefficient
    l1-norm.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    upper = c.l1
    if upper == 0.0:
        return 0.0, 0.0
    vals = central_values(c, np.arange(horizon))
    return float(np.max(np.abs(vals))), upper
