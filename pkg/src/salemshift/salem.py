"""Zero insertion for Salem beta-shifts: ``B_{K,J}``, the constant ``L``, and d-bound checks.

Throughout, the size of a central vector is the coefficient l1-norm
``sum_w |c_w|``, the certified upper bracket of its sup-norm.  Write
``D(t)`` for the coefficients of ``d(t, v*)``; appending a symbol ``s`` maps
``D`` to ``w D + a s`` and appending a zero just rotates ``D``.  The
construction keeps ``||D(t)|| <= 2K`` for every ``t`` and returns to
``||D|| <= K`` at the end of each segment, so the cocycle identity
``d(k, shift^j v*) = d(j + k, v*) - shift^k d(j, v*)`` gives ``4K`` for all
``j, k >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import RootClass, RootData, has_root_of_unity
from .betashift import BetaSystem, is_admissible
from .coding import HomoclinicData, d_upper_norms, prefix_sums
from .errors import InsertionFailed, NotSalem, PreconditionViolated, WindowTooSmall
from .seqspace import CentralVector, Window, central_sup_norm

L_CAP = 1024
_SAFETY = 1 - 1e-9


@dataclass
class InsertionLog:
    K: float
    J: int
    L: int
    block: int
    l_list: list[int] = field(default_factory=list)  # zeros inserted inside each stage
    j_list: list[int] = field(default_factory=list)  # alignment zeros at the start of each stage
    in_B: list[bool] = field(default_factory=list)
    slots: list[list[int]] = field(default_factory=list)  # every slot's zero count, per stage
    end: int = 0  # first index after the constructed region

    @property
    def stages(self) -> int:
        return len(self.in_B)

    @property
    def inserted(self) -> int:
        return sum(self.l_list) + sum(self.j_list)

    def bounds_hold(self) -> bool:
        """Per-stage ranges, and the cumulative count bounded by the stages outside ``B``."""
        cap = self.J * (self.L - 1)
        if any(not 0 <= l <= cap for l in self.l_list):
            return False
        if any(not 0 <= j <= self.L - 1 for j in self.j_list):
            return False
        total = 0
        outside = 0
        for i in range(self.stages):
            if total > cap * outside:
                return False
            total += self.l_list[i]
            outside += not self.in_B[i]
            if self.in_B[i] and self.l_list[i] != 0:
                return False
        return total <= cap * outside

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "J": self.J,
            "L": self.L,
            "block": self.block,
            "l_list": self.l_list,
            "j_list": self.j_list,
            "in_B": self.in_B,
            "stages": self.stages,
            "end": self.end,
        }


class EmpiricalMeasure:
    """Uniform weights on a list of digit windows, all admissible when ``bs`` is given."""

    def __init__(self, samples: Sequence[Window], bs: BetaSystem | None = None):
        self.samples = list(samples)
        if bs is not None:
            for s in self.samples:
                if not is_admissible(bs, s):
                    raise PreconditionViolated("sample is not admissible")

    def __len__(self):
        return len(self.samples)


# -- minimality constant ----------------------------------------------------------

def _circle_pairs(r: RootData) -> tuple[np.ndarray, np.ndarray]:
    """Upper-half-plane circle roots and, for every circle root, the index of its upper partner."""
    om = r.omegas(RootClass.ZERO)
    upper = np.array([z for z in om if z.imag > 0])
    return upper, om


def _random_disk(rng: np.random.Generator, shape) -> np.ndarray:
    rad = np.sqrt(rng.random(shape))
    ang = rng.random(shape) * 2 * np.pi
    return rad * np.exp(1j * ang)


def minimality_L(
    r: RootData,
    trials: int = 10_000,
    seed: int = 0,
    target: float = 1.0,
    pairs: tuple[np.ndarray, np.ndarray] | None = None,
    l_cap: int = 1 << 20,
) -> int:
    """Smallest ``L`` such that every test pair ``(v, w)`` has some ``l < L`` with
    ``max_i |w_i^l v_i + w_i| <= target``.

    Test vectors are random points of the unit polydisk indexed by the circle
    roots of the upper half plane (their conjugates carry conjugate values, so
    the max-norm is the same).  ``pairs`` overrides the random draw.
    """
    if r.count(RootClass.ZERO) == 0 or has_root_of_unity(r.poly):
        raise NotSalem("needs circle roots that are not roots of unity")
    upper, _ = _circle_pairs(r)
    if pairs is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        v = _random_disk(rng, (trials, len(upper)))
        w = _random_disk(rng, (trials, len(upper)))
    else:
        v, w = (np.atleast_2d(np.asarray(p, dtype=complex)) for p in pairs)
    need = np.zeros(len(v), dtype=np.int64)
    pending = np.arange(len(v))
    rot = np.ones(len(upper), dtype=complex)
    eps = 1e-12
    for l in range(l_cap):
        ok = np.max(np.abs(v[pending] * rot + w[pending]), axis=1) <= target + eps
        need[pending[ok]] = l + 1
        pending = pending[~ok]
        if len(pending) == 0:
            return int(need.max())
        rot = rot * upper
    raise InsertionFailed(f"no l below {l_cap} works for {len(pending)} test pairs")


# -- B_{K,J} and calibration --------------------------------------------------------

def horizon_for(K: float, J: int, block: int | None = None) -> int:
    return J * (block if block is not None else math.ceil(K))


def in_BKJ(
    h: HomoclinicData,
    v: Window,
    K: float,
    J: int,
    horizon: int | None = None,
    mode: str = "upper",
    sup_horizon: int = 512,
) -> bool:
    """Is ``||d(k, v)|| <= K`` for ``k = 0 .. ceil(K) J``?

    ``mode="upper"`` uses the coefficient l1-norm (sufficient condition);
    ``mode="lower"`` uses the sampled sup over ``sup_horizon`` points (necessary
    condition).  ``horizon`` overrides ``ceil(K) J``.
    """
    H = horizon if horizon is not None else horizon_for(K, J)
    if v.lo > 0 or v.hi < H - 1:
        raise WindowTooSmall(f"membership needs coordinates [0, {H - 1}]")
    seg = v.restrict(0, H - 1)
    norms = d_upper_norms(h, seg, 0, np.arange(H + 1))
    if mode == "upper":
        return bool(np.all(norms <= K))
    if mode != "lower":
        raise ValueError("mode must be 'upper' or 'lower'")
    om, a = h.part(RootClass.ZERO)
    P = prefix_sums(h, seg)
    for k in np.nonzero(norms > K)[0]:
        c = CentralVector(om, a * om ** (int(k) - 1) * P[k])
        if central_sup_norm(c, sup_horizon)[0] > K:
            return False
    return True


def shift_maxima(h: HomoclinicData, v: Window, H: int, P: np.ndarray | None = None) -> np.ndarray:
    """``max_{0<=k<=H} ||d(k, shift^j v)||`` for every ``j`` with ``[j, j+H-1]`` inside the window."""
    _, a = h.part(RootClass.ZERO)
    if P is None:
        P = prefix_sums(h, v)
    n_shift = len(v) - H + 1
    if n_shift <= 0:
        return np.zeros(0)
    base = P[:n_shift]
    best = np.zeros(n_shift)
    absa = np.abs(a)
    for k in range(1, H + 1):
        np.maximum(best, np.abs(P[k : k + n_shift] - base) @ absa, out=best)
    return best


def calibrate_K(
    h: HomoclinicData,
    samples: Sequence[Window],
    J: int,
    quantile: float = 0.9,
    grid: Iterable[float] | None = None,
    block: int | None = None,
) -> tuple[float, float]:
    """Smallest ``K`` on ``grid`` whose set ``B_{K,J}`` holds at least ``quantile`` of all pooled shifts.

    Returns ``(K, fraction)``.
    """
    grid = np.arange(0.5, 64.001, 0.25) if grid is None else np.asarray(list(grid), dtype=float)
    prefix = [prefix_sums(h, s) for s in samples]
    cache: dict[int, np.ndarray] = {}
    for K in sorted(grid):
        H = horizon_for(K, J, block)
        if H not in cache:
            cache[H] = np.concatenate([shift_maxima(h, s, H, P) for s, P in zip(samples, prefix)])
        pooled = cache[H]
        if len(pooled) == 0:
            raise WindowTooSmall("samples are shorter than the membership horizon")
        frac = float(np.mean(pooled <= K))
        if frac >= quantile:
            return float(K), frac
    raise ValueError("no K on the grid reaches the requested quantile")


# -- the construction -------------------------------------------------------------

class _Builder:
    def __init__(self, h: HomoclinicData, K: float):
        self.om, self.a = h.part(RootClass.ZERO)
        self.ang = np.angle(self.om)
        self.K = K
        self.D = np.zeros(len(self.om), dtype=complex)
        self.out: list[int] = []

    def rot(self, k) -> np.ndarray:
        return np.exp(1j * np.multiply.outer(np.asarray(k), self.ang))

    def place(self, seg: np.ndarray, L: int) -> int | None:
        """Append ``c`` zeros then ``seg`` for the smallest ``c < L`` keeping the bounds."""
        n = len(seg)
        S = np.zeros((n + 1, len(self.om)), dtype=complex)
        for t in range(n):
            S[t + 1] = self.om * S[t] + self.a * seg[t]
        t_rot = self.rot(np.arange(n + 1))  # (n+1, m0)
        starts = self.rot(np.arange(L)) * self.D  # (L, m0)
        traj = starts[:, None, :] * t_rot[None, :, :] + S[None, :, :]
        norms = np.abs(traj).sum(axis=2)
        good = (norms.max(axis=1) <= 2 * self.K * _SAFETY) & (norms[:, -1] <= self.K * _SAFETY)
        hits = np.nonzero(good)[0]
        if len(hits) == 0:
            return None
        c = int(hits[0])
        self.D = traj[c, -1]
        self.out.extend([0] * c)
        self.out.extend(int(x) for x in seg)
        return c


def salem_modify(
    h: HomoclinicData,
    bs: BetaSystem,
    v: Window,
    K: float,
    J: int,
    L: int,
    stages: int | None = None,
    block: int | None = None,
) -> tuple[Window, InsertionLog]:
    """Insert zeros into the future of ``v`` so that ``d`` stays below ``4K``.

    Stage ``i`` reads the original coordinates ``[iS, (i+1)S)`` with
    ``S = J * block`` (``block`` defaults to ``ceil(K)``).  A stage whose shifted
    sequence lies in ``B_{K,J}`` is copied as one segment; otherwise it is split
    into ``J`` sub-blocks of length ``block``.  Before every segment except the
    very first a number of zeros in ``0 .. L-1`` is chosen: the leading slot of
    a stage is the alignment count ``j``, the others are the ``l`` counts.
    The past ``n < 0`` is copied unchanged.
    """
    if K <= 0 or J < 1 or L < 1:
        raise ValueError("need K > 0, J >= 1, L >= 1")
    block = block if block is not None else math.ceil(K)
    S = J * block
    if v.lo > 0:
        raise WindowTooSmall("window must start at or before index 0")
    available = (v.hi + 1) // S
    stages = available if stages is None else stages
    if stages > available:
        raise WindowTooSmall(f"{stages} stages need coordinates [0, {stages * S - 1}]")
    vals = np.asarray(v.values, dtype=np.int64)
    b = _Builder(h, K)
    log = InsertionLog(K=K, J=J, L=L, block=block)
    for i in range(stages):
        orig = vals[i * S - v.lo : (i + 1) * S - v.lo]
        member = in_BKJ(h, Window(0, S - 1, orig), K, J, horizon=S)
        segs = [orig] if member else [orig[k * block : (k + 1) * block] for k in range(J)]
        counts = []
        for s_idx, seg in enumerate(segs):
            allowed = 1 if (i == 0 and s_idx == 0) else L
            c = b.place(seg, allowed)
            if c is None:
                raise InsertionFailed(
                    f"stage {i}, slot {s_idx}: no zero count below {allowed} keeps the bound", stage=i, slot=s_idx
                )
            counts.append(c)
        log.in_B.append(member)
        log.slots.append(counts)
        log.j_list.append(counts[0])
        log.l_list.append(sum(counts[1:]))
    log.end = len(b.out)
    past = vals[: max(0, -v.lo)]
    vstar = Window(v.lo, log.end - 1, np.concatenate([past, np.array(b.out, dtype=np.int64)]))
    if not is_admissible(bs, vstar):
        raise PreconditionViolated("input was not admissible")
    return vstar, log


def modify_with_backoff(
    h: HomoclinicData,
    bs: BetaSystem,
    v: Window,
    K: float,
    J: int,
    L: int,
    L_cap: int = L_CAP,
    **kwargs,
) -> tuple[Window, InsertionLog]:
    """:func:`salem_modify`, doubling ``L`` after each failure until ``L_cap``."""
    while True:
        try:
            return salem_modify(h, bs, v, K, J, L, **kwargs)
        except InsertionFailed:
            if L >= L_cap:
                raise
            L = min(2 * L, L_cap)


def verify_dbound(
    h: HomoclinicData,
    v: Window,
    bound: float,
    j_max: int | None = None,
    jprime_range: range | None = None,
) -> tuple[bool, float]:
    """Worst ``||d(j, shift^{j'} v)||`` over ``0 <= j <= j_max`` and ``j'`` in ``jprime_range``."""
    end = v.hi + 1
    if j_max is None:
        j_max = min(1000, max(0, end) // 2)
    if jprime_range is None:
        jprime_range = range(0, max(0, end - j_max) + 1)
    if len(jprime_range) == 0:
        return True, 0.0
    if min(jprime_range) < v.lo or max(jprime_range) + j_max > end:
        raise WindowTooSmall("window does not cover the requested shifts")
    P = prefix_sums(h, v)
    ks = np.arange(j_max + 1)
    worst = 0.0
    for jp in jprime_range:
        worst = max(worst, float(d_upper_norms(h, v, jp, ks, P).max()))
    return worst <= bound, worst


# -- entropy ------------------------------------------------------------------------

def _factor_codes(s: np.ndarray, block: int, base: int) -> np.ndarray:
    n = len(s) - block + 1
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for k in range(block):
        codes = codes * base + s[k : k + n]
    return codes


def _all_codes(samples: Sequence[Window], block: int) -> np.ndarray:
    base = 1 + max((int(np.max(s.values)) for s in samples if len(s)), default=0)
    base = max(base, 2)
    if block * math.log2(base) > 62:
        raise ValueError("block too long for integer factor codes")
    parts = [_factor_codes(np.asarray(s.values, dtype=np.int64), block, base) for s in samples]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def block_entropy(samples: Sequence[Window], block: int) -> float:
    """Plug-in Shannon entropy (nats) of the length-``block`` factor distribution."""
    codes = _all_codes(samples, block)
    if len(codes) == 0:
        return 0.0
    _, counts = np.unique(codes, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def entropy_estimate(mu: EmpiricalMeasure | Sequence[Window], block: int) -> tuple[float, float]:
    """``(counting, shannon)`` entropy rates from length-``block`` factors.

    ``counting`` is ``log(#distinct factors) / block`` over all samples;
    ``shannon`` is the plug-in block entropy divided by ``block``.
    """
    samples = mu.samples if isinstance(mu, EmpiricalMeasure) else list(mu)
    if block < 1:
        raise ValueError("block must be positive")
    if any(len(s) < block for s in samples):
        raise ValueError("block longer than a sample")
    codes = _all_codes(samples, block)
    distinct = len(np.unique(codes))
    counting = math.log(distinct) / block if distinct else 0.0
    return counting, block_entropy(samples, block) / block


def block_entropy_slope(samples: Sequence[Window], block: int) -> float:
    """``H_block - H_{block-1}``, the conditional entropy of the next symbol."""
    if block < 1:
        raise ValueError("block must be positive")
    prev = block_entropy(samples, block - 1) if block > 1 else 0.0
    return block_entropy(samples, block) - prev
