"""Finite-depth Hofbauer chains for beta-shifts and their Parry measure.

States are pairs ``(digit, level)``.  Level 0 holds one state per digit
``a < e*_1``; level ``k >= 1`` holds the single state with digit ``e*_k``.
A level-0 state may be followed by every level-0 state and by level 1; the
level-``k`` state by level-0 states with digit ``< e*_{k+1}`` and by level ``k+1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .betashift import BetaSystem
from .errors import InvalidPath, NotIrreducible, PrecisionExhausted
from .seqspace import Window

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class PerronData:
    lam: float
    x: np.ndarray  # left eigenvector, sums to 1
    y: np.ndarray  # right eigenvector, sums to 1
    iterations: int


@dataclass(frozen=True, eq=False)
class HofbauerChain:
    depth: int
    exact: bool
    digits: np.ndarray  # digit of each state
    levels: np.ndarray  # 0 for the full-interval states, k >= 1 otherwise
    P: sp.csr_matrix
    perron: PerronData | None = field(default=None)

    @property
    def n_states(self) -> int:
        return len(self.digits)

    @property
    def lam(self) -> float:
        return self._need().lam

    def _need(self) -> PerronData:
        if self.perron is None:
            raise ValueError("Perron data not computed")
        return self.perron

    def successors(self, i: int) -> np.ndarray:
        return self.P.indices[self.P.indptr[i] : self.P.indptr[i + 1]]

    def transition_matrix(self) -> sp.csr_matrix:
        """Stochastic matrix ``Q(a, a') = P(a, a') y(a') / (lam y(a))``."""
        pd = self._need()
        Dinv = sp.diags(1.0 / (pd.lam * pd.y))
        return (Dinv @ self.P @ sp.diags(pd.y)).tocsr()

    @property
    def stationary(self) -> np.ndarray:
        pd = self._need()
        pi = pd.x * pd.y
        return pi / pi.sum()

    def label(self, i: int) -> str:
        return f"A'{self.digits[i]}" if self.levels[i] == 0 else f"L{self.levels[i]}"

    def to_json(self) -> dict:
        rows, cols = self.P.nonzero()
        out = {
            "depth": self.depth,
            "exact": self.exact,
            "states": [{"digit": int(d), "level": int(k)} for d, k in zip(self.digits, self.levels)],
            "edges": [[int(a), int(b)] for a, b in zip(rows, cols)],
        }
        if self.perron is not None:
            out.update(
                {"lambda": self.perron.lam, "x": self.perron.x.tolist(), "y": self.perron.y.tolist()}
            )
        return out


def build_chain(bs: BetaSystem, D: int, close: bool = True, tol: float = DEFAULT_TOL) -> HofbauerChain:
    """Chain truncated at level ``D``, with Perron data attached.

    With ``close=True`` and an eventually periodic ``e*`` whose preperiod plus
    period fits in ``D``, the levels repeat and the chain is finite and exact.
    Otherwise the continuation out of level ``D`` is dropped and the strongly
    connected part containing the digit-0 state is kept.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    est = bs.estar(D + 1)
    n0 = int(est[0])  # level-0 digits 0 .. e*_1 - 1
    period = bs.period_info if close else None
    exact = period is not None and sum(period) <= D
    top = sum(period) if exact else D

    # level k (1-based) -> state index; identical (digit, interval) pairs share a state
    level_state: dict[int, int] = {}
    digits = list(range(n0))
    levels = [0] * n0
    if exact and period[0] == 0 and est[period[1] - 1] < n0:
        # with no preperiod, level q carries the full interval again
        level_state[period[1]] = int(est[period[1] - 1])
    for k in range(1, top + 1):
        if k not in level_state:
            level_state[k] = len(digits)
            digits.append(int(est[k - 1]))
            levels.append(k)

    rows, cols = [], []
    for a in range(n0):
        rows += [a] * n0 + [a]
        cols += list(range(n0)) + [level_state[1]]
    for k in range(1, top + 1):
        s = level_state[k]
        if levels[s] == 0:
            continue  # merged into a level-0 state, which has its own edges
        nxt_digit = int(est[k]) if k < len(est) else bs.estar_digit(k + 1)
        for a in range(min(nxt_digit, n0)):
            rows.append(s)
            cols.append(a)
        if k < top:
            rows.append(s)
            cols.append(level_state[k + 1])
        elif exact:
            p, q = period
            rows.append(s)
            cols.append(level_state[p + 1])
    n = len(digits)
    P = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    P.sum_duplicates()
    P.data[:] = 1.0

    keep = _core(P, 0 if n0 > 0 else level_state[1])
    P = P[keep][:, keep].tocsr()
    chain = HofbauerChain(D, exact, np.array(digits)[keep], np.array(levels)[keep], P)
    return HofbauerChain(chain.depth, chain.exact, chain.digits, chain.levels, chain.P, perron(chain, tol))


def _core(P: sp.csr_matrix, root: int) -> np.ndarray:
    ncomp, labels = connected_components(P, directed=True, connection="strong")
    keep = np.nonzero(labels == labels[root])[0]
    if len(keep) == 0 or P[keep][:, keep].nnz == 0:
        raise NotIrreducible("pruned chain has no strongly connected core")
    return keep


def perron(chain: HofbauerChain, tol: float = DEFAULT_TOL, max_iter: int = 1_000_000) -> PerronData:
    """Perron value and positive eigenvectors by power iteration.

    Stops when the residual ``||P y - lam y|| / ||y||`` (and the same for the
    left vector) falls below ``tol``.
    """
    P = chain.P
    n = P.shape[0]
    if n == 0 or P.nnz == 0:
        raise NotIrreducible("empty chain")
    PT = P.T.tocsr()
    y = np.full(n, 1.0 / n)
    x = np.full(n, 1.0 / n)
    lam = 0.0
    for it in range(1, max_iter + 1):
        Py = P @ y
        xP = PT @ x
        lam = float(Py.sum() / y.sum())
        res_y = np.linalg.norm(Py - lam * y) / np.linalg.norm(y)
        res_x = np.linalg.norm(xP - lam * x) / np.linalg.norm(x)
        if res_y < tol and res_x < tol:
            break
        # a lazy step (P + I) keeps the iteration convergent even on periodic cores
        y = Py + y
        y /= y.sum()
        x = xP + x
        x /= x.sum()
    else:
        raise PrecisionExhausted("power iteration did not converge")
    if np.any(y <= 0) or np.any(x <= 0):
        raise NotIrreducible("Perron vectors are not strictly positive")
    return PerronData(lam, x / x.sum(), y / y.sum(), it)


def entropy(chain: HofbauerChain) -> float:
    return math.log(chain.lam)


def _check_path(chain: HofbauerChain, path) -> list[int]:
    path = [int(s) for s in path]
    if not path:
        raise InvalidPath("empty path")
    for s in path:
        if not 0 <= s < chain.n_states:
            raise InvalidPath(f"unknown state {s}")
    for a, b in zip(path, path[1:]):
        if chain.P[a, b] == 0:
            raise InvalidPath(f"transition {chain.label(a)} -> {chain.label(b)} not allowed")
    return path


def cylinder_measure(chain: HofbauerChain, path) -> tuple[float, float]:
    """Markov measure of the cylinder ``[a_0 ... a_{n-1}]``.

    Returns ``(stationary, conditional)`` where
    ``conditional = lam^{-(n-1)} y(a_{n-1}) / y(a_0)`` and
    ``stationary = pi(a_0) * conditional`` with ``pi`` proportional to ``x * y``.
    """
    path = _check_path(chain, path)
    pd = chain._need()
    cond = pd.lam ** (-(len(path) - 1)) * pd.y[path[-1]] / pd.y[path[0]]
    return float(chain.stationary[path[0]] * cond), float(cond)


def rng_for(seed: int, index: int | None = None) -> np.random.Generator:
    """PCG64 generator for ``seed``; ``index`` picks the ``index``-th spawned child stream."""
    ss = np.random.SeedSequence(seed)
    if index is not None:
        ss = ss.spawn(index + 1)[index]
    return np.random.Generator(np.random.PCG64(ss))


def sample_states(chain: HofbauerChain, n: int, rng: np.random.Generator | int) -> np.ndarray:
    """Stationary Markov path of ``n`` states."""
    if not isinstance(rng, np.random.Generator):
        rng = rng_for(int(rng))
    Q = chain.transition_matrix()
    succ = [Q.indices[Q.indptr[i] : Q.indptr[i + 1]].tolist() for i in range(chain.n_states)]
    cdf = [np.cumsum(Q.data[Q.indptr[i] : Q.indptr[i + 1]]).tolist() for i in range(chain.n_states)]
    u = rng.random(n)
    out = np.empty(n, dtype=np.int64)
    state = int(np.searchsorted(np.cumsum(chain.stationary), u[0] * chain.stationary.sum(), side="right"))
    state = min(state, chain.n_states - 1)
    out[0] = state
    for t in range(1, n):
        c = cdf[state]
        r = u[t] * c[-1]
        j = 0
        while j < len(c) - 1 and r >= c[j]:
            j += 1
        state = succ[state][j]
        out[t] = state
    return out


def sample_path(chain: HofbauerChain, n: int, seed: int | np.random.Generator, lo: int = 0) -> Window:
    """Digits of a stationary path of length ``n``, placed at indices ``lo .. lo+n-1``."""
    states = sample_states(chain, n, seed)
    return Window(lo, lo + n - 1, chain.digits[states].astype(np.int64))


def lambda_scan(bs: BetaSystem, depths, tol: float = DEFAULT_TOL) -> list[tuple[int, float]]:
    """Perron values of the truncated (never closed) chains at each depth."""
    return [(int(D), build_chain(bs, int(D), close=False, tol=tol).lam) for D in depths]
