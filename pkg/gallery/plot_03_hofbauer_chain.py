"""
The Hofbauer chain and maximal-entropy sampling
===============================================

A finite Markov chain whose paths are exactly the admissible words, its
Perron data, and samples from the measure of maximal entropy.
"""

# %%
import math

import numpy as np

from salemshift.algebra import IntPolynomial
from salemshift.betashift import BetaSystem, is_admissible
from salemshift.hofbauer import build_chain, lambda_scan, rng_for, sample_path
from salemshift.salem import block_entropy_slope

bs = BetaSystem.from_polynomial(IntPolynomial.parse("1,-1,-1,-1,1"))
chain = build_chain(bs, 60)
print(f"{chain.n_states} states, exact={chain.exact}, lambda={chain.lam:.15f}, beta={bs.value:.15f}")
for i in range(chain.n_states):
    print(chain.label(i), "->", [chain.label(j) for j in chain.successors(i)])

# %%
# Without closing the loop, the truncated chains approach ``beta`` from below.

for D, lam in lambda_scan(bs, [2, 4, 8, 16, 32]):
    print(f"D={D:3d}  beta - lambda = {bs.value - lam:.3e}")

# %%
# Sampling uses one seed and spawned child streams, so ensembles are reproducible.

paths = [sample_path(chain, 20_000, rng_for(42, i)) for i in range(4)]
print("all admissible:", all(is_admissible(bs, p) for p in paths))
est = block_entropy_slope(paths, 12)
print(f"conditional block entropy {est:.4f}  vs log beta {math.log(bs.value):.4f}")
print("digit frequencies:", np.bincount(np.concatenate([p.values for p in paths])) / 80_000)
