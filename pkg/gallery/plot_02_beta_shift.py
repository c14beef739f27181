"""
Beta-expansions and admissibility
=================================

Greedy digits, the maximal sequence ``e*`` and the automaton that decides
whether a digit word can occur in the two-sided beta-shift.
"""

# %%
import numpy as np

from salemshift.algebra import IntPolynomial
from salemshift.betashift import BetaSystem, beta_expand, eta_eval, is_admissible, sofic_probe
from salemshift.seqspace import Window

quartic = BetaSystem.from_polynomial(IntPolynomial.parse("1,-1,-1,-1,1"))
lehmer = BetaSystem.from_polynomial(IntPolynomial.parse("1,1,0,-1,-1,-1,-1,-1,0,1,1"))
print(quartic, lehmer, sep="\n")

# %%
# ``e*`` is computed exactly in the number field, so eventual periodicity is
# detected rather than guessed.

print("quartic e*:", "".join(map(str, quartic.estar(30))), quartic.period_info)
print("lehmer  e*:", "".join(map(str, lehmer.estar(80))))
print("lehmer period:", sofic_probe(lehmer, 200))

# %%
# Greedy digits of a random point, and how closely they reconstruct it.

x = 0.7071067811865476
d = beta_expand(quartic, x, 40)
val, tail = eta_eval(quartic, Window.from_values(1, d))
print("digits", "".join(map(str, d)))
print(f"value {val:.16f}  tail bound {tail:.2e}")

# %%
# Admissibility: every shift of the word must stay below ``e*``.  For the
# quartic the first forbidden patterns are short.

rng = np.random.default_rng(0)
words = rng.integers(0, 2, size=(2000, 8))
ok = np.array([is_admissible(quartic, Window.from_values(0, w)) for w in words])
print(f"{ok.mean():.3f} of random binary 8-words are admissible")
print("first rejected:", words[~ok][0])
