"""Subshifts, invariant measures and entropies.

Walks through the symbolic layer: admissible words of a subshift of finite
type, the maximal-entropy (Parry) measure, cylinder masses, conditional
restarts from a past, and the entropy read off typical samples.
"""
import math

import numpy as np

from cascadim import Subshift, SymbolicMeasure, Word

golden = Subshift.golden_mean()
print("golden-mean shift: two letters, '22' forbidden")
print("admissible word counts:", [golden.word_count(n) for n in range(1, 9)], "(Fibonacci)")
print("X_4 =", " ".join(str(w) for w in golden.admissible_words(4)))

h_top = golden.topological_entropy()
print(f"\ntopological entropy = {h_top:.6f} = log((1+sqrt5)/2) = {math.log((1+math.sqrt(5))/2):.6f}")

parry = golden.parry_measure()
print("Parry measure: initial", np.round(parry.initial, 6), "transition rows", np.round(parry.transition, 6))
print(f"its entropy {parry.entropy():.6f} attains the topological entropy")

w = Word.from_string("1121", 2)
print(f"\ncylinder mass of [{w}]: {parry.cylinder_mass(w):.6f}")
fibre = parry.fibre(2)
print("future law after a past ending in 2: initial", np.round(fibre.initial, 6))
print("  (letter 2 cannot repeat, so the chain restarts from letter 1 surely)")

# Shannon-McMillan-Breiman at desk scale: -log(mass of sampled cylinder)/n -> entropy
rng = np.random.default_rng(7)
n, count = 400, 400
letters = parry.sample_letters(n, count, rng)
rate = -np.log(parry.cylinder_mass_batch(letters)) / n
print(f"\nSMB check over {count} samples of length {n}:")
print(f"  mean cylinder decay rate {rate.mean():.5f} vs entropy {parry.entropy():.5f}")
