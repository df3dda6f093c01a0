"""Separable qubit-qutrit state whose Alice-conditioned Bob behaviors are KCBS-optimal.

Neither side alone shows anything: the joint behavior is local and Bob's
marginal is noncontextual, yet NClF = sqrt(5) - 2.
"""
import math

from gbell import quantum
from gbell.behavior import bob_marginal
from gbell.quantifiers import check_quantifier_tradeoff

setup = quantum.pentagon_setup()
b = setup.behavior()
print(f"cos^2 theta           = {quantum.pentagon_cos2():.12f}")
print(f"classicality value    = {quantum.classicality_value(b):.12f}  (classical >= -3)")
print(f"conditional on a=+1   = {quantum.conditional_pentagon_value(b, 1):.12f}")

r = quantum.rationalize(b)
print(f"rationalized within   {r.radius:.2e}")
t = check_quantifier_tradeoff(r.behavior)
print(f"NLF = {t.nlf}, CF(Bob) = {t.cf}")
print(f"NClF = {t.nclf} ~ {float(t.nclf):.12f} (sqrt 5 - 2 = {math.sqrt(5) - 2:.12f})")
assert bob_marginal(r.behavior).is_nsnd

print("\nwhite-noise sweep")
print(quantum.sweep_csv(quantum.noise_sweep(setup, [0, 0.25, 0.5, 0.75, 1])), end="")
