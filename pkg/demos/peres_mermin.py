"""An NSND behavior with NLF = CF = NClF = 1: the tradeoff fails beyond n-cycles."""
from gbell.behavior import bob_marginal, correlators_of
from gbell.inequalities import evaluate, pm_chsh, pm_noncontextuality
from gbell.verify import pm_counterexample

b, report = pm_counterexample()
for k, v in sorted(correlators_of(b).items()):
    if v:
        print(f"<{k}> = {v}")
print()
print("CHSH on (B11, B22):", evaluate(pm_chsh(), b), "(local bound 2)")
print("PM inequality:     ", evaluate(pm_noncontextuality(), bob_marginal(b)), "(classical bound 4)")
print()
print(report.to_text())
