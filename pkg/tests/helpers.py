"""Builders shared across test modules."""

from it2fuzz import IT2Gaussian, InferenceResult, Partition, Rule, RuleBase

from oracles import DEMO_CONSEQUENTS

DEMO_SIGMA = 0.418
DEMO_SPREAD = 0.125


def demo_partition(spread: float = DEMO_SPREAD) -> Partition:
    return Partition(
        universe=(-1.0, 1.0),
        sets=tuple(IT2Gaussian.uncertain_mean(c - spread, c + spread, DEMO_SIGMA)
                   for c in (-1.0, 0.0, 1.0)),
        names=("N", "Z", "P"),
    )


def demo_like_rulebase(spread: float = DEMO_SPREAD,
                       consequents=DEMO_CONSEQUENTS) -> RuleBase:
    rules = tuple(Rule((i, j), consequents[i * 3 + j])
                  for i in range(3) for j in range(3))
    return RuleBase((demo_partition(spread), demo_partition(spread)), rules)


def collapsed_rulebase() -> RuleBase:
    """Demo layout with zero mean spread, so both FOU bounds coincide."""
    return demo_like_rulebase(spread=0.0)


def split_rulebase(rb: RuleBase, offset: float = 0.1) -> RuleBase:
    """Copy of rb with each consequent replaced by a +/- offset split pair."""
    rules = tuple(Rule(r.antecedent, r.consequent,
                       r.consequent + offset, r.consequent - offset)
                  for r in rb.rules)
    return RuleBase(rb.partitions, rules)


class ConstantEngine:
    """Stand-in engine with a fixed crisp output."""

    def __init__(self, value: float, degenerate: bool = False):
        self.value = value
        self.degenerate = degenerate

    def infer(self, x):
        return InferenceResult(self.value, self.degenerate)
