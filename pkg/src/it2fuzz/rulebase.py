"""Input partitions, rule tables, validation, and JSON round-tripping."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .mf import UNCERTAIN_MEAN, UNCERTAIN_SIGMA, IT2Gaussian, ScaledGaussian

__all__ = [
    "Partition",
    "Rule",
    "RuleBase",
    "Violation",
    "RuleBaseInvalid",
    "default_rulebase",
    "rulebase_to_dict",
    "rulebase_from_dict",
    "dump_rulebase",
    "load_rulebase",
]


@dataclass(frozen=True)
class Violation:
    """One machine-readable rule-base defect."""

    code: str
    message: str


class RuleBaseInvalid(ValueError):
    """Raised by engines handed a rule base that fails validation."""

    def __init__(self, violations: tuple[Violation, ...]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations))


@dataclass(frozen=True)
class Partition:
    """Ordered fuzzy partition of one input universe.

    Set centers must be strictly increasing and stay inside the universe.
    ``names`` optionally labels the sets for diagnostics (e.g. N/Z/P).
    """

    universe: tuple[float, float]
    sets: tuple[IT2Gaussian, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "universe", tuple(float(v) for v in self.universe))
        object.__setattr__(self, "sets", tuple(self.sets))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        lo, hi = self.universe
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"bad universe ({lo}, {hi})")
        if not self.sets:
            raise ValueError("partition needs at least one set")
        centers = [s.center for s in self.sets]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("set centers must be strictly increasing")
        if centers[0] < lo or centers[-1] > hi:
            raise ValueError("set centers must lie inside the universe")
        if self.names is not None and len(self.names) != len(self.sets):
            raise ValueError("one name per set required")

    def label(self, index: int) -> str:
        return self.names[index] if self.names else str(index)


@dataclass(frozen=True)
class Rule:
    """One rule: antecedent set indices (one per input) and consequent center(s).

    ``consequent`` is the shared output center.  For split-consequent
    systems ``consequent_upper``/``consequent_lower`` weight the upper and
    lower firing separately; they must be given together.
    """

    antecedent: tuple[int, ...]
    consequent: float
    consequent_upper: float | None = None
    consequent_lower: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", tuple(int(i) for i in self.antecedent))
        if (self.consequent_upper is None) != (self.consequent_lower is None):
            raise ValueError("split consequents must set both upper and lower values")

    @property
    def is_split(self) -> bool:
        return self.consequent_upper is not None


@dataclass(frozen=True)
class RuleBase:
    """A complete rule table over one partition per input."""

    partitions: tuple[Partition, ...]
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "partitions", tuple(self.partitions))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.partitions:
            raise ValueError("rule base needs at least one input partition")

    @property
    def n_inputs(self) -> int:
        return len(self.partitions)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(p.sets) for p in self.partitions)

    @property
    def is_split(self) -> bool:
        return bool(self.rules) and self.rules[0].is_split

    def _combo_label(self, combo: tuple[int, ...]) -> str:
        return "(" + ",".join(p.label(i) for p, i in zip(self.partitions, combo)) + ")"

    def validate(self) -> list[Violation]:
        """Check the rule table, returning all defects (empty list if clean).

        Never raises: every problem comes back as a Violation with a
        stable machine-readable code.
        """
        out: list[Violation] = []
        shape = self.shape
        seen: dict[tuple[int, ...], int] = {}
        addressable = True
        for pos, rule in enumerate(self.rules):
            ant = rule.antecedent
            if len(ant) != self.n_inputs:
                out.append(Violation(
                    "arity",
                    f"rule {pos} names {len(ant)} antecedents for {self.n_inputs} inputs",
                ))
                addressable = False
                continue
            if any(i < 0 or i >= n for i, n in zip(ant, shape)):
                out.append(Violation(
                    "index_out_of_range",
                    f"rule {pos} antecedent {ant} indexes outside the partitions",
                ))
                addressable = False
                continue
            if ant in seen:
                out.append(Violation(
                    "duplicate_antecedent",
                    f"rules {seen[ant]} and {pos} share antecedent {self._combo_label(ant)}",
                ))
            else:
                seen[ant] = pos
        if addressable:
            for combo in itertools.product(*(range(n) for n in shape)):
                if combo not in seen:
                    out.append(Violation(
                        "missing_antecedent",
                        f"incomplete rule base: missing {self._combo_label(combo)}",
                    ))
        split_flags = {r.is_split for r in self.rules}
        if len(split_flags) > 1:
            out.append(Violation(
                "mixed_consequent_mode",
                "some rules use split consequents and some do not",
            ))
        return out

    @cached_property
    def _cached_violations(self) -> tuple[Violation, ...]:
        return tuple(self.validate())

    def require_valid(self) -> None:
        """Raise RuleBaseInvalid if validate() reports anything."""
        if self._cached_violations:
            raise RuleBaseInvalid(self._cached_violations)


# -- bundled demo system -------------------------------------------------

# Three-set balance controller used throughout the docs and the pendulum
# testbed: N/Z/P uncertain-mean sets on [-1, 1] for both inputs, and the
# sign-opposing consequent table below.  The attached fitted bounds are
# frozen constants; pass refit=True to recompute them instead.
_DEMO_SIGMA = 0.418
_DEMO_SPREAD = 0.125
_DEMO_UMF_SIGMA = 0.5128
_DEMO_LMF_SIGMA = 0.3532
_DEMO_LMF_SCALE = 0.895
_DEMO_CONSEQUENTS = (1.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, -1.0, -1.0)


def default_rulebase(refit: bool = False) -> RuleBase:
    """The bundled two-input, three-sets-per-input demo rule base.

    Rules are laid out row-major over (first input, second input).  With
    ``refit`` the scaled-Gaussian bounds are recomputed from the exact
    FOU instead of using the frozen constants.
    """
    def make_set(center: float) -> IT2Gaussian:
        s = IT2Gaussian.uncertain_mean(
            center - _DEMO_SPREAD, center + _DEMO_SPREAD, _DEMO_SIGMA
        )
        if refit:
            return s.fit()
        return s.with_fitted(
            ScaledGaussian(center, _DEMO_UMF_SIGMA, 1.0),
            ScaledGaussian(center, _DEMO_LMF_SIGMA, _DEMO_LMF_SCALE),
        )

    def make_partition() -> Partition:
        return Partition(
            universe=(-1.0, 1.0),
            sets=tuple(make_set(c) for c in (-1.0, 0.0, 1.0)),
            names=("N", "Z", "P"),
        )

    rules = tuple(
        Rule(antecedent=(i, j), consequent=_DEMO_CONSEQUENTS[i * 3 + j])
        for i in range(3)
        for j in range(3)
    )
    return RuleBase(partitions=(make_partition(), make_partition()), rules=rules)


# -- JSON round-tripping -------------------------------------------------

def _set_to_dict(s: IT2Gaussian) -> dict:
    if s.kind == UNCERTAIN_MEAN:
        d: dict = {"kind": UNCERTAIN_MEAN, "mean_lo": s.mean_lo,
                   "mean_hi": s.mean_hi, "sigma": s.sigma_lo}
    else:
        d = {"kind": UNCERTAIN_SIGMA, "mean": s.mean_lo,
             "sigma_lo": s.sigma_lo, "sigma_hi": s.sigma_hi}
    for key, g in (("fitted_umf", s.fitted_umf), ("fitted_lmf", s.fitted_lmf)):
        if g is not None:
            d[key] = {"mean": g.mean, "sigma": g.sigma, "scale": g.scale}
    return d


def _set_from_dict(d: dict) -> IT2Gaussian:
    kind = d.get("kind")
    if kind == UNCERTAIN_MEAN:
        s = IT2Gaussian.uncertain_mean(d["mean_lo"], d["mean_hi"], d["sigma"])
    elif kind == UNCERTAIN_SIGMA:
        s = IT2Gaussian.uncertain_sigma(d["mean"], d["sigma_lo"], d["sigma_hi"])
    else:
        raise ValueError(f"unknown set kind {kind!r}")
    fu, fl = d.get("fitted_umf"), d.get("fitted_lmf")
    if (fu is None) != (fl is None):
        raise ValueError("fitted bounds must come in pairs")
    if fu is not None:
        s = s.with_fitted(
            ScaledGaussian(fu["mean"], fu["sigma"], fu["scale"]),
            ScaledGaussian(fl["mean"], fl["sigma"], fl["scale"]),
        )
    return s


def rulebase_to_dict(rb: RuleBase) -> dict:
    inputs = []
    for p in rb.partitions:
        entry: dict = {"universe": list(p.universe),
                       "sets": [_set_to_dict(s) for s in p.sets]}
        if p.names is not None:
            entry["names"] = list(p.names)
        inputs.append(entry)
    rules = []
    for r in rb.rules:
        rd: dict = {"if": list(r.antecedent), "b": r.consequent}
        if r.is_split:
            rd["b_upper"] = r.consequent_upper
            rd["b_lower"] = r.consequent_lower
        rules.append(rd)
    return {"inputs": inputs, "rules": rules}


def rulebase_from_dict(d: dict) -> RuleBase:
    partitions = tuple(
        Partition(
            universe=tuple(entry["universe"]),
            sets=tuple(_set_from_dict(sd) for sd in entry["sets"]),
            names=tuple(entry["names"]) if "names" in entry else None,
        )
        for entry in d["inputs"]
    )
    rules = tuple(
        Rule(
            antecedent=tuple(rd["if"]),
            consequent=float(rd["b"]),
            consequent_upper=rd.get("b_upper"),
            consequent_lower=rd.get("b_lower"),
        )
        for rd in d["rules"]
    )
    return RuleBase(partitions=partitions, rules=rules)


def dump_rulebase(rb: RuleBase, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rulebase_to_dict(rb), indent=2) + "\n")


def load_rulebase(path: str | Path) -> RuleBase:
    return rulebase_from_dict(json.loads(Path(path).read_text()))
