"""Weight functions, the multiset and sequent orders, and termination checking.

The multiset order is the Dershowitz–Manna construction: a multiset gets
smaller when one or more of its formulas are replaced by zero or more formulas
of strictly lower weight.  A rule instance is terminating when every premise
is below the conclusion in the induced sequent order; a rule schema is
terminating when that holds for all instantiations, which is certified here by
a sound symbolic criterion (never wrongly, possibly returning Unknown) and
refuted by seeded random instantiation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import And, Atom, Bot, FMultiset, Formula, Imp, Modal, Or, Sequent, print_sequent
from .calculus import (
    AVar, BoxedCtx, CtxVar, FVar, Pattern, RuleSchema, SuccVar,
    format_instantiation, instantiate_pattern, instantiate_premises,
    is_template, schema_metavars,
)


class WeightFunction:
    """Weights on formulas: atoms and falsum weigh 1, everything else more.

    Built-in weight functions are increment-based (the weight of a compound is
    the sum of the children's weights plus a per-connective increment >= 1),
    which is what makes symbolic schema checking possible.  A raw evaluator
    can be wrapped with :meth:`from_callable`; it supports instance checks but
    not symbolic certification.
    """

    def __init__(self, name: str, and_inc: int = 2, or_inc: int = 1,
                 imp_inc: int = 1, box_inc: int = 1, fn=None):
        if fn is None:
            for label, inc in (("and", and_inc), ("or", or_inc), ("imp", imp_inc), ("box", box_inc)):
                if inc < 1:
                    raise ValueError(f"{label} increment must be >= 1, got {inc}")
        self.name = name
        self.and_inc = and_inc
        self.or_inc = or_inc
        self.imp_inc = imp_inc
        self.box_inc = box_inc
        self._fn = fn
        self._cache: dict = {}

    @classmethod
    def from_callable(cls, name: str, fn) -> "WeightFunction":
        return cls(name, fn=fn)

    @property
    def symbolic(self) -> bool:
        return self._fn is None

    def weight(self, f: Formula) -> int:
        w = self._cache.get(f)
        if w is not None:
            return w
        if self._fn is not None:
            w = self._fn(f)
            atomic = isinstance(f, (Atom, Bot))
            if atomic and w != 1:
                raise ValueError(f"weight function {self.name}: atoms and falsum must weigh 1")
            if not atomic and w <= 1:
                raise ValueError(f"weight function {self.name}: compound formulas must weigh above 1")
        elif isinstance(f, (Atom, Bot)):
            w = 1
        elif isinstance(f, And):
            w = self.weight(f.left) + self.weight(f.right) + self.and_inc
        elif isinstance(f, Or):
            w = self.weight(f.left) + self.weight(f.right) + self.or_inc
        elif isinstance(f, Imp):
            w = self.weight(f.left) + self.weight(f.right) + self.imp_inc
        else:
            w = self.weight(f.body) + self.box_inc
        self._cache[f] = w
        return w


DYCKHOFF = WeightFunction("dyckhoff", and_inc=2, or_inc=1, imp_inc=1, box_inc=1)


def weight_dyckhoff(f: Formula) -> int:
    return DYCKHOFF.weight(f)


def multiset_less(w: WeightFunction, delta: FMultiset, gamma: FMultiset) -> bool:
    """True iff delta is gamma with one or more formulas replaced by zero or
    more formulas of strictly lower weight.  Decided via the multiset
    differences: everything delta adds must sit below the heaviest formula
    gamma loses."""
    g_extra = gamma.diff(delta)
    if not g_extra:
        return False
    d_extra = delta.diff(gamma)
    if not d_extra:
        return True
    top = max(w.weight(f) for f in g_extra.support())
    return all(w.weight(f) < top for f in d_extra.support())


def _sequent_multiset(s: Sequent) -> FMultiset:
    if s.succedent is None:
        return s.antecedent
    return s.antecedent.add(s.succedent)


def sequent_less(w: WeightFunction, s0: Sequent, s1: Sequent) -> bool:
    """Order on sequents: compare antecedent-plus-succedent multisets."""
    return multiset_less(w, _sequent_multiset(s0), _sequent_multiset(s1))


def check_instance_decrease(w: WeightFunction, premises, conclusion: Sequent) -> bool:
    return all(sequent_less(w, p, conclusion) for p in premises)


# --- schema-level termination ------------------------------------------------

@dataclass(frozen=True)
class SamplingConfig:
    samples: int = 400
    max_size: int = 3
    atoms: int = 2
    max_context: int = 2
    seed: int = 0


@dataclass(frozen=True)
class TerminationVerdict:
    status: str  # "terminating" | "counterexample" | "unknown"
    instantiation: dict | None = None
    premise_index: int | None = None
    premise: Sequent | None = None
    conclusion: Sequent | None = None

    @property
    def is_terminating(self) -> bool:
        return self.status == "terminating"

    @property
    def is_counterexample(self) -> bool:
        return self.status == "counterexample"

    def text(self) -> str:
        if self.status == "terminating":
            return "TERMINATING"
        if self.status == "counterexample":
            return (f"COUNTEREXAMPLE {format_instantiation(self.instantiation)} "
                    f"premise {self.premise_index + 1} ({print_sequent(self.premise)}) "
                    f"!< ({print_sequent(self.conclusion)})")
        return "UNKNOWN"


def _ctx_occurrences(pattern: Pattern):
    """Context-class occurrences of a pattern: (name, box index or None)."""
    occs = []
    for item in pattern.items:
        if isinstance(item, CtxVar):
            occs.append((item.name, None))
        elif isinstance(item, BoxedCtx):
            occs.append((item.name, item.index))
    if isinstance(pattern.succedent, SuccVar):
        occs.append((pattern.succedent.name, None))
    return occs


def _template_items(pattern: Pattern):
    temps = [it for it in pattern.items if is_template(it)]
    if pattern.succedent is not None and not isinstance(pattern.succedent, SuccVar):
        temps.append(pattern.succedent)
    return temps


def _ctx_occurrences_ok(prem: Pattern, concl: Pattern) -> bool:
    """Each premise context occurrence must consume a distinct conclusion
    occurrence of the same variable: identical (same box index), or boxed
    where the premise one is plain (stripping a box is weight-decreasing)."""
    from collections import Counter

    pc = Counter(_ctx_occurrences(prem))
    cc = Counter(_ctx_occurrences(concl))
    spare: dict = {}
    for (name, idx), n in cc.items():
        used = pc.get((name, idx), 0)
        if idx is not None:
            spare[name] = spare.get(name, 0) + max(0, n - used)
    for (name, idx), n in pc.items():
        if idx is not None:
            if n > cc.get((name, idx), 0):
                return False
        else:
            identical = cc.get((name, None), 0)
            if n > identical + spare.get(name, 0):
                return False
    return True


def _wpoly(t, w: WeightFunction):
    """Weight of a template as a linear polynomial over formula-metavariable
    weights: (coefficients, constant).  Atom metavariables weigh exactly 1."""
    if isinstance(t, FVar):
        return {t.name: 1}, 0
    if isinstance(t, (AVar, Atom, Bot)):
        return {}, 1
    if isinstance(t, Modal):
        coeffs, const = _wpoly(t.body, w)
        return coeffs, const + w.box_inc
    inc = {And: w.and_inc, Or: w.or_inc, Imp: w.imp_inc}[type(t)]
    lc, lk = _wpoly(t.left, w)
    rc, rk = _wpoly(t.right, w)
    coeffs = dict(lc)
    for name, c in rc.items():
        coeffs[name] = coeffs.get(name, 0) + c
    return coeffs, lk + rk + inc


def _sym_less(t1, t2, w: WeightFunction) -> bool:
    """True when the weight of t1 is below the weight of t2 under every
    instantiation: compare the weight polynomials coefficient-wise (every
    metavariable weight is at least 1)."""
    c1, k1 = _wpoly(t1, w)
    c2, k2 = _wpoly(t2, w)
    total = k2 - k1  # value of the difference at the all-ones point
    for name in set(c1) | set(c2):
        d = c2.get(name, 0) - c1.get(name, 0)
        if d < 0:
            return False
        total += d
    # nonnegative coefficients make the difference monotone, so the all-ones
    # value is its minimum over weights >= 1
    return total >= 1


def _templates_ok(prem: Pattern, concl: Pattern, w: WeightFunction) -> bool:
    """Search a replacement plan for the concrete formulas: premise templates
    either cancel against an identical conclusion template or must sit
    symbolically below some replaced conclusion template; at least one
    conclusion template must end up replaced (that guarantees the replaced set
    is nonempty under every instantiation, including empty contexts)."""
    prem_ts = _template_items(prem)
    concl_ts = _template_items(concl)

    def rec(i: int, used: frozenset, deferred: tuple) -> bool:
        if i == len(prem_ts):
            replaced = [ct for j, ct in enumerate(concl_ts) if j not in used]
            if not replaced:
                return False
            return all(any(_sym_less(pt, ct, w) for ct in replaced) for pt in deferred)
        pt = prem_ts[i]
        for j, ct in enumerate(concl_ts):
            if j not in used and ct == pt:
                if rec(i + 1, used | {j}, deferred):
                    return True
        return rec(i + 1, used, deferred + (pt,))

    return rec(0, frozenset(), ())


def _premise_certified(prem: Pattern, concl: Pattern, w: WeightFunction) -> bool:
    return _ctx_occurrences_ok(prem, concl) and _templates_ok(prem, concl, w)


_SAMPLE_ATOMS = ("p", "q", "r", "s", "t", "u", "v", "w")


def _random_formula(rng: random.Random, size: int, n_atoms: int) -> Formula:
    if size <= 1:
        if rng.random() < 0.1:
            return Bot()
        return Atom(_SAMPLE_ATOMS[rng.randrange(n_atoms)])
    ops = ["box"] + (["and", "or", "imp"] if size >= 3 else [])
    op = rng.choice(ops)
    if op == "box":
        return Modal(0, _random_formula(rng, size - 1, n_atoms))
    k = rng.randint(1, size - 2)
    left = _random_formula(rng, k, n_atoms)
    right = _random_formula(rng, size - 1 - k, n_atoms)
    return {"and": And, "or": Or, "imp": Imp}[op](left, right)


def _sample_instantiation(sorts: dict, rng: random.Random, cfg: SamplingConfig) -> dict:
    inst: dict = {}
    for name in sorted(sorts):
        sort = sorts[name]
        if sort == "formula":
            inst[name] = _random_formula(rng, rng.randint(1, cfg.max_size), cfg.atoms)
        elif sort == "atom":
            inst[name] = Atom(_SAMPLE_ATOMS[rng.randrange(cfg.atoms)])
        elif sort == "context":
            k = rng.randint(0, cfg.max_context)
            inst[name] = FMultiset(
                _random_formula(rng, rng.randint(1, cfg.max_size), cfg.atoms) for _ in range(k))
        else:  # succedent
            if rng.random() < 1 / 3:
                inst[name] = None
            else:
                inst[name] = _random_formula(rng, rng.randint(1, cfg.max_size), cfg.atoms)
    return inst


def check_schema_termination(w: WeightFunction, rule: RuleSchema,
                             cfg: SamplingConfig | None = None) -> TerminationVerdict:
    """Terminating only when the symbolic criterion certifies the decrease for
    all instantiations; otherwise hunt for a concrete counterexample with
    seeded random instantiations, and report Unknown when none shows up."""
    cfg = cfg or SamplingConfig()
    if not rule.premises:
        return TerminationVerdict("terminating")
    if w.symbolic and all(_premise_certified(p, rule.conclusion, w) for p in rule.premises):
        return TerminationVerdict("terminating")
    rng = random.Random(f"{cfg.seed}:termination:{rule.name}")
    sorts = schema_metavars(rule)
    for _ in range(cfg.samples):
        inst = _sample_instantiation(sorts, rng, cfg)
        concl = instantiate_pattern(rule.conclusion, inst)
        for i, pr in enumerate(instantiate_premises(rule, inst)):
            if not sequent_less(w, pr, concl):
                return TerminationVerdict("counterexample", inst, i, pr, concl)
    return TerminationVerdict("unknown")
