"""Rule schemas, the builtin G3/G4 calculi and modal rule library, the
right-modal-to-implication transformation, calculus assembly, and schema
matching against concrete sequents.

A rule schema is a list of premise patterns and one conclusion pattern.  A
pattern is a sequent-shaped template: its antecedent items are context
metavariables (``G``), boxed context metavariables (``box G``) or formula
templates over formula/atom metavariables, and its succedent is empty, a
succedent metavariable, or a formula template.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .syntax import (
    And, Atom, Bot, FMultiset, Formula, Imp, Modal, Or, Sequent, _from_counts,
    print_formula, sort_key,
)

AXIOM = "axiom"
LEFT = "left"
RIGHT = "right"
RIGHT_MODAL = "right-modal"
OTHER_MODAL = "other-modal"

GREEDY = "greedy"
EXHAUSTIVE = "exhaustive"


class InstantiationError(Exception):
    """A metavariable needed for instantiation is unbound."""


@dataclass(frozen=True)
class DslValidationError:
    line: int
    rule: str | None
    message: str

    def __str__(self) -> str:
        where = f"rule {self.rule}" if self.rule else "input"
        return f"line {self.line}: {where}: {self.message}"


class InvalidRulesError(Exception):
    """Raised by calculus assembly when a schema is malformed."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(str(p) for p in self.problems))


# --- schema syntax ----------------------------------------------------------

@dataclass(frozen=True)
class FVar:
    """Formula metavariable."""
    name: str


@dataclass(frozen=True)
class AVar:
    """Atom metavariable (instantiates to atoms only)."""
    name: str


@dataclass(frozen=True)
class CtxVar:
    """Context metavariable: a multiset of antecedent formulas."""
    name: str


@dataclass(frozen=True)
class BoxedCtx:
    """Boxed context metavariable: box G stands for {box f | f in G}."""
    name: str
    index: int = 0


@dataclass(frozen=True)
class SuccVar:
    """Succedent metavariable: empty or a single formula."""
    name: str


@dataclass(frozen=True)
class Pattern:
    items: tuple = ()
    succedent: object = None  # None (empty) | SuccVar | formula template


@dataclass(frozen=True)
class RuleSchema:
    name: str
    premises: tuple
    conclusion: Pattern
    kind: str
    provenance: str = "builtin"


@dataclass(frozen=True)
class Calculus:
    name: str
    rules: tuple
    style: str  # "G3" | "G4"

    def rule(self, name: str) -> RuleSchema | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None


def is_template(item) -> bool:
    return not isinstance(item, (CtxVar, BoxedCtx))


def template_vars(t):
    """Yield (name, sort) for every metavariable in a formula template."""
    if isinstance(t, FVar):
        yield t.name, "formula"
    elif isinstance(t, AVar):
        yield t.name, "atom"
    elif isinstance(t, (And, Or, Imp)):
        yield from template_vars(t.left)
        yield from template_vars(t.right)
    elif isinstance(t, Modal):
        yield from template_vars(t.body)


def template_has_connective(t) -> bool:
    return isinstance(t, (And, Or, Imp, Modal))


def pattern_vars(p: Pattern):
    for item in p.items:
        if isinstance(item, (CtxVar, BoxedCtx)):
            yield item.name, "context"
        else:
            yield from template_vars(item)
    if isinstance(p.succedent, SuccVar):
        yield p.succedent.name, "succedent"
    elif p.succedent is not None:
        yield from template_vars(p.succedent)


def schema_metavars(rule: RuleSchema) -> dict:
    """Map metavariable name -> sort over the whole schema (first sort wins)."""
    sorts: dict = {}
    for pat in (*rule.premises, rule.conclusion):
        for name, sort in pattern_vars(pat):
            sorts.setdefault(name, sort)
    return sorts


def schema_problems(rule: RuleSchema) -> list[str]:
    """Well-formedness diagnostics: sort consistency and premise binding."""
    problems = []
    sorts: dict = {}
    for pat in (*rule.premises, rule.conclusion):
        for name, sort in pattern_vars(pat):
            old = sorts.setdefault(name, sort)
            if old != sort:
                problems.append(f"metavariable {name} used both as {old} and as {sort}")
    concl = {name for name, _ in pattern_vars(rule.conclusion)}
    for i, pat in enumerate(rule.premises):
        for name, _ in pattern_vars(pat):
            if name not in concl:
                problems.append(f"premise {i + 1} metavariable {name} does not occur in the conclusion")
    if (rule.kind == AXIOM) != (not rule.premises):
        problems.append("axiom classification disagrees with premise count")
    # deduplicate, preserving order
    seen: set = set()
    return [p for p in problems if not (p in seen or seen.add(p))]


# --- builtin calculi --------------------------------------------------------

_G, _P, _S = CtxVar("G"), CtxVar("P"), CtxVar("S")
_D = SuccVar("D")
_phi, _psi, _gam = FVar("phi"), FVar("psi"), FVar("gamma")
_p = AVar("p")


def _pat(items, succ=None) -> Pattern:
    return Pattern(tuple(items), succ)


_AX = RuleSchema("Ax", (), _pat([_G, _p], _p), AXIOM)
_LBOT = RuleSchema("LBot", (), _pat([_G, Bot()], _D), AXIOM)
_RAND = RuleSchema("RAnd", (_pat([_G], _phi), _pat([_G], _psi)),
                   _pat([_G], And(_phi, _psi)), RIGHT)
_LAND = RuleSchema("LAnd", (_pat([_G, _phi, _psi], _D),),
                   _pat([_G, And(_phi, _psi)], _D), LEFT)
_ROR0 = RuleSchema("ROr0", (_pat([_G], _phi),), _pat([_G], Or(_phi, _psi)), RIGHT)
_ROR1 = RuleSchema("ROr1", (_pat([_G], _psi),), _pat([_G], Or(_phi, _psi)), RIGHT)
_LOR = RuleSchema("LOr", (_pat([_G, _phi], _D), _pat([_G, _psi], _D)),
                  _pat([_G, Or(_phi, _psi)], _D), LEFT)
_RIMP = RuleSchema("RImp", (_pat([_G, _phi], _psi),), _pat([_G], Imp(_phi, _psi)), RIGHT)
_LIMP = RuleSchema("LImp", (_pat([_G, Imp(_phi, _psi)], _phi), _pat([_G, _psi], _D)),
                   _pat([_G, Imp(_phi, _psi)], _D), LEFT)
_LPIMP = RuleSchema("LpImp", (_pat([_G, _p, _phi], _D),),
                    _pat([_G, _p, Imp(_p, _phi)], _D), LEFT)
_LANDIMP = RuleSchema("LAndImp", (_pat([_G, Imp(_phi, Imp(_psi, _gam))], _D),),
                      _pat([_G, Imp(And(_phi, _psi), _gam)], _D), LEFT)
_LORIMP = RuleSchema("LOrImp", (_pat([_G, Imp(_phi, _gam), Imp(_psi, _gam)], _D),),
                     _pat([_G, Imp(Or(_phi, _psi), _gam)], _D), LEFT)
_LIMPIMP = RuleSchema("LImpImp",
                      (_pat([_G, Imp(_psi, _gam)], Imp(_phi, _psi)), _pat([_gam, _G], _D)),
                      _pat([_G, Imp(Imp(_phi, _psi), _gam)], _D), LEFT)


def g3ip() -> Calculus:
    return Calculus("G3ip", (_AX, _LBOT, _RAND, _LAND, _ROR0, _ROR1, _LOR, _RIMP, _LIMP), "G3")


def g4ip() -> Calculus:
    return Calculus("G4ip", (_AX, _LBOT, _RAND, _LAND, _ROR0, _ROR1, _LOR, _RIMP,
                             _LPIMP, _LANDIMP, _LORIMP, _LIMPIMP), "G4")


_R_K = RuleSchema("R_K", (_pat([_G], _phi),),
                  _pat([_P, BoxedCtx("G")], Modal(0, _phi)), RIGHT_MODAL)
_R_D = RuleSchema("R_D", (_pat([_G, _phi], None),),
                  _pat([_P, BoxedCtx("G"), Modal(0, _phi)], _D), OTHER_MODAL)
_R_T = RuleSchema("R_T", (_pat([_G, _phi], _D),),
                  _pat([_G, Modal(0, _phi)], _D), OTHER_MODAL)
_R_K4 = RuleSchema("R_K4", (_pat([_G, BoxedCtx("G")], _phi),),
                   _pat([_P, BoxedCtx("G")], Modal(0, _phi)), RIGHT_MODAL)
_R_GL = RuleSchema("R_GL", (_pat([_G, BoxedCtx("G"), Modal(0, _phi)], _phi),),
                   _pat([_P, BoxedCtx("G")], Modal(0, _phi)), RIGHT_MODAL)
_R_SL = RuleSchema("R_SL", (_pat([_P, BoxedCtx("G"), _G, Modal(0, _phi)], _phi),),
                   _pat([BoxedCtx("S"), _P, BoxedCtx("G")], Modal(0, _phi)), RIGHT_MODAL)
_R_X = RuleSchema("R_X", (_pat([BoxedCtx("G")], _phi),),
                  _pat([_P, BoxedCtx("G")], Modal(0, _phi)), RIGHT_MODAL)


def builtin_modal_rules() -> dict:
    """The modal rule library, keyed by name."""
    return {r.name: r for r in (_R_K, _R_D, _R_T, _R_K4, _R_GL, _R_SL, _R_X)}


# --- classification and transformation --------------------------------------

def is_right_modal(rule: RuleSchema) -> bool:
    """A rule whose conclusion succedent is a boxed formula metavariable."""
    succ = rule.conclusion.succedent
    return isinstance(succ, Modal) and isinstance(succ.body, FVar)


def is_nonflat(rule: RuleSchema) -> bool:
    """Nonempty premises, and the conclusion is guaranteed to contain a
    connective or a modal operator under every instantiation."""
    if not rule.premises:
        return False
    templates = [it for it in rule.conclusion.items if is_template(it)]
    if rule.conclusion.succedent is not None and not isinstance(rule.conclusion.succedent, SuccVar):
        templates.append(rule.conclusion.succedent)
    return any(template_has_connective(t) for t in templates)


def _fresh(base: str, used: set) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def transform_right_modal(rule: RuleSchema) -> RuleSchema:
    """Build the implication rule associated with a right modal rule: keep its
    premises, add the premise (C, psi => D) and conclude (C, box phi -> psi => D),
    where C is the rule's conclusion antecedent."""
    if not is_right_modal(rule):
        raise ValueError(f"{rule.name} is not a right modal rule")
    used = set(schema_metavars(rule))
    psi = FVar(_fresh("psi", used))
    delta = SuccVar(_fresh("D", used))
    c_ante = rule.conclusion.items
    boxed = rule.conclusion.succedent
    extra = Pattern(c_ante + (psi,), delta)
    conclusion = Pattern(c_ante + (Imp(boxed, psi),), delta)
    return RuleSchema(rule.name + "->", rule.premises + (extra,), conclusion,
                      LEFT, provenance=f"generated-from:{rule.name}")


class NonflatWarning(UserWarning):
    """A modal rule in the extension set is flat; the equivalence theorem's
    hypotheses are not all checkable for this calculus."""


def _validate_modal(modal) -> None:
    import warnings
    problems = []
    for r in modal:
        for msg in schema_problems(r):
            problems.append(DslValidationError(0, r.name, msg))
    if problems:
        raise InvalidRulesError(problems)
    for r in modal:
        if not is_nonflat(r):
            warnings.warn(f"modal rule {r.name} is not nonflat", NonflatWarning, stacklevel=3)


def _ext_name(base: str, modal) -> str:
    if not modal:
        return base + "ip"
    return base + "i+" + ",".join(r.name for r in modal)


def build_g3ix(modal) -> Calculus:
    """G3ip extended by the given modal rules."""
    modal = tuple(modal)
    _validate_modal(modal)
    return Calculus(_ext_name("G3", modal), g3ip().rules + modal, "G3")


def build_g4ix(modal) -> Calculus:
    """G4ip extended by the given modal rules plus the generated implication
    rule of every right modal rule (deduplicated structurally)."""
    modal = tuple(modal)
    _validate_modal(modal)
    rules = list(g4ip().rules) + list(modal)
    seen = {(r.premises, r.conclusion) for r in rules}
    for r in modal:
        if is_right_modal(r):
            gen = transform_right_modal(r)
            if (gen.premises, gen.conclusion) not in seen:
                seen.add((gen.premises, gen.conclusion))
                rules.append(gen)
    return Calculus(_ext_name("G4", modal), tuple(rules), "G4")


# --- instantiation ----------------------------------------------------------

def instantiate_template(t, inst: dict) -> Formula:
    if isinstance(t, (FVar, AVar)):
        try:
            return inst[t.name]
        except KeyError:
            raise InstantiationError(f"unbound metavariable {t.name}") from None
    if isinstance(t, And):
        return And(instantiate_template(t.left, inst), instantiate_template(t.right, inst))
    if isinstance(t, Or):
        return Or(instantiate_template(t.left, inst), instantiate_template(t.right, inst))
    if isinstance(t, Imp):
        return Imp(instantiate_template(t.left, inst), instantiate_template(t.right, inst))
    if isinstance(t, Modal):
        return Modal(t.index, instantiate_template(t.body, inst))
    if isinstance(t, (Atom, Bot)):
        return t
    raise TypeError(f"not a template: {t!r}")


def _box_multiset(ms: FMultiset, index: int) -> FMultiset:
    counts = {Modal(index, f): n for f, n in ms.items()}
    return _from_counts(counts)


def instantiate_pattern(p: Pattern, inst: dict) -> Sequent:
    counts: dict = {}
    for item in p.items:
        if isinstance(item, CtxVar):
            try:
                ms = inst[item.name]
            except KeyError:
                raise InstantiationError(f"unbound metavariable {item.name}") from None
            for f, n in ms.items():
                counts[f] = counts.get(f, 0) + n
        elif isinstance(item, BoxedCtx):
            try:
                ms = inst[item.name]
            except KeyError:
                raise InstantiationError(f"unbound metavariable {item.name}") from None
            for f, n in ms.items():
                g = Modal(item.index, f)
                counts[g] = counts.get(g, 0) + n
        else:
            f = instantiate_template(item, inst)
            counts[f] = counts.get(f, 0) + 1
    if p.succedent is None:
        succ = None
    elif isinstance(p.succedent, SuccVar):
        try:
            succ = inst[p.succedent.name]
        except KeyError:
            raise InstantiationError(f"unbound metavariable {p.succedent.name}") from None
    else:
        succ = instantiate_template(p.succedent, inst)
    return Sequent(_from_counts(counts), succ)


def instantiate_premises(rule: RuleSchema, inst: dict) -> list[Sequent]:
    return [instantiate_pattern(p, inst) for p in rule.premises]


# --- matching ---------------------------------------------------------------

def match_template(t, f: Formula, inst: dict) -> dict | None:
    """Structure-directed match of a template against a formula; returns the
    extended binding or None."""
    if isinstance(t, FVar):
        bound = inst.get(t.name)
        if bound is None:
            out = dict(inst)
            out[t.name] = f
            return out
        return inst if bound == f else None
    if isinstance(t, AVar):
        if not isinstance(f, Atom):
            return None
        bound = inst.get(t.name)
        if bound is None:
            out = dict(inst)
            out[t.name] = f
            return out
        return inst if bound == f else None
    if isinstance(t, Bot):
        return inst if isinstance(f, Bot) else None
    if isinstance(t, Atom):
        return inst if t == f else None
    if isinstance(t, (And, Or, Imp)):
        if type(t) is not type(f):
            return None
        step = match_template(t.left, f.left, inst)
        if step is None:
            return None
        return match_template(t.right, f.right, step)
    if isinstance(t, Modal):
        if not isinstance(f, Modal) or t.index != f.index:
            return None
        return match_template(t.body, f.body, inst)
    raise TypeError(f"not a template: {t!r}")


def _submultisets(ms: FMultiset):
    items = ms.items()
    ranges = [range(n + 1) for _, n in items]
    for combo in itertools.product(*ranges):
        counts = {f: k for (f, _), k in zip(items, combo) if k > 0}
        yield _from_counts(counts)


def _binding_key(value):
    if value is None:
        return (0,)
    if isinstance(value, FMultiset):
        return (1, tuple(sort_key(f) for f in value))
    return (2, sort_key(value))


def _inst_key(inst: dict):
    return tuple((name, _binding_key(v)) for name, v in sorted(inst.items()))


def match_conclusion(rule: RuleSchema, s: Sequent, mode: str = GREEDY) -> list[dict]:
    """All instantiations of the rule's conclusion that produce exactly ``s``.

    Greedy mode binds each boxed context metavariable to the maximal multiset
    of suitably boxed antecedent formulas and hands the remainder to the last
    plain context metavariable, enumerating only the principal-formula choices.
    Exhaustive mode enumerates every antecedent partition.  The result list is
    deterministically ordered.
    """
    pat = rule.conclusion
    base: dict = {}
    if pat.succedent is None:
        if s.succedent is not None:
            return []
    elif isinstance(pat.succedent, SuccVar):
        base[pat.succedent.name] = s.succedent
    else:
        if s.succedent is None:
            return []
        matched = match_template(pat.succedent, s.succedent, base)
        if matched is None:
            return []
        base = matched

    templates = [it for it in pat.items if is_template(it)]
    boxed = [it for it in pat.items if isinstance(it, BoxedCtx)]
    plains = [it for it in pat.items if isinstance(it, CtxVar)]
    results: list = []

    def go_templates(i: int, remaining: FMultiset, inst: dict):
        if i == len(templates):
            go_boxed(0, remaining, inst)
            return
        t = templates[i]
        for f in remaining.support():
            nxt = match_template(t, f, inst)
            if nxt is not None:
                go_templates(i + 1, remaining.remove(f), nxt)

    def go_boxed(i: int, remaining: FMultiset, inst: dict):
        if i == len(boxed):
            go_plain(0, remaining, inst)
            return
        cv = boxed[i]
        if cv.name in inst:
            need = _box_multiset(inst[cv.name], cv.index)
            if need.issubset(remaining):
                go_boxed(i + 1, remaining.diff(need), inst)
            return
        candidates = _from_counts({f: n for f, n in remaining.items()
                                   if isinstance(f, Modal) and f.index == cv.index})
        if mode == GREEDY:
            bodies = _from_counts({f.body: n for f, n in candidates.items()})
            out = dict(inst)
            out[cv.name] = bodies
            go_boxed(i + 1, remaining.diff(candidates), out)
        else:
            for sub in _submultisets(candidates):
                out = dict(inst)
                out[cv.name] = _from_counts({f.body: n for f, n in sub.items()})
                go_boxed(i + 1, remaining.diff(sub), out)

    def go_plain(i: int, remaining: FMultiset, inst: dict):
        if i == len(plains):
            if not remaining:
                results.append(inst)
            return
        cv = plains[i]
        if cv.name in inst:
            need = inst[cv.name]
            if need.issubset(remaining):
                go_plain(i + 1, remaining.diff(need), inst)
            return
        last = i == len(plains) - 1
        if last:
            out = dict(inst)
            out[cv.name] = remaining
            go_plain(i + 1, _from_counts({}), out)
        elif mode == GREEDY:
            out = dict(inst)
            out[cv.name] = _from_counts({})
            go_plain(i + 1, remaining, out)
        else:
            for sub in _submultisets(remaining):
                out = dict(inst)
                out[cv.name] = sub
                go_plain(i + 1, remaining.diff(sub), out)

    go_templates(0, s.antecedent, base)

    needed = set(schema_metavars(rule))
    unique: dict = {}
    for inst in results:
        if set(inst) != needed:
            continue  # conclusion did not bind every schema metavariable
        if instantiate_pattern(pat, inst) != s:
            continue
        unique.setdefault(_inst_key(inst), inst)
    return [unique[k] for k in sorted(unique)]


def format_instantiation(inst: dict) -> str:
    parts = []
    for name in sorted(inst):
        v = inst[name]
        if v is None:
            text = "-"
        elif isinstance(v, FMultiset):
            text = "{" + ", ".join(print_formula(f) for f in v) + "}"
        else:
            text = print_formula(v)
        parts.append(f"{name}={text}")
    return "[" + ", ".join(parts) + "]"
