"""Formulas, multisets and sequents for intuitionistic modal propositional logic.

The language has falsum, atoms, the connectives ``&``, ``|``, ``->`` and an
indexed family of box operators ``[0]``, ``[1]``, ...  Negation is not a
constructor: ``~phi`` is read and printed as ``phi -> false``.  Every value in
this module is immutable, so formulas, multisets and sequents can be shared
freely between concurrent searches.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class ParseError(Exception):
    """Malformed formula or sequent text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Modal(Formula):
    index: int
    body: Formula


def neg(f: Formula) -> Formula:
    return Imp(f, Bot())


@lru_cache(maxsize=None)
def sort_key(f: Formula):
    """Total structural order on formulas; fixes all iteration orders."""
    if isinstance(f, Bot):
        return (0,)
    if isinstance(f, Atom):
        return (1, f.name)
    if isinstance(f, And):
        return (2, sort_key(f.left), sort_key(f.right))
    if isinstance(f, Or):
        return (3, sort_key(f.left), sort_key(f.right))
    if isinstance(f, Imp):
        return (4, sort_key(f.left), sort_key(f.right))
    if isinstance(f, Modal):
        return (5, f.index, sort_key(f.body))
    raise TypeError(f"not a formula: {f!r}")


def degree(f: Formula) -> int:
    """Degree of a formula: 0 for falsum, 1 for atoms, +1 per operator."""
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Atom):
        return 1
    if isinstance(f, Modal):
        return degree(f.body) + 1
    return degree(f.left) + degree(f.right) + 1


def subformulas(f: Formula) -> set[Formula]:
    out = {f}
    if isinstance(f, (And, Or, Imp)):
        out |= subformulas(f.left) | subformulas(f.right)
    elif isinstance(f, Modal):
        out |= subformulas(f.body)
    return out


class FMultiset:
    """Immutable finite multiset of formulas with canonical iteration order.

    Iteration, printing and all derived algorithms follow the structural order
    given by :func:`sort_key`, so every consumer is deterministic.
    """

    __slots__ = ("_items", "_counts", "_size", "_hash")

    def __init__(self, formulas=()):
        counts: dict = {}
        for f in formulas:
            counts[f] = counts.get(f, 0) + 1
        self._counts = counts
        self._items = tuple(sorted(counts.items(), key=lambda kv: sort_key(kv[0])))
        self._size = sum(n for _, n in self._items)
        self._hash = hash(self._items)

    def items(self):
        """Pairs (formula, multiplicity) in canonical order."""
        return self._items

    def support(self):
        """Distinct formulas in canonical order."""
        return tuple(f for f, _ in self._items)

    def count(self, f: Formula) -> int:
        return self._counts.get(f, 0)

    def __iter__(self):
        for f, n in self._items:
            for _ in range(n):
                yield f

    def __len__(self) -> int:
        return self._size

    def __bool__(self) -> bool:
        return self._size > 0

    def __contains__(self, f: Formula) -> bool:
        return f in self._counts

    def __eq__(self, other) -> bool:
        return isinstance(other, FMultiset) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "{" + ", ".join(print_formula(f) for f in self) + "}"

    def union(self, other) -> "FMultiset":
        """Multiset union: multiplicities add up."""
        out = dict(self._counts)
        pairs = other.items() if isinstance(other, FMultiset) else ((f, 1) for f in other)
        for f, n in pairs:
            out[f] = out.get(f, 0) + n
        return _from_counts(out)

    def add(self, f: Formula, k: int = 1) -> "FMultiset":
        out = dict(self._counts)
        out[f] = out.get(f, 0) + k
        return _from_counts(out)

    def remove(self, f: Formula, k: int = 1) -> "FMultiset":
        """Remove exactly ``k`` occurrences; insufficient multiplicity is an error."""
        have = self._counts.get(f, 0)
        if k < 0 or have < k:
            raise ValueError(f"cannot remove {k} x {print_formula(f)} (have {have})")
        out = dict(self._counts)
        if have == k:
            del out[f]
        else:
            out[f] = have - k
        return _from_counts(out)

    def diff(self, other: "FMultiset") -> "FMultiset":
        """Saturating multiset difference."""
        out = {}
        for f, n in self._items:
            m = n - other.count(f)
            if m > 0:
                out[f] = m
        return _from_counts(out)

    def issubset(self, other: "FMultiset") -> bool:
        return all(other.count(f) >= n for f, n in self._items)


def _from_counts(counts: dict) -> FMultiset:
    ms = FMultiset.__new__(FMultiset)
    items = tuple(sorted(counts.items(), key=lambda kv: sort_key(kv[0])))
    ms._counts = dict(counts)
    ms._items = items
    ms._size = sum(n for _, n in items)
    ms._hash = hash(items)
    return ms


EMPTY = FMultiset()


def mset_union(a: FMultiset, b: FMultiset) -> FMultiset:
    return a.union(b)


def mset_remove(a: FMultiset, f: Formula, k: int = 1) -> FMultiset:
    return a.remove(f, k)


def mset_count(a: FMultiset, f: Formula) -> int:
    return a.count(f)


@dataclass(frozen=True)
class Sequent:
    """Single-conclusion sequent: a multiset antecedent, at most one succedent."""

    antecedent: FMultiset
    succedent: Formula | None = None

    def __str__(self) -> str:
        return print_sequent(self)


def interpret(s: Sequent) -> Formula:
    """Formula reading of a sequent: conjunction of the antecedent implies the
    succedent; an empty succedent reads as falsum, an empty antecedent yields
    the succedent side directly."""
    succ = s.succedent if s.succedent is not None else Bot()
    if not s.antecedent:
        return succ
    conj = None
    for f in s.antecedent:
        conj = f if conj is None else And(conj, f)
    return Imp(conj, succ)


# --- parsing ---------------------------------------------------------------

def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "[":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "]":
                idx = int(text[i + 1:j]) if j > i + 1 else 0
                toks.append(("BOX", idx, i))
                i = j + 1
                continue
            raise ParseError("unterminated modal prefix", i)
        if text[i:i + 2] == "=>":
            toks.append(("SEQARROW", None, i))
            i += 2
            continue
        if text[i:i + 2] == "->":
            toks.append(("ARROW", None, i))
            i += 2
            continue
        if c in "&|~(),":
            kind = {"&": "AND", "|": "OR", "~": "NOT", "(": "LPAR", ")": "RPAR", ",": "COMMA"}[c]
            toks.append((kind, None, i))
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append(("FALSE" if word == "false" else "IDENT", word, i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("EOF", None, n))
    return toks


class _FormulaParser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind}, found {t[1] or t[0]}", t[2])
        return t

    def formula(self):
        left = self.disjunction()
        if self.peek()[0] == "ARROW":
            self.next()
            return Imp(left, self.formula())  # right associative
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[0] == "OR":
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek()[0] == "AND":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, value, pos = self.peek()
        if kind == "NOT":
            self.next()
            return Imp(self.unary(), Bot())
        if kind == "BOX":
            self.next()
            return Modal(value, self.unary())
        if kind == "FALSE":
            self.next()
            return Bot()
        if kind == "IDENT":
            self.next()
            return Atom(value)
        if kind == "LPAR":
            self.next()
            f = self.formula()
            self.expect("RPAR")
            return f
        raise ParseError(f"expected a formula, found {value or kind}", pos)


def parse_formula(text: str) -> Formula:
    p = _FormulaParser(_tokenize(text))
    f = p.formula()
    p.expect("EOF")
    return f


def parse_sequent(text: str) -> Sequent:
    """Parse ``f1, f2, ... => g`` (either side may be empty)."""
    p = _FormulaParser(_tokenize(text))
    ante = []
    if p.peek()[0] != "SEQARROW":
        ante.append(p.formula())
        while p.peek()[0] == "COMMA":
            p.next()
            ante.append(p.formula())
    p.expect("SEQARROW")
    succ = None
    if p.peek()[0] != "EOF":
        succ = p.formula()
    p.expect("EOF")
    return Sequent(FMultiset(ante), succ)


# --- printing --------------------------------------------------------------

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _pf(f: Formula, min_prec: int) -> str:
    if isinstance(f, Imp) and isinstance(f.right, Bot):
        return "~" + _pf(f.left, _PREC_UNARY)
    if isinstance(f, Imp):
        s = _pf(f.left, _PREC_OR) + " -> " + _pf(f.right, _PREC_IMP)
        prec = _PREC_IMP
    elif isinstance(f, Or):
        s = _pf(f.left, _PREC_OR) + " | " + _pf(f.right, _PREC_AND)
        prec = _PREC_OR
    elif isinstance(f, And):
        s = _pf(f.left, _PREC_AND) + " & " + _pf(f.right, _PREC_UNARY)
        prec = _PREC_AND
    elif isinstance(f, Modal):
        return ("[]" if f.index == 0 else f"[{f.index}]") + _pf(f.body, _PREC_UNARY)
    elif isinstance(f, Atom):
        return f.name
    elif isinstance(f, Bot):
        return "false"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return "(" + s + ")" if prec < min_prec else s


def print_formula(f: Formula) -> str:
    """Minimal-parentheses text; inverse of :func:`parse_formula`."""
    return _pf(f, _PREC_IMP)


def print_sequent(s: Sequent) -> str:
    left = ", ".join(print_formula(f) for f in s.antecedent)
    right = print_formula(s.succedent) if s.succedent is not None else ""
    if left and right:
        return f"{left} => {right}"
    if left:
        return f"{left} =>"
    if right:
        return f"=> {right}"
    return "=>"
