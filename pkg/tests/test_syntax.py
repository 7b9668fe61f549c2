import random

import pytest

from seqprove.syntax import (
    And, Atom, Bot, FMultiset, Imp, Modal, Or, ParseError, Sequent, degree,
    interpret, mset_count, mset_remove, mset_union, parse_formula, parse_sequent,
    print_formula, print_sequent, sort_key, subformulas,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_parse_basic():
    assert parse_formula("p -> p") == Imp(p, p)
    assert parse_formula("~p") == Imp(p, Bot())
    assert parse_formula("[]p & []q") == And(Modal(0, p), Modal(0, q))


def test_parse_precedence_and_associativity():
    assert parse_formula("p & q | r") == Or(And(p, q), r)
    assert parse_formula("p -> q -> r") == Imp(p, Imp(q, r))
    assert parse_formula("p | q & r") == Or(p, And(q, r))
    assert parse_formula("p & q & r") == And(And(p, q), r)
    assert parse_formula("~p -> q") == Imp(Imp(p, Bot()), q)
    assert parse_formula("[]p -> p") == Imp(Modal(0, p), p)


def test_parse_modal_indices():
    assert parse_formula("[1]p") == Modal(1, p)
    assert parse_formula("[]p") == Modal(0, p)
    assert parse_formula("[0]p") == Modal(0, p)
    assert parse_formula("[2][2]p") == Modal(2, Modal(2, p))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_formula("p -> ")
    assert e.value.position == 5
    with pytest.raises(ParseError):
        parse_formula("p q")
    with pytest.raises(ParseError):
        parse_formula("(p -> q")
    with pytest.raises(ParseError):
        parse_formula("[3 p")


def test_print_examples():
    assert print_formula(Imp(p, Bot())) == "~p"
    assert print_formula(And(p, Or(q, r))) == "p & (q | r)"
    assert print_formula(Modal(1, p)) == "[1]p"
    assert print_formula(Or(And(p, q), r)) == "p & q | r"
    assert print_formula(Imp(Imp(p, q), r)) == "(p -> q) -> r"
    assert print_formula(Imp(Imp(p, Bot()), Bot())) == "~~p"


def _random_formula(rng, size):
    if size <= 1:
        return rng.choice([Bot(), p, q, r, Atom("s_1")])
    op = rng.choice(["and", "or", "imp", "box"])
    if op == "box":
        return Modal(rng.choice([0, 0, 0, 1, 2]), _random_formula(rng, size - 1))
    k = rng.randint(1, size - 1)
    left = _random_formula(rng, k)
    right = _random_formula(rng, size - k)
    return {"and": And, "or": Or, "imp": Imp}[op](left, right)


def test_print_parse_round_trip():
    rng = random.Random(2024)
    for _ in range(500):
        f = _random_formula(rng, rng.randint(1, 14))
        assert parse_formula(print_formula(f)) == f


def test_sequent_round_trip():
    rng = random.Random(99)
    for _ in range(200):
        ante = FMultiset(_random_formula(rng, rng.randint(1, 6))
                         for _ in range(rng.randint(0, 3)))
        succ = _random_formula(rng, 4) if rng.random() < 0.8 else None
        s = Sequent(ante, succ)
        assert parse_sequent(print_sequent(s)) == s


def test_sequent_text_forms():
    s = parse_sequent("p, q => r")
    assert s.antecedent.count(p) == 1 and s.succedent == r
    assert parse_sequent("p, p =>").antecedent.count(p) == 2
    assert parse_sequent("=> p") == Sequent(FMultiset(), p)
    assert parse_sequent("=>") == Sequent(FMultiset(), None)


def test_degree():
    assert degree(Bot()) == 0
    assert degree(p) == 1
    assert degree(Modal(0, And(p, q))) == 4
    assert degree(Imp(p, Bot())) == 2


def test_degree_zero_only_for_falsum():
    rng = random.Random(5)
    for _ in range(200):
        f = _random_formula(rng, rng.randint(1, 10))
        assert degree(f) >= 0
        assert (degree(f) == 0) == (f == Bot())


def test_interpret():
    assert interpret(parse_sequent("p, q => r")) == Imp(And(p, q), r)
    assert interpret(parse_sequent("p =>")) == Imp(p, Bot())
    assert interpret(parse_sequent("=> p")) == p
    assert interpret(parse_sequent("=>")) == Bot()


def test_interpret_contains_all_formulas():
    rng = random.Random(13)
    for _ in range(100):
        ante = [_random_formula(rng, rng.randint(1, 5)) for _ in range(rng.randint(1, 3))]
        succ = _random_formula(rng, 4)
        s = Sequent(FMultiset(ante), succ)
        subs = subformulas(interpret(s))
        for f in ante:
            assert f in subs
        assert succ in subs


def test_multiset_ops():
    a = FMultiset([p])
    assert mset_union(a, a).count(p) == 2
    b = FMultiset([p, p, q])
    assert mset_remove(b, p, 1) == FMultiset([p, q])
    assert mset_count(FMultiset(), p) == 0
    with pytest.raises(ValueError):
        mset_remove(a, p, 2)
    with pytest.raises(ValueError):
        mset_remove(a, q)


def test_multiset_union_commutative_associative():
    rng = random.Random(3)
    pool = [p, q, r, And(p, q), Imp(q, Bot()), Modal(0, p)]
    for _ in range(100):
        ms = [FMultiset(rng.choice(pool) for _ in range(rng.randint(0, 4)))
              for _ in range(3)]
        a, b, c = ms
        assert a.union(b) == b.union(a)
        assert a.union(b).union(c) == a.union(b.union(c))


def test_multiset_canonical_iteration():
    ms = FMultiset([Imp(p, q), p, Bot(), p])
    assert list(ms) == [Bot(), p, p, Imp(p, q)]
    assert ms.support() == (Bot(), p, Imp(p, q))


def test_sort_key_total_order():
    rng = random.Random(11)
    fs = [_random_formula(rng, rng.randint(1, 6)) for _ in range(60)]
    ordered = sorted(fs, key=sort_key)
    for a, b in zip(ordered, ordered[1:]):
        assert sort_key(a) <= sort_key(b)
    for f in fs:
        assert (sort_key(f) == sort_key(fs[0])) == (f == fs[0])
