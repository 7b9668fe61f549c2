"""Independent oracles shared by the test modules."""

import itertools

from seqprove.syntax import FMultiset


def submultisets(gamma):
    items = gamma.items()
    for combo in itertools.product(*[range(n + 1) for _, n in items]):
        yield FMultiset(f for (f, _), k in zip(items, combo) for _ in range(k))


def multiset_less_bruteforce(w, delta, gamma):
    """The multiset order decided by exhaustive decomposition search: delta is
    (gamma - X) + Y for some nonempty X with every formula of Y strictly below
    some formula of X."""
    for x in submultisets(gamma):
        if not x:
            continue
        rest = gamma.diff(x)
        if not rest.issubset(delta):
            continue
        y = delta.diff(rest)
        if all(any(w.weight(b) < w.weight(a) for a in x.support()) for b in y.support()):
            return True
    return False
