import random

import pytest

import hogen.syntactic as syntactic
from hogen.syntax import parse_term, parse_type
from hogen.terms import (
    Const,
    Signature,
    Term,
    apply_subst,
    bound_var,
    is_pattern,
    make_signature,
    mk_app,
)

IOTA = parse_type("i")
BIN = parse_type("i -> i -> i")


@pytest.fixture(autouse=True)
def check_measure():
    """Assert the termination measure at every derivation step, suite-wide."""
    old = syntactic.CHECK_MEASURE
    syntactic.CHECK_MEASURE = True
    yield
    syntactic.CHECK_MEASURE = old


@pytest.fixture
def sig():
    """Mixed signature: two free function symbols, one A, one C, one AC."""
    return make_signature(
        {
            "f": (BIN, ("A",)),
            "g": (BIN, ("C",)),
            "j": (BIN, ("A", "C")),
            "h": (parse_type("i -> i -> i"), ()),
            "u": (parse_type("i -> i"), ()),
            "a": (IOTA, ()),
            "b": (IOTA, ()),
            "c": (IOTA, ()),
            "d": (IOTA, ()),
        }
    )


@pytest.fixture
def sig_a():
    return make_signature(
        {
            "f": (BIN, ("A",)),
            "u": (parse_type("i -> i"), ()),
            "a": (IOTA, ()),
            "b": (IOTA, ()),
            "c": (IOTA, ()),
        }
    )


@pytest.fixture
def sig_c():
    return make_signature(
        {
            "g": (BIN, ("C",)),
            "a": (IOTA, ()),
            "b": (IOTA, ()),
            "c": (IOTA, ()),
            "d": (IOTA, ()),
        }
    )


@pytest.fixture
def sig_ac():
    return make_signature(
        {
            "j": (BIN, ("A", "C")),
            "a": (IOTA, ()),
            "b": (IOTA, ()),
            "c": (IOTA, ()),
        }
    )


def T(text: str, sig: Signature, **kw) -> Term:
    return parse_term(text, sig, **kw)


def check_witnesses(result, left, right, sig):
    assert is_pattern(result.term)
    assert apply_subst(result.term, result.theta_left, sig) == left
    assert apply_subst(result.term, result.theta_right, sig) == right


def random_ground(rng: random.Random, sig: Signature, ctx, fuel: int) -> Term:
    """Random normalized term of the base type under ``ctx`` binder types."""
    leaves = [name for name, (ty, _) in sig.constants.items() if ty == IOTA]
    choices = []
    if fuel < 2:
        choices = ["leaf"]
    elif fuel < 3:
        choices = ["leaf", "unary"]
    else:
        choices = ["leaf", "unary", "binary", "equational", "equational"]
    kind = rng.choice(choices)
    if kind == "leaf":
        spots = [i for i, ty in enumerate(ctx) if ty == IOTA]
        if spots and rng.random() < 0.4:
            return bound_var(len(ctx) - 1 - rng.choice(spots), IOTA)
        return Term((), Const(rng.choice(leaves)))
    if kind == "unary" and "u" in sig.constants:
        return mk_app(sig, Const("u"), (random_ground(rng, sig, ctx, fuel - 1),))
    if kind == "binary" and "h" in sig.constants:
        lo, hi = _split_fuel(rng, max(2, fuel - 1), 2)
        return mk_app(
            sig,
            Const("h"),
            (random_ground(rng, sig, ctx, lo), random_ground(rng, sig, ctx, hi)),
        )
    eq_symbols = [n for n in ("f", "g", "j") if n in sig.constants]
    if not eq_symbols:
        return Term((), Const(rng.choice(leaves)))
    name = rng.choice(eq_symbols)
    arity = 2 if name == "g" else rng.randint(2, min(4, max(2, fuel - 1)))
    parts = _split_fuel(rng, max(arity, fuel - 1), arity)
    args = tuple(random_ground(rng, sig, ctx, part) for part in parts)
    return mk_app(sig, Const(name), args)


def _split_fuel(rng: random.Random, budget: int, parts: int) -> list[int]:
    """Distribute ``budget`` into ``parts`` positive summands."""
    out = [1] * parts
    for _ in range(budget - parts):
        out[rng.randrange(parts)] += 1
    return out


def mutate(rng: random.Random, sig: Signature, t: Term, ctx, rate: float) -> Term:
    """Random structural edit: replaced subterms, shuffled or resized
    equational argument lists; the result stays normalized."""
    if rng.random() < rate:
        from hogen.terms import size

        return random_ground(rng, sig, ctx, max(1, size(t) + rng.randint(-2, 2)))
    args = [mutate(rng, sig, a, ctx, rate) for a in t.args]
    if (
        isinstance(t.head, Const)
        and sig.is_equational(t.head.name)
        and len(args) >= 2
    ):
        if rng.random() < 0.5:
            rng.shuffle(args)
        if sig.is_assoc(t.head.name):  # only variadic symbols may change arity
            roll = rng.random()
            if roll < 0.2:
                args.append(random_ground(rng, sig, ctx, rng.randint(1, 3)))
            elif roll < 0.35 and len(args) > 2:
                args.pop(rng.randrange(len(args)))
    return mk_app(sig, t.head, tuple(args), t.binders, t.binder_names)


def random_pair(rng: random.Random, sig: Signature, fuel: int):
    """Two same-type terms, frequently under shared binders; the right term
    is usually a mutation of the left so the pair shares structure."""
    nb = rng.randint(1, 2) if rng.random() < 0.5 else 0
    ctx = tuple(IOTA for _ in range(nb))
    names = tuple(f"x{i}" for i in range(nb))
    left = random_ground(rng, sig, ctx, fuel)
    if rng.random() < 0.7:
        right = mutate(rng, sig, left, ctx, rate=0.25)
    else:
        right = random_ground(rng, sig, ctx, fuel)
    if nb:
        from hogen.terms import add_binders

        return add_binders(left, ctx, names), add_binders(right, ctx, names)
    return left, right
