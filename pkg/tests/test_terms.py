import random

import pytest

from conftest import IOTA, T, random_ground
from hogen.oracle import e_equal_naive
from hogen.syntax import parse_type
from hogen.terms import (
    Const,
    SignatureError,
    Term,
    TermError,
    apply_subst,
    compose_subst,
    depth,
    e_equal,
    head,
    is_pattern,
    make_signature,
    normalize,
    size,
    validate,
)


def test_flatten_nested_assoc(sig):
    assert T("f(a, f(b, c))", sig) == T("f(a, b, c)", sig)


def test_normalize_identity_on_constant(sig):
    c = T("c", sig)
    assert normalize(c, sig) == c


def test_normalize_beta_step(sig):
    assert T(r"(\x:i. u(x))(a)", sig) == T("u(a)", sig)


def test_normalize_idempotent_random(sig):
    rng = random.Random(11)
    for _ in range(200):
        t = random_ground(rng, sig, (), rng.randint(1, 12))
        assert normalize(t, sig) == t
        assert normalize(normalize(t, sig), sig) == normalize(t, sig)


def test_e_equal_assoc_instances(sig):
    assert e_equal(T("f(a, f(b, c))", sig), T("f(f(a, b), c)", sig), sig)


def test_unequal_without_axiom():
    free = make_signature(
        {
            "f": (parse_type("i -> i -> i"), ()),
            "a": (IOTA, ()),
            "b": (IOTA, ()),
            "c": (IOTA, ()),
        }
    )
    outer = T("f(a, f(b, c))", free)
    inner = T("f(f(a, b), c)", free)
    assert not e_equal(outer, inner, free)


def test_e_equal_comm(sig):
    assert e_equal(T("g(a, b)", sig), T("g(b, a)", sig), sig)


def test_e_equal_is_equivalence(sig):
    rng = random.Random(5)
    terms = [random_ground(rng, sig, (), rng.randint(1, 8)) for _ in range(40)]
    for t in terms:
        assert e_equal(t, t, sig)
    for t in terms[:15]:
        for s in terms[:15]:
            assert e_equal(t, s, sig) == e_equal(s, t, sig)
            for r in terms[:8]:
                if e_equal(t, s, sig) and e_equal(s, r, sig):
                    assert e_equal(t, r, sig)


def test_e_equal_agrees_with_naive_small(sig):
    rng = random.Random(7)
    universe = []
    seen = set()
    while len(universe) < 40:
        t = random_ground(rng, sig, (), rng.randint(1, 6))
        if size(t) <= 9 and t not in seen:
            seen.add(t)
            universe.append(t)
    for t in universe:
        for s in universe:
            assert e_equal(t, s, sig) == e_equal_naive(t, s, sig)


def test_e_equal_agrees_with_naive_exhaustive():
    """All pairs over a five-symbol signature, sizes bounded so the naive
    rewrite closures stay tractable."""
    import itertools

    sig5 = make_signature(
        {
            "f": (parse_type("i -> i -> i"), ("A",)),
            "j": (parse_type("i -> i -> i"), ("A", "C")),
            "u": (parse_type("i -> i"), ()),
            "a": (IOTA, ()),
            "b": (IOTA, ()),
        }
    )
    from hogen.terms import Const, mk_app

    universe = [Term((), Const("a")), Term((), Const("b"))]
    for t in list(universe):
        universe.append(mk_app(sig5, Const("u"), (t,)))
    leaves = list(universe)
    for name in ("f", "j"):
        for arity in (2, 3):
            for combo in itertools.product(leaves, repeat=arity):
                term = mk_app(sig5, Const(name), combo)
                if size(term) <= 9 and term not in universe:
                    universe.append(term)
    checked = 0
    for t in universe:
        for s in universe:
            assert e_equal(t, s, sig5) == e_equal_naive(t, s, sig5)
            checked += 1
    assert checked >= 1000


def test_apply_nullary_context(sig):
    from hogen.terms import Free

    t = Term((), Free("X"))
    assert apply_subst(t, {"X": T("c", sig)}, sig) == T("c", sig)


def test_apply_running_example(sig):
    r = T(r"\x:i, y:i. f(Y1(x, y), Y2(x, y))", sig,
          free_types={"Y1": parse_type("i -> i -> i"), "Y2": parse_type("i -> i -> i")})
    theta = {
        "Y1": T(r"\x:i, y:i. h(x, h(x, y))", sig),
        "Y2": T(r"\x:i, y:i. h(x, h(y, y))", sig),
    }
    expected = T(r"\x:i, y:i. f(h(x, h(x, y)), h(x, h(y, y)))", sig)
    assert apply_subst(r, theta, sig) == expected


def test_apply_empty_subst(sig):
    t = T("f(a, b, u(c))", sig)
    assert apply_subst(t, {}, sig) == t


def test_apply_composes(sig):
    rng = random.Random(3)
    x_ty = parse_type("i -> i")
    for _ in range(50):
        t = T(r"\x:i. f(X(x), b)", sig, free_types={"X": x_ty})
        mid = T(r"\x:i. u(Y(x))", sig, free_types={"Y": x_ty})
        sigma = {"X": mid}
        theta = {"Y": T(r"\x:i. h(x, c)", sig)}
        lhs = apply_subst(apply_subst(t, sigma, sig), theta, sig)
        rhs = apply_subst(t, compose_subst(sigma, theta, sig), sig)
        assert lhs == rhs


def test_size_depth_head(sig):
    assert size(T("f(a, b)", sig)) == 3
    assert depth(T(r"\x:i. u(x)", sig)) == 3
    assert head(T(r"\x:i, y:i. h(x, y)", sig)) == Const("h")


@pytest.mark.parametrize(
    "text, types, expected",
    [
        (r"\x:i. h(X(x), Y)", {"X": "i -> i", "Y": "i"}, True),
        (r"\x:i. u(X(X(x)))", {"X": "i -> i"}, False),
        (r"\x:i, y:i. X(x, x)", {"X": "i -> i -> i"}, False),
        (r"\x:i, y:i. X(x, y)", {"X": "i -> i -> i"}, True),
        ("h(X(c), c)", {"X": "i -> i"}, False),
    ],
)
def test_is_pattern(sig, text, types, expected):
    t = T(text, sig, free_types={k: parse_type(v) for k, v in types.items()})
    assert is_pattern(t) is expected


def test_flattened_invariant_random(sig):
    rng = random.Random(13)
    for _ in range(300):
        t = random_ground(rng, sig, (), rng.randint(1, 14))
        validate(t, sig)


def test_equational_constant_needs_homogeneous_type():
    with pytest.raises(SignatureError):
        make_signature({"f": (parse_type("i -> i"), ("A",))})
    with pytest.raises(SignatureError):
        make_signature({"f": (parse_type("i -> (i -> i) -> i"), ("C",))})


def test_type_errors_detected(sig):
    from hogen.terms import infer_type, Free

    bad = Term((), Const("u"), (Term((), Const("a")), Term((), Const("b"))))
    with pytest.raises(TermError):
        infer_type(bad, sig)
    with pytest.raises(TermError):
        infer_type(Term((), Free("Z")), sig)
