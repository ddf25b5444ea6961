"""Simply typed lambda terms kept in eta-long beta-normal flattened form.

Every term is a spine ``lambda x1..xn. h(t1,..,tm)`` whose body has a base
type.  Bound variables are nameless de Bruijn indices (display names are
carried separately and ignored by comparisons), so alpha-equivalence is
plain ``==``.  The smart constructor ``mk_app`` additionally flattens
nested applications of associative symbols, collapses unary groups, and
sorts the arguments of commutative symbols under a fixed total order.
With those invariants in place, equality modulo the axioms attached to a
signature is equality of representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

A = "A"
C = "C"

# Name prefix reserved for the engines' internal generalization variables;
# the parser rejects it, so user terms can never collide.
AUP_PREFIX = "#"


class TermError(Exception):
    """Ill-typed or structurally invalid term."""


class SignatureError(Exception):
    """Invalid constant declaration."""


class BudgetExceeded(Exception):
    """A brute-force search ran past its configured budget."""


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class BaseType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ArrowType:
    arg: "SimpleType"
    result: "SimpleType"

    def __str__(self) -> str:
        left = str(self.arg)
        if isinstance(self.arg, ArrowType):
            left = f"({left})"
        return f"{left} -> {self.result}"


SimpleType = Union[BaseType, ArrowType]


def arrow(*types: SimpleType) -> SimpleType:
    """Build a right-associated arrow type from argument types plus result."""
    if not types:
        raise ValueError("arrow() needs at least a result type")
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = ArrowType(ty, result)
    return result


def argument_types(ty: SimpleType) -> tuple[SimpleType, ...]:
    out = []
    while isinstance(ty, ArrowType):
        out.append(ty.arg)
        ty = ty.result
    return tuple(out)


def result_type(ty: SimpleType) -> BaseType:
    while isinstance(ty, ArrowType):
        ty = ty.result
    return ty


def type_arity(ty: SimpleType) -> int:
    n = 0
    while isinstance(ty, ArrowType):
        n += 1
        ty = ty.result
    return n


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Signature:
    """Constant declarations: name -> (type, axiom set in {A, C})."""

    constants: Mapping[str, tuple[SimpleType, frozenset[str]]]

    def __post_init__(self) -> None:
        for name, (ty, axioms) in self.constants.items():
            if not axioms:
                continue
            if not axioms <= {A, C}:
                raise SignatureError(f"{name}: unknown axioms {set(axioms)}")
            # Equational constants must look like alpha -> alpha -> alpha.
            if (
                not isinstance(ty, ArrowType)
                or not isinstance(ty.result, ArrowType)
                or not isinstance(ty.arg, BaseType)
                or ty.result.arg != ty.arg
                or ty.result.result != ty.arg
            ):
                raise SignatureError(
                    f"{name}: equational constants need type a -> a -> a, got {ty}"
                )

    def type_of(self, name: str) -> SimpleType:
        try:
            return self.constants[name][0]
        except KeyError:
            raise TermError(f"undeclared constant {name!r}") from None

    def axioms(self, name: str) -> frozenset[str]:
        entry = self.constants.get(name)
        return entry[1] if entry else frozenset()

    def is_assoc(self, name: str) -> bool:
        return A in self.axioms(name)

    def is_comm(self, name: str) -> bool:
        return C in self.axioms(name)

    def is_equational(self, name: str) -> bool:
        return bool(self.axioms(name))


def make_signature(decls: Mapping[str, tuple[SimpleType, Iterable[str]]]) -> Signature:
    return Signature({n: (ty, frozenset(ax)) for n, (ty, ax) in decls.items()})


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Bound:
    index: int  # de Bruijn index, innermost binder = 0

    def __str__(self) -> str:
        return f"#{self.index}"


@dataclass(frozen=True)
class Free:
    name: str

    def __str__(self) -> str:
        return self.name


Head = Union[Const, Bound, Free]


@dataclass(frozen=True)
class Term:
    binders: tuple[SimpleType, ...]
    head: Head
    args: tuple["Term", ...] = ()
    binder_names: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __str__(self) -> str:  # debugging aid; the CLI printer lives in syntax.py
        body = str(self.head)
        if self.args:
            body += "(" + ",".join(str(a) for a in self.args) + ")"
        if self.binders:
            return "\\" + ",".join("_" for _ in self.binders) + "." + body
        return body


def _term_hash(self: Term) -> int:
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((self.binders, self.head, self.args))
        object.__setattr__(self, "_hash", h)
    return h


Term.__hash__ = _term_hash  # cached: terms are immutable and compared often


def term_key(t: Term):
    """Fixed total order on terms: head kind/name, arity, then arguments."""
    key = t.__dict__.get("_key")
    if key is not None:
        return key
    h = t.head
    if isinstance(h, Const):
        hk = (0, 0, len(h.name), h.name)
    elif isinstance(h, Bound):
        hk = (1, h.index, 0, "")
    else:
        hk = (2, 0, len(h.name), h.name)
    key = (len(t.binders), hk, len(t.args), tuple(term_key(a) for a in t.args))
    object.__setattr__(t, "_key", key)
    return key


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Add ``d`` to every bound index >= cutoff (relocation under binders)."""
    if d == 0:
        return t
    c = cutoff + len(t.binders)
    head = t.head
    if isinstance(head, Bound) and head.index >= c:
        head = Bound(head.index + d)
    return Term(
        t.binders,
        head,
        tuple(shift(a, d, c) for a in t.args),
        t.binder_names,
    )


def mk_app(
    sig: Signature,
    head: Head,
    args: Sequence[Term] = (),
    binders: Sequence[SimpleType] = (),
    binder_names: Sequence[str] = (),
) -> Term:
    """Canonical application: flatten A/AC spines, collapse unary groups,
    sort C/AC argument lists."""
    args = list(args)
    if isinstance(head, Const):
        axioms = sig.axioms(head.name)
        if A in axioms:
            flat: list[Term] = []
            for a in args:
                if not a.binders and a.head == head:
                    flat.extend(a.args)
                else:
                    flat.append(a)
            args = flat
            if len(args) == 1:
                only = args[0]
                return Term(
                    tuple(binders),
                    only.head,
                    only.args,
                    _pad_names(binder_names, binders),
                )
        if C in axioms:
            args.sort(key=term_key)
    return Term(tuple(binders), head, tuple(args), _pad_names(binder_names, binders))


def _pad_names(names: Sequence[str], binders: Sequence[SimpleType]) -> tuple[str, ...]:
    names = tuple(names)
    if len(names) == len(binders):
        return names
    return names[: len(binders)]


def add_binders(
    t: Term,
    binders: Sequence[SimpleType],
    names: Sequence[str] = (),
) -> Term:
    """Prefix extra lambda binders onto a term (indices already account for them)."""
    if not binders:
        return t
    if t.binders:
        return Term(
            tuple(binders) + t.binders,
            t.head,
            t.args,
            _pad_names(tuple(names) + t.binder_names, tuple(binders) + t.binders),
        )
    return Term(tuple(binders), t.head, t.args, _pad_names(names, binders))


def strip_binders(t: Term) -> Term:
    return Term((), t.head, t.args) if t.binders else t


def beta_reduce(sig: Signature, fn: Term, actuals: Sequence[Term]) -> Term:
    """Hereditary application of ``fn = \\y1..yn. body`` to k <= n arguments.

    The arguments may be open (they live at the caller's binder depth), and
    so may ``fn``: references above its own binders are renumbered for the
    k binders that disappear.  A partial application keeps the remaining
    binders in front of the result.
    """
    n = len(fn.binders)
    k = len(actuals)
    if k > n:
        raise TermError(f"arity mismatch: {n} binders, {k} arguments")
    if k == 0:
        return fn
    remaining = n - k
    env = {n - 1 - pos: shift(actual, remaining) for pos, actual in enumerate(actuals)}
    body = _bsubst(Term((), fn.head, fn.args), env, 0, sig, n, k)
    if remaining:
        return Term(
            fn.binders[k:],
            body.head,
            body.args,
            fn.binder_names[k:] if fn.binder_names else (),
        )
    return body


def _bsubst(
    t: Term,
    env: Mapping[int, Term],
    depth: int,
    sig: Signature,
    n_binders: int,
    consumed: int,
) -> Term:
    d = depth + len(t.binders)
    args = tuple(_bsubst(a, env, d, sig, n_binders, consumed) for a in t.args)
    head = t.head
    if isinstance(head, Bound) and head.index >= d:
        outer = head.index - d
        if outer in env:
            value = shift(env[outer], d)
            body = beta_reduce(sig, value, args)
            return mk_app(
                sig,
                body.head,
                body.args,
                t.binders + body.binders,
                _pad_names(t.binder_names + body.binder_names, t.binders + body.binders),
            )
        if outer >= n_binders:
            head = Bound(head.index - consumed)
    return mk_app(sig, head, args, t.binders, t.binder_names)


Substitution = Mapping[str, Term]


def apply_subst(t: Term, sigma: Substitution, sig: Signature) -> Term:
    """Capture-avoiding instance of ``t`` under a free-variable substitution.

    Range terms are self-contained lambda values, so splicing them under
    binders needs no renaming; results are re-canonicalized on the way up.
    """
    args = tuple(apply_subst(a, sigma, sig) for a in t.args)
    head = t.head
    if isinstance(head, Free) and head.name in sigma:
        value = sigma[head.name]
        body = beta_reduce(sig, value, args)
        return mk_app(
            sig,
            body.head,
            body.args,
            t.binders + body.binders,
            _pad_names(t.binder_names + body.binder_names, t.binders + body.binders),
        )
    return mk_app(sig, head, args, t.binders, t.binder_names)


def compose_subst(first: Substitution, second: Substitution, sig: Signature) -> dict[str, Term]:
    """first then second, as a single substitution."""
    out = {name: apply_subst(value, second, sig) for name, value in first.items()}
    for name, value in second.items():
        out.setdefault(name, value)
    return out


def normalize(t: Term, sig: Signature) -> Term:
    """Re-establish the canonical form bottom-up; idempotent."""
    args = tuple(normalize(a, sig) for a in t.args)
    return mk_app(sig, t.head, args, t.binders, t.binder_names)


def e_equal(t: Term, s: Term, sig: Signature) -> bool:
    """Equality modulo the axioms carried by the signature.

    Canonical representatives make this a plain comparison; inputs built
    outside the smart constructors are normalized first.
    """
    return normalize(t, sig) == normalize(s, sig)


def size(t: Term) -> int:
    n = t.__dict__.get("_size")
    if n is None:
        n = len(t.binders) + 1 + sum(size(a) for a in t.args)
        object.__setattr__(t, "_size", n)
    return n


def depth(t: Term) -> int:
    inner = 1 + (max((depth(a) for a in t.args), default=0))
    return len(t.binders) + inner


def head(t: Term) -> Head:
    return t.head


def free_vars(t: Term) -> set[str]:
    out = set()
    if isinstance(t.head, Free):
        out.add(t.head.name)
    for a in t.args:
        out |= free_vars(a)
    return out


def free_bound_indices(t: Term, depth_: int = 0) -> set[int]:
    """Ambient bound indices (relative to the term's root) occurring free."""
    d = depth_ + len(t.binders)
    out: set[int] = set()
    if isinstance(t.head, Bound) and t.head.index >= d:
        out.add(t.head.index - d)
    for a in t.args:
        out |= free_bound_indices(a, d)
    return out


def eta_var_index(t: Term) -> int | None:
    """Root-relative ambient index if ``t`` is the eta-long form of a bound
    variable, else None."""
    p = len(t.binders)
    if not isinstance(t.head, Bound) or t.head.index < p:
        return None
    if len(t.args) != p:
        return None
    for pos, a in enumerate(t.args):
        if eta_var_index(a) != p - 1 - pos:
            return None
    return t.head.index - p


def is_pattern(t: Term) -> bool:
    """True iff every free variable is applied to distinct bound variables."""
    return _pattern_ok(t)


def _pattern_ok(t: Term) -> bool:
    if isinstance(t.head, Free):
        seen = set()
        for a in t.args:
            idx = eta_var_index(a)
            if idx is None or idx in seen:
                return False
            seen.add(idx)
        return True
    return all(_pattern_ok(a) for a in t.args)


def bound_var(index: int, ty: SimpleType) -> Term:
    """Eta-long occurrence of an ambient bound variable of the given type."""
    arg_tys = argument_types(ty)
    p = len(arg_tys)
    args = tuple(bound_var(p - 1 - pos, arg_tys[pos]) for pos in range(p))
    return Term(tuple(arg_tys), Bound(index + p), args)


def reindex(t: Term, mapping: Mapping[int, int], depth_: int = 0) -> Term:
    """Rename ambient bound indices via ``mapping`` (total on occurring indices)."""
    d = depth_ + len(t.binders)
    head_ = t.head
    if isinstance(head_, Bound) and head_.index >= d:
        head_ = Bound(mapping[head_.index - d] + d)
    return Term(
        t.binders,
        head_,
        tuple(reindex(a, mapping, d) for a in t.args),
        t.binder_names,
    )


def rename_free(t: Term, mapping: Mapping[str, str]) -> Term:
    head_ = t.head
    if isinstance(head_, Free) and head_.name in mapping:
        head_ = Free(mapping[head_.name])
    return Term(
        t.binders,
        head_,
        tuple(rename_free(a, mapping) for a in t.args),
        t.binder_names,
    )


def canonical_var_order(t: Term) -> list[str]:
    """Free variables in order of first occurrence (left-to-right, outside-in)."""
    seen: set[str] = set()
    order: list[str] = []

    def walk(u: Term) -> None:
        if isinstance(u.head, Free) and u.head.name not in seen:
            seen.add(u.head.name)
            order.append(u.head.name)
        for a in u.args:
            walk(a)

    walk(t)
    return order


def infer_type(
    t: Term,
    sig: Signature,
    ctx: Sequence[SimpleType] = (),
    free_types: Mapping[str, SimpleType] | None = None,
) -> SimpleType:
    """Type of a term under a binder context; raises TermError when ill-typed
    or when the body is not of base type (eta-long shape violation)."""
    ctx = list(ctx) + list(t.binders)
    h = t.head
    if isinstance(h, Const):
        ht = sig.type_of(h.name)
    elif isinstance(h, Bound):
        if h.index >= len(ctx):
            raise TermError(f"unbound index {h.index}")
        ht = ctx[len(ctx) - 1 - h.index]
    else:
        if free_types is None or h.name not in free_types:
            raise TermError(f"unknown free variable {h.name!r}")
        ht = free_types[h.name]
    args = list(t.args)
    if isinstance(h, Const) and sig.is_assoc(h.name) and len(args) >= 2:
        # variadic view of an A/AC constant: all arguments share the base type
        base = result_type(ht)
        for a in args:
            got = infer_type(a, sig, ctx, free_types)
            if got != base:
                raise TermError(f"argument of {h.name} has type {got}, expected {base}")
        body = base
    else:
        ty = ht
        for a in args:
            if not isinstance(ty, ArrowType):
                raise TermError(f"head {h} applied to too many arguments")
            got = infer_type(a, sig, ctx, free_types)
            if got != ty.arg:
                raise TermError(f"argument type {got}, expected {ty.arg}")
            ty = ty.result
        body = ty
    if not isinstance(body, BaseType):
        raise TermError("spine body must have base type (term not eta-long)")
    return arrow(*t.binders, body) if t.binders else body


def validate(
    t: Term,
    sig: Signature,
    ctx: Sequence[SimpleType] = (),
    free_types: Mapping[str, SimpleType] | None = None,
) -> SimpleType:
    """Type plus representation invariants (flattened, collapsed, sorted)."""
    ty = infer_type(t, sig, ctx, free_types)
    _check_canonical(t, sig)
    return ty


def _check_canonical(t: Term, sig: Signature) -> None:
    h = t.head
    if isinstance(h, Const) and sig.is_assoc(h.name):
        if len(t.args) < 2:
            raise TermError(f"unary application of associative {h.name} not collapsed")
        for a in t.args:
            if not a.binders and a.head == h:
                raise TermError(f"argument of {h.name} not flattened")
    if isinstance(h, Const) and sig.is_comm(h.name):
        keys = [term_key(a) for a in t.args]
        if keys != sorted(keys):
            raise TermError(f"arguments of commutative {h.name} not sorted")
    for a in t.args:
        _check_canonical(a, sig)
