"""Base calculus for higher-order pattern generalization in the empty theory.

States are triples (pending problems; store of solved problems; substitution).
The four transformations — decompose equal heads, strip matching binders,
solve clashes into the store, and merge store entries equal up to a bound
variable bijection — run to exhaustion on a work list.  On canonical terms
the merge comparison doubles as comparison modulo the signature axioms,
which is exactly what the equational extensions need.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .terms import (
    AUP_PREFIX,
    Bound,
    Const,
    Free,
    Signature,
    SimpleType,
    Term,
    TermError,
    add_binders,
    beta_reduce,
    bound_var,
    canonical_var_order,
    free_bound_indices,
    free_vars,
    mk_app,
    rename_free,
    reindex,
    size,
    strip_binders,
)


@dataclass(frozen=True, eq=False)
class GeneralizationResult:
    """A pattern generalization together with its two witness substitutions."""

    term: Term
    theta_left: dict[str, Term]
    theta_right: dict[str, Term]

# Toggled by tests: assert the termination measure at every derivation step.
CHECK_MEASURE = False


@dataclass(frozen=True)
class AUP:
    """One anti-unification problem: var(ctx): left =^= right.

    ``left`` and ``right`` are open terms under the shared binder context
    (outermost first); the generalization variable is an internal integer id.
    """

    var: int
    ctx: tuple[SimpleType, ...]
    ctx_names: tuple[str, ...]
    left: Term
    right: Term

    def measure(self) -> int:
        return size(self.left) + size(self.right)


@dataclass
class State:
    pending: deque[AUP]
    store: list[AUP]
    sigma: dict[int, Term]
    counter: itertools.count
    steps: int = 0

    def fresh(self) -> int:
        return next(self.counter)


def initial_state(left: Term, right: Term) -> tuple[State, int]:
    counter = itertools.count()
    root = next(counter)
    state = State(
        pending=deque([AUP(root, (), (), left, right)]),
        store=[],
        sigma={},
        counter=counter,
    )
    return state, root


def var_term(vid: int) -> Free:
    return Free(f"{AUP_PREFIX}{vid}")


def var_id(head: Free) -> int | None:
    if head.name.startswith(AUP_PREFIX):
        return int(head.name[len(AUP_PREFIX):])
    return None


def ctx_var(ctx: Sequence[SimpleType], position: int) -> Term:
    """Eta-long occurrence of the context variable at ``position`` (outermost
    first), as seen under the full context."""
    return bound_var(len(ctx) - 1 - position, ctx[position])


def applied_var(vid: int, ctx: Sequence[SimpleType], positions: Sequence[int]) -> Term:
    args = tuple(ctx_var(ctx, p) for p in positions)
    return Term((), var_term(vid), args)


def _record_measure(state: State, removed: AUP, added: Sequence[AUP]) -> None:
    if CHECK_MEASURE:
        r = removed.measure()
        bad = [a.measure() for a in added if a.measure() >= r]
        if bad:
            raise AssertionError(f"measure did not decrease: {r} -> {bad}")
    state.steps += 1


def step_abs(state: State, aup: AUP, sig: Signature) -> AUP:
    """Strip the (equal-typed) leading binders of both terms, extending the
    context; the right binder names are renamed to the left ones."""
    assert aup.left.binders and aup.right.binders
    if aup.left.binders != aup.right.binders:
        raise TermError("abstraction types differ")
    names = aup.left.binder_names or tuple(f"x{i}" for i in range(len(aup.left.binders)))
    new_ctx = aup.ctx + aup.left.binders
    new_names = aup.ctx_names + names
    child = AUP(state.fresh(), new_ctx, new_names, strip_binders(aup.left), strip_binders(aup.right))
    template = add_binders(
        applied_var(child.var, new_ctx, range(len(new_ctx))),
        new_ctx,
        new_names,
    )
    state.sigma[aup.var] = template
    state.pending.appendleft(child)
    _record_measure(state, aup, [child])
    return child


def step_dec(state: State, aup: AUP, sig: Signature) -> list[AUP]:
    """Same rigid head on both sides with equal arity: pair the arguments."""
    t, s = aup.left, aup.right
    assert not t.binders and not s.binders
    assert t.head == s.head and len(t.args) == len(s.args)
    children = []
    head_args = []
    for ta, sa in zip(t.args, s.args):
        child = AUP(state.fresh(), aup.ctx, aup.ctx_names, ta, sa)
        children.append(child)
        head_args.append(applied_var(child.var, aup.ctx, range(len(aup.ctx))))
    template = add_binders(
        Term((), t.head, tuple(head_args)), aup.ctx, aup.ctx_names
    )
    state.sigma[aup.var] = template
    for child in reversed(children):
        state.pending.appendleft(child)
    _record_measure(state, aup, children)
    return children


def step_sol(state: State, aup: AUP, sig: Signature) -> AUP:
    """Move a clash to the store, restricting the context to the variables
    that actually occur."""
    t, s = aup.left, aup.right
    used = free_bound_indices(t) | free_bound_indices(s)
    n = len(aup.ctx)
    positions = sorted(n - 1 - i for i in used)
    sub_ctx = tuple(aup.ctx[p] for p in positions)
    sub_names = tuple(aup.ctx_names[p] for p in positions) if aup.ctx_names else ()
    k = len(positions)
    mapping = {n - 1 - p: k - 1 - rank for rank, p in enumerate(positions)}
    entry = AUP(state.fresh(), sub_ctx, sub_names, reindex(t, mapping), reindex(s, mapping))
    state.store.append(entry)
    template = add_binders(
        applied_var(entry.var, aup.ctx, positions), aup.ctx, aup.ctx_names
    )
    state.sigma[aup.var] = template
    _record_measure(state, aup, [])
    return entry


def _bijections(ctx_a: Sequence[SimpleType], ctx_b: Sequence[SimpleType]) -> Iterable[tuple[int, ...]]:
    """Type-respecting bijections as tuples: position p of a -> pi[p] of b."""
    n = len(ctx_a)
    if n != len(ctx_b):
        return
    if sorted(map(str, ctx_a)) != sorted(map(str, ctx_b)):
        return
    for perm in itertools.permutations(range(n)):
        if all(ctx_a[p] == ctx_b[perm[p]] for p in range(n)):
            yield perm


def _erase_indices(t: Term) -> Term:
    """Bound indices blurred out; equal up to a context bijection implies
    equal erased skeletons, so this is a sound merge pre-filter."""
    head_ = Bound(0) if isinstance(t.head, Bound) else t.head
    return Term(t.binders, head_, tuple(_erase_indices(a) for a in t.args))


def _merge_key(entry: AUP) -> tuple:
    return (
        len(entry.ctx),
        tuple(sorted(map(str, entry.ctx))),
        hash(_erase_indices(entry.left)),
        hash(_erase_indices(entry.right)),
    )


def try_merge(keep: AUP, drop: AUP) -> tuple[int, ...] | None:
    """Bijection pi with keep.left*pi == drop.left and keep.right*pi ==
    drop.right, if one exists."""
    n = len(keep.ctx)
    for perm in _bijections(keep.ctx, drop.ctx):
        mapping = {n - 1 - p: n - 1 - perm[p] for p in range(n)}
        if reindex(keep.left, mapping) == drop.left and reindex(keep.right, mapping) == drop.right:
            return perm
    return None


def step_mer(state: State, sig: Signature) -> int:
    """Merge store entries pairwise; the entry with the smaller variable id
    survives.  Returns the number of merges performed."""
    merged = 0
    entries = sorted(state.store, key=lambda e: e.var)
    groups: dict[tuple, list[AUP]] = {}
    kept: list[AUP] = []
    for entry in entries:
        key = _merge_key(entry)
        done = False
        for other in groups.get(key, ()):
            perm = try_merge(other, entry)
            if perm is not None:
                args = tuple(ctx_var(entry.ctx, perm[p]) for p in range(len(perm)))
                state.sigma[entry.var] = add_binders(
                    Term((), var_term(other.var), args), entry.ctx, entry.ctx_names
                )
                merged += 1
                state.steps += 1
                done = True
                break
        if not done:
            groups.setdefault(key, []).append(entry)
            kept.append(entry)
    state.store = kept
    return merged


def run_base(state: State, sig: Signature, *, decompose_equational: bool = True) -> None:
    """Exhaust the base rules on the pending list, then merge the store.

    ``decompose_equational`` keeps equal-arity applications of equational
    symbols eligible for plain decomposition (they are treated as free).
    """
    while state.pending:
        aup = state.pending.popleft()
        t, s = aup.left, aup.right
        if t.binders or s.binders:
            step_abs(state, aup, sig)
            continue
        if _dec_applicable(t, s, sig, decompose_equational):
            step_dec(state, aup, sig)
        else:
            step_sol(state, aup, sig)
    step_mer(state, sig)


def _dec_applicable(t: Term, s: Term, sig: Signature, decompose_equational: bool) -> bool:
    if t.head != s.head or len(t.args) != len(s.args):
        return False
    if isinstance(t.head, Free):
        return False
    if (
        isinstance(t.head, Const)
        and sig.is_equational(t.head.name)
        and not decompose_equational
    ):
        return False
    return True


# ---------------------------------------------------------------------------
# Result assembly


def expand(vid: int, sigma: dict[int, Term], sig: Signature) -> Term:
    """Resolve a generalization variable through the accumulated substitution,
    leaving store variables in place."""
    memo: dict[int, Term | None] = {}

    def deep(v: int) -> Term | None:
        if v in memo:
            return memo[v]
        template = sigma.get(v)
        value = walk(template) if template is not None else None
        memo[v] = value
        return value

    def walk(t: Term) -> Term:
        args = tuple(walk(a) for a in t.args)
        if isinstance(t.head, Free):
            inner = var_id(t.head)
            if inner is not None:
                resolved = deep(inner)
                if resolved is not None:
                    body = beta_reduce(sig, resolved, args)
                    names = (t.binder_names + body.binder_names)[: len(t.binders + body.binders)]
                    return mk_app(sig, body.head, body.args, t.binders + body.binders, names)
        return mk_app(sig, t.head, args, t.binders, t.binder_names)

    value = deep(vid)
    if value is None:
        return Term((), var_term(vid))
    return value


def display_names(result: Term, reserved: set[str]) -> dict[str, str]:
    """Stable Y0, Y1, ... names for the internal generalization variables, in
    order of first occurrence, avoiding the originally free names."""
    mapping: dict[str, str] = {}
    counter = 0
    for name in canonical_var_order(result):
        if not name.startswith(AUP_PREFIX):
            continue
        while f"Y{counter}" in reserved:
            counter += 1
        mapping[name] = f"Y{counter}"
        counter += 1
    return mapping


def assemble_result(
    root: int,
    state: State,
    sig: Signature,
    reserved: set[str],
) -> GeneralizationResult:
    result = expand(root, state.sigma, sig)
    mapping = display_names(result, reserved)
    term = rename_free(result, mapping)
    theta_left: dict[str, Term] = {}
    theta_right: dict[str, Term] = {}
    for entry in state.store:
        internal = var_term(entry.var).name
        if internal not in mapping:
            continue
        name = mapping[internal]
        theta_left[name] = add_binders(entry.left, entry.ctx, entry.ctx_names)
        theta_right[name] = add_binders(entry.right, entry.ctx, entry.ctx_names)
    return GeneralizationResult(term, theta_left, theta_right)


def syntactic_lgg(t: Term, s: Term, sig: Signature) -> GeneralizationResult:
    """Least general higher-order pattern generalization in the empty theory.

    Equational symbols are treated as free: equal heads decompose only when
    the (flattened) arities agree.
    """
    state, root = initial_state(t, s)
    run_base(state, sig)
    reserved = free_vars(t) | free_vars(s)
    return assemble_result(root, state, sig, reserved)


def canonical_result_term(t: Term) -> Term:
    """Rename free variables in order of first occurrence; used to compare
    and de-duplicate generalizations up to renaming."""
    mapping = {name: f"${i}" for i, name in enumerate(canonical_var_order(t))}
    return rename_free(t, mapping)
