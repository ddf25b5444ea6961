"""Deliberately slow reference implementations used to cross-check the engine.

Equality is decided by closing one term under single axiom rewrites on
explicit binary trees; generalization sets are enumerated by plain
recursion over every split the decomposition rules allow, merged and
minimized afterwards.  Nothing here shares search machinery with the
engine modules.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .terms import (
    A,
    C,
    BudgetExceeded,
    Bound,
    Const,
    Free,
    Signature,
    SimpleType,
    Term,
    add_binders,
    apply_subst,
    bound_var,
    free_bound_indices,
    mk_app,
    reindex,
    term_key,
)
from .equational import MatchBudget, more_general


@dataclass(frozen=True)
class OracleBudget:
    max_closure: int = 20_000
    max_results: int = 50_000
    max_match: int = 500_000

    def __post_init__(self) -> None:
        if min(self.max_closure, self.max_results, self.max_match) <= 0:
            raise ValueError("budgets must be positive")


# ---------------------------------------------------------------------------
# Naive equality modulo axioms


def _binarize(t: Term, sig: Signature) -> Term:
    """Right-nested binary view of flattened applications; built raw so that
    no canonical sorting interferes with the rewrite closure."""
    args = [_binarize(a, sig) for a in t.args]
    h = t.head
    if isinstance(h, Const) and sig.is_assoc(h.name) and len(args) > 2:
        node = Term((), h, (args[-2], args[-1]))
        for a in reversed(args[:-2]):
            node = Term((), h, (a, node))
        return Term(t.binders, node.head, node.args, t.binder_names)
    return Term(t.binders, h, tuple(args), t.binder_names)


def _rewrites(t: Term, sig: Signature) -> Iterable[Term]:
    """All terms reachable by one axiom application at one position."""
    h = t.head
    if isinstance(h, Const) and len(t.args) == 2:
        x, y = t.args
        axioms = sig.axioms(h.name)
        if A in axioms:
            if not y.binders and y.head == h and len(y.args) == 2:
                p, q = y.args
                yield Term(t.binders, h, (Term((), h, (x, p)), q), t.binder_names)
            if not x.binders and x.head == h and len(x.args) == 2:
                p, q = x.args
                yield Term(t.binders, h, (p, Term((), h, (q, y))), t.binder_names)
        if C in axioms:
            yield Term(t.binders, h, (y, x), t.binder_names)
    for i, a in enumerate(t.args):
        for b in _rewrites(a, sig):
            args = list(t.args)
            args[i] = b
            yield Term(t.binders, t.head, tuple(args), t.binder_names)


def e_equal_naive(t: Term, s: Term, sig: Signature, budget: OracleBudget = OracleBudget()) -> bool:
    """Close one side under single axiom rewrites; equal iff the other side
    appears in the closure (alpha-equivalence is structural equality)."""
    start = _binarize(t, sig)
    goal = _binarize(s, sig)
    if start == goal:
        return True
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in _rewrites(u, sig):
            if v in seen:
                continue
            if v == goal:
                return True
            seen.add(v)
            if len(seen) > budget.max_closure:
                raise BudgetExceeded("rewrite closure budget exhausted")
            queue.append(v)
    return False


# ---------------------------------------------------------------------------
# Brute-force generalization enumeration


@dataclass(frozen=True)
class _Leaf:
    var: int
    ctx: tuple[SimpleType, ...]
    left: Term
    right: Term


def _leaf_name(vid: int) -> str:
    return f"!{vid}"


def _solve(t: Term, s: Term, ctx: tuple[SimpleType, ...], fresh) -> tuple[Term, tuple[_Leaf, ...]]:
    used = free_bound_indices(t) | free_bound_indices(s)
    n = len(ctx)
    positions = sorted(n - 1 - i for i in used)
    sub_ctx = tuple(ctx[p] for p in positions)
    k = len(positions)
    mapping = {n - 1 - p: k - 1 - rank for rank, p in enumerate(positions)}
    vid = next(fresh)
    leaf = _Leaf(vid, sub_ctx, reindex(t, mapping), reindex(s, mapping))
    args = tuple(bound_var(n - 1 - p, ctx[p]) for p in positions)
    return Term((), Free(_leaf_name(vid)), args), (leaf,)


def _enumerate(t, s, ctx, sig, fresh, budget, counter) -> list[tuple[Term, tuple[_Leaf, ...]]]:
    counter[0] += 1
    if counter[0] > budget.max_results:
        raise BudgetExceeded("generalization enumeration budget exhausted")
    if t.binders or s.binders:
        if t.binders != s.binders:
            raise ValueError("inputs must share one type")
        inner = _enumerate(
            Term((), t.head, t.args),
            Term((), s.head, s.args),
            ctx + t.binders,
            sig,
            fresh,
            budget,
            counter,
        )
        return [
            (add_binders(r, t.binders, t.binder_names), leaves) for r, leaves in inner
        ]
    f = t.head
    out: list[tuple[Term, tuple[_Leaf, ...]]] = []
    if (
        isinstance(f, Const)
        and sig.is_equational(f.name)
        and s.head == f
        and len(t.args) >= 2
        and len(s.args) >= 2
    ):
        axioms = sig.axioms(f.name)
        n, m = len(t.args), len(s.args)
        splits: list[tuple[tuple[Term, Term], tuple[Term, Term]]] = []

        def grp(args):
            return mk_app(sig, f, tuple(args))

        if axioms == frozenset({A}):
            for k in range(1, n):
                splits.append(
                    ((grp(t.args[:k]), s.args[0]), (grp(t.args[k:]), grp(s.args[1:])))
                )
            for k in range(1, m):
                splits.append(
                    ((t.args[0], grp(s.args[:k])), (grp(t.args[1:]), grp(s.args[k:])))
                )
        elif axioms == frozenset({C}):
            for i in (1, 2):
                splits.append(
                    ((t.args[0], s.args[i - 1]), (t.args[1], s.args[i % 2]))
                )
        else:
            for r in range(1, n):
                for chosen in itertools.combinations(range(n), r):
                    rest = [t.args[p] for p in range(n) if p not in chosen]
                    for pivot in range(m):
                        rest_s = [s.args[p] for p in range(m) if p != pivot]
                        splits.append(
                            (
                                (grp([t.args[p] for p in chosen]), s.args[pivot]),
                                (grp(rest), grp(rest_s)),
                            )
                        )
            for r in range(1, m):
                for chosen in itertools.combinations(range(m), r):
                    rest_s = [s.args[p] for p in range(m) if p not in chosen]
                    for pivot in range(n):
                        rest = [t.args[p] for p in range(n) if p != pivot]
                        splits.append(
                            (
                                (t.args[pivot], grp([s.args[p] for p in chosen])),
                                (grp(rest), grp(rest_s)),
                            )
                        )
        for (l1, r1), (l2, r2) in splits:
            for g1, leaves1 in _enumerate(l1, r1, ctx, sig, fresh, budget, counter):
                for g2, leaves2 in _enumerate(l2, r2, ctx, sig, fresh, budget, counter):
                    out.append((mk_app(sig, f, (g1, g2)), leaves1 + leaves2))
        return out
    rigid = isinstance(f, (Const, Bound)) and not isinstance(f, Free)
    if rigid and s.head == f and len(t.args) == len(s.args):
        combos: list[tuple[tuple[Term, ...], tuple[_Leaf, ...]]] = [((), ())]
        for ta, sa in zip(t.args, s.args):
            nxt = []
            for g, leaves in _enumerate(ta, sa, ctx, sig, fresh, budget, counter):
                for done, acc in combos:
                    nxt.append((done + (g,), acc + leaves))
            combos = nxt
        return [(mk_app(sig, f, args), leaves) for args, leaves in combos]
    return [_solve(t, s, ctx, fresh)]


def _merge_leaves(term: Term, leaves: tuple[_Leaf, ...], sig: Signature) -> Term:
    """Identify leaves equal up to a bound-variable bijection, keeping the
    earliest variable."""
    kept: list[_Leaf] = []
    for leaf in sorted(leaves, key=lambda e: e.var):
        target = None
        perm_found = None
        for other in kept:
            if len(other.ctx) != len(leaf.ctx):
                continue
            for perm in itertools.permutations(range(len(other.ctx))):
                if any(other.ctx[p] != leaf.ctx[perm[p]] for p in range(len(perm))):
                    continue
                n = len(perm)
                mapping = {n - 1 - p: n - 1 - perm[p] for p in range(n)}
                if (
                    reindex(other.left, mapping) == leaf.left
                    and reindex(other.right, mapping) == leaf.right
                ):
                    target = other
                    perm_found = perm
                    break
            if target is not None:
                break
        if target is None:
            kept.append(leaf)
        else:
            n = len(perm_found)
            args = tuple(
                bound_var(n - 1 - perm_found[p], leaf.ctx[perm_found[p]])
                for p in range(n)
            )
            value = add_binders(Term((), Free(_leaf_name(target.var)), args), leaf.ctx)
            term = apply_subst(term, {_leaf_name(leaf.var): value}, sig)
    return term


def brute_force_generalizations(
    t: Term, s: Term, sig: Signature, budget: OracleBudget = OracleBudget()
) -> list[Term]:
    """Every generalization any maximal derivation computes, merged but not
    minimized, de-duplicated up to renaming."""
    fresh = itertools.count()
    counter = [0]
    raw = _enumerate(t, s, (), sig, fresh, budget, counter)
    seen: set[Term] = set()
    out: list[Term] = []
    for term, leaves in raw:
        merged = _merge_leaves(term, leaves, sig)
        key = _canonical(merged)
        if key not in seen:
            seen.add(key)
            out.append(key)
    out.sort(key=term_key)
    return out


def _canonical(t: Term) -> Term:
    from .syntactic import canonical_result_term

    return canonical_result_term(t)


def brute_force_mcsg(
    t: Term, s: Term, sig: Signature, budget: OracleBudget = OracleBudget()
) -> list[Term]:
    """Minimal complete set of generalizations by exhaustive enumeration and
    pairwise comparison."""
    gens = brute_force_generalizations(t, s, sig, budget)
    survivors: list[Term] = []
    for g in gens:
        dominated = False
        for h in gens:
            if g is h:
                continue
            g_le_h = more_general(g, h, sig, MatchBudget(budget.max_match))
            h_le_g = more_general(h, g, sig, MatchBudget(budget.max_match))
            if g_le_h and not h_le_g:
                dominated = True
                break
        if not dominated:
            survivors.append(g)
    kept: list[Term] = []
    for g in survivors:
        if not any(
            more_general(g, h, sig, MatchBudget(budget.max_match))
            and more_general(h, g, sig, MatchBudget(budget.max_match))
            for h in kept
        ):
            kept.append(g)
    return kept
