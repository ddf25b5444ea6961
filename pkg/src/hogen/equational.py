"""Equational decomposition and complete sets of generalizations.

Applications of associative symbols split into two argument groups around a
pivot; commutative symbols swap their two arguments; symbols carrying both
axioms pick an arbitrary argument subset against an arbitrary pivot.  The
complete-set search exhausts every such choice breadth-first, closing each
finished branch with the base rules, and de-duplicates results up to
renaming.  Minimization prunes everything strictly more general than
another element, using a brute-force matcher modulo the axioms.
"""

from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .terms import (
    A,
    C,
    BudgetExceeded,
    Const,
    Free,
    Signature,
    Term,
    add_binders,
    beta_reduce,
    eta_var_index,
    free_bound_indices,
    free_vars,
    mk_app,
    reindex,
    rename_free,
    term_key,
)
from .syntactic import (
    AUP,
    GeneralizationResult,
    State,
    applied_var,
    assemble_result,
    canonical_result_term,
    initial_state,
    step_abs,
    step_dec,
    step_mer,
    step_sol,
    _dec_applicable,
    _record_measure,
)


def _group(sig: Signature, f: Const, args: Sequence[Term]) -> Term:
    """Argument group of an A/AC split; a single argument stands for itself."""
    if not args:
        raise ValueError("empty argument group")
    return mk_app(sig, f, tuple(args))


def _split_template(state: State, aup: AUP, sig: Signature, f: Const, pairs) -> list[AUP]:
    """Install X -> \\ctx. f(Y1(ctx), Y2(ctx)) and return the two child AUPs."""
    children = []
    head_args = []
    for left, right in pairs:
        child = AUP(state.fresh(), aup.ctx, aup.ctx_names, left, right)
        children.append(child)
        head_args.append(applied_var(child.var, aup.ctx, range(len(aup.ctx))))
    state.sigma[aup.var] = add_binders(
        Term((), f, tuple(head_args)), aup.ctx, aup.ctx_names
    )
    for child in reversed(children):
        state.pending.appendleft(child)
    _record_measure(state, aup, children)
    return children


def dec_a_left(state: State, aup: AUP, sig: Signature, k: int) -> list[AUP]:
    """Split the left argument list after position k against the first right
    argument: f(t1..tk) =^= s1 and f(t(k+1)..tn) =^= f(s2..sm)."""
    t, s = aup.left, aup.right
    f = t.head
    n, m = len(t.args), len(s.args)
    if not (isinstance(f, Const) and sig.is_assoc(f.name) and s.head == f):
        raise ValueError("associative decomposition needs a shared A/AC head")
    if not (n >= 2 and m >= 2 and 1 <= k <= n - 1):
        raise ValueError(f"split index {k} out of range for arities {n}, {m}")
    pairs = [
        (_group(sig, f, t.args[:k]), s.args[0]),
        (_group(sig, f, t.args[k:]), _group(sig, f, s.args[1:])),
    ]
    return _split_template(state, aup, sig, f, pairs)


def dec_a_right(state: State, aup: AUP, sig: Signature, k: int) -> list[AUP]:
    """Mirror image: t1 =^= f(s1..sk) and f(t2..tn) =^= f(s(k+1)..sm)."""
    t, s = aup.left, aup.right
    f = t.head
    n, m = len(t.args), len(s.args)
    if not (isinstance(f, Const) and sig.is_assoc(f.name) and s.head == f):
        raise ValueError("associative decomposition needs a shared A/AC head")
    if not (n >= 2 and m >= 2 and 1 <= k <= m - 1):
        raise ValueError(f"split index {k} out of range for arities {n}, {m}")
    pairs = [
        (t.args[0], _group(sig, f, s.args[:k])),
        (_group(sig, f, t.args[1:]), _group(sig, f, s.args[k:])),
    ]
    return _split_template(state, aup, sig, f, pairs)


def dec_c(state: State, aup: AUP, sig: Signature, i: int) -> list[AUP]:
    """Commutative decomposition: t1 =^= s_i, t2 =^= s_other."""
    t, s = aup.left, aup.right
    f = t.head
    if not (isinstance(f, Const) and sig.axioms(f.name) == frozenset({C}) and s.head == f):
        raise ValueError("commutative decomposition needs a shared C head")
    if i not in (1, 2):
        raise ValueError("branch index must be 1 or 2")
    si = s.args[i - 1]
    sother = s.args[i % 2]
    pairs = [(t.args[0], si), (t.args[1], sother)]
    return _split_template(state, aup, sig, f, pairs)


def dec_ac_left(
    state: State,
    aup: AUP,
    sig: Signature,
    selection: Sequence[int],
    pivot: int,
) -> list[AUP]:
    """AC decomposition: the selected left arguments (1-based positions)
    against the right pivot argument, remainder against remainder."""
    t, s = aup.left, aup.right
    f = t.head
    n, m = len(t.args), len(s.args)
    if not (isinstance(f, Const) and sig.axioms(f.name) == frozenset({A, C}) and s.head == f):
        raise ValueError("AC decomposition needs a shared AC head")
    chosen = sorted(set(selection))
    if not (n >= 2 and m >= 2 and 1 <= len(chosen) <= n - 1 and 1 <= pivot <= m):
        raise ValueError("selection or pivot out of range")
    if chosen[0] < 1 or chosen[-1] > n:
        raise ValueError("selection out of range")
    rest_left = [t.args[p] for p in range(n) if (p + 1) not in chosen]
    rest_right = [s.args[p] for p in range(m) if (p + 1) != pivot]
    pairs = [
        (_group(sig, f, [t.args[p - 1] for p in chosen]), s.args[pivot - 1]),
        (_group(sig, f, rest_left), _group(sig, f, rest_right)),
    ]
    return _split_template(state, aup, sig, f, pairs)


def dec_ac_right(
    state: State,
    aup: AUP,
    sig: Signature,
    selection: Sequence[int],
    pivot: int,
) -> list[AUP]:
    """Mirror image of the AC split: left pivot against selected right group."""
    t, s = aup.left, aup.right
    f = t.head
    n, m = len(t.args), len(s.args)
    if not (isinstance(f, Const) and sig.axioms(f.name) == frozenset({A, C}) and s.head == f):
        raise ValueError("AC decomposition needs a shared AC head")
    chosen = sorted(set(selection))
    if not (n >= 2 and m >= 2 and 1 <= len(chosen) <= m - 1 and 1 <= pivot <= n):
        raise ValueError("selection or pivot out of range")
    rest_left = [t.args[p] for p in range(n) if (p + 1) != pivot]
    rest_right = [s.args[p] for p in range(m) if (p + 1) not in chosen]
    pairs = [
        (t.args[pivot - 1], _group(sig, f, [s.args[p - 1] for p in chosen])),
        (_group(sig, f, rest_left), _group(sig, f, rest_right)),
    ]
    return _split_template(state, aup, sig, f, pairs)


# ---------------------------------------------------------------------------
# Exhaustive search


@dataclass
class SearchStats:
    states_explored: int = 0
    branches: int = 0


@dataclass
class CompleteSetOutcome:
    results: list[GeneralizationResult]
    truncated: bool
    stats: SearchStats


def _instances(aup: AUP, sig: Signature) -> list[tuple]:
    """All applicable decomposition choices for one problem, de-duplicated by
    the argument pairs they would produce."""
    t, s = aup.left, aup.right
    if t.binders or s.binders:
        return [("abs",)]
    f = t.head
    if (
        isinstance(f, Const)
        and sig.is_equational(f.name)
        and s.head == f
        and len(t.args) >= 2
        and len(s.args) >= 2
    ):
        axioms = sig.axioms(f.name)
        out: list[tuple] = []
        seen: set[tuple] = set()

        def push(tag, *params, pairs):
            # positional: the split template recombines the pairs in order
            key = tuple((term_key(a), term_key(b)) for a, b in pairs)
            if key not in seen:
                seen.add(key)
                out.append((tag, *params))

        n, m = len(t.args), len(s.args)
        if axioms == frozenset({A}):
            for k in range(1, n):
                push(
                    "a-left",
                    k,
                    pairs=[
                        (_group(sig, f, t.args[:k]), s.args[0]),
                        (_group(sig, f, t.args[k:]), _group(sig, f, s.args[1:])),
                    ],
                )
            for k in range(1, m):
                push(
                    "a-right",
                    k,
                    pairs=[
                        (t.args[0], _group(sig, f, s.args[:k])),
                        (_group(sig, f, t.args[1:]), _group(sig, f, s.args[k:])),
                    ],
                )
        elif axioms == frozenset({C}):
            for i in (1, 2):
                push(
                    "c",
                    i,
                    pairs=[(t.args[0], s.args[i - 1]), (t.args[1], s.args[i % 2])],
                )
        else:
            for r in range(1, n):
                for chosen in itertools.combinations(range(1, n + 1), r):
                    for pivot in range(1, m + 1):
                        rest_left = [t.args[p] for p in range(n) if (p + 1) not in chosen]
                        rest_right = [s.args[p] for p in range(m) if (p + 1) != pivot]
                        push(
                            "ac-left",
                            chosen,
                            pivot,
                            pairs=[
                                (_group(sig, f, [t.args[p - 1] for p in chosen]), s.args[pivot - 1]),
                                (_group(sig, f, rest_left), _group(sig, f, rest_right)),
                            ],
                        )
            for r in range(1, m):
                for chosen in itertools.combinations(range(1, m + 1), r):
                    for pivot in range(1, n + 1):
                        rest_left = [t.args[p] for p in range(n) if (p + 1) != pivot]
                        rest_right = [s.args[p] for p in range(m) if (p + 1) not in chosen]
                        push(
                            "ac-right",
                            chosen,
                            pivot,
                            pairs=[
                                (t.args[pivot - 1], _group(sig, f, [s.args[p - 1] for p in chosen])),
                                (_group(sig, f, rest_left), _group(sig, f, rest_right)),
                            ],
                        )
        return out
    if _dec_applicable(t, s, sig, decompose_equational=False):
        return [("dec",)]
    return [("sol",)]


def _apply_instance(state: State, aup: AUP, sig: Signature, instance: tuple) -> None:
    tag = instance[0]
    if tag == "abs":
        step_abs(state, aup, sig)
    elif tag == "dec":
        step_dec(state, aup, sig)
    elif tag == "sol":
        step_sol(state, aup, sig)
    elif tag == "a-left":
        dec_a_left(state, aup, sig, instance[1])
    elif tag == "a-right":
        dec_a_right(state, aup, sig, instance[1])
    elif tag == "c":
        dec_c(state, aup, sig, instance[1])
    elif tag == "ac-left":
        dec_ac_left(state, aup, sig, instance[1], instance[2])
    elif tag == "ac-right":
        dec_ac_right(state, aup, sig, instance[1], instance[2])
    else:
        raise ValueError(f"unknown instance {instance!r}")


def _clone(state: State) -> State:
    clone = State(
        pending=deque(state.pending),
        store=list(state.store),
        sigma=dict(state.sigma),
        counter=itertools.count(next(state.counter)),
        steps=state.steps,
    )
    return clone


def complete_set(
    t: Term,
    s: Term,
    sig: Signature,
    *,
    max_states: int | None = None,
    max_results: int | None = None,
    parallel: int = 1,
) -> CompleteSetOutcome:
    """Breadth-first exhaustion of every decomposition choice.

    Returns every computed generalization (with witnesses), de-duplicated up
    to renaming of the fresh variables.  Optional caps turn the search into a
    best-effort enumeration with ``truncated`` set.  ``parallel`` > 1 farms
    branch expansion out to worker threads; results are merged in a fixed
    order, so repeated runs agree byte for byte.
    """
    stats = SearchStats()
    reserved = free_vars(t) | free_vars(s)
    start, root = initial_state(t, s)
    queue: deque[State] = deque([start])
    seen_keys: set[Term] = set()
    results: list[GeneralizationResult] = []
    truncated = False
    executor = None
    if parallel > 1:
        from concurrent.futures import ThreadPoolExecutor

        executor = ThreadPoolExecutor(max_workers=parallel)

    def finalize(state: State) -> bool:
        step_mer(state, sig)
        outcome = assemble_result(root, state, sig, reserved)
        key = canonical_result_term(outcome.term)
        if key not in seen_keys:
            seen_keys.add(key)
            results.append(outcome)
            if max_results is not None and len(results) >= max_results:
                return True
        return False

    try:
        while queue:
            if max_states is not None and stats.states_explored >= max_states:
                truncated = True
                break
            state = queue.popleft()
            stats.states_explored += 1
            if not state.pending:
                if finalize(state):
                    truncated = True
                    break
                continue
            aup = state.pending[0]
            instances = _instances(aup, sig)
            stats.branches += max(0, len(instances) - 1)
            work = []
            for instance in instances:
                branch = _clone(state)
                branch_aup = branch.pending.popleft()
                work.append((branch, branch_aup, instance))
            if executor is not None and len(work) > 1:
                list(
                    executor.map(
                        lambda item: _apply_instance(item[0], item[1], sig, item[2]), work
                    )
                )
            else:
                for branch, branch_aup, instance in work:
                    _apply_instance(branch, branch_aup, sig, instance)
            queue.extend(branch for branch, _, _ in work)
    finally:
        if executor is not None:
            executor.shutdown(wait=True)
    results.sort(key=lambda r: term_key(r.term))
    return CompleteSetOutcome(results, truncated, stats)


# ---------------------------------------------------------------------------
# Matching modulo the axioms


@dataclass
class MatchBudget:
    limit: int = 200_000
    used: int = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"matching budget of {self.limit} exhausted")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Orderings of ``total`` items into ``parts`` contiguous non-empty groups."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def match_all(
    pattern: Term,
    ground: Term,
    sig: Signature,
    matchable: set[str],
    budget: MatchBudget | None = None,
) -> Iterator[dict[str, Term]]:
    """Substitutions sigma over ``matchable`` with pattern*sigma equal to
    ``ground`` modulo the axioms.  The pattern must be a higher-order
    pattern; other free variables act as constants."""
    budget = budget or MatchBudget()
    yield from _match(pattern, ground, (), sig, matchable, {}, budget)


def _match(p: Term, g: Term, ctx: tuple, sig, matchable, subst, budget):
    budget.spend()
    if p.binders != g.binders:
        return
    if p.binders:
        ctx = ctx + p.binders
        p = Term((), p.head, p.args)
        g = Term((), g.head, g.args)
    if isinstance(p.head, Free) and p.head.name in matchable:
        name = p.head.name
        indices = [eta_var_index(a) for a in p.args]
        if any(i is None for i in indices):
            raise ValueError("pattern variable applied to a non-variable argument")
        if name in subst:
            if beta_reduce(sig, subst[name], list(p.args)) == g:
                yield subst
            return
        if not free_bound_indices(g) <= set(indices):
            return
        arg_types = tuple(ctx[len(ctx) - 1 - i] for i in indices)
        k = len(indices)
        mapping = {indices[pos]: k - 1 - pos for pos in range(k)}
        value = add_binders(reindex(g, mapping), arg_types)
        yield {**subst, name: value}
        return
    if p.head != g.head:
        return
    f = p.head
    if isinstance(f, Const) and sig.is_equational(f.name) and len(p.args) >= 2:
        axioms = sig.axioms(f.name)
        if axioms == frozenset({C}):
            for order in ((0, 1), (1, 0)):
                pairs = [(p.args[0], g.args[order[0]]), (p.args[1], g.args[order[1]])]
                yield from _match_seq(pairs, ctx, sig, matchable, subst, budget)
            return
        n, m = len(p.args), len(g.args)
        if m < n:
            return
        if A in axioms and C not in axioms:
            for comp in _compositions(m, n):
                budget.spend()
                pairs = []
                lo = 0
                ok = True
                for pa, width in zip(p.args, comp):
                    group = g.args[lo : lo + width]
                    lo += width
                    if width > 1 and not _is_matchable_var(pa, matchable):
                        ok = False
                        break
                    pairs.append((pa, _group(sig, f, group)))
                if ok:
                    yield from _match_seq(pairs, ctx, sig, matchable, subst, budget)
            return
        yield from _match_ac(f, list(p.args), list(g.args), ctx, sig, matchable, subst, budget)
        return
    if len(p.args) != len(g.args):
        return
    yield from _match_seq(list(zip(p.args, g.args)), ctx, sig, matchable, subst, budget)


def _is_matchable_var(p: Term, matchable) -> bool:
    return not p.binders and isinstance(p.head, Free) and p.head.name in matchable


def _match_seq(pairs, ctx, sig, matchable, subst, budget):
    if not pairs:
        yield subst
        return
    (p, g), rest = pairs[0], pairs[1:]
    for s1 in _match(p, g, ctx, sig, matchable, subst, budget):
        yield from _match_seq(rest, ctx, sig, matchable, s1, budget)


def _match_ac(f, pargs, gargs, ctx, sig, matchable, subst, budget):
    """Assign each ground argument to one pattern slot; rigid (non-variable)
    slots take exactly one argument."""
    n, m = len(pargs), len(gargs)
    rigid = {i for i, pa in enumerate(pargs) if not _is_matchable_var(pa, matchable)}

    def assign(gi: int, groups: list[list[Term]]):
        if gi == m:
            if all(groups):
                yield [list(g) for g in groups]
            return
        budget.spend()
        remaining = m - gi
        empty = sum(1 for g in groups if not g)
        if remaining < empty:
            return
        for i in range(n):
            if i in rigid and groups[i]:
                continue
            groups[i].append(gargs[gi])
            yield from assign(gi + 1, groups)
            groups[i].pop()

    for groups in assign(0, [[] for _ in range(n)]):
        pairs = [(pargs[i], _group(sig, f, groups[i])) for i in range(n)]
        yield from _match_seq(pairs, ctx, sig, matchable, subst, budget)


def e_match(
    pattern: Term,
    ground: Term,
    sig: Signature,
    budget: MatchBudget | None = None,
) -> dict[str, Term] | None:
    """First substitution matching ``pattern`` onto ``ground`` modulo the
    axioms, or None.  All free variables of the pattern are instantiable;
    free variables of the ground term act as constants."""
    pattern_vars = free_vars(pattern)
    fresh = {name: f"?{i}" for i, name in enumerate(sorted(pattern_vars))}
    renamed = rename_free(pattern, fresh)
    for subst in match_all(renamed, ground, sig, set(fresh.values()), budget):
        back = {v: k for k, v in fresh.items()}
        return {back[name]: value for name, value in subst.items()}
    return None


def more_general(r1: Term, r2: Term, sig: Signature, budget: MatchBudget | None = None) -> bool:
    """True iff r1 is at least as general as r2 (some instance of r1 equals
    r2 modulo the axioms)."""
    return e_match(r1, r2, sig, budget) is not None


def strictly_more_general(r1: Term, r2: Term, sig: Signature) -> bool:
    return more_general(r1, r2, sig) and not more_general(r2, r1, sig)


def minimize(gens: Iterable[Term], sig: Signature, budget_limit: int = 200_000) -> list[Term]:
    """Minimal complete subset: drop elements strictly more general than
    another element, then keep one representative per equivalence class."""
    items: list[Term] = []
    seen: set[Term] = set()
    for g in gens:
        key = canonical_result_term(g)
        if key not in seen:
            seen.add(key)
            items.append(g)
    items.sort(key=term_key)

    def mg(x: Term, y: Term) -> bool:
        try:
            return more_general(x, y, sig, MatchBudget(budget_limit))
        except BudgetExceeded:
            warnings.warn("matching budget exceeded; keeping both candidates")
            return False

    survivors: list[Term] = []
    for i, g in enumerate(items):
        dominated = False
        for j, h in enumerate(items):
            if i == j:
                continue
            if mg(g, h) and not mg(h, g):
                dominated = True
                break
        if not dominated:
            survivors.append(g)
    # collapse equivalent survivors, keeping the first in canonical order
    kept: list[Term] = []
    for g in survivors:
        if not any(mg(g, h) and mg(h, g) for h in kept):
            kept.append(g)
    return kept
