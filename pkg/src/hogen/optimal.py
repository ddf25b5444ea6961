"""Greedy generalization guided by rigidity and choice functions.

Each equational problem asks its rigidity function for candidate singleton
alignments over the argument heads.  Every feasible candidate is completed
with the base calculus alone; the one whose completion is least general
wins (ties prefer the larger completion, then the leftmost alignment), and
only that branch is developed further.  When no candidate exists the
problem falls back to the same behaviour the syntactic algorithm would
show, so the result is never strictly more general than the syntactic
least general generalization.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .terms import (
    A,
    C,
    Const,
    Signature,
    Term,
    free_vars,
    make_signature,
    size,
)
from .syntactic import (
    AUP,
    GeneralizationResult,
    State,
    assemble_result,
    expand,
    initial_state,
    run_base,
    step_abs,
    step_dec,
    step_mer,
    step_sol,
    _dec_applicable,
)
from .equational import _group, _split_template, e_match
from .fragments import (
    SingletonAlignment,
    alignable,
    determinate_set,
    kl_distinct,
    pahs,
    top_alignments,
)


@dataclass(frozen=True)
class Strategy:
    """Which rigidity functions drive the greedy search.

    ``rigidity`` is one of ``auto`` (dispatch per head symbol), ``a``
    (bounded associative windows), ``a-full`` (all pairs of the first
    window), ``c``, or ``ac``; heads outside the selected theory fall back
    to syntactic treatment.
    """

    rigidity: str = "auto"
    k: int = 1
    l: int = 1


def rigidity_a(k: int, w1: Sequence, w2: Sequence) -> list[SingletonAlignment]:
    """First-position alignments of each top-level determinate-set block."""
    ds = determinate_set(k, w1, w2)
    if ds.is_failure() or ds.is_bottom():
        return []
    return top_alignments(ds)


def rigidity_a_full(w1: Sequence, w2: Sequence) -> list[SingletonAlignment]:
    """All pairings inside the first block window, without a cardinality cap."""
    from .fragments import _scan_boundary, _window_pairs
    from collections import Counter

    w1 = tuple(w1)
    w2 = tuple(w2)
    if not w1 or not w2:
        return []
    t1 = Counter(s for s in w1 if alignable(s))
    t2 = Counter(s for s in w2 if alignable(s))
    found = _scan_boundary(w1, w2, 0, 0, False, t1, t2)
    if found is None:
        return []
    _, win_pos1, win_pos2, first_pair = found
    return [
        SingletonAlignment(w1[j1 - 1], j1, j2)
        for j1, j2 in _window_pairs(win_pos1, win_pos2, first_pair)
    ]


def rigidity_c(w1: Sequence, w2: Sequence) -> list[SingletonAlignment]:
    """All symbol-matching position pairs of two binary argument lists."""
    if len(w1) != 2 or len(w2) != 2:
        raise ValueError("commutative rigidity expects binary argument lists")
    return [
        SingletonAlignment(a, i + 1, j + 1)
        for i, a in enumerate(w1)
        for j, b in enumerate(w2)
        if alignable(a) and a == b
    ]


def rigidity_ac(k: int, l: int, w1: Sequence, w2: Sequence) -> list[SingletonAlignment]:
    """All symbol-matching pairs when the sequences are (k,l)-distinct."""
    if not kl_distinct(tuple(w1), tuple(w2), k, l):
        return []
    return [
        SingletonAlignment(a, i + 1, j + 1)
        for i, a in enumerate(w1)
        for j, b in enumerate(w2)
        if alignable(a) and a == b
    ]


def decompose_by_alignment(
    aup: AUP, align: SingletonAlignment, sig: Signature
) -> tuple[list[tuple[Term, Term]], list[tuple[Term, Term]]]:
    """Aligned argument pairs plus the residual segment pairs realized by the
    split rules around a singleton alignment."""
    t, s = aup.left, aup.right
    f = t.head
    axioms = sig.axioms(f.name)
    i, j = align.left, align.right
    aligned = [(t.args[i - 1], s.args[j - 1])]
    residues: list[tuple[Term, Term]] = []
    if axioms == frozenset({A}):
        if i > 1:
            residues.append((_group(sig, f, t.args[: i - 1]), _group(sig, f, s.args[: j - 1])))
        if i < len(t.args):
            residues.append((_group(sig, f, t.args[i:]), _group(sig, f, s.args[j:])))
    elif axioms == frozenset({C}):
        aligned.append((t.args[2 - i], s.args[2 - j]))
    else:
        rest_t = [x for p, x in enumerate(t.args) if p != i - 1]
        rest_s = [x for p, x in enumerate(s.args) if p != j - 1]
        residues.append((_group(sig, f, rest_t), _group(sig, f, rest_s)))
    return aligned, residues


def _feasible(align: SingletonAlignment, axioms: frozenset, n: int, m: int) -> bool:
    if axioms == frozenset({A}):
        i, j = align.left, align.right
        return ((i == 1) == (j == 1)) and ((i == n) == (j == m))
    return True


def _alignments_for(aup: AUP, sig: Signature, strategy: Strategy) -> tuple[list[SingletonAlignment], list[SingletonAlignment]]:
    """(candidate first alignments, forced chain when only one candidate).

    For a bounded associative window with a single block the whole chain of
    nested single blocks is returned, so a determined prefix is realized in
    one pass instead of re-deriving the suffix window per step.
    """
    t, s = aup.left, aup.right
    f = t.head
    axioms = sig.axioms(f.name)
    w1, w2 = pahs(t, s)
    mode = strategy.rigidity
    chain: list[SingletonAlignment] = []
    if axioms == frozenset({A}):
        if mode in ("auto", "a"):
            ds = determinate_set(strategy.k, w1, w2)
            if ds.is_failure() or ds.is_bottom():
                return [], []
            aligns = top_alignments(ds)
            if len(aligns) == 1:
                node = ds
                while node.kind == "blocks" and len(node.blocks) == 1:
                    block = next(iter(node.blocks))
                    chain.append(block.align)
                    node = block.rest
        elif mode == "a-full":
            aligns = rigidity_a_full(w1, w2)
        else:
            return [], []
    elif axioms == frozenset({C}):
        if mode in ("auto", "c"):
            aligns = rigidity_c(w1, w2)
        else:
            return [], []
    else:
        if mode in ("auto", "ac"):
            aligns = rigidity_ac(strategy.k, strategy.l, w1, w2)
        else:
            return [], []
    n, m = len(t.args), len(s.args)
    out = [a for a in aligns if _feasible(a, axioms, n, m)]
    out.sort(key=lambda a: (a.left, a.right))
    if len(out) != 1:
        chain = []
    return out, chain


def _pairs_for(aup: AUP, align: SingletonAlignment, sig: Signature) -> list[tuple[Term, Term]]:
    """The argument pairs realizing one alignment: aligned pair plus the
    residual segments, in left-argument order."""
    t, s = aup.left, aup.right
    f = t.head
    axioms = sig.axioms(f.name)
    i, j = align.left, align.right
    if axioms == frozenset({A}):
        pairs = []
        if i > 1:
            pairs.append((_group(sig, f, t.args[: i - 1]), _group(sig, f, s.args[: j - 1])))
        pairs.append((t.args[i - 1], s.args[j - 1]))
        if i < len(t.args):
            pairs.append((_group(sig, f, t.args[i:]), _group(sig, f, s.args[j:])))
    elif axioms == frozenset({C}):
        if i == 1:
            pairs = [(t.args[0], s.args[j - 1]), (t.args[1], s.args[2 - j])]
        else:
            pairs = [(t.args[0], s.args[2 - j]), (t.args[1], s.args[j - 1])]
    else:
        rest_t = [x for p, x in enumerate(t.args) if p != i - 1]
        rest_s = [x for p, x in enumerate(s.args) if p != j - 1]
        pairs = [
            (t.args[i - 1], s.args[j - 1]),
            (_group(sig, f, rest_t), _group(sig, f, rest_s)),
        ]
    return pairs


def _realize(state: State, aup: AUP, align: SingletonAlignment, sig: Signature) -> None:
    """Install the split template for one alignment and push the aligned pair
    together with its residual segments."""
    _split_template(state, aup, sig, aup.left.head, _pairs_for(aup, align, sig))


def _realize_chain(state: State, aup: AUP, chain: Sequence[SingletonAlignment], sig: Signature) -> None:
    """Realize a whole single-candidate associative chain in one pass: each
    aligned pair plus the residual segments between consecutive anchors."""
    t, s = aup.left, aup.right
    f = t.head
    n, m = len(t.args), len(s.args)
    pairs = []
    prev_i = prev_j = 0
    for align in chain:
        i, j = align.left, align.right
        if i > prev_i + 1 or j > prev_j + 1:
            pairs.append(
                (_group(sig, f, t.args[prev_i : i - 1]), _group(sig, f, s.args[prev_j : j - 1]))
            )
        pairs.append((t.args[i - 1], s.args[j - 1]))
        prev_i, prev_j = i, j
    if prev_i < n or prev_j < m:
        pairs.append((_group(sig, f, t.args[prev_i:]), _group(sig, f, s.args[prev_j:])))
    _split_template(state, aup, sig, f, pairs)


_FREE_SIG_CACHE: dict[int, Signature] = {}


def _free_view(sig: Signature) -> Signature:
    """The signature with all axioms stripped; canonical terms stay valid and
    matching against it is plain syntactic pattern matching."""
    key = id(sig)
    if key not in _FREE_SIG_CACHE:
        _FREE_SIG_CACHE[key] = make_signature(
            {name: (ty, ()) for name, (ty, _) in sig.constants.items()}
        )
    return _FREE_SIG_CACHE[key]


def _completion(aup: AUP, align: SingletonAlignment, sig: Signature) -> Term:
    """Result of realizing one alignment and finishing with the base rules
    only (equational symbols treated as free)."""
    scratch = State(
        pending=deque(),
        store=[],
        sigma={},
        counter=itertools.count(aup.var + 1),
    )
    _realize(scratch, aup, align, sig)
    run_base(scratch, sig, decompose_equational=True)
    return expand(aup.var, scratch.sigma, sig)


def choose_alignment(
    aup: AUP, candidates: Sequence[SingletonAlignment], sig: Signature
) -> SingletonAlignment | None:
    """The candidate whose base-rule completion is least general; ties prefer
    the larger completion, then the leftmost alignment.

    Candidates realizing the same argument pairs (commutative mirror images,
    for instance) are compared only once.
    """
    if not candidates:
        return None
    if len(candidates) == 1:
        return candidates[0]
    unique: dict[tuple, SingletonAlignment] = {}
    for align in candidates:
        key = tuple(_pairs_for(aup, align, sig))
        if key not in unique:
            unique[key] = align
    distinct = list(unique.values())
    if len(distinct) == 1:
        return distinct[0]
    free_sig = _free_view(sig)
    best = None
    best_term = None
    for align in distinct:
        term = _completion(aup, align, sig)
        if best is None:
            best, best_term = align, term
            continue
        b_le_t, t_le_b = _compare(best_term, term, free_sig, sig)
        if b_le_t and not t_le_b:
            best, best_term = align, term  # strictly less general wins
        elif not (t_le_b and not b_le_t):
            if size(term) > size(best_term):
                best, best_term = align, term
    return best


def _compare(left: Term, right: Term, free_sig: Signature, sig: Signature) -> tuple[bool, bool]:
    """Generality in both directions: plain pattern matching first, matching
    modulo the axioms when the cheap check sees the terms as incomparable
    (argument orders may differ under commutative canonical sorting)."""
    l_le_r = e_match(left, right, free_sig) is not None
    r_le_l = e_match(right, left, free_sig) is not None
    if l_le_r or r_le_l:
        return l_le_r, r_le_l
    from .equational import MatchBudget
    from .terms import BudgetExceeded

    try:
        l_le_r = e_match(left, right, sig, MatchBudget(50_000)) is not None
        r_le_l = e_match(right, left, sig, MatchBudget(50_000)) is not None
    except BudgetExceeded:
        return False, False
    return l_le_r, r_le_l


def choose(aup: AUP, sig: Signature, strategy: Strategy = Strategy()) -> SingletonAlignment | None:
    """The choice function over the configured rigidity function: best
    feasible alignment for one equational problem, or None when the
    branching is empty."""
    candidates, _ = _alignments_for(aup, sig, strategy)
    return choose_alignment(aup, candidates, sig)


def optimal_generalize(
    t: Term, s: Term, sig: Signature, strategy: Strategy = Strategy()
) -> GeneralizationResult:
    """One refined generalization from the greedy derivation.

    Equational problems follow the choice function over the configured
    rigidity function; everything else, including problems with no usable
    alignment, behaves exactly like the syntactic algorithm.
    """
    state, root = initial_state(t, s)
    while state.pending:
        aup = state.pending.popleft()
        left, right = aup.left, aup.right
        if left.binders or right.binders:
            if left.binders != right.binders:
                raise ValueError("inputs must share one type")
            step_abs(state, aup, sig)
            continue
        f = left.head
        if (
            isinstance(f, Const)
            and sig.is_equational(f.name)
            and right.head == f
            and len(left.args) >= 2
            and len(right.args) >= 2
        ):
            candidates, chain = _alignments_for(aup, sig, strategy)
            if len(chain) > 1:
                _realize_chain(state, aup, chain, sig)
                continue
            chosen = choose_alignment(aup, candidates, sig)
            if chosen is not None:
                _realize(state, aup, chosen, sig)
                continue
        if _dec_applicable(left, right, sig, decompose_equational=True):
            step_dec(state, aup, sig)
        else:
            step_sol(state, aup, sig)
    step_mer(state, sig)
    reserved = free_vars(t) | free_vars(s)
    return assemble_result(root, state, sig, reserved)
