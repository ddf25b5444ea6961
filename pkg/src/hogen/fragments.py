"""Alignments and determinate sets over argument-head sequences.

A determinate set chops two symbol sequences into blocks.  Each block pins
one aligned symbol pair and nests the decomposition of what follows; the
computation fails (empty set) when one sequence runs out while the other
still has symbols, and bottoms out (the set containing the empty set) when
no block boundary exists or too many pairings compete.

The block boundary is the smallest window on both sequences whose shared
symbols occur equally often in both leftover tails; position one pairs only
with position one unless the strict variant is used.  Candidate pairs never
involve free variables.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

from .terms import A, C, Const, Free, Signature, Term, head

Symbol = Hashable


@dataclass(frozen=True)
class SingletonAlignment:
    symbol: Symbol
    left: int  # 1-based position in the first sequence
    right: int

    def __str__(self) -> str:
        return f"{_sym_str(self.symbol)}[{self.left},{self.right}]"


@dataclass(frozen=True)
class Block:
    align: SingletonAlignment
    rest: "DetSet"


@dataclass(frozen=True)
class DetSet:
    kind: str  # "failure" | "bottom" | "blocks"
    blocks: frozenset[Block] = frozenset()

    def is_failure(self) -> bool:
        return self.kind == "failure"

    def is_bottom(self) -> bool:
        return self.kind == "bottom"

    def __str__(self) -> str:
        return render_detset(self)


FAILURE = DetSet("failure")
BOTTOM = DetSet("bottom")


def _sym_str(sym: Symbol) -> str:
    if isinstance(sym, (Const, Free)):
        return sym.name
    return str(sym)


def render_detset(ds: DetSet) -> str:
    if ds.is_failure():
        return "∅"
    if ds.is_bottom():
        return "{∅}"
    inner = ",".join(
        _render_block(b) for b in sorted(ds.blocks, key=lambda b: (b.align.left, b.align.right))
    )
    return "{" + inner + "}"


def _render_block(b: Block) -> str:
    rest = b.rest
    if rest.is_bottom():
        tail = "∅"
    elif len(rest.blocks) == 1:
        tail = _render_block(next(iter(rest.blocks)))
    else:
        tail = render_detset(rest)
    return f"({b.align},{tail})"


def alignable(sym: Symbol) -> bool:
    return not isinstance(sym, Free)


def determinate_set(k: int, w1: Sequence[Symbol], w2: Sequence[Symbol], *, strict: bool = False) -> DetSet:
    """The k-determinate set of two symbol sequences (strict variant drops
    the position-one pairing constraint and bounds pairings per symbol)."""
    if k < 1:
        raise ValueError("k must be positive")
    w1 = tuple(w1)
    w2 = tuple(w2)
    t1 = Counter(s for s in w1 if alignable(s))
    t2 = Counter(s for s in w2 if alignable(s))
    return _det(k, w1, w2, 0, 0, strict, t1, t2)


def _scan_boundary(w1, w2, lo1, lo2, strict, t1, t2):
    """Find the smallest valid block window.

    Returns (i, win_pos1, win_pos2, first_pair) with the tail counters
    advanced past the window, or None when no boundary exists (the tail
    counters are then spent).  win_pos* map symbols to their 1-based window
    positions (position one excluded unless strict).
    """
    n = len(w1) - lo1
    m = len(w2) - lo2
    wc1: Counter = Counter()
    wc2: Counter = Counter()
    win_pos1: dict = {}
    win_pos2: dict = {}
    msize = 0
    bad = 0
    contrib: dict = {}

    def retract(x) -> None:
        nonlocal msize, bad
        if x in contrib:
            dm, db = contrib.pop(x)
            msize -= dm
            bad -= db

    def account(x) -> None:
        nonlocal msize, bad
        mx = min(wc1[x], wc2[x])
        if mx == 0:
            return
        viol = 1 if min(mx, t1[x]) != min(mx, t2[x]) else 0
        contrib[x] = (mx, viol)
        msize += mx
        bad += viol

    first1 = w1[lo1]
    first2 = w2[lo2]
    first_pair = alignable(first1) and first1 == first2
    for i in range(1, max(n, m) + 1):
        if i == 1:
            if alignable(first1):
                t1[first1] -= 1
            if alignable(first2):
                t2[first2] -= 1
            if strict:
                touched = set()
                if alignable(first1):
                    wc1[first1] += 1
                    win_pos1.setdefault(first1, []).append(1)
                    touched.add(first1)
                if alignable(first2):
                    wc2[first2] += 1
                    win_pos2.setdefault(first2, []).append(1)
                    touched.add(first2)
                for x in touched:
                    retract(x)
                    account(x)
                if msize > 0 and bad == 0:
                    return 1, win_pos1, win_pos2, False
            else:
                if first_pair and min(1, t1[first1]) == min(1, t2[first1]):
                    return 1, win_pos1, win_pos2, True
            continue
        touched = set()
        if i <= n:
            x = w1[lo1 + i - 1]
            if alignable(x):
                t1[x] -= 1
                wc1[x] += 1
                win_pos1.setdefault(x, []).append(i)
                touched.add(x)
        if i <= m:
            x = w2[lo2 + i - 1]
            if alignable(x):
                t2[x] -= 1
                wc2[x] += 1
                win_pos2.setdefault(x, []).append(i)
                touched.add(x)
        for x in touched:
            retract(x)
            account(x)
        # tail counts changed for the touched symbols only
        if msize > 0 and bad == 0:
            return i, win_pos1, win_pos2, (first_pair and not strict)
    return None


def _window_pairs(win_pos1, win_pos2, first_pair):
    pairs = []
    if first_pair:
        pairs.append((1, 1))
    for sym, ps1 in win_pos1.items():
        ps2 = win_pos2.get(sym)
        if not ps2:
            continue
        for j1 in ps1:
            for j2 in ps2:
                pairs.append((j1, j2))
    pairs.sort()
    return pairs


def _det(k, w1, w2, lo1, lo2, strict, t1, t2) -> DetSet:
    chain: list[SingletonAlignment] = []
    while True:
        n = len(w1) - lo1
        m = len(w2) - lo2
        if n == 0 and m == 0:
            return _fold(chain, BOTTOM)
        if n == 0 or m == 0:
            return _fold(chain, BOTTOM if strict else FAILURE)
        found = _scan_boundary(w1, w2, lo1, lo2, strict, t1, t2)
        if found is None:
            return _fold(chain, BOTTOM)
        i, win_pos1, win_pos2, first_pair = found
        pairs = _window_pairs(win_pos1, win_pos2, first_pair)
        if strict:
            per = Counter(w1[lo1 + j1 - 1] for j1, _ in pairs)
            if any(c > k for c in per.values()):
                return _fold(chain, BOTTOM)
        elif len(pairs) > k:
            return _fold(chain, BOTTOM)
        if len(pairs) == 1:
            j1, j2 = pairs[0]
            chain.append(
                SingletonAlignment(w1[lo1 + j1 - 1], lo1 + j1, lo2 + j2)
            )
            # hand the window remainder back to the tails and continue
            for p in range(j1 + 1, min(i, n) + 1):
                x = w1[lo1 + p - 1]
                if alignable(x):
                    t1[x] += 1
            for p in range(j2 + 1, min(i, m) + 1):
                x = w2[lo2 + p - 1]
                if alignable(x):
                    t2[x] += 1
            lo1 += j1
            lo2 += j2
            continue
        blocks = set()
        for j1, j2 in pairs:
            c1 = Counter(t1)
            c2 = Counter(t2)
            for p in range(j1 + 1, min(i, n) + 1):
                x = w1[lo1 + p - 1]
                if alignable(x):
                    c1[x] += 1
            for p in range(j2 + 1, min(i, m) + 1):
                x = w2[lo2 + p - 1]
                if alignable(x):
                    c2[x] += 1
            sub = _det(k, w1, w2, lo1 + j1, lo2 + j2, strict, c1, c2)
            if not sub.is_failure():
                blocks.add(
                    Block(SingletonAlignment(w1[lo1 + j1 - 1], lo1 + j1, lo2 + j2), sub)
                )
        return _fold(chain, DetSet("blocks", frozenset(blocks)) if blocks else FAILURE)


def _fold(chain: list[SingletonAlignment], terminal: DetSet) -> DetSet:
    out = terminal
    for align in reversed(chain):
        if out.is_failure():
            out = FAILURE
        else:
            out = DetSet("blocks", frozenset({Block(align, out)}))
    return out


def all_alignments(ds: DetSet) -> list[SingletonAlignment]:
    """Every singleton alignment anywhere in the block tree."""
    out: list[SingletonAlignment] = []

    def walk(d: DetSet) -> None:
        if d.kind != "blocks":
            return
        for b in sorted(d.blocks, key=lambda b: (b.align.left, b.align.right)):
            out.append(b.align)
            walk(b.rest)

    walk(ds)
    return out


def top_alignments(ds: DetSet) -> list[SingletonAlignment]:
    if ds.kind != "blocks":
        return []
    return sorted((b.align for b in ds.blocks), key=lambda a: (a.left, a.right))


# ---------------------------------------------------------------------------
# Argument head sequences of term pairs


def pahs(t: Term, s: Term) -> tuple[tuple, tuple]:
    """Pair of argument head sequences of two same-headed applications."""
    if t.head != s.head:
        raise ValueError("argument head sequences need a shared head")
    return tuple(head(a) for a in t.args), tuple(head(a) for a in s.args)


def pahm(t: Term, s: Term) -> tuple[Counter, Counter]:
    w1, w2 = pahs(t, s)
    return Counter(w1), Counter(w2)


# ---------------------------------------------------------------------------
# Fragment recognizers


def _strip(t: Term, s: Term) -> tuple[Term, Term]:
    return Term((), t.head, t.args), Term((), s.head, s.args)


def _shared_within(w1, w2, k: int) -> bool:
    """Every alignable symbol common to both sequences occurs at most k times
    on each side."""
    c1 = Counter(x for x in w1 if alignable(x))
    c2 = Counter(x for x in w2 if alignable(x))
    for sym, cnt in c1.items():
        if c2.get(sym):
            if cnt > k or c2[sym] > k:
                return False
    return True


def is_k_determined(t: Term, s: Term, sig: Signature, k: int, *, strict: bool = False) -> bool:
    """Bounded-choice recognizer for one decomposition level.

    Pairs with distinct or non-equational heads are determined trivially;
    an associative head needs a non-failing determinate set; a commutative
    head is only covered by the strict variant, which demands unambiguous
    pairings on either argument order.
    """
    if t.binders != s.binders:
        return False
    t, s = _strip(t, s)
    if t.head != s.head:
        return True
    f = t.head
    if not (isinstance(f, Const) and sig.is_equational(f.name)):
        return True
    axioms = sig.axioms(f.name)
    w1, w2 = pahs(t, s)
    if axioms == frozenset({A}):
        return not determinate_set(k, w1, w2).is_failure()
    if axioms == frozenset({C}) and strict:
        return _shared_within(w1, w2, k)
    return False


def is_total_k_determined(t: Term, s: Term, sig: Signature, k: int, *, strict: bool = False) -> bool:
    """Recognizer applied hereditarily through every aligned argument pair."""
    if t.binders != s.binders:
        return False
    t, s = _strip(t, s)
    if not t.args and not s.args:
        return True
    if t.head != s.head:
        return True
    f = t.head
    if not (isinstance(f, Const) and sig.is_equational(f.name)):
        if len(t.args) != len(s.args):
            return False
        return all(
            is_total_k_determined(a, b, sig, k, strict=strict)
            for a, b in zip(t.args, s.args)
        )
    axioms = sig.axioms(f.name)
    w1, w2 = pahs(t, s)
    if axioms == frozenset({A}):
        ds = determinate_set(k, w1, w2)
        if ds.is_failure():
            return False
        return all(
            is_total_k_determined(t.args[a.left - 1], s.args[a.right - 1], sig, k, strict=strict)
            for a in all_alignments(ds)
        )
    if axioms == frozenset({C}) and strict:
        if not _shared_within(w1, w2, k):
            return False
        ok = True
        for i, x in enumerate(w1):
            for j, y in enumerate(w2):
                if alignable(x) and x == y:
                    ok = ok and is_total_k_determined(
                        t.args[i], s.args[j], sig, k, strict=strict
                    )
        return ok
    return False


def kl_distinct(w1: Sequence[Symbol], w2: Sequence[Symbol], k: int, l: int) -> bool:
    """Shared symbols occur at most k times per side, at most l shared
    symbols exist, and the leftovers are empty on both sides or on neither."""
    c1 = Counter(w1)
    c2 = Counter(w2)
    shared = {sym for sym in c1 if sym in c2}
    for sym in shared:
        if c1[sym] > k or c2[sym] > k:
            return False
    if len(shared) > l:
        return False
    left_over = any(c1[sym] > c2.get(sym, 0) for sym in c1)
    right_over = any(c2[sym] > c1.get(sym, 0) for sym in c2)
    return left_over == right_over


def is_kl_distinct(t: Term, s: Term, sig: Signature, k: int, l: int) -> bool:
    """(k,l)-distinctness of a pair of same-headed AC applications."""
    if t.binders != s.binders:
        return False
    t, s = _strip(t, s)
    f = t.head
    if not (
        isinstance(f, Const)
        and sig.axioms(f.name) == frozenset({A, C})
        and s.head == f
    ):
        return False
    w1, w2 = pahs(t, s)
    return kl_distinct(w1, w2, k, l)


def _subterms(t: Term) -> list[Term]:
    out = [t]
    for a in t.args:
        out.extend(_subterms(a))
    return out


def is_total_kl_distinct(t: Term, s: Term, sig: Signature, k: int, l: int) -> bool:
    """Every pair of same-headed AC subterms across the two terms is
    (k,l)-distinct."""
    for u in _subterms(t):
        fu = u.head
        if not (isinstance(fu, Const) and sig.axioms(fu.name) == frozenset({A, C})):
            continue
        for v in _subterms(s):
            if v.head == fu and not is_kl_distinct(u, v, sig, k, l):
                return False
    return True
