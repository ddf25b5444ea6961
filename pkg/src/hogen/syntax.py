"""Problem-file grammar, term parsing, and pretty-printing.

A problem file has three sections introduced by ``sig:``, ``left:`` and
``right:``.  The signature section declares constants as
``const f : i -> i -> i [A]`` (axiom tag ``A``, ``C`` or ``AC`` optional);
the term sections hold one term each, written ``\\x:i, y:i. f(X(x,y), a)``.
Names starting with a lower-case letter are constants or bound variables,
upper-case names are free variables whose types are inferred from use.
Parsed terms come out typed, eta-long, beta-normal, and flattened.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .terms import (
    AUP_PREFIX,
    ArrowType,
    BaseType,
    Bound,
    Const,
    Free,
    Signature,
    SignatureError,
    SimpleType,
    Term,
    argument_types,
    arrow,
    beta_reduce,
    bound_var,
    mk_app,
    result_type,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # name | punct | end
    text: str
    line: int
    col: int


_PUNCT = ("->", "\\", "λ", ":", ".", ",", "(", ")", "[", "]")


def _lex(text: str, line0: int = 1) -> list[Token]:
    out = []
    line, col = line0, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if text.startswith("->", i):
            out.append(Token("punct", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in "\\λ:.,()[]":
            out.append(Token("punct", "\\" if ch == "λ" else ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_" or text[j] == "'"):
                j += 1
            out.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    out.append(Token("end", "", line, col))
    return out


@dataclass
class _Tokens:
    items: list[Token]
    pos: int = 0

    def peek(self) -> Token:
        return self.items[self.pos]

    def next(self) -> Token:
        tok = self.items[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == text:
            return self.next()
        raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text


# ---------------------------------------------------------------------------
# Raw term AST (before typing)


@dataclass(frozen=True)
class RawLam:
    binders: tuple[tuple[str, SimpleType], ...]
    body: "RawTerm"
    line: int
    col: int


@dataclass(frozen=True)
class RawApp:
    fn: "RawTerm"  # RawName or parenthesized RawLam
    args: tuple["RawTerm", ...]
    line: int
    col: int


@dataclass(frozen=True)
class RawName:
    name: str
    line: int
    col: int


RawTerm = object


def _parse_type(ts: _Tokens) -> SimpleType:
    left = _parse_type_atom(ts)
    if ts.at_punct("->"):
        ts.next()
        return ArrowType(left, _parse_type(ts))
    return left


def _parse_type_atom(ts: _Tokens) -> SimpleType:
    tok = ts.peek()
    if tok.kind == "name":
        ts.next()
        return BaseType(tok.text)
    if ts.at_punct("("):
        ts.next()
        ty = _parse_type(ts)
        ts.expect(")")
        return ty
    raise ParseError("expected a type", tok.line, tok.col)


def _parse_term(ts: _Tokens) -> RawTerm:
    tok = ts.peek()
    if ts.at_punct("\\"):
        ts.next()
        binders = []
        while True:
            name_tok = ts.peek()
            if name_tok.kind != "name":
                raise ParseError("expected a binder name", name_tok.line, name_tok.col)
            ts.next()
            ty = None
            if ts.at_punct(":"):
                ts.next()
                ty = _parse_type(ts)
            binders.append((name_tok.text, ty))
            if ts.at_punct(","):
                ts.next()
                continue
            break
        ts.expect(".")
        body = _parse_term(ts)
        return RawLam(tuple(binders), body, tok.line, tok.col)
    return _parse_app(ts)


def _parse_app(ts: _Tokens) -> RawTerm:
    tok = ts.peek()
    if ts.at_punct("("):
        ts.next()
        inner = _parse_term(ts)
        ts.expect(")")
        fn = inner
    elif tok.kind == "name":
        ts.next()
        if AUP_PREFIX in tok.text:
            raise ParseError(f"reserved name {tok.text!r}", tok.line, tok.col)
        fn = RawName(tok.text, tok.line, tok.col)
    else:
        raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.col)
    while ts.at_punct("("):
        ts.next()
        args = [_parse_term(ts)]
        while ts.at_punct(","):
            ts.next()
            args.append(_parse_term(ts))
        ts.expect(")")
        fn = RawApp(fn, tuple(args), tok.line, tok.col)
    return fn


# ---------------------------------------------------------------------------
# Typing and elaboration


@dataclass
class Elaborator:
    sig: Signature
    free_types: dict[str, SimpleType] = field(default_factory=dict)

    def term(self, raw: RawTerm, expected: SimpleType | None, env: list[tuple[str, SimpleType]]) -> Term:
        """Typecheck and produce the canonical (eta-long, flattened) term."""
        if isinstance(raw, RawLam):
            ty = expected
            binders = []
            for name, bty in raw.binders:
                if ty is not None:
                    if not isinstance(ty, ArrowType):
                        raise ParseError("abstraction where a base type is expected", raw.line, raw.col)
                    if bty is not None and ty.arg != bty:
                        raise ParseError(
                            f"binder {name} has type {bty}, expected {ty.arg}", raw.line, raw.col
                        )
                    bty = ty.arg
                    ty = ty.result
                elif bty is None:
                    bty = self._default_base()
                    if bty is None:
                        raise ParseError(
                            f"binder {name} needs a type annotation", raw.line, raw.col
                        )
                binders.append((name, bty))
            body = self.term(raw.body, ty, env + [list(b) for b in binders])
            names = tuple(n for n, _ in binders)
            tys = tuple(t for _, t in binders)
            return Term(tys + body.binders, body.head, body.args, names + body.binder_names)
        if isinstance(raw, RawName):
            return self.apply(raw, (), expected, env, raw.line, raw.col)
        assert isinstance(raw, RawApp)
        return self.apply(raw.fn, raw.args, expected, env, raw.line, raw.col)

    def _default_base(self) -> BaseType | None:
        """The unique base type mentioned by the signature, if there is one;
        used for binders written without a type annotation."""
        bases: set[BaseType] = set()

        def collect(ty: SimpleType) -> None:
            if isinstance(ty, BaseType):
                bases.add(ty)
            else:
                collect(ty.arg)
                collect(ty.result)

        for ty, _ in self.sig.constants.values():
            collect(ty)
        if len(bases) == 1:
            return next(iter(bases))
        return None

    def head_type(
        self, fn: RawTerm, args: Sequence[RawTerm], expected: SimpleType | None, env
    ) -> tuple[object, SimpleType | None]:
        """Resolve an application head to (head object, its type or None)."""
        if isinstance(fn, RawName):
            name = fn.name
            for pos in range(len(env) - 1, -1, -1):
                if env[pos][0] == name:
                    return Bound(len(env) - 1 - pos), env[pos][1]
            if name[0].islower() or name[0] == "_":
                if name in self.sig.constants:
                    return Const(name), self.sig.type_of(name)
                raise ParseError(f"undeclared constant {name!r}", fn.line, fn.col)
            return Free(name), self.free_types.get(name)
        return fn, None  # a parenthesized lambda: type comes from its binders

    def apply(self, fn, args, expected, env, line, col) -> Term:
        if isinstance(fn, RawLam):
            # beta-redex: elaborate the lambda, then reduce
            lam = self.term(fn, None, env)
            if len(args) != len(lam.binders):
                raise ParseError("a parenthesized lambda must be fully applied", line, col)
            elab = [self.term(a, ty, env) for a, ty in zip(args, lam.binders)]
            term = beta_reduce(self.sig, lam, elab)
            return self._check_expected(term, expected, env, line, col)
        head, hty = self.head_type(fn, args, expected, env)
        if hty is None:
            # free variable seen for the first time: infer argument types
            elab_args = [self.term(a, None, env) for a in args]
            arg_tys = [self._type_of(a, env) for a in elab_args]
            if expected is None:
                raise ParseError(
                    f"cannot infer the type of free variable {head.name!r}", line, col
                )
            self.free_types[head.name] = arrow(*arg_tys, expected) if arg_tys else expected
            hty = self.free_types[head.name]
            return self._build(head, hty, elab_args, expected, line, col)
        arg_tys = argument_types(hty)
        if isinstance(head, Const) and self.sig.is_assoc(head.name):
            base = result_type(hty)
            elab_args = [self.term(a, base, env) for a in args]
            term = mk_app(self.sig, head, elab_args) if elab_args else Term((), head)
            if not args:
                term = self._eta_expand(head, hty, [])
            return self._check_expected(term, expected, env, line, col)
        if len(args) > len(arg_tys):
            raise ParseError(f"{_head_name(head)} applied to too many arguments", line, col)
        elab_args = [self.term(a, ty, env) for a, ty in zip(args, arg_tys)]
        return self._check_expected(
            self._build(head, hty, elab_args, expected, line, col), expected, env, line, col
        )

    def _build(self, head, hty, elab_args, expected, line, col) -> Term:
        arg_tys = argument_types(hty)
        missing = arg_tys[len(elab_args):]
        if missing:
            return self._eta_expand(head, hty, elab_args)
        return mk_app(self.sig, head, elab_args)

    def _eta_expand(self, head, hty, elab_args) -> Term:
        arg_tys = argument_types(hty)
        missing = list(arg_tys[len(elab_args):])
        p = len(missing)
        from .terms import shift

        shifted = [shift(a, p) for a in elab_args]
        extra = [bound_var(p - 1 - pos, missing[pos]) for pos in range(p)]
        if isinstance(head, Bound):
            head = Bound(head.index + p)
        body = mk_app(self.sig, head, shifted + extra)
        names = tuple(f"z{i}" for i in range(p))
        return Term(tuple(missing) + body.binders, body.head, body.args, names + body.binder_names)

    def _type_of(self, t: Term, env) -> SimpleType:
        from .terms import infer_type

        ctx = [ty for _, ty in env]
        return infer_type(t, self.sig, ctx, self.free_types)

    def _check_expected(self, term: Term, expected, env, line, col) -> Term:
        got = self._type_of(term, env)
        if expected is not None and got != expected:
            raise ParseError(f"term has type {got}, expected {expected}", line, col)
        return term


def _head_name(head) -> str:
    return getattr(head, "name", str(head))


def parse_type(text: str) -> SimpleType:
    ts = _Tokens(_lex(text))
    ty = _parse_type(ts)
    tok = ts.peek()
    if tok.kind != "end":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return ty


def parse_term(
    text: str,
    sig: Signature,
    free_types: dict[str, SimpleType] | None = None,
    expected: SimpleType | None = None,
    line0: int = 1,
) -> Term:
    """Parse, typecheck, and normalize one term."""
    ts = _Tokens(_lex(text, line0))
    raw = _parse_term(ts)
    tok = ts.peek()
    if tok.kind != "end":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    elab = Elaborator(sig, free_types if free_types is not None else {})
    return elab.term(raw, expected, [])


# ---------------------------------------------------------------------------
# Problem files


@dataclass
class Problem:
    sig: Signature
    left: Term
    right: Term
    free_types: dict[str, SimpleType]


def parse_problem(text: str) -> Problem:
    """Split a problem file into sections and elaborate both terms."""
    sections: dict[str, tuple[str, int]] = {}
    current: str | None = None
    buf: list[str] = []
    start_line = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = stripped.rstrip()
        if header in ("sig:", "left:", "right:"):
            if current is not None:
                sections[current] = ("\n".join(buf), start_line)
            current = header[:-1]
            buf = []
            start_line = lineno + 1
            continue
        if stripped.startswith("#"):
            buf.append("")
            continue
        if current is None:
            if stripped:
                raise ParseError("content before the first section header", lineno, 1)
            continue
        buf.append(line)
    if current is not None:
        sections[current] = ("\n".join(buf), start_line)
    for required in ("sig", "left", "right"):
        if required not in sections:
            raise ParseError(f"missing section {required!r}", 1, 1)
    sig = _parse_sig(*sections["sig"])
    elab = Elaborator(sig, {})
    left_text, left_line = sections["left"]
    right_text, right_line = sections["right"]
    if not left_text.strip():
        raise ParseError("empty left term", left_line, 1)
    if not right_text.strip():
        raise ParseError("empty right term", right_line, 1)
    left_ts = _Tokens(_lex(left_text, left_line))
    left_raw = _parse_term(left_ts)
    if left_ts.peek().kind != "end":
        tok = left_ts.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    left = elab.term(left_raw, None, [])
    left_ty = elab._type_of(left, [])
    right_ts = _Tokens(_lex(right_text, right_line))
    right_raw = _parse_term(right_ts)
    if right_ts.peek().kind != "end":
        tok = right_ts.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    right = elab.term(right_raw, left_ty, [])
    return Problem(sig, left, right, elab.free_types)


def _parse_sig(text: str, line0: int) -> Signature:
    ts = _Tokens(_lex(text, line0))
    decls: dict[str, tuple[SimpleType, frozenset[str]]] = {}
    while ts.peek().kind != "end":
        tok = ts.peek()
        if tok.kind != "name" or tok.text != "const":
            raise ParseError("expected a 'const' declaration", tok.line, tok.col)
        ts.next()
        name_tok = ts.peek()
        if name_tok.kind != "name":
            raise ParseError("expected a constant name", name_tok.line, name_tok.col)
        if not (name_tok.text[0].islower() or name_tok.text[0] == "_"):
            raise ParseError("constant names start lower-case", name_tok.line, name_tok.col)
        ts.next()
        ts.expect(":")
        ty = _parse_type(ts)
        axioms: frozenset[str] = frozenset()
        if ts.at_punct("["):
            ts.next()
            ax_tok = ts.peek()
            if ax_tok.kind != "name" or ax_tok.text not in ("A", "C", "AC"):
                raise ParseError("axiom tag must be A, C or AC", ax_tok.line, ax_tok.col)
            ts.next()
            axioms = frozenset(ax_tok.text)
            ts.expect("]")
        if name_tok.text in decls:
            raise ParseError(f"duplicate constant {name_tok.text!r}", name_tok.line, name_tok.col)
        decls[name_tok.text] = (ty, axioms)
    try:
        return Signature(decls)
    except SignatureError as exc:
        raise ParseError(str(exc), line0, 1) from exc


# ---------------------------------------------------------------------------
# Pretty-printing


def format_type(ty: SimpleType) -> str:
    return str(ty)


def format_term(t: Term, sig: Signature | None = None, *, raw: bool = False) -> str:
    """Canonical rendering; ``raw`` annotates binders with their types.

    Passing the signature keeps generated binder names clear of constants,
    so printed terms re-parse to the same term.
    """
    from .terms import free_vars

    reserved = set(free_vars(t))
    if sig is not None:
        reserved |= set(sig.constants)
    return _fmt(t, [], raw, reserved)


_FALLBACK_NAMES = "xyzuvw"


def _binder_names(t: Term, used: set[str]) -> list[str]:
    names = []
    for i, ty in enumerate(t.binders):
        name = t.binder_names[i] if i < len(t.binder_names) else ""
        if not name or name in used:
            for candidate in _fresh_names():
                if candidate not in used:
                    name = candidate
                    break
        used.add(name)
        names.append(name)
    return names


def _fresh_names():
    for c in _FALLBACK_NAMES:
        yield c
    i = 0
    while True:
        for c in _FALLBACK_NAMES:
            yield f"{c}{i}"
        i += 1


def _fmt(t: Term, env: list[str], raw: bool, reserved: set[str]) -> str:
    used = set(env) | reserved
    names = _binder_names(t, used)
    body_env = env + names
    h = t.head
    if isinstance(h, Const):
        text = h.name
    elif isinstance(h, Free):
        text = h.name
    else:
        idx = len(body_env) - 1 - h.index
        text = body_env[idx] if 0 <= idx < len(body_env) else f"#{h.index}"
    if t.args:
        text += "(" + ",".join(_fmt(a, body_env, raw, reserved) for a in t.args) + ")"
    if names:
        if raw:
            binder = ",".join(f"{n}:{ty}" for n, ty in zip(names, t.binders))
        else:
            binder = ",".join(names)
        return f"\\{binder}.{text}"
    return text


def format_subst(theta: dict[str, Term], *, raw: bool = False) -> str:
    if not theta:
        return "{}"
    inner = "; ".join(f"{name} -> {format_term(v, raw=raw)}" for name, v in sorted(theta.items()))
    return "{" + inner + "}"
