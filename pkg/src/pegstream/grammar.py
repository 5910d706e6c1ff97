"""Surface PEG notation and its reduction to core ternary rule programs.

Grammar files are UTF-8 text with ``#`` line comments. Each rule occupies
one line (indented lines continue the previous rule):

    name <- expr

where ``expr`` is built from, in increasing binding strength:

    e1 / e2          ordered choice (right associative, lowest precedence)
    e1 e2            sequence (juxtaposition)
    !e               negative lookahead
    e* e+ e?         repetition, one-or-more, optional
    'c'              single byte (escapes: \\n \\t \\\\ \\' \\" \\xNN)
    "lit"            byte string literal
    [a-z0-9] [^...]  byte classes with ranges and negation over 0..255
    eps fail         the empty and failing expressions
    name             reference to another rule
    name[name,name]  raw ternary: try the first; on success continue with
                     the second, on failure retry the input with the third
    (e)              grouping

The first rule is the start symbol.

Core programs contain only four rule forms, encoded as plain tuples so the
table engines can dispatch on an integer kind:

    (K_EPS,)                    match the empty string
    (K_FAIL,)                   always fail
    (K_TERM, byte)              match one input byte
    (K_TERNARY, x, y, z)        try rule x; on success (consuming m) run
                                rule y on the rest; on failure run rule z
                                on the same input

Everything else desugars into these. Rules synthesized during desugaring
get names starting with ``$``, which is not a legal name character in
grammar files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class GrammarError(Exception):
    """Bad grammar text: syntax error, duplicate or undefined rule name."""

    def __init__(self, msg, line=None, col=None):
        self.msg = msg
        self.line = line
        self.col = col
        where = f" at line {line}" if line is not None else ""
        where += f", column {col}" if col is not None else ""
        super().__init__(msg + where)


# ---------------------------------------------------------------------------
# Surface syntax tree

@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Fail:
    pass


@dataclass(frozen=True)
class Terminal:
    byte: int


@dataclass(frozen=True)
class ByteClass:
    bytes: frozenset  # member byte values, never empty


@dataclass(frozen=True)
class Literal:
    text: bytes  # never empty


@dataclass(frozen=True)
class Nonterminal:
    name: str


@dataclass(frozen=True)
class Seq:
    left: object
    right: object


@dataclass(frozen=True)
class Choice:
    left: object
    right: object


@dataclass(frozen=True)
class Star:
    body: object


@dataclass(frozen=True)
class Plus:
    body: object


@dataclass(frozen=True)
class Opt:
    body: object


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class TernaryRef:
    cond: str
    cont: str
    fallback: str


@dataclass(frozen=True)
class SurfaceGrammar:
    rules: tuple  # ((name, expr), ...) in textual order
    start: str


# ---------------------------------------------------------------------------
# Core programs

K_EPS = 0
K_FAIL = 1
K_TERM = 2
K_TERNARY = 3

RESERVED = ("eps", "fail")

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TARGS_RE = re.compile(r"\[([A-Za-z_][A-Za-z0-9_]*),([A-Za-z_][A-Za-z0-9_]*)\]")


def is_simple(rule):
    return rule[0] != K_TERNARY


@dataclass
class Program:
    """An indexed core rule set. Immutable after construction."""

    rules: tuple
    names: tuple
    start: int
    condition_inverse: tuple = field(default=None)
    # flat views used by the table engines
    kind: tuple = field(default=None, repr=False)
    term: tuple = field(default=None, repr=False)
    tx: tuple = field(default=None, repr=False)
    ty: tuple = field(default=None, repr=False)
    tz: tuple = field(default=None, repr=False)
    simple_rows: tuple = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.rules)
        assert len(self.names) == n and 0 <= self.start < n
        kind, term, tx, ty, tz = [], [], [], [], []
        for r in self.rules:
            kind.append(r[0])
            term.append(r[1] if r[0] == K_TERM else None)
            if r[0] == K_TERNARY:
                tx.append(r[1])
                ty.append(r[2])
                tz.append(r[3])
            else:
                tx.append(None)
                ty.append(None)
                tz.append(None)
        self.kind = tuple(kind)
        self.term = tuple(term)
        self.tx = tuple(tx)
        self.ty = tuple(ty)
        self.tz = tuple(tz)
        self.simple_rows = tuple(i for i, r in enumerate(self.rules) if is_simple(r))
        if self.condition_inverse is None:
            self.condition_inverse = build_condition_inverse(self)

    def __len__(self):
        return len(self.rules)

    def name_of(self, i):
        return self.names[i]

    def id_of(self, name):
        return self.names.index(name)


def build_condition_inverse(p):
    """Map each rule id x to the ids of ternary rules conditioning on x."""
    inv = [[] for _ in p.rules]
    for i, r in enumerate(p.rules):
        if r[0] == K_TERNARY:
            inv[r[1]].append(i)
    return tuple(tuple(v) for v in inv)


# ---------------------------------------------------------------------------
# Text parser

_ESCAPES = {"n": 0x0A, "t": 0x09, "\\": 0x5C, "'": 0x27, '"': 0x22}


class _Cursor:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self):
        c = self.text[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def error(self, msg):
        raise GrammarError(msg, self.line, self.col)


def _scan_escape(cur):
    cur.advance()  # backslash
    c = cur.peek()
    if c == "":
        cur.error("unterminated escape")
    if c in _ESCAPES:
        cur.advance()
        return _ESCAPES[c]
    if c == "x":
        cur.advance()
        hexs = ""
        for _ in range(2):
            h = cur.peek()
            if not h or h not in "0123456789abcdefABCDEF":
                cur.error("\\x escape needs two hex digits")
            hexs += cur.advance()
        return int(hexs, 16)
    cur.error(f"unknown escape \\{c}")


def _scan_char(cur, quote):
    c = cur.peek()
    if c == "":
        cur.error("unterminated quoted text")
    if c == "\n":
        cur.error("newline in quoted text")
    if c == "\\":
        return _scan_escape(cur)
    cur.advance()
    b = ord(c)
    if b > 255:
        cur.error("non-byte character in quoted text")
    return b


def _scan_class(cur):
    # cur sits on '['
    line, col = cur.line, cur.col
    cur.advance()
    negate = False
    if cur.peek() == "^":
        negate = True
        cur.advance()
    members = set()
    while True:
        c = cur.peek()
        if c == "":
            raise GrammarError("unterminated byte class", line, col)
        if c == "]":
            cur.advance()
            break
        lo = _scan_char(cur, None)
        if cur.peek() == "-" and cur.text[cur.pos + 1 : cur.pos + 2] not in ("]", ""):
            cur.advance()
            hi = _scan_char(cur, None)
            if lo > hi:
                cur.error("byte class range out of order")
            members.update(range(lo, hi + 1))
        else:
            members.add(lo)
    if negate:
        members = set(range(256)) - members
    if not members:
        raise GrammarError("empty byte class", line, col)
    return frozenset(members)


def _tokenize(text):
    """Produce (kind, value, line, col) tuples; 'nl' carries next-line indent."""
    cur = _Cursor(text)
    toks = []
    while cur.pos < len(cur.text):
        c = cur.peek()
        line, col = cur.line, cur.col
        if c == "#":
            while cur.peek() not in ("", "\n"):
                cur.advance()
            continue
        if c == "\n":
            cur.advance()
            nxt = cur.peek()
            toks.append(("nl", nxt in (" ", "\t"), line, col))
            continue
        if c in (" ", "\t", "\r"):
            cur.advance()
            continue
        if c == "'":
            cur.advance()
            b = _scan_char(cur, "'")
            if cur.peek() != "'":
                cur.error("single-quoted text must hold exactly one byte")
            cur.advance()
            toks.append(("byte", b, line, col))
            continue
        if c == '"':
            cur.advance()
            out = []
            while cur.peek() != '"':
                out.append(_scan_char(cur, '"'))
            cur.advance()
            if not out:
                raise GrammarError("empty literal", line, col)
            toks.append(("literal", bytes(out), line, col))
            continue
        if c == "[":
            toks.append(("class", _scan_class(cur), line, col))
            continue
        if c == "<" and cur.text[cur.pos : cur.pos + 2] == "<-":
            cur.advance()
            cur.advance()
            toks.append(("arrow", None, line, col))
            continue
        if c in "/!*+?()":
            cur.advance()
            toks.append((c, None, line, col))
            continue
        m = _NAME_RE.match(cur.text, cur.pos)
        if m:
            name = m.group(0)
            for _ in name:
                cur.advance()
            # a gapless '[' after a name opens ternary arguments, not a class
            if cur.peek() == "[":
                t = _TARGS_RE.match(cur.text, cur.pos)
                if t:
                    for _ in t.group(0):
                        cur.advance()
                    toks.append(("ternary", (name, t.group(1), t.group(2)), line, col))
                    continue
                if name not in RESERVED:
                    cur.error("malformed ternary arguments (expected name[name,name])")
            toks.append(("name", name, line, col))
            continue
        cur.error(f"unexpected character {c!r}")
    toks.append(("eof", None, cur.line, cur.col))
    return toks


class _RuleParser:
    """Recursive descent over the token stream for a single rule body."""

    def __init__(self, toks, i, refs):
        self.toks = toks
        self.i = i
        self.refs = refs  # (name, line, col) of every nonterminal reference

    def _skip_continuations(self):
        while self.toks[self.i][0] == "nl" and self.toks[self.i][1]:
            self.i += 1

    def peek(self):
        self._skip_continuations()
        return self.toks[self.i]

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise GrammarError(msg, tok[2], tok[3])

    def parse_expr(self):
        left = self.parse_seq()
        if self.peek()[0] == "/":
            self.take()
            return Choice(left, self.parse_expr())
        return left

    _ATOM_STARTS = frozenset(["byte", "literal", "class", "name", "ternary", "("])

    def parse_seq(self):
        parts = [self.parse_prefixed()]
        while self.peek()[0] in self._ATOM_STARTS or self.peek()[0] == "!":
            parts.append(self.parse_prefixed())
        expr = parts[-1]
        for p in reversed(parts[:-1]):
            expr = Seq(p, expr)
        return expr

    def parse_prefixed(self):
        if self.peek()[0] == "!":
            self.take()
            return Not(self.parse_prefixed())
        return self.parse_postfix()

    def parse_postfix(self):
        e = self.parse_atom()
        while True:
            k = self.peek()[0]
            if k == "*":
                self.take()
                e = Star(e)
            elif k == "+":
                self.take()
                e = Plus(e)
            elif k == "?":
                self.take()
                e = Opt(e)
            else:
                return e

    def parse_atom(self):
        kind, value, line, col = self.peek()
        if kind == "byte":
            self.take()
            return Terminal(value)
        if kind == "literal":
            self.take()
            return Literal(value)
        if kind == "class":
            self.take()
            return ByteClass(value)
        if kind == "ternary":
            self.take()
            x, y, z = value
            for n in value:
                if n in RESERVED:
                    self.error(f"ternary argument {n!r} must be a rule name")
                self.refs.append((n, line, col))
            return TernaryRef(x, y, z)
        if kind == "name":
            self.take()
            if value == "eps":
                return Empty()
            if value == "fail":
                return Fail()
            self.refs.append((value, line, col))
            return Nonterminal(value)
        if kind == "(":
            self.take()
            e = self.parse_expr()
            if self.peek()[0] != ")":
                self.error("expected ')'")
            self.take()
            return e
        self.error("expected an expression")


def parse_grammar(text):
    """Parse grammar text (str or UTF-8 bytes) into a SurfaceGrammar."""
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8")
    toks = _tokenize(text)
    refs = []
    rules = []
    seen = {}
    i = 0
    while True:
        while toks[i][0] == "nl":
            i += 1
        if toks[i][0] == "eof":
            break
        kind, name, line, col = toks[i]
        if kind != "name":
            raise GrammarError("expected a rule definition", line, col)
        if name in RESERVED:
            raise GrammarError(f"{name!r} is reserved and cannot name a rule", line, col)
        if name in seen:
            raise GrammarError(f"duplicate definition of {name!r}", line, col)
        seen[name] = True
        i += 1
        if toks[i][0] != "arrow":
            raise GrammarError("expected '<-'", toks[i][2], toks[i][3])
        i += 1
        rp = _RuleParser(toks, i, refs)
        expr = rp.parse_expr()
        i = rp.i
        if toks[i][0] not in ("nl", "eof"):
            raise GrammarError("unexpected trailing input", toks[i][2], toks[i][3])
        rules.append((name, expr))
    if not rules:
        raise GrammarError("grammar defines no rules")
    for name, line, col in refs:
        if name not in seen:
            raise GrammarError(f"undefined rule {name!r}", line, col)
    return SurfaceGrammar(rules=tuple(rules), start=rules[0][0])


# ---------------------------------------------------------------------------
# Desugaring

class _Builder:
    def __init__(self, g):
        self.g = g
        self.names = [name for name, _ in g.rules]
        self.rules = [None] * len(self.names)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.eps = None
        self.fail = None
        self.terms = {}
        self.classes = {}
        self.counter = 0

    def fresh(self, name):
        rid = len(self.names)
        self.names.append(name)
        self.rules.append(None)
        return rid

    def eps_id(self):
        if self.eps is None:
            self.eps = self.fresh("$eps")
            self.rules[self.eps] = (K_EPS,)
        return self.eps

    def fail_id(self):
        if self.fail is None:
            self.fail = self.fresh("$fail")
            self.rules[self.fail] = (K_FAIL,)
        return self.fail

    def term_id(self, b):
        rid = self.terms.get(b)
        if rid is None:
            rid = self.fresh(f"$t{b:02x}")
            self.rules[rid] = (K_TERM, b)
            self.terms[b] = rid
        return rid

    def class_id(self, members):
        rid = self.classes.get(members)
        if rid is None:
            rid = self.sub(self._class_tree(sorted(members)))
            self.classes[members] = rid
        return rid

    def _class_tree(self, bs):
        # balanced choice tree keeps the expansion stack logarithmic
        if len(bs) == 1:
            return Terminal(bs[0])
        mid = len(bs) // 2
        return Choice(self._class_tree(bs[:mid]), self._class_tree(bs[mid:]))

    def sub(self, e):
        """Rule id whose behavior is e, reusing shared rules where possible."""
        if isinstance(e, Empty):
            return self.eps_id()
        if isinstance(e, Fail):
            return self.fail_id()
        if isinstance(e, Nonterminal):
            return self.index[e.name]
        if isinstance(e, Terminal):
            return self.term_id(e.byte)
        if isinstance(e, ByteClass):
            return self.class_id(e.bytes)
        self.counter += 1
        rid = self.fresh(f"${self.counter}")
        self.fill(rid, e)
        return rid

    def fill(self, rid, e):
        if isinstance(e, Empty):
            self.rules[rid] = (K_EPS,)
        elif isinstance(e, Fail):
            self.rules[rid] = (K_FAIL,)
        elif isinstance(e, Terminal):
            self.rules[rid] = (K_TERM, e.byte)
        elif isinstance(e, TernaryRef):
            self.rules[rid] = (
                K_TERNARY,
                self.index[e.cond],
                self.index[e.cont],
                self.index[e.fallback],
            )
        elif isinstance(e, Nonterminal):
            # core rules cannot alias, so wrap: x[eps,fail] behaves like x
            self.rules[rid] = (K_TERNARY, self.index[e.name], self.eps_id(), self.fail_id())
        elif isinstance(e, Seq):
            if isinstance(e.left, Star):
                # e1* e2 == (e1 (e1* e2)) / e2 for the possessive star, which
                # saves a rule pair and keeps the loop tail-recursive
                self.rules[rid] = (K_TERNARY, self.sub(e.left.body), rid, self.sub(e.right))
            else:
                self.rules[rid] = (K_TERNARY, self.sub(e.left), self.sub(e.right), self.fail_id())
        elif isinstance(e, Choice):
            self.rules[rid] = (K_TERNARY, self.sub(e.left), self.eps_id(), self.sub(e.right))
        elif isinstance(e, Star):
            self.rules[rid] = (K_TERNARY, self.sub(e.body), rid, self.eps_id())
        elif isinstance(e, Plus):
            self.fill(rid, Seq(e.body, Star(e.body)))
        elif isinstance(e, Opt):
            self.fill(rid, Choice(e.body, Empty()))
        elif isinstance(e, Not):
            self.rules[rid] = (K_TERNARY, self.sub(e.body), self.fail_id(), self.eps_id())
        elif isinstance(e, ByteClass):
            self.fill(rid, self._class_tree(sorted(e.bytes)))
        elif isinstance(e, Literal):
            expr = Terminal(e.text[-1])
            for b in reversed(e.text[:-1]):
                expr = Seq(Terminal(b), expr)
            self.fill(rid, expr)
        else:  # pragma: no cover
            raise TypeError(f"unknown surface expression {e!r}")


def desugar(g):
    """Reduce a surface grammar to an equivalent core Program."""
    b = _Builder(g)
    for (name, expr) in g.rules:
        b.fill(b.index[name], expr)
    return Program(rules=tuple(b.rules), names=tuple(b.names), start=0)


def load_program(text):
    return desugar(parse_grammar(text))
