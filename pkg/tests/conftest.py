"""Shared corpus and the independent reference interpreters.

Two interpreters live here, deliberately outside the package:

* ``peg_eval``  — a direct recursive interpreter of the surface notation,
  used to check that desugaring preserves meaning.
* ``core_eval`` — a memoized recursive interpreter of the core rules that
  reports BOTTOM on (rule, offset) re-entry along the active call path,
  used to check the tabular oracle.

Both return FAIL, BOTTOM, or the number of bytes consumed, matching the
table entry encoding.
"""

import itertools

import pytest

from pegstream import grammar as G
from pegstream import load_program, parse_grammar
from pegstream.table import BOTTOM, FAIL

# ---------------------------------------------------------------------------
# corpus: small grammars over {a, b} for exhaustive-input properties

CORPUS = {
    "example": "S <- ('a'* 'b' / eps) 'a'*\n",
    "nfa": "S <- 'a' S / 'a' T / 'b' E\nT <- 'a' S\nE <- eps\n",
    "pairs": "S <- 'a' S 'b' / eps\n",
    "lookahead": "S <- !'a' 'b' S / 'a' S / eps\n",
    "buffering": "S <- ('a' / 'b')* 'a' 'b'\n",
    "ternary": "S <- X[Y,Z]\nX <- 'a' 'a' / 'b'\nY <- S\nZ <- 'b' 'b' / eps\n",
    "undefined": "S <- L 'a' / 'b'\nL <- L\n",
    "stall": "S <- eps* 'a' / 'b'\n",
    "literals": 'S <- "ab"* [ab] / eps\n',
    "sugar": "S <- 'a'+ 'b'? !'a' 'b'*\n",
    "plusopt": "S <- ('a' 'b')+ ('b' 'a')?\n",
}


@pytest.fixture(scope="session")
def corpus():
    return {name: parse_grammar(text) for name, text in CORPUS.items()}


@pytest.fixture(scope="session")
def corpus_programs():
    return {name: load_program(text) for name, text in CORPUS.items()}


def all_inputs(max_len, alphabet=b"ab"):
    for n in range(max_len + 1):
        for tup in itertools.product(alphabet, repeat=n):
            yield bytes(tup)


# ---------------------------------------------------------------------------
# direct interpreter of the surface notation

def peg_eval(g, data, name=None):
    env = dict(g.rules)
    memo = {}
    active = set()

    def call(n, pos):
        key = (n, pos)
        if key in memo:
            return memo[key]
        if key in active:
            return BOTTOM
        active.add(key)
        v = ev(env[n], pos)
        active.discard(key)
        memo[key] = v
        return v

    def ev(e, pos):
        if isinstance(e, G.Empty):
            return 0
        if isinstance(e, G.Fail):
            return FAIL
        if isinstance(e, G.Terminal):
            return 1 if pos < len(data) and data[pos] == e.byte else FAIL
        if isinstance(e, G.ByteClass):
            return 1 if pos < len(data) and data[pos] in e.bytes else FAIL
        if isinstance(e, G.Literal):
            return len(e.text) if data[pos : pos + len(e.text)] == e.text else FAIL
        if isinstance(e, G.Nonterminal):
            return call(e.name, pos)
        if isinstance(e, G.Seq):
            a = ev(e.left, pos)
            if a < 0:
                return a
            b = ev(e.right, pos + a)
            return b if b < 0 else a + b
        if isinstance(e, G.Choice):
            a = ev(e.left, pos)
            if a == FAIL:
                return ev(e.right, pos)
            return a
        if isinstance(e, G.Star):
            total = 0
            while True:
                a = ev(e.body, pos + total)
                if a == FAIL:
                    return total
                if a == BOTTOM:
                    return BOTTOM
                if a == 0:
                    return BOTTOM  # the loop would spin forever
                total += a
        if isinstance(e, G.Plus):
            return ev(G.Seq(e.body, G.Star(e.body)), pos)
        if isinstance(e, G.Opt):
            return ev(G.Choice(e.body, G.Empty()), pos)
        if isinstance(e, G.Not):
            a = ev(e.body, pos)
            if a == BOTTOM:
                return BOTTOM
            return 0 if a == FAIL else FAIL
        if isinstance(e, G.TernaryRef):
            c = call(e.cond, pos)
            if c == BOTTOM:
                return BOTTOM
            if c == FAIL:
                return call(e.fallback, pos)
            r = call(e.cont, pos + c)
            return r if r < 0 else c + r
        raise TypeError(e)

    return call(name or g.start, 0)


# ---------------------------------------------------------------------------
# memoized recursive interpreter of the core rules

def core_eval(program, rule, data, offset=0):
    memo = {}
    active = set()

    def call(i, j):
        key = (i, j)
        if key in memo:
            return memo[key]
        if key in active:
            return BOTTOM
        active.add(key)
        k = program.kind[i]
        if k == G.K_EPS:
            v = 0
        elif k == G.K_FAIL:
            v = FAIL
        elif k == G.K_TERM:
            v = 1 if j < len(data) and data[j] == program.term[i] else FAIL
        else:
            c = call(program.tx[i], j)
            if c == BOTTOM:
                v = BOTTOM
            elif c == FAIL:
                v = call(program.tz[i], j)
            else:
                r = call(program.ty[i], j + c)
                v = r if r < 0 else c + r
        active.discard(key)
        memo[key] = v
        return v

    return call(rule, offset)


# ---------------------------------------------------------------------------
# Kleene iteration of the restricted table operator, from the empty table

def kleene_prefix_table(program, window):
    """Least fixed point by global sweeps; the slow reference for fix()."""
    n = len(window)
    nrules = len(program.rules)
    cols = [[BOTTOM] * nrules for _ in range(n)]

    def value(i, j):
        k = program.kind[i]
        if k == G.K_EPS:
            return 0
        if k == G.K_FAIL:
            return FAIL
        if k == G.K_TERM:
            return 1 if window[j] == program.term[i] else FAIL
        cv = cols[j][program.tx[i]]
        if cv == BOTTOM:
            return BOTTOM
        if cv == FAIL:
            return cols[j][program.tz[i]]
        j2 = j + cv
        yv = cols[j2][program.ty[i]] if j2 < n else BOTTOM
        if yv == BOTTOM:
            return BOTTOM
        return FAIL if yv == FAIL else cv + yv

    changed = True
    while changed:
        changed = False
        for j in range(n):
            col = cols[j]
            for i in range(nrules):
                if col[i] == BOTTOM:
                    v = value(i, j)
                    if v != BOTTOM:
                        col[i] = v
                        changed = True
    return cols
