import random

import pytest

from pegstream import load_program
from pegstream.fixtures import read_text
from pegstream.oracle import (
    CodeError,
    Internal,
    Leaf,
    build_code,
    decode,
    flatten,
    full_table,
    match,
    tree_size,
)
from pegstream.table import BOTTOM, FAIL

from conftest import CORPUS, all_inputs, core_eval

GOLDEN_AA = """\
S: 2 1 0
L: 0 0 0
P: f f f
R: 2 1 0
A: 1 1 f
B: f f f
E: 0 0 0
F: f f f
"""

GOLDEN_AABA = """\
S: 4 3 2 1 0
L: 3 2 1 0 0
P: 3 2 1 f f
R: 2 1 0 1 0
A: 1 1 f 1 f
B: f f 1 f f
E: 0 0 0 0 0
F: f f f f f
"""


@pytest.fixture(scope="module")
def example():
    return load_program(read_text("example_core.peg"))


def ids(p):
    return {name: i for i, name in enumerate(p.names)}


def test_full_table_golden_dumps(example):
    assert full_table(example, b"aa").dump() == GOLDEN_AA
    assert full_table(example, b"aaba").dump() == GOLDEN_AABA


def test_full_table_empty_input(example):
    t = full_table(example, b"")
    assert t.ncols == 1
    i = ids(example)
    assert t.read(i["E"], 0) == 0
    assert t.read(i["A"], 0) == FAIL
    assert t.read(i["F"], 0) == FAIL
    assert t.read(i["S"], 0) == 0  # resolved by the column fixed point


def test_match_examples(example):
    p = example
    i = ids(p)
    assert match(p, p.start, b"aa") == 2
    assert match(p, p.start, b"aaba") == 4
    for u in (b"", b"a", b"b", b"abab"):
        assert match(p, i["E"], u) == 0


def test_build_code_golden(example):
    p = example
    assert build_code(p, full_table(p, b"aa"), p.start) == "01001"
    assert build_code(p, full_table(p, b"aaba"), p.start) == "0000101"


def test_build_code_simple_rule_is_empty(example):
    p = example
    i = ids(p)
    assert build_code(p, full_table(p, b"x"), i["E"]) == ""


def test_build_code_rejects_non_matches(example):
    p = example
    i = ids(p)
    t = full_table(p, b"aa")
    with pytest.raises(CodeError):
        build_code(p, t, i["P"])  # P fails on aa
    undef = load_program("S <- L\nL <- L\n")
    with pytest.raises(CodeError):
        build_code(undef, full_table(undef, b"a"), undef.start)  # cell stays unresolved


def test_decode_reconstructs_example_tree(example):
    p = example
    i = ids(p)
    tree = decode(p, p.start, "01001", b"aa")
    # root S with tag 0: failed-choice L subtree, then the aa-consuming R spine
    assert tree.rule == p.start and tree.tag == 0
    left, right = tree.children
    assert left.rule == i["L"] and left.tag == 1
    (e_node,) = left.children
    assert e_node.rule == i["E"] and e_node.children == [Leaf(None)]
    assert right.rule == i["R"] and right.tag == 0
    assert flatten(tree) == b"aa"


def test_decode_eps_leaf_tree(example):
    p = example
    i = ids(p)
    tree = decode(p, i["E"], "", b"")
    assert tree == Internal(i["E"], None, [Leaf(None)])
    assert tree_size(tree) == 2


def test_decode_flatten_round_trip(example):
    p = example
    tree = decode(p, p.start, "0000101", b"aaba")
    assert flatten(tree) == b"aaba"


def test_decode_malformed_codes(example):
    p = example
    with pytest.raises(CodeError, match="exhausted"):
        decode(p, p.start, "010", b"aa")
    with pytest.raises(CodeError, match="trailing"):
        decode(p, p.start, "010011", b"aa")
    with pytest.raises(CodeError):
        decode(p, p.start, "01001", b"bb")  # wrong input for the code


def test_round_trip_build_then_decode_on_corpus():
    for name, text in sorted(CORPUS.items()):
        p = load_program(text)
        for u in all_inputs(6):
            t = full_table(p, u)
            m = t.read(p.start, 0)
            if m < 0:
                continue
            code = build_code(p, t, p.start)
            tree = decode(p, p.start, code, u)
            assert flatten(tree) == u[:m], (name, u)


def test_build_code_is_deterministic(example):
    p = example
    for u in (b"aa", b"aaba", b"ba"):
        t1, t2 = full_table(p, u), full_table(p, u)
        assert build_code(p, t1, p.start) == build_code(p, t2, p.start)


def test_tree_size_of_example_tree(example):
    # 9 rule nodes + 4 leaves; hand-counted from the worked derivation
    tree = decode(example, example.start, "01001", b"aa")
    assert tree_size(tree) == 13


def test_tree_size_grows_linearly(example):
    p = example
    rng = random.Random(3)
    # fit the slope on short inputs, then check it holds well past them
    def size_for(u):
        t = full_table(p, u)
        if t.read(p.start, 0) < 0:
            return None
        return tree_size(decode(p, p.start, build_code(p, t, p.start), u))

    c = 0.0
    for u in all_inputs(6):
        s = size_for(u)
        if s is not None:
            c = max(c, s / (len(u) + 1))
    for n in (10, 20, 40):
        for _ in range(20):
            u = bytes(rng.choice(b"ab") for _ in range(n))
            s = size_for(u)
            if s is not None:
                assert s <= c * (n + 1) + c


@pytest.mark.parametrize("name", ["example", "nfa", "pairs", "ternary", "undefined", "stall"])
def test_oracle_agrees_with_memoized_interpreter(name):
    p = load_program(CORPUS[name])
    for u in all_inputs(10):
        t = full_table(p, u)
        for row in range(len(p.rules)):
            assert t.read(row, 0) == core_eval(p, row, u), (name, u, p.names[row])


def test_oracle_interpreter_agreement_all_offsets(corpus_programs):
    for name, p in sorted(corpus_programs.items()):
        for u in all_inputs(6):
            t = full_table(p, u)
            for j in range(len(u) + 1):
                for row in range(len(p.rules)):
                    assert t.read(row, j) == core_eval(p, row, u, j), (name, u, j)


def test_constant_tail_column(corpus_programs):
    # past the input, every column sees only end markers, so the last
    # stored column must equal the one-column table of the empty input
    for name, p in sorted(corpus_programs.items()):
        empty = full_table(p, b"")
        for u in all_inputs(5):
            t = full_table(p, u)
            for row in range(len(p.rules)):
                assert t.read(row, len(u)) == empty.read(row, 0), (name, u)
