"""The eight acceptance criteria.  A summary line per criterion is printed at the end."""

import random
import string
import time
from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

import quanta as q
from quanta.formats import decode_stream, encode_stream, parse_by_model, serialize_by_model
from quanta.infons import Bool, Collection, Int, IntRange, String, info_measure
from quanta.normalizer import EffectChannel
from quanta.sequences import SeqStore, Sequence

from conftest import CORPUS, corpus_files, run

C1 = "1 corpus goldens"
C2 = "2 termination fuzz against an arbitrary-precision oracle"
C3 = "3 fixed point and confluence"
C4 = "4 sequence invariants"
C5 = "5 model serialize/parse round trip"
C6 = "6 command coherence"
C7 = "7 boolean-query totality"
C8 = "8 measure checks"


def timed(src, ctx=None):
    start = time.perf_counter()
    r = run(src, ctx)
    assert time.perf_counter() - start < 1.0
    return r


def corpus(stem):
    return (CORPUS / (stem + ".qta")).read_text()


# ------------------------------------------------------------------ 1


@pytest.mark.criterion(C1)
def test_goldens():
    assert timed("2+3").value == Int(5)

    r = timed("7*0")
    assert r.value == Int(0) and r.trace[0].rule.startswith("SHORTCUT %x * 0")

    r = timed("3+2")
    assert [q.to_source(s.after) for s in r.trace] == ["2 + 3", "5"]

    r = timed(corpus("flatten"))
    flat = q.resolve_name(r.context, q.parse_program("<C>"))
    assert flat == q.parse_program("{red, green, a, b, c, blue}")
    assert len(flat.items) == 6

    assert timed(corpus("splice")).value == Bool(True)
    assert timed(corpus("ralph")).value.items[1:] == (Bool(True),) * 3
    assert timed("2+2?").value == Bool(True)
    assert timed(corpus("arrays")).value.items[-1] == Bool(True)
    assert timed(corpus("one_more")).value.items[-1] == Int(6)

    r = timed(corpus("simple_objs"))
    assert "".join(r.effects) == "36\n"
    assert q.to_source(run("<MySO.age$>", r.context).value) == "${35, 36}"

    r = timed(corpus("char_arrays"))
    for query in ['<Seq.Header> == <Seq.0> == <Seq.first> == "HEAD"?',
                  "<Seq.condition> == <Seq.1> == <Seq.first.next> == A?"]:
        assert run(query, r.context).value == Bool(True)


@pytest.mark.xfail(strict=True, reason="positional <Seq.3> is the spliced 'a'; no consistent "
                                       "indexing of HEAD,A,5,a,b,c,d,e puts b at 3")
@pytest.mark.criterion(C1)
def test_seq_3_is_b():
    r = run(corpus("char_arrays"))
    assert run("<Seq.3> == b?", r.context).value == Bool(True)


# ------------------------------------------------------------------ 2

ORACLE = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": gmpy2.t_div,
}


def random_expr(rnd, depth):
    if depth == 0 or rnd.random() < 0.3:
        v = rnd.randint(0, 10 ** 6)
        return str(v), gmpy2.mpz(v)
    op = rnd.choice("+-*/")
    ls, lv = random_expr(rnd, depth - 1)
    rs, rv = random_expr(rnd, depth - 1)
    if op == "/" and rv == 0:
        op = "*"
    return "(%s %s %s)" % (ls, op, rs), ORACLE[op](lv, rv)


@pytest.mark.criterion(C2)
def test_termination_fuzz():
    rnd = random.Random(20240601)
    world = q.create_context()
    wrong = []
    for _ in range(10 ** 4):
        src, want = random_expr(rnd, 6)
        got = q.normalize(world, q.parse_program(src), budget=10 ** 5, trace=False).value
        if got != Int(int(want)):
            wrong.append((src, int(want), got))
    assert wrong == []


# ------------------------------------------------------------------ 3


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
@pytest.mark.criterion(C3)
def test_fixed_point_and_confluence(path):
    src = path.read_text()
    world = q.create_context()
    first = run(src, world)
    assert q.normalize(world, first.value, effects=EffectChannel(None)).value == first.value
    for seed in range(5):
        assert run(src, seed=seed).value == first.value


# ------------------------------------------------------------------ 4

seqs = st.lists(st.integers(-10 ** 9, 10 ** 9), max_size=100)


@settings(max_examples=200)
@given(seqs)
@pytest.mark.criterion(C4)
def test_linkage_and_fields(xs):
    s = Sequence(Int(x) for x in xs)
    s.check_links()
    for n in s.nodes():
        assert n.next is None or n.next.prev is n
        assert n.prev is None or n.prev.next is n
    assert s.size == len(list(s)) == len(xs)
    coll = Collection(tuple(Int(x) for x in xs), seq=True)
    assert q.resolve_name(run("<S> == %s;" % q.to_source(coll)).context,
                          q.parse_program("<S.size>")) == Int(len(xs))
    if xs:
        assert s.node_at(0) is s.first
        assert s.node_at(len(xs) - 1) is s.last


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("ABCXYZ"), max_size=10),
       st.lists(st.sampled_from("ABCXYZ"), max_size=10), st.data())
@pytest.mark.criterion(C4)
def test_interspersing_invariance(left, right, data):
    order = data.draw(st.permutations("L" * len(left) + "R" * len(right)))
    li, ri = iter(left), iter(right)
    body = ["<chars> $: <Start>;", "<chars> $: <End>;"]
    body += ["<Start> == %s;" % next(li) if side == "L" else "<End> == %s;" % next(ri)
             for side in order]
    ctx = run("${%s}" % " ".join(body)).context
    for name, want in (("Start", left), ("End", right)):
        got = q.resolve_name(ctx, q.parse_program("<%s$>" % name))
        assert [s.value for s in got.items] == want


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-999, 999), max_size=20))
@pytest.mark.criterion(C4)
def test_dollar_forms_are_equivalent(xs):
    writes = " ".join("<x> == %d;" % x for x in xs)
    snaps = []
    for decl in ("$<ints> : <x>", "<ints> $: <x>"):
        binding, _ = run("{%s; %s}" % (decl, writes)).context.lookup(("x",))
        assert isinstance(binding, SeqStore)
        snaps.append(binding.snapshot())
    assert snaps[0] == snaps[1]


# ------------------------------------------------------------------ 5

CHAR_ARRAYS = "@${<ints>:<Length>, #for $i: $0..<Length> :: <char>:<%i>}"
SEQ_MODEL = ('${<strings>:<Header> == "HEAD"; <char>:<condition>; '
             '#if (<condition> == "A") ? <charArrays>;}')
ALPHABET = string.ascii_letters + string.digits + string.punctuation + " "


def random_fields(rnd):
    cond = "A" if rnd.random() < 0.7 else rnd.choice(ALPHABET.replace("A", ""))
    fields = {"Header": String("HEAD"), "condition": String(cond)}
    if cond == "A":
        n = rnd.randint(0, 30)
        fields["Length"] = Int(n)
        for i in range(n):
            fields[str(i)] = String(rnd.choice(ALPHABET))
    return fields


@pytest.mark.criterion(C5)
def test_model_round_trip():
    ctx = run("{<charArrays> == %s;}" % CHAR_ARRAYS).context
    seq_model = q.parse_program(SEQ_MODEL)
    array_model = q.resolve_name(ctx, q.parse_program("<charArrays>")).body
    rnd = random.Random(5)
    for _ in range(10 ** 3):
        fields = random_fields(rnd)
        for model, want in ((seq_model, fields),
                            (array_model, {k: v for k, v in fields.items()
                                           if k not in ("Header", "condition")})):
            if model is array_model and "Length" not in want:
                continue
            text = encode_stream(serialize_by_model(ctx, model, want))
            assert parse_by_model(ctx, model, decode_stream(text)) == want
            again = encode_stream(serialize_by_model(ctx, model, parse_by_model(ctx, model, text)))
            assert again == text


# ------------------------------------------------------------------ 6


@pytest.mark.criterion(C6)
def test_command_then_query():
    rnd = random.Random(6)
    for k in range(200):
        name = "N%d" % k
        if rnd.random() < 0.5:
            cls, vals = "ints", [str(rnd.randint(-10 ** 12, 10 ** 12)) for _ in range(3)]
        else:
            cls, vals = "strings", ['"%s"' % "".join(rnd.choice("xyz") for _ in range(4))
                                    for _ in range(3)]
        src = "{<%s> $: <%s>; %s}" % (cls, name, " ".join("<%s> == %s!;" % (name, v) for v in vals))
        ctx = run(src).context
        assert run("<%s> == %s?" % (name, vals[-1]), ctx).value == Bool(True)


@pytest.mark.criterion(C6)
def test_multiplication_table():
    golden = "".join("".join("%s " % (gmpy2.mpz(x) * y) for y in range(11)) + "\n"
                     for x in range(11))
    assert "".join(run(corpus("mult_table")).effects) == golden


@pytest.mark.criterion(C6)
def test_count_b_twice():
    ctx = run(corpus("count_b")).context
    assert run("<B$>", ctx).value == Collection(tuple(Int(v) for v in list(range(1, 11)) * 2),
                                                seq=True)


# ------------------------------------------------------------------ 7


def random_query(rnd, depth=0):
    def num():
        return str(rnd.randint(-50, 50))

    def lit():
        return rnd.choice([num(), rnd.choice("abc"), '"%s"' % rnd.choice("xy"), "{a, b}",
                           "[1, 2]", "${a, b}", "true", "false", "{}"])

    def arith():
        return "(%s %s %s)" % (num(), rnd.choice("+-*"), num())

    def cls():
        return rnd.choice(["<ints>", "<strings>", "<chars>", "<bools>", "<numbers>",
                           "%s..%s" % (num(), num()), "{a, b, 1}", "(complement {a})",
                           "difference({a, b, c}, {b})", "intersection {{a, b}, {b, c}}"])

    kind = rnd.randrange(6 if depth < 2 else 5)
    if kind == 0:
        return "%s %s %s" % (arith(), rnd.choice(["gt", "lt", "ge", "le", "eq"]), arith())
    if kind == 1:
        return "%s == %s" % (arith(), num())
    if kind == 2:
        return "%s == %s" % (lit(), lit())
    if kind == 3:
        return "%s : %s" % (cls(), lit())
    if kind == 4:
        return "(%s) == %s" % (random_query(rnd, depth + 1), rnd.choice(["true", "false"]))
    return "{%s; %s}" % (random_query(rnd, depth + 1), random_query(rnd, depth + 1))


@pytest.mark.criterion(C7)
def test_closed_queries_are_bools():
    rnd = random.Random(7)
    world = q.create_context()
    residue = []
    for _ in range(10 ** 3):
        src = "(%s)?" % random_query(rnd)
        v = q.normalize(world, q.parse_program(src), trace=False).value
        if not isinstance(v, Bool):
            residue.append((src, q.to_source(v)))
    assert residue == []


# ------------------------------------------------------------------ 8


@pytest.mark.criterion(C8)
def test_measures():
    assert info_measure(Collection()).bits == 0
    for b in (1, 8, 16):
        assert info_measure(IntRange(Int(0), Int(2 ** b - 1))).bits == b
        system = q.parse_program("<System>")
        assert info_measure(system, {system.tag: 2 ** b}).bits == b
    a = q.parse_program("{<p> == 0..255; <f> == <bools>;}")
    b = q.parse_program("{<w> == 0..65535;}")
    joined = Collection(a.items + b.items)
    assert info_measure(joined).bits == info_measure(a).bits + info_measure(b).bits == Fraction(25)
