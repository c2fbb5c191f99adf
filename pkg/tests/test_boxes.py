import random
from fractions import Fraction

import pytest

from nsboxes import (
    CLASS4_CONSTRAINTS,
    Box2,
    Box3,
    ConstraintSet,
    ContradictionError,
    InvalidBoxError,
    ParseError,
    Relabeling,
    SignallingError,
    UnknownBuiltinError,
    all_relabelings2,
    build_from_constraints,
    builtin,
    correlator,
    dumps,
    index2,
    index3,
    loads,
    marginal,
    mix,
    relabel,
    validate,
)

SEED = 20240917

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)
EIGHTH = Fraction(1, 8)


def test_flat_index_layout():
    assert index3(0, 0, 0, 0, 0, 0) == 0
    assert index3(0, 0, 1, 0, 0, 0) == 1
    assert index3(1, 1, 1, 1, 1, 1) == 63
    assert index3(0, 0, 0, 1, 0, 0) == 32
    assert index2(0, 0, 0, 0) == 0
    assert index2(1, 1, 1, 1) == 15
    assert index2(0, 1, 1, 0) == 9


def test_builtin_tables_are_normalized_and_nonsignalling():
    names = [
        "class3",
        "class4",
        "class44",
        "pr",
        "uniform3",
        "uniform2",
        "deterministic(0,0,0)",
        "deterministic(3,1,2)",
    ]
    for name in names:
        report = validate(builtin(name))
        assert report.is_valid, (name, report.lines())


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltinError):
        builtin("class5")
    with pytest.raises(UnknownBuiltinError):
        builtin("deterministic(4,0,0)")


def test_class3_defining_entries():
    box = builtin("class3")
    # x = 0 sector: perfect a = b correlation, c uniform and independent.
    assert box.prob(0, 0, 0, 0, 0, 0) == QUARTER
    assert box.prob(0, 0, 1, 0, 0, 0) == QUARTER
    assert box.prob(0, 1, 0, 0, 0, 0) == 0
    # x = 1, z = 0: perfect a = c correlation, b uniform.
    assert box.prob(0, 0, 0, 1, 0, 0) == QUARTER
    assert box.prob(0, 1, 0, 1, 0, 0) == QUARTER
    assert box.prob(1, 0, 0, 1, 0, 0) == 0
    # x = 1, z = 1: three-party parity, sign set by y.
    assert box.prob(0, 0, 0, 1, 0, 1) == QUARTER
    assert box.prob(0, 1, 1, 1, 0, 1) == QUARTER
    assert box.prob(0, 0, 1, 1, 0, 1) == 0
    assert box.prob(0, 0, 0, 1, 1, 1) == 0
    assert box.prob(0, 0, 1, 1, 1, 1) == EIGHTH * 2


def test_class4_entries_never_exceed_one_quarter():
    box = builtin("class4")
    assert set(box.table) == {Fraction(0), QUARTER}
    for v in box.table:
        assert v <= QUARTER


def test_class4_satisfies_its_parity_constraints():
    box = builtin("class4")
    # a0 + b1 = 0 reads: at x=0, y=1 the outputs a and b agree.
    for z in (0, 1):
        for c in (0, 1):
            assert box.prob(0, 1, c, 0, 1, z) == 0
            assert box.prob(1, 0, c, 0, 1, z) == 0
    # a0 + b0 + c0 = 0: even output parity at (0, 0, 0).
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                v = box.prob(a, b, c, 0, 0, 0)
                assert (v == 0) == ((a + b + c) % 2 == 1)
    # a1 + b1 + c1 = 1: odd output parity at (1, 1, 1).
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                v = box.prob(a, b, c, 1, 1, 1)
                assert (v == 0) == ((a + b + c) % 2 == 0)


def test_class44_parity_relation():
    box = builtin("class44")
    for i in range(64):
        a, b, c = (i >> 2) & 1, (i >> 1) & 1, i & 1
        x, y, z = (i >> 5) & 1, (i >> 4) & 1, (i >> 3) & 1
        if (a + b + c) % 2 == (x * y * z):
            assert box.table[i] == QUARTER
        else:
            assert box.table[i] == 0


def test_pr_box_correlators():
    pr = builtin("pr")
    for x in (0, 1):
        for y in (0, 1):
            expected = Fraction(-1) if x == y == 1 else Fraction(1)
            assert correlator(pr, (0, 1), (x, y)) == expected


def test_deterministic_builtin_follows_truth_tables():
    box = builtin("deterministic(2,1,3)")
    # party A: tt 2 -> a = x; party B: tt 1 -> b = 1 - y; party C: tt 3 -> c = 1.
    for x in (0, 1):
        for y in (0, 1):
            for z in (0, 1):
                assert box.prob(x, 1 - y, 1, x, y, z) == 1


def test_validate_flags_negative_entry():
    table = list(builtin("uniform2").table)
    table[0] += 1
    table[1] -= 1
    report = validate(Box2(tuple(table)))
    assert not report.is_valid
    assert report.negative_entries
    assert any("negative" in line for line in report.lines())


def test_validate_flags_normalization():
    table = list(builtin("uniform3").table)
    table[0] += Fraction(1, 16)
    report = validate(Box3(tuple(table)))
    assert not report.is_valid
    assert report.normalization_failures


def test_validate_flags_signalling():
    # b copies x: perfectly normalized but signalling from A to B.
    def fn(a, b, x, y):
        return QUARTER * 2 if b == x else Fraction(0)

    report = validate(Box2.from_function(fn))
    assert not report.is_valid
    assert report.signalling_failures
    parties = {entry[0] for entry in report.signalling_failures}
    assert parties == {"A"}


def test_loads_rejects_garbage():
    with pytest.raises(ParseError):
        loads("box3\n0 0 0 | 0 0 = 1/8\n")
    with pytest.raises(ParseError):
        loads("box2\n0 0 | 0 0 = 1/4\n0 0 | 0 0 = 1/4\n")
    with pytest.raises(ParseError):
        loads("not-a-box\n")
    with pytest.raises(InvalidBoxError):
        loads("box2\n0 0 | 0 0 = 1\n")  # other inputs unnormalized


def test_round_trip_all_builtins():
    for name in ("class3", "class4", "class44", "pr", "uniform3", "uniform2"):
        box = builtin(name)
        again = loads(dumps(box))
        assert again.table == box.table
        assert type(again) is type(box)


def test_dumps_is_canonical():
    box = builtin("class4")
    assert dumps(box) == dumps(loads(dumps(box)))
    lines = dumps(box).splitlines()
    assert lines[0] == "box3"
    # ascending flat order, only nonzero entries
    assert len(lines) == 1 + sum(1 for v in box.table if v)


def test_marginal_pair_of_class3_is_uniform_on_x0():
    box = builtin("class3")
    pair = marginal(box, (0, 1))
    assert isinstance(pair, Box2)
    # tracing C out of class3 leaves a = b perfectly correlated at x = 0
    assert pair.prob(0, 0, 0, 0) == HALF
    assert pair.prob(1, 1, 0, 1) == HALF
    assert pair.prob(0, 1, 0, 0) == 0


def test_marginal_single_party_uniform():
    box = builtin("class4")
    for party in (0, 1, 2):
        m = marginal(box, (party,))
        assert m == (HALF, HALF, HALF, HALF)


def test_marginal_raises_when_traced_input_matters():
    # a = x * y makes A's marginal depend on y once B is traced out.
    def fn(a, b, x, y):
        return HALF if a == x * y else Fraction(0)

    box = Box2.from_function(fn)
    with pytest.raises(SignallingError):
        marginal(box, (0,))


def test_mix_linearity_against_marginal():
    b1 = builtin("class4")
    b2 = builtin("uniform3")
    w = (Fraction(1, 3), Fraction(2, 3))
    mixed = mix((b1, b2), w)
    lhs = marginal(mixed, (0, 1))
    rhs = mix((marginal(b1, (0, 1)), marginal(b2, (0, 1))), w)
    assert lhs.table == rhs.table


def test_mix_rejects_bad_weights():
    b = builtin("uniform2")
    with pytest.raises(ValueError):
        mix((b, b), (HALF, HALF + 1))
    with pytest.raises(ValueError):
        mix((b, b), (Fraction(3, 2), Fraction(-1, 2)))


def test_relabeling_group_structure():
    rng = random.Random(SEED)
    rels = all_relabelings2()
    assert len(rels) == 128
    box = builtin("pr")
    for _ in range(25):
        r = rng.choice(rels)
        s = rng.choice(rels)
        # inverse really inverts
        assert relabel(relabel(box, r), r.inverse()).table == box.table
        # compose(inner) applies inner first
        lhs = relabel(box, r.compose(s))
        rhs = relabel(relabel(box, s), r)
        assert lhs.table == rhs.table


def test_relabel_preserves_validity_and_entry_multiset():
    rng = random.Random(SEED + 1)
    rels = all_relabelings2()
    box = builtin("pr")
    for _ in range(20):
        r = rng.choice(rels)
        out = relabel(box, r)
        assert validate(out).is_valid
        assert sorted(out.table) == sorted(box.table)


def test_relabel_party_swap_on_tripartite():
    box = builtin("class3")
    cyc = Relabeling((1, 2, 0), (0, 0, 0), ((0, 0), (0, 0), (0, 0)))
    out = relabel(box, cyc)
    # the image puts party A's behaviour on party B
    for a, b, c, x, y, z in (
        (0, 0, 0, 0, 0, 0),
        (1, 0, 1, 1, 0, 1),
        (0, 1, 1, 0, 1, 1),
    ):
        assert out.prob(b, c, a, y, z, x) == box.prob(a, b, c, x, y, z)


def test_class4_fixed_by_cyclic_permutation():
    box = builtin("class4")
    cyc = Relabeling((1, 2, 0), (0, 0, 0), ((0, 0), (0, 0), (0, 0)))
    assert relabel(box, cyc).table == box.table


def test_build_from_constraints_reproduces_class4():
    assert build_from_constraints(CLASS4_CONSTRAINTS).table == builtin("class4").table


def test_build_from_constraints_single_parity():
    cs = ConstraintSet(((frozenset({(0, 0), (1, 0), (2, 0)}), 0),))
    box = build_from_constraints(cs)
    # applies only at inputs (0,0,0); elsewhere uniform
    assert box.prob(0, 0, 0, 0, 0, 0) == QUARTER
    assert box.prob(0, 0, 1, 0, 0, 0) == 0
    assert box.prob(0, 0, 1, 1, 0, 0) == EIGHTH


def test_build_from_constraints_contradiction():
    cs = ConstraintSet(
        (
            (frozenset({(0, 0)}), 0),
            (frozenset({(0, 0)}), 1),
        )
    )
    with pytest.raises(ContradictionError):
        build_from_constraints(cs)


def test_random_mixtures_stay_valid():
    rng = random.Random(SEED + 2)
    vertices = [builtin(f"deterministic({a},{b},{c})")
                for a, b, c in [(0, 0, 0), (1, 2, 3), (3, 3, 3), (2, 0, 1)]]
    vertices += [builtin("class4"), builtin("class44"), builtin("uniform3")]
    for _ in range(30):
        k = rng.randrange(2, 5)
        picks = [rng.choice(vertices) for _ in range(k)]
        raw = [Fraction(rng.randrange(1, 9)) for _ in range(k)]
        total = sum(raw)
        mixed = mix(picks, tuple(v / total for v in raw))
        assert validate(mixed).is_valid
