import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_shadow_words, brute_witnesses
from simscheme import (
    SchemeError,
    Tower,
    TowerError,
    UltimatelyPeriodicAddress,
    Verdict,
    WitnessClosure,
    cell,
    diagonal,
    embed,
    format_address,
    gamma_contains,
    hat_related,
    is_discrete,
    nonunique,
    not_fully_injective,
    parse_address,
    project_word,
    random_scheme,
    related,
    shadow,
    step,
)
from simscheme.address import random_address, run_transfer

A = UltimatelyPeriodicAddress
SCHEMES = {
    "diag2": diagonal(2),
    "diag3": diagonal(3),
    "nfi": not_fully_injective(),
    "nonunique": nonunique(),
    **{f"rand{s}": random_scheme(s) for s in range(6)},
}


def _cell_members(tower, w):
    return cell(tower, w).members


# addresses ------------------------------------------------------------------


def test_normal_form():
    assert A((0, 1), (0, 1)) == A((), (0, 1))
    assert A((), (1, 1)) == A((), (1,))
    assert A((1,), (0, 1)) == A((), (1, 0))
    assert A((0,), (1, 0, 1, 0)) == A((), (0, 1))
    assert A((1,), (1, 0, 1, 0)).v == (1, 0)
    with pytest.raises(ValueError):
        A((0,), ())


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 2), max_size=5),
    st.lists(st.integers(0, 2), min_size=1, max_size=4),
    st.integers(0, 3),
)
def test_normal_form_preserves_sequence(u, v, reps):
    a = A(tuple(u), tuple(v))
    b = A(tuple(u) + tuple(v) * reps, tuple(v) * 2)
    assert a == b
    expected = (tuple(u) + tuple(v) * 20)[:20]
    assert a.prefix(20) == expected
    assert b.prefix(20) == expected


def test_parse_and_format():
    s = diagonal(2)
    a = parse_address(s, "01(10)")
    assert a.prefix(6) == (0, 1, 1, 0, 1, 0)
    assert format_address(s, a) == "01(10)"
    assert format_address(s, parse_address(s, "0(10)")) == "(01)"
    assert parse_address(s, "(0)") == A((), (0,))
    big = diagonal(12)
    b = parse_address(big, "0,11,(3,10)")
    assert b.prefix(4) == (0, 11, 3, 10)
    assert parse_address(big, format_address(big, b)) == b
    for bad in ("01", "0(", "()", "0(1)2"):
        with pytest.raises(SchemeError):
            parse_address(s, bad)


def test_first_difference_and_shift():
    assert A((0,), (1,)).first_difference(A((1,), (0,))) == 1
    assert A((0, 0), (1,)).first_difference(A((0,), (1,))) == 2
    assert A((), (0, 1)).first_difference(A((0, 1, 0), (1, 0))) is None
    assert A((0, 1), (1, 0)).shift(3) == A((), (1, 0)).shift(1)


# transfer -----------------------------------------------------------------


def test_step_examples():
    nfi, d = not_fully_injective(), diagonal(2)
    assert step(nfi, frozenset(), 0) == frozenset()
    assert step(nfi, {0}, 0) == step(nfi, {0}, 1) == {0}
    assert step(d, {0}, 0) == {0}
    assert step(d, {0}, 1) == frozenset()


@pytest.mark.parametrize("name", SCHEMES)
def test_step_is_monotone(name):
    s = SCHEMES[name]
    n0 = len(s.X0)
    subsets = [frozenset(x for x in range(n0) if m >> x & 1) for m in range(1 << n0)]
    for a, b in product(subsets, subsets):
        if a <= b:
            for y in range(len(s.Y)):
                assert step(s, a, y) <= step(s, b, y)


@pytest.mark.parametrize("name", ["diag2", "nfi", "nonunique", "rand1", "rand4"])
def test_transfer_matches_tower(name):
    s = SCHEMES[name]
    t = Tower.build(s, 5)
    k = len(s.Y)
    for n in range(3):
        for x in range(t.level(n).size):
            for length in range(n, 6):
                for w in product(range(k), repeat=length):
                    seed = brute_witnesses(t, n, x, w[:n], embed, project_word)
                    got = run_transfer(s, seed, w[n:]) if seed else frozenset()
                    assert got == brute_witnesses(t, n, x, w, embed, project_word)


# shadows -------------------------------------------------------------------


def test_shadow_examples():
    t = Tower.build(not_fully_injective(), 0)
    tree = shadow(t, 0, 0, 6)
    assert len(tree.leaves()) == 2**6
    d = Tower.build(diagonal(2), 1)
    assert shadow(d, 0, 0, 3).leaves() == [(0, 0, 0)]
    mid = d.point(1, "m01")
    assert shadow(d, 1, mid, 3).leaves() == [(0, 1, 1), (1, 0, 0)]
    with pytest.raises(TowerError):
        shadow(d, 1, mid, 0)


@pytest.mark.parametrize("name", SCHEMES)
def test_shadow_matches_cells(name):
    s = SCHEMES[name]
    t = Tower.build(s, 5)
    for n in range(3):
        for x in range(t.level(n).size):
            tree = shadow(t, n, x, 5)
            assert set(tree.nodes) == brute_shadow_words(t, n, x, 5, embed, _cell_members)


@pytest.mark.parametrize("name", SCHEMES)
def test_shadow_prefix_closed_and_extendable(name):
    t = Tower.build(SCHEMES[name], 3)
    for n in range(4):
        for x in range(t.level(n).size):
            tree = shadow(t, n, x, 6)
            assert tree.words_at(n)
            for w in tree.nodes:
                if len(w) > n:
                    assert w[:-1] in tree.nodes
                if len(w) < 6:
                    assert tree.children(w)


@pytest.mark.parametrize("name", SCHEMES)
def test_shadow_of_embedded_point(name):
    t = Tower.build(SCHEMES[name], 4)
    for n in range(3):
        for x in range(t.level(n).size):
            a = shadow(t, n, x, 5).nodes
            b = shadow(t, n + 1, embed(t, n, n + 1, x), 5).nodes
            assert {w for w in a if len(w) > n} == set(b)


# membership -----------------------------------------------------------------


def test_gamma_examples():
    nfi = Tower(not_fully_injective())
    rng = random.Random(3)
    for _ in range(30):
        assert gamma_contains(nfi, 0, 0, random_address(rng, 2))
    d = Tower(diagonal(2))
    assert gamma_contains(d, 0, 0, A((), (0,)))
    assert not gamma_contains(d, 0, 0, A((), (0, 1)))


def _prefix_check(tower, n, x, addr, depth):
    """Whether the witness set stays nonempty along the first ``depth`` symbols."""
    seed = brute_witnesses(tower, n, x, addr.prefix(n), embed, project_word)
    return bool(seed) and bool(run_transfer(tower.scheme, seed, addr.prefix(depth)[n:]))


@pytest.mark.parametrize("name", SCHEMES)
def test_gamma_agrees_with_deep_shadow(name):
    s = SCHEMES[name]
    t = Tower.build(s, 2)
    rng = random.Random(name)
    addrs = [random_address(rng, len(s.Y), 3, 2) for _ in range(25)]
    for n in range(3):
        for x in range(t.level(n).size):
            for a in addrs:
                assert gamma_contains(t, n, x, a) == _prefix_check(t, n, x, a, 16)


@pytest.mark.parametrize("name", SCHEMES)
def test_gamma_invariances(name):
    s = SCHEMES[name]
    t = Tower.build(s, 3)
    rng = random.Random(name)
    for _ in range(20):
        a = random_address(rng, len(s.Y))
        longer = A(a.u + a.v, a.v + a.v)
        for n in range(3):
            for x in range(t.level(n).size):
                inside = gamma_contains(t, n, x, a)
                assert gamma_contains(t, n, x, longer) == inside
                assert gamma_contains(t, n + 1, embed(t, n, n + 1, x), a) == inside


# relations ------------------------------------------------------------------


def test_related_examples():
    d = Tower(diagonal(2))
    a, b = A((0,), (1,)), A((1,), (0,))
    assert related(d, a, a, 3).verdict is Verdict.RELATED
    ev = related(d, a, b, 3)
    assert ev.verdict is Verdict.RELATED
    n, x = ev.witness
    assert n == 1 and d.upto(1).label(1, x) == "m01"
    assert gamma_contains(d, n, x, a) and gamma_contains(d, n, x, b)
    nfi = Tower(not_fully_injective())
    ev = related(nfi, A((), (0,)), A((), (1,)), 3)
    assert ev.verdict is Verdict.RELATED and ev.witness == (0, 0)


def test_related_negative_and_bounded():
    d = Tower(diagonal(2))
    zero, one = A((), (0,)), A((), (1,))
    assert related(d, zero, one, 3).verdict is Verdict.UNRELATED
    assert related(d, zero, one, 0).verdict is Verdict.UNKNOWN_UP_TO_BOUND
    far = A((0, 0, 0, 0), (1,))
    assert related(d, far, zero, 2).verdict is Verdict.UNKNOWN_UP_TO_BOUND
    assert related(d, far, zero, 5).verdict is Verdict.UNRELATED


def test_unrelated_is_exact_on_small_levels():
    """An UNRELATED verdict means no point up to a deeper level holds both addresses."""
    for name in ("diag2", "nonunique", "rand2", "rand5"):
        s = SCHEMES[name]
        t = Tower.build(s, 5)
        rng = random.Random(name)
        for _ in range(40):
            a, b = random_address(rng, len(s.Y), 2, 2), random_address(rng, len(s.Y), 2, 2)
            ev = related(t, a, b, 5)
            if ev.verdict is Verdict.UNRELATED:
                for n in range(6):
                    for x in range(t.level(n).size):
                        assert not (gamma_contains(t, n, x, a) and gamma_contains(t, n, x, b))


def test_hat_related_examples():
    d = Tower(diagonal(2))
    a, b = A((0,), (1,)), A((1,), (0,))
    assert hat_related(d, a, a, 2).verdict is Verdict.RELATED
    ev = hat_related(d, a, b, 2)
    assert ev.verdict is Verdict.RELATED and ev.case == 2 and ev.glue == (1, 0)
    nfi = Tower(not_fully_injective())
    ev = hat_related(nfi, A((), (0,)), A((), (1,)), 2)
    assert ev.verdict is Verdict.RELATED and ev.case == 2 and ev.glue == (0, 0)


def test_hat_related_same_first_symbol():
    d = Tower(diagonal(2))
    ev = hat_related(d, A((0, 0), (1,)), A((0, 1), (0,)), 3)
    assert ev.verdict is Verdict.RELATED and ev.case == 1


def test_witness_closure_is_transitive():
    d = Tower(diagonal(2))
    a, b, c = A((0,), (1,)), A((1,), (0,)), A((), (0,))
    closure = WitnessClosure()
    closure.add(a, b, related(d, a, b, 3))
    closure.add(a, c, related(d, a, c, 3))
    assert closure.related(a, b) and closure.related(b, a)
    assert not closure.related(a, c)


def test_discrete_fresh_points_separate():
    for k in (2, 3):
        s = diagonal(k)
        assert is_discrete(s)[0]
        t = Tower.build(s, 4)
        for n in range(1, 4):
            fresh = sorted(t.level(n).fresh)
            leaves = {x: set(shadow(t, n, x, n + 1).leaves()) for x in fresh}
            for i, x in enumerate(fresh):
                for x2 in fresh[i + 1:]:
                    assert not leaves[x] & leaves[x2]
