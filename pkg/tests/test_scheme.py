from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simscheme import (
    FiniteScheme,
    SchemeError,
    diagonal,
    essential_part,
    injectivity_report,
    is_discrete,
    not_fully_injective,
    random_scheme,
    singleton,
    validate,
)
from simscheme import InjectivityStatus, Tower, related
from simscheme.address import UltimatelyPeriodicAddress


def _scan_essential(scheme):
    """All-pairs scan over pi, independent of the library loop order."""
    out = set()
    entries = [(y, x, scheme.pi_map[(y, x)]) for y in scheme.Y for x in scheme.X0]
    for (y, x, v), (y2, x2, v2) in product(entries, entries):
        if y != y2 and v == v2:
            out |= {x, x2}
    return out


def test_diagonal_is_valid():
    assert validate(diagonal(2)).ok


def test_non_injective_phi_reported():
    s = FiniteScheme.from_maps(
        ["0"], ["a", "b"], ["p"], {"a": "p", "b": "p"}, {("0", "a"): "p", ("0", "b"): "p"}
    )
    report = validate(s)
    assert not report.ok
    assert [rule for rule, _ in report.violations] == ["phi-injective"]
    msg = report.violations[0][1]
    assert msg.startswith("phi not injective") and "a" in msg and "b" in msg


def test_missing_pi_image_reported():
    s = FiniteScheme.from_maps(
        ["0"], ["a"], ["p", "q"], {"a": "p"}, {("0", "a"): "p"}
    )
    report = validate(s)
    assert report.violations == (("pi-surjective", "pi not surjective: q has no preimage"),)


def test_validate_is_pure():
    s = random_scheme(7)
    assert validate(s) == validate(s)


def test_undeclared_token_is_structural_error():
    with pytest.raises(SchemeError):
        FiniteScheme.from_maps(["0"], ["a"], ["p"], {"a": "zz"}, {("0", "a"): "p"})
    with pytest.raises(SchemeError):
        FiniteScheme.from_maps(["0"], ["a"], ["p"], {"a": "p"}, {})


@pytest.mark.parametrize("bad", ["", "a b", "a#", "(a", "a,b"])
def test_invalid_tokens_rejected(bad):
    with pytest.raises(SchemeError):
        FiniteScheme.from_maps(["0"], [bad], ["p"], {bad: "p"}, {("0", bad): "p"})


def test_duplicate_tokens_rejected():
    with pytest.raises(SchemeError, match="duplicate"):
        FiniteScheme.from_maps(["0", "0"], ["a"], ["p"], {"a": "p"}, {("0", "a"): "p"})


def test_essential_part_examples():
    assert essential_part(diagonal(2)) == {"0", "1"}
    assert essential_part(not_fully_injective()) == {"a"}
    disjoint = FiniteScheme.from_maps(
        ["0", "1"], ["a"], ["p", "q"], {"a": "p"}, {("0", "a"): "p", ("1", "a"): "q"}
    )
    assert essential_part(disjoint) == frozenset()


@pytest.mark.parametrize("seed", range(30))
def test_essential_part_matches_scan(seed):
    s = random_scheme(seed)
    assert essential_part(s) == _scan_essential(s)
    assert essential_part(s) <= set(s.X0)


def test_discreteness_examples():
    assert is_discrete(diagonal(2)) == (True, None)
    ok, witness = is_discrete(not_fully_injective())
    assert not ok
    assert witness == ("0", "a1", "0b")
    assert is_discrete(singleton()) == (True, None)


def test_discreteness_by_enumeration():
    # each cell of diag2 meets phi(X0) in exactly one point
    s = diagonal(2)
    image = set(s.phi_map.values())
    for y in s.Y:
        hits = {s.pi_map[(y, x)] for x in s.X0} & image
        assert len(hits) == 1


def _empty_gluing_scheme():
    return FiniteScheme.from_maps(
        ["0", "1"],
        ["a", "b"],
        ["p", "q", "r", "s"],
        {"a": "p", "b": "q"},
        {("0", "a"): "p", ("0", "b"): "q", ("1", "a"): "r", ("1", "b"): "s"},
    )


def test_empty_gluing_locus_does_not_force_discreteness():
    """No cross-symbol gluing, yet one cell holds both embedded points.

    Here a and b share the address 000...: the limit identifies them.
    """
    s = _empty_gluing_scheme()
    assert essential_part(s) == frozenset()
    ok, witness = is_discrete(s)
    assert not ok and witness == ("0", "p", "q")
    report = injectivity_report(Tower(s), 3)
    assert report.status is InjectivityStatus.VIOLATION
    ev = related(Tower(s), UltimatelyPeriodicAddress((), (0,)), UltimatelyPeriodicAddress((1,), (0,)), 3)
    assert ev.verdict.value == "UNRELATED"


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_schemes_are_valid(seed):
    s = random_scheme(seed)
    assert validate(s).ok
    assert 1 <= len(s.Y) <= 4 and 1 <= len(s.X0) <= 4


def test_random_scheme_is_seeded():
    assert random_scheme(11) == random_scheme(11)


def test_word_round_trip_multichar():
    s = diagonal(12)
    w = (0, 11, 3)
    assert s.format_word(w) == "0,11,3"
    assert s.parse_word("0,11,3") == w
    assert diagonal(2).parse_word("0110") == (0, 1, 1, 0)
