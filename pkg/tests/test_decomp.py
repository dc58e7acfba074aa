import pytest

from hypercat.core import BudgetExceeded, PAdicRational, Params
from hypercat.decomp import (
    Decomposition,
    DecompositionFormatError,
    NoSplitAxis,
    UnsupportedDimension,
    decomposition_to_tree,
    dumps,
    enumerate_decompositions,
    loads,
    render_svg,
    slices_along,
    split,
    validate,
)
from hypercat.exact import closed_term
from hypercat.trees import format_tree, is_interchange_maximal, tree_to_decomposition


def P(num, exp, p=2):
    return PAdicRational(num, exp, p)


def test_split_square_axis_one():
    params = Params(2, 2)
    dec = split(Decomposition.trivial(params), 0, 1)
    assert len(dec) == 2
    assert dec.boxes[0] == ((P(0, 0), P(1, 1)), (P(0, 0), P(1, 0)))
    assert dec.boxes[1] == ((P(1, 1), P(1, 0)), (P(0, 0), P(1, 0)))


def test_split_triadic_interval():
    params = Params(1, 3)
    dec = split(Decomposition.trivial(params), 0, 1)
    ends = [(lo, hi) for (lo, hi), in dec.boxes]
    assert [str(lo) for lo, _ in ends] == ["0/3^0", "1/3^1", "2/3^1"]
    assert validate(dec)


def test_split_bad_arguments():
    dec = Decomposition.trivial(Params(2, 2))
    with pytest.raises(IndexError):
        split(dec, 1, 1)
    with pytest.raises(IndexError):
        split(dec, 0, 3)


def test_split_order_is_irrelevant():
    params = Params(2, 2)
    a = split(split(Decomposition.trivial(params), 0, 1), 0, 2)
    b = Decomposition(params, tuple(reversed(a.boxes)))
    assert a == b and hash(a) == hash(b)


@pytest.mark.parametrize("d, p, n, expected", [
    (2, 2, 3, 8), (2, 2, 4, 39), (3, 2, 3, 18), (1, 3, 5, 3), (2, 3, 5, 12), (1, 2, 6, 42),
])
def test_enumeration_counts(d, p, n, expected):
    decs = list(enumerate_decompositions(Params(d, p), n))
    assert len(decs) == expected == closed_term(Params(d, p), n)
    assert len(set(decs)) == len(decs)
    assert all(validate(dec) and len(dec) == n for dec in decs)


def test_enumeration_inadmissible_is_empty():
    assert list(enumerate_decompositions(Params(2, 3), 4)) == []


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_decompositions(Params(2, 2), 6, budget=50))


def test_round_trip_and_largest_axis():
    params = Params(2, 2)
    for dec in enumerate_decompositions(params, 5):
        t = decomposition_to_tree(dec)
        assert tree_to_decomposition(t, params) == dec
        assert is_interchange_maximal(t)
        top = max(a for a in (1, 2) if slices_along(dec, a))
        assert t.label == top


def test_trivial_tree():
    assert format_tree(decomposition_to_tree(Decomposition.trivial(Params(3, 2)))) == "*"


def test_pinwheel_has_no_split_axis():
    # five boxes forming a pinwheel are not reachable by splits
    params = Params(2, 3)
    third = lambda k: PAdicRational(k, 1, 3)
    boxes = [
        ((third(0), third(2)), (third(0), third(1))),
        ((third(2), third(3)), (third(0), third(2))),
        ((third(1), third(3)), (third(2), third(3))),
        ((third(0), third(1)), (third(1), third(3))),
        ((third(1), third(2)), (third(1), third(2))),
    ]
    dec = Decomposition(params, tuple(boxes))
    assert validate(dec)
    with pytest.raises(NoSplitAxis):
        decomposition_to_tree(dec)


def test_validate_rejects():
    params = Params(2, 2)
    half = split(Decomposition.trivial(params), 0, 1)
    overlap = Decomposition(params, half.boxes + (half.boxes[0],))
    assert not validate(overlap)
    assert "overlap" in validate(overlap).reason
    missing = Decomposition(params, half.boxes[:1])
    assert not validate(missing)
    assert not validate(Decomposition(params, ()))
    empty = Decomposition(params, (((P(1, 1), P(1, 1)), (P(0, 0), P(1, 0))),) + half.boxes[1:])
    assert not validate(empty)


def test_validate_count_congruence():
    # two boxes tile the interval but p=3 needs an odd count
    params = Params(1, 3)
    dec = Decomposition(params, (((P(0, 0, 3), P(1, 1, 3)),), ((P(1, 1, 3), P(1, 0, 3)),)))
    result = validate(dec)
    assert not result and "congruent" in result.reason


def test_text_round_trip():
    for params, n in [(Params(2, 2), 4), (Params(3, 2), 3), (Params(2, 3), 5)]:
        for dec in enumerate_decompositions(params, n):
            assert loads(dumps(dec)) == dec


def test_text_format_example():
    dec = split(Decomposition.trivial(Params(1, 2)), 0, 1)
    assert dumps(dec) == "1 2 2\n0/2^0,1/2^1\n1/2^1,1/2^0\n"


@pytest.mark.parametrize("text", ["", "2 2\n", "1 2 2\n0/2^0,1/2^1\n", "1 2 1\n0/2^0;1/2^0\n", "1 2 1\n0/3^0,1/3^0\n"])
def test_text_format_errors(text):
    with pytest.raises(DecompositionFormatError):
        loads(text)


def test_svg_square():
    dec = split(Decomposition.trivial(Params(2, 2)), 0, 2)
    svg = render_svg(dec)
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000"')
    assert svg.count("<rect") == 2
    # the lower half along axis 2 is drawn at the bottom
    assert '<rect x="0" y="500" width="1000" height="500"' in svg
    assert '<rect x="0" y="0" width="1000" height="500"' in svg
    assert render_svg(dec) == svg


def test_svg_interval():
    dec = split(Decomposition.trivial(Params(1, 3)), 0, 1)
    svg = render_svg(dec)
    assert 'viewBox="0 0 1000 100"' in svg
    assert '<rect x="333.333333" y="0" width="333.333333" height="100"' in svg


def test_svg_rejects_cube():
    with pytest.raises(UnsupportedDimension):
        render_svg(Decomposition.trivial(Params(3, 2)))
