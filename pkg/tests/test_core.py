import math
import random
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercat.core import (
    IntegralityViolation,
    PAdicRational,
    Params,
    exact_div,
    factorial,
    fuss_catalan,
    multinomial,
    padic_compare,
)


def test_params_validation():
    assert Params(1, 2).internal_nodes(5) == 4
    assert Params(2, 3).is_admissible(5)
    assert not Params(2, 3).is_admissible(4)
    with pytest.raises(ValueError):
        Params(0, 2)
    with pytest.raises(ValueError):
        Params(2, 1)
    with pytest.raises(ValueError):
        Params(2, 3).internal_nodes(4)


@pytest.mark.parametrize("top, parts, expected", [
    (4, [2, 1, 1], 12),
    (6, [3, 3, 0], 20),
    (0, [], 1),
])
def test_multinomial_examples(top, parts, expected):
    assert multinomial(top, parts) == expected


def test_multinomial_rejects_bad_sum():
    with pytest.raises(ValueError):
        multinomial(5, [2, 2])


@given(st.lists(st.integers(0, 12), max_size=5), st.randoms())
def test_multinomial_permutation_invariant(parts, rnd):
    shuffled = parts[:]
    rnd.shuffle(shuffled)
    assert multinomial(sum(parts), parts) == multinomial(sum(parts), shuffled)


@given(st.integers(0, 15), st.lists(st.integers(0, 10), max_size=4))
def test_multinomial_splitting_identity(a, rest):
    b = sum(rest)
    assert multinomial(a + b, [a, b]) * multinomial(b, rest) == multinomial(a + b, [a] + rest)


def test_multinomial_matches_math():
    for top in range(12):
        for k in range(top + 1):
            assert multinomial(top, [k, top - k]) == math.comb(top, k)


def test_factorial_cache_threads():
    results = {}

    def work(k):
        results[k] = factorial(k)

    threads = [threading.Thread(target=work, args=(k,)) for k in range(300, 340)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results[k] == math.factorial(k) for k in results)


def test_exact_div():
    assert exact_div(156, 4) == 39
    assert exact_div(0, 7) == 0
    with pytest.raises(IntegralityViolation):
        exact_div(10, 4)


def test_fuss_catalan_against_shape_count():
    # independent count of unlabelled full p-ary trees by recursion over child sizes
    def shapes(p, m, memo={}):
        if m == 0:
            return 1
        key = (p, m)
        if key not in memo:
            def ways(k, remaining):
                if k == 0:
                    return 1 if remaining == 0 else 0
                return sum(shapes(p, i) * ways(k - 1, remaining - i) for i in range(remaining + 1))
            memo[key] = ways(p, m - 1)
        return memo[key]

    for p in (2, 3, 4):
        for m in range(8):
            assert fuss_catalan(p, 1 + m * (p - 1)) == shapes(p, m)
    assert fuss_catalan(3, 5) == 3
    assert fuss_catalan(3, 4) == 0


def test_padic_examples():
    half = PAdicRational(1, 1, 2)
    assert padic_compare(half, PAdicRational(1, 2, 2)) > 0
    assert padic_compare(half, PAdicRational(2, 2, 2)) == 0
    assert padic_compare(PAdicRational(2, 1, 3), PAdicRational(8, 2, 3)) < 0


def test_padic_canonical_form():
    x = PAdicRational(12, 3, 2)  # 12/8 reduces to 3/2
    assert (x.num, x.exp) == (3, 1)
    assert PAdicRational(x.num, x.exp, 2) == x
    assert PAdicRational(0, 5, 3) == PAdicRational.zero(3)
    assert str(PAdicRational(9, 2, 3)) == "1/3^0"


def test_padic_arithmetic_and_parse():
    p = 3
    a, b = PAdicRational(1, 1, p), PAdicRational(2, 2, p)
    assert a + b == PAdicRational(5, 2, p)
    assert a - b == PAdicRational(1, 2, p)
    assert a.times_fraction(2) == PAdicRational(2, 2, p)
    assert PAdicRational.parse("5/3^2", 3) == PAdicRational(5, 2, 3)
    with pytest.raises(ValueError):
        PAdicRational.parse("5/2^2", 3)
    with pytest.raises(ValueError):
        b - a


def test_padic_total_order_random_pairs():
    rng = random.Random(20240501)
    values = []
    for _ in range(1000):
        p = 2
        e = rng.randrange(0, 8)
        values.append(PAdicRational(rng.randrange(0, p**e + 1), e, p))
    from fractions import Fraction

    def frac(x):
        return Fraction(x.num, x.p**x.exp)

    for a, b in zip(values, values[1:]):
        c = padic_compare(a, b)
        assert c == -padic_compare(b, a)
        assert (c > 0) - (c < 0) == (frac(a) > frac(b)) - (frac(a) < frac(b))
    ordered = sorted(values)
    assert all(frac(x) <= frac(y) for x, y in zip(ordered, ordered[1:]))
    for a in values[:50]:
        again = PAdicRational(a.num, a.exp, a.p)
        assert (again.num, again.exp) == (a.num, a.exp)
