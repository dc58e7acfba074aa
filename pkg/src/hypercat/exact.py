"""Exact values of C_{d,p}(n).

Three independent routes are provided:

* :func:`closed_term` -- the Lagrange-inversion finite sum over
  ``(t_1, ..., t_d)`` with ``sum t_k (p^k - 1) = n - 1``;
* :func:`series_table` -- coefficient-by-coefficient solution of
  ``sum_k (-1)^k binom(d,k) y^(p^k) = x``;
* :func:`closed_special` -- hand-specialised single/double sums for
  ``(d, p)`` in ``{(2,2), (3,2), (2,3), (3,3)}``.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Iterator, Sequence

from hypercat.core import HypercatError, Params, binomial, exact_div, multinomial


class UnsupportedPair(HypercatError, ValueError):
    """No specialised formula exists for the requested ``(d, p)``."""


@dataclass(frozen=True)
class SeriesTable:
    """Truncated series ``y_{d,p}(x)``; ``coeffs[n]`` is C_{d,p}(n) and ``coeffs[0] == 0``."""

    params: Params
    max_n: int
    coeffs: tuple

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.max_n:
            raise IndexError(f"n={n} outside 1..{self.max_n}")
        return self.coeffs[n]

    def terms(self) -> list[int]:
        """Coefficients for ``n = 1..max_n``."""
        return list(self.coeffs[1:])


def compositions(params: Params, n: int) -> Iterator[tuple[int, ...]]:
    """Yield every ``(t_1, ..., t_d)`` of nonnegative integers with ``sum t_k (p^k - 1) = n - 1``.

    The search runs depth-first over ``t_d, t_{d-1}, ..., t_2``; ``t_1`` is
    forced by the remaining budget.
    """
    d, p = params.d, params.p
    weights = [p**k - 1 for k in range(1, d + 1)]
    target = n - 1
    if target < 0:
        return
    tail = [0] * d

    def rec(k: int, remaining: int):
        # k is a 0-based index into weights
        if k == 0:
            if remaining % weights[0] == 0:
                tail[0] = remaining // weights[0]
                yield tuple(tail)
            return
        w = weights[k]
        for t in range(remaining // w + 1):
            tail[k] = t
            yield from rec(k - 1, remaining - t * w)
        tail[k] = 0

    yield from rec(d - 1, target)


def closed_term(params: Params, n: int) -> int:
    """C_{d,p}(n) from the finite Lagrange-inversion sum."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = params.d
    binoms = [binomial(d, k) for k in range(d + 1)]
    power_cache: dict[tuple[int, int], int] = {}

    def bpow(k, t):
        key = (k, t)
        if key not in power_cache:
            power_cache[key] = pow(binoms[k], t)
        return power_cache[key]

    total = 0
    for ts in compositions(params, n):
        term = multinomial(n - 1 + sum(ts), (n - 1,) + ts)
        sign = 1
        for k, t in enumerate(ts, start=1):
            term *= bpow(k, t)
            if (t * (k + 1)) % 2:
                sign = -sign
        total += sign * term
    value = exact_div(total, n)
    if value < 0:
        raise ArithmeticError(f"negative count {value} for {params}, n={n}")
    return value


def _conv_coeff(a: Sequence[int], lo_a: int, b: Sequence[int], lo_b: int, n: int, step: int) -> int:
    """Coefficient ``n`` of ``a * b`` when ``a`` (resp. ``b``) is supported on ``lo_a + step*Z``
    (resp. ``lo_b + step*Z``) starting at degree ``lo_a`` (resp. ``lo_b``)."""
    hi = n - lo_b
    if hi < lo_a:
        return 0
    # b indices run n - i for i = lo_a, lo_a + step, ..., hi
    left = a[lo_a:hi + 1:step]
    right = b[n - lo_a:lo_b - 1 if lo_b > 0 else None:-step]
    return sum(map(operator.mul, left, right))


def series_table(params: Params, max_n: int) -> SeriesTable:
    """Solve the functional equation for the first ``max_n`` coefficients.

    Each ``y^(p^k)`` is kept as a running truncated power, built up as the
    chain ``y^(p^(k-1)), y^(2 p^(k-1)), ..., y^(p^k)``.  Coefficient ``n`` of
    every power only needs coefficients of ``y`` below ``n``.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    d, p = params.d, params.p
    step = p - 1
    size = max_n + 1
    y = [0] * size
    # chain[k][j] holds (y^(p^(k-1)))^(j+1) for j = 0..p-1; chain[k][0] aliases the previous level
    chain: list[list[list[int]]] = []
    lows: list[list[int]] = []
    base, base_low = y, 1
    for k in range(1, d + 1):
        level = [base]
        level_lows = [base_low]
        for j in range(2, p + 1):
            level.append([0] * size)
            level_lows.append(j * base_low)
        chain.append(level)
        lows.append(level_lows)
        base, base_low = level[-1], level_lows[-1]
    coeff = [(-1) ** (k - 1) * binomial(d, k) for k in range(1, d + 1)]

    for n in range(1, size):
        for level, level_lows in zip(chain, lows):
            first, first_low = level[0], level_lows[0]
            for j in range(1, p):
                if n >= level_lows[j]:
                    level[j][n] = _conv_coeff(level[j - 1], level_lows[j - 1], first, first_low, n, step)
        if n == 1:
            y[1] = 1
        else:
            y[n] = sum(c * level[-1][n] for c, level in zip(coeff, chain))
    return SeriesTable(params, max_n, tuple(y))


def _truncated_mul(a: Sequence[int], b: Sequence[int], size: int) -> list[int]:
    out = [0] * size
    nz_b = [(j, v) for j, v in enumerate(b[:size]) if v]
    for i, u in enumerate(a[:size]):
        if not u:
            continue
        for j, v in nz_b:
            if i + j >= size:
                break
            out[i + j] += u * v
    return out


def _truncated_pow(a: Sequence[int], e: int, size: int) -> list[int]:
    result = [1] + [0] * (size - 1)
    base = list(a[:size])
    while e:
        if e & 1:
            result = _truncated_mul(result, base, size)
        e >>= 1
        if e:
            base = _truncated_mul(base, base, size)
    return result


def functional_equation_residual(table: SeriesTable) -> list[int]:
    """Coefficients ``0..max_n`` of ``sum_k (-1)^k binom(d,k) y^(p^k) - x``.

    Powers are recomputed from scratch by binary exponentiation, so this does
    not share arithmetic with :func:`series_table`.
    """
    d, p = table.params.d, table.params.p
    size = table.max_n + 1
    y = list(table.coeffs)
    residual = [0] * size
    for k in range(d + 1):
        c = (-1) ** k * binomial(d, k)
        power = _truncated_pow(y, p**k, size)
        for i in range(size):
            residual[i] += c * power[i]
    if size > 1:
        residual[1] -= 1
    return residual


# --- specialised formulas ---------------------------------------------------

def _special_22(n: int) -> int:
    total = 0
    for i in range((n - 1) // 3 + 1):
        total += multinomial(2 * (n - 1 - i), [n - 1, n - 1 - 3 * i, i]) * (-1) ** i * 2 ** (n - 1 - 3 * i)
    return exact_div(total, n)


def _special_32(n: int) -> int:
    total = 0
    for j in range((n - 1) // 7 + 1):
        for i in range((n - 1 - 7 * j) // 3 + 1):
            top = 2 * (n - 1 - i - 3 * j)
            total += (multinomial(top, [n - 1, n - 1 - 3 * i - 7 * j, i, j])
                      * (-1) ** i * 3 ** (n - 1 - 2 * i - 7 * j))
    return exact_div(total, n)


def _special_23(n: int) -> int:
    if n % 2 == 0:
        return 0
    h = (n - 1) // 2
    total = 0
    for i in range((n - 1) // 8 + 1):
        total += multinomial(3 * (h - i), [n - 1, h - 4 * i, i]) * (-1) ** i * 2 ** (h - 4 * i)
    return exact_div(total, n)


def _special_33(n: int) -> int:
    if n % 2 == 0:
        return 0
    m = (n - 1) // 2
    total = 0
    for j in range(m // 13 + 1):
        for i in range((m - 13 * j) // 4 + 1):
            total += (multinomial(3 * (m - i - 4 * j), [n - 1, m - 4 * i - 13 * j, i, j])
                      * (-1) ** i * 3 ** (m - 3 * i - 13 * j))
    return exact_div(total, n)


_SPECIAL = {(2, 2): _special_22, (3, 2): _special_32, (2, 3): _special_23, (3, 3): _special_33}

SPECIAL_PAIRS = tuple(_SPECIAL)


def closed_special(params: Params, n: int) -> int:
    """C_{d,p}(n) from the hand-specialised sum for the supported ``(d, p)`` pairs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        fn = _SPECIAL[(params.d, params.p)]
    except KeyError:
        raise UnsupportedPair(f"no specialised formula for (d, p) = ({params.d}, {params.p})") from None
    return fn(n)
