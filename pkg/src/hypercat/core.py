"""Exact-arithmetic primitives shared by every other module.

Counts are plain Python ints (arbitrary size). Box endpoints are p-adic
rationals ``num / p**exp`` kept in lowest terms.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import total_ordering


class HypercatError(Exception):
    """Base class for all errors raised by this package."""


class IntegralityViolation(HypercatError, ArithmeticError):
    """An exact division left a nonzero remainder."""


class BudgetExceeded(HypercatError):
    """An exhaustive enumeration would exceed the configured object budget."""


DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Params:
    """Dimension ``d`` and arity ``p`` of a partition family."""

    d: int
    p: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension d must be >= 1, got {self.d!r}")
        if not isinstance(self.p, int) or self.p < 2:
            raise ValueError(f"arity p must be >= 2, got {self.p!r}")

    def is_admissible(self, n: int) -> bool:
        """True when ``n = 1 + m(p-1)`` for some integer ``m >= 0``."""
        return n >= 1 and (n - 1) % (self.p - 1) == 0

    def internal_nodes(self, n: int) -> int:
        """The number of splits ``m`` producing ``n`` blocks."""
        if not self.is_admissible(n):
            raise ValueError(f"n={n} is not congruent to 1 mod {self.p - 1}")
        return (n - 1) // (self.p - 1)


# --- factorials and multinomials -------------------------------------------

_fact_lock = threading.Lock()
_fact_cache = [1]


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError("factorial of a negative integer")
    cache = _fact_cache
    if k < len(cache):
        return cache[k]
    with _fact_lock:
        # list.append is atomic, but the running product must be extended in order
        while len(_fact_cache) <= k:
            _fact_cache.append(_fact_cache[-1] * len(_fact_cache))
        return _fact_cache[k]


def multinomial(top: int, parts) -> int:
    """Return ``top! / prod(part!)``; ``parts`` must sum to ``top``."""
    parts = list(parts)
    if any(x < 0 for x in parts) or top < 0:
        raise ValueError("multinomial arguments must be nonnegative")
    if sum(parts) != top:
        raise ValueError(f"parts {parts} do not sum to {top}")
    denom = 1
    for x in parts:
        denom *= factorial(x)
    return factorial(top) // denom


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


def exact_div(a: int, b: int) -> int:
    """Divide ``a`` by ``b``, raising :class:`IntegralityViolation` on a remainder."""
    if b <= 0:
        raise ValueError("divisor must be positive")
    q, r = divmod(a, b)
    if r:
        raise IntegralityViolation(f"{a} is not divisible by {b} (remainder {r})")
    return q


def fuss_catalan(p: int, n: int) -> int:
    """Number of full p-ary trees with ``n`` leaves (zero off the residue class)."""
    if n < 1 or (n - 1) % (p - 1):
        return 0
    m = (n - 1) // (p - 1)
    return exact_div(binomial(n - 1 + m, m), n)


# --- p-adic rationals ------------------------------------------------------

@total_ordering
@dataclass(frozen=True, eq=False)
class PAdicRational:
    """The rational ``num / p**exp`` in canonical form (``exp == 0`` or ``p`` does not divide ``num``)."""

    num: int
    exp: int
    p: int

    def __post_init__(self):
        if self.num < 0 or self.exp < 0:
            raise ValueError("PAdicRational requires num >= 0 and exp >= 0")
        num, exp, p = self.num, self.exp, self.p
        while exp > 0 and num % p == 0:
            num //= p
            exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def zero(cls, p: int) -> PAdicRational:
        return cls(0, 0, p)

    @classmethod
    def one(cls, p: int) -> PAdicRational:
        return cls(1, 0, p)

    def scaled_numerator(self, exp: int) -> int:
        """Numerator of this value over the common denominator ``p**exp``."""
        if exp < self.exp:
            raise ValueError("target exponent below canonical exponent")
        return self.num * self.p ** (exp - self.exp)

    def __eq__(self, other):
        if not isinstance(other, PAdicRational):
            return NotImplemented
        return padic_compare(self, other) == 0

    def __lt__(self, other):
        if not isinstance(other, PAdicRational):
            return NotImplemented
        return padic_compare(self, other) < 0

    def __hash__(self):
        return hash((self.num, self.exp, self.p))

    def __add__(self, other: PAdicRational) -> PAdicRational:
        e = max(self.exp, other.exp)
        return PAdicRational(self.scaled_numerator(e) + other.scaled_numerator(e), e, self.p)

    def __sub__(self, other: PAdicRational) -> PAdicRational:
        e = max(self.exp, other.exp)
        diff = self.scaled_numerator(e) - other.scaled_numerator(e)
        if diff < 0:
            raise ValueError("PAdicRational difference would be negative")
        return PAdicRational(diff, e, self.p)

    def times_fraction(self, j: int) -> PAdicRational:
        """Return ``self * j / p``."""
        return PAdicRational(self.num * j, self.exp + 1, self.p)

    def __str__(self):
        return f"{self.num}/{self.p}^{self.exp}"

    def __repr__(self):
        return f"PAdicRational({self.num}, {self.exp}, p={self.p})"

    @classmethod
    def parse(cls, text: str, p: int) -> PAdicRational:
        """Parse ``"num/p^exp"``; the base must equal ``p``."""
        try:
            num_s, rest = text.strip().split("/")
            base_s, exp_s = rest.split("^")
            num, base, exp = int(num_s), int(base_s), int(exp_s)
        except ValueError as exc:
            raise ValueError(f"malformed p-adic rational {text!r}") from exc
        if base != p:
            raise ValueError(f"base {base} in {text!r} does not match p={p}")
        return cls(num, exp, p)


def padic_compare(a: PAdicRational, b: PAdicRational) -> int:
    """Three-way comparison: negative, zero or positive like ``a - b``."""
    if a.p != b.p:
        raise ValueError("cannot compare p-adic rationals with different bases")
    e = max(a.exp, b.exp)
    x, y = a.scaled_numerator(e), b.scaled_numerator(e)
    return (x > y) - (x < y)
