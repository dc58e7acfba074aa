"""Saddle-point asymptotics for C_{d,p}(n).

With ``q(z) = sum_k (-1)^k binom(d,k) z^(p^k)`` and ``s`` the first positive
zero of ``q'``::

    C_{d,p}(n) ~ (p-1) / sqrt(-2 pi q''(s)) * n^(-3/2) * q(s)^(1/2 - n)

for ``n = 1 (mod p-1)``, and consecutive nonzero terms grow by
``q(s)^-(p-1)``. All real arithmetic uses mpmath at :data:`WORK_PREC` bits.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from hypercat.core import HypercatError, Params, binomial

WORK_PREC = 192
DEFAULT_PRECISION = mpf("1e-15")


class BracketingFailure(HypercatError, ArithmeticError):
    pass


class PeriodicityViolation(HypercatError, ValueError):
    """The estimate is only defined for ``n = 1 (mod p-1)``."""


@dataclass(frozen=True)
class QPoly:
    params: Params
    terms: tuple[tuple[int, int], ...]  # (exponent p^k, coefficient (-1)^k binom(d,k))

    @classmethod
    def for_params(cls, params: Params) -> QPoly:
        d, p = params.d, params.p
        return cls(params, tuple((p**k, (-1) ** k * binomial(d, k)) for k in range(d + 1)))


def q_eval(poly: QPoly, z, derivative: int = 0):
    """Evaluate ``q``, ``q'`` or ``q''`` at ``z``."""
    if derivative not in (0, 1, 2):
        raise ValueError("derivative must be 0, 1 or 2")
    z = mpf(z)
    total = mpf(0)
    for e, c in poly.terms:
        if derivative == 0:
            total += c * z**e
        elif derivative == 1:
            total += c * e * z ** (e - 1)
        elif e >= 2:
            total += c * e * (e - 1) * z ** (e - 2)
    return total


@dataclass(frozen=True)
class AsymptoticProfile:
    params: Params
    s: mpf
    r: mpf
    q_s: mpf
    qpp_s: mpf
    growth: mpf
    prefactor: mpf


def _first_sign_change(fn, min_step, limit=1):
    """Walk up from 0 until ``fn`` becomes nonpositive and return the bracket.

    Steps are ``max(min_step, z/256)``: uniform near the origin, geometric
    further out so large ``p^d`` stays cheap.
    """
    prev = mpf(0)
    limit = mpf(limit)
    while True:
        z = min(prev + max(min_step, prev / 256), limit)
        if fn(z) <= 0:
            return prev, z
        if z >= limit:
            raise BracketingFailure("no sign change found before the search limit")
        prev = z


def _bisect(fn, a, b, tol):
    """Shrink ``[a, b]`` with ``fn(a) > 0 >= fn(b)`` until ``b - a < tol``."""
    while b - a >= tol:
        mid = (a + b) / 2
        if fn(mid) > 0:
            a = mid
        else:
            b = mid
    return a, b


def saddle(params: Params, precision=DEFAULT_PRECISION) -> AsymptoticProfile:
    """Locate ``r`` (first positive root of q) and ``s`` (first positive root of q')."""
    precision = mpf(precision)
    if not (0 < precision <= mpf("1e-6")):
        raise ValueError("precision must lie in (0, 1e-6]")
    with mpmath.workprec(WORK_PREC):
        poly = QPoly.for_params(params)
        step = mpf(1) / (4 * params.p**params.d)
        q = lambda z: q_eval(poly, z)
        dq = lambda z: q_eval(poly, z, 1)
        a, b = _first_sign_change(q, step)
        if q(b) == 0:
            r = b
        else:
            a, b = _bisect(q, a, b, precision / 2)
            r = (a + b) / 2
        a, b = _first_sign_change(dq, step, limit=r)
        a, b = _bisect(dq, a, b, precision / 2)
        s = (a + b) / 2
        q_s = q(s)
        qpp_s = q_eval(poly, s, 2)
        if not (0 < s < r and 0 < q_s < 1 and qpp_s < 0):
            raise BracketingFailure(f"inconsistent saddle data s={s}, r={r}, q(s)={q_s}, q''(s)={qpp_s}")
        growth = q_s ** (-(params.p - 1))
        prefactor = (params.p - 1) / mpmath.sqrt(-2 * mpmath.pi * qpp_s)
    return AsymptoticProfile(params, s, r, q_s, qpp_s, growth, prefactor)


@dataclass(frozen=True)
class Estimate:
    n: int
    log_value: mpf
    value: mpf


def estimate_term(profile: AsymptoticProfile, n: int) -> Estimate:
    """Leading-order estimate of C_{d,p}(n), computed in log space."""
    params = profile.params
    if n < 1 or not params.is_admissible(n):
        raise PeriodicityViolation(f"n={n} is not congruent to 1 mod {params.p - 1}")
    with mpmath.workprec(WORK_PREC):
        log_a = (mpmath.log(profile.prefactor) - mpf(3) / 2 * mpmath.log(n)
                 + (mpf(1) / 2 - n) * mpmath.log(profile.q_s))
        return Estimate(n, log_a, mpmath.exp(log_a))


def log_exact(value: int) -> mpf:
    """Natural log of a positive exact integer at working precision."""
    if value <= 0:
        raise ValueError("log of a nonpositive count")
    with mpmath.workprec(WORK_PREC):
        return mpmath.log(mpf(value))


def ratio_to_estimate(exact: int, estimate: Estimate) -> mpf:
    with mpmath.workprec(WORK_PREC):
        return mpmath.exp(log_exact(exact) - estimate.log_value)


def growth_table(d_max: int, p_max: int, precision=DEFAULT_PRECISION) -> list[tuple[int, int, mpf]]:
    """Growth rates for ``1 <= d <= d_max``, ``2 <= p <= p_max``, ordered by ``p`` then ``d``."""
    if d_max < 1 or p_max < 2:
        raise ValueError("need d_max >= 1 and p_max >= 2")
    return [(d, p, saddle(Params(d, p), precision).growth)
            for p in range(2, p_max + 1) for d in range(1, d_max + 1)]


def fixed(x, places: int) -> str:
    """Format an mpf with exactly ``places`` decimals (round half to even)."""
    with mpmath.workprec(WORK_PREC):
        scaled = int(mpmath.nint(mpf(x) * 10**places))
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def growth_csv(rows) -> str:
    lines = ["d,p,growth"] + [f"{d},{p},{fixed(g, 6)}" for d, p, g in rows]
    return "\n".join(lines) + "\n"
