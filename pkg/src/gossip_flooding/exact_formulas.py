"""Closed-form expectations for rumor propagation on complete, star and ring graphs.

Every closed form is computed as an exact ``gmpy2.mpq`` rational; floats are
only produced when rendering. Harmonic sums beyond HARMONIC_EXACT_LIMIT terms
have a separate float path (``harmonic_float``) that uses compensated
summation, used only where exact values would be impractically large.

Notation used below:
    H(m)    harmonic sum 1 + 1/2 + ... + 1/m, with H(0) = 0
    M_n(1)  expected time for one information to reach all of K_n
    M_n(n)  expected total propagation time on K_n
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from gmpy2 import mpq

from .common.config import HARMONIC_EXACT_LIMIT
from .common.errors import InvalidSizeError
from .common.validators import validate_min, validate_range

Number = Union[int, float, "mpq"]


def to_exact(value) -> "mpq":
    """Coerce an int, mpq, Fraction or "p/q" string to an mpq.

    Raises:
        InvalidSizeError: If value is a float or otherwise not exactly representable
    """
    if isinstance(value, float):
        raise InvalidSizeError(f"expected an exact value, got float {value!r}")
    try:
        return mpq(value)
    except (TypeError, ValueError) as e:
        raise InvalidSizeError(f"not an exact rational: {value!r}") from e


def render_exact(value) -> tuple:
    """Render a value as ("p/q" or "p", decimal string with 12 significant digits).

    Floats render as their repr in both slots.
    """
    if isinstance(value, float):
        return repr(value), repr(value)
    q = mpq(value)
    text = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return text, f"{float(q):.12g}"


@lru_cache(maxsize=None)
def harmonic(m: int) -> "mpq":
    """Exact harmonic sum H(m) = sum_{j=1}^m 1/j.

    Args:
        m: Number of terms, 0 <= m <= HARMONIC_EXACT_LIMIT

    Raises:
        InvalidSizeError: If m is negative or above the exact limit
                          (use harmonic_float there)
    """
    validate_range(m, 0, HARMONIC_EXACT_LIMIT, "harmonic terms m")
    return sum((mpq(1, j) for j in range(1, m + 1)), mpq(0))


def harmonic_float(m: int) -> float:
    """H(m) as a float; exact-then-rounded up to the limit, compensated summation beyond."""
    validate_min(m, 0, "harmonic terms m")
    if m <= HARMONIC_EXACT_LIMIT:
        return float(harmonic(m))
    return math.fsum(1.0 / j for j in range(1, m + 1))


def single_info_expectation_complete(n: int) -> "mpq":
    """M_n(1) = (n-1) H(n-1): expected time for one information to cover K_n.

    Raises:
        InvalidSizeError: If n < 2
    """
    validate_min(n, 2, "site count n")
    return (n - 1) * harmonic(n - 1)


def delta_expectation(n: int, k: int) -> "mpq":
    """Expected wait n(n-1) / (2k(n-k)) for a K_n information known by k sites to gain a site.

    Raises:
        InvalidSizeError: If k is outside [1, n-1]
    """
    validate_min(n, 2, "site count n")
    validate_range(k, 1, n - 1, "informed count k")
    return mpq(n * (n - 1), 2 * k * (n - k))


def star_hub_expectation(leaves: int) -> "mpq":
    """Expected time for the hub's information to reach every leaf: leaves * H(leaves)."""
    validate_min(leaves, 1, "leaves")
    return leaves * harmonic(leaves)


def star_total_expectation(leaves: int) -> "mpq":
    """Expected total propagation time on a star: 2 * leaves * H(leaves) - 1.

    All informations first gather at the hub (a coupon collector over the
    leaves), then the union spreads back out with one leaf already done.
    """
    return 2 * star_hub_expectation(leaves) - 1


def star_ratio(leaves: int) -> "mpq":
    """Propagation ratio of a star, 2 - 1 / (leaves * H(leaves)); increases toward 2."""
    return 2 - 1 / star_hub_expectation(leaves)


def ring_single_info_expectation(n: int) -> "mpq":
    """Expected time for one information to cover the ring R_n: n(n-1)/2.

    While 1 <= k <= n-1 sites are informed they form an arc with exactly two
    extending edges out of n, so each of the n-1 stages waits Geometric(2/n).

    Raises:
        InvalidSizeError: If n < 3
    """
    validate_min(n, 3, "site count n")
    return mpq(n * (n - 1), 2)


def recurrence_residual(n: int, k: int, Mk, Ak1, Ak) -> "mpq":
    """Residual of the first-step relation linking M_n(k), A_n(k+1) and A_n(k).

    Computes
        ((2n-k-1)k/2) M_n(k) - [C(n,2) + k(n-k) A_n(k+1) + C(k,2) A_n(k)]
    exactly. It is zero iff the supplied triple satisfies the relation.

    Args:
        n: Site count of the complete graph
        k: Information count, 2 <= k <= n-1
        Mk, Ak1, Ak: Exact values (int, mpq, Fraction or "p/q")

    Raises:
        InvalidSizeError: If k is outside [2, n-1] or a value is inexact
    """
    validate_min(n, 3, "site count n")
    validate_range(k, 2, n - 1, "information count k")
    lhs = mpq((2 * n - k - 1) * k, 2) * to_exact(Mk)
    rhs = math.comb(n, 2) + k * (n - k) * to_exact(Ak1) + math.comb(k, 2) * to_exact(Ak)
    return lhs - rhs


@dataclass(frozen=True)
class BoundsReport:
    """Proven interval for M_n(n) and the induced interval for M_n(n) / M_n(1).

    Values are mpq when n-1 is within the exact harmonic limit, floats otherwise.
    """

    n: int
    m1: Number
    lower: Number
    upper: Number
    ratio_lower: Number
    ratio_upper: Number

    @property
    def exact(self) -> bool:
        return not isinstance(self.lower, float)

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper


def total_time_bounds(n: int) -> BoundsReport:
    """Interval for the expected total propagation time on K_n.

    upper = (3/2) M_n(1); lower = max(M_n(1), (3/2) M_n(1) - (3/4)(n-1)).
    The second lower bound is proven only for n >= 4; for n in {2, 3} only the
    monotonicity floor M_n(1) applies. For n >= 4 the ratio interval is
    [3/2 - 3 / (4 H(n-1)), 3/2].

    Raises:
        InvalidSizeError: If n < 2
    """
    validate_min(n, 2, "site count n")
    if n - 1 <= HARMONIC_EXACT_LIMIT:
        m1 = single_info_expectation_complete(n)
        upper = mpq(3, 2) * m1
        lower = m1 if n < 4 else max(m1, upper - mpq(3 * (n - 1), 4))
        return BoundsReport(n, m1, lower, upper, lower / m1, mpq(3, 2))

    m1f = (n - 1) * harmonic_float(n - 1)
    upper_f = 1.5 * m1f
    lower_f = max(m1f, upper_f - 0.75 * (n - 1))
    return BoundsReport(n, m1f, lower_f, upper_f, 1.5 - 0.75 / harmonic_float(n - 1), 1.5)


def propagation_ratio_bounds(n: int) -> tuple:
    """Interval (ratio_lower, ratio_upper) for M_n(n) / M_n(1) on K_n."""
    report = total_time_bounds(n)
    return report.ratio_lower, report.ratio_upper


def continuous_flooding_expectation(discrete_mean: Number, edge_count: int) -> Number:
    """Convert an expected number of discrete steps into continuous time.

    With unit-rate exponential clocks on every edge the embedded jump chain is
    the discrete process and each jump waits Exp(|E|), so the expectation is
    divided by |E|. Exact inputs give an exact result.

    Raises:
        InvalidSizeError: If edge_count < 1
    """
    validate_min(edge_count, 1, "edge count")
    if isinstance(discrete_mean, float):
        return discrete_mean / edge_count
    return to_exact(discrete_mean) / edge_count


def asymptotic_single_time(n: int) -> float:
    """Leading-order M_n(1) ~ n ln n."""
    validate_min(n, 2, "site count n")
    return n * math.log(n)


def asymptotic_total_time(n: int) -> float:
    """Leading-order M_n(n) ~ (3/2) n ln n."""
    return 1.5 * asymptotic_single_time(n)


def asymptotic_flooding_time(n: int) -> float:
    """Leading-order continuous flooding time on K_n, (3/n) ln n."""
    validate_min(n, 2, "site count n")
    return 3.0 * math.log(n) / n


def universal_ratio_window() -> tuple:
    """The propagation ratio of every connected graph lies in [1, 2]."""
    return mpq(1), mpq(2)
