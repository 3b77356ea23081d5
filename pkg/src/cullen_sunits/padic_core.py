"""p-adic valuations, Legendre's formula and S-unit factorization.

Valuations of zero are ``math.inf``; every other valuation is a plain ``int``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

INFINITY = math.inf

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_LIMIT = 1 << 64


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n < 2**64.

    Raises ValueError above that range rather than guessing.
    """
    if n >= _MR_LIMIT:
        raise ValueError(f"primality test only certified below 2**64, got {n}")
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or p < 2 or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def vp(n: int, p: int):
    """Exponent of the prime ``p`` in ``n``; ``INFINITY`` for ``n == 0``.

    Sign-invariant: ``vp(-n, p) == vp(n, p)``.

    >>> vp(2025, 3), vp(2025, 5), vp(0, 5)
    (4, 2, inf)
    """
    _require_prime(p)
    if n == 0:
        return INFINITY
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    # square the divisor to strip large valuations in O(log v) big divisions
    q, k = p, 1
    while n % q == 0:
        n //= q
        v += k
        q, k = q * q, k * 2
    while k > 1:
        q, k = math.isqrt(q), k // 2
        if n % q == 0:
            n //= q
            v += k
    return v


def factorial_valuation(a: int, p: int) -> int:
    """Legendre's formula: the exponent of ``p`` in ``a!`` without forming ``a!``."""
    _require_prime(p)
    if a < 0:
        raise ValueError("a must be nonnegative")
    total = 0
    q = p
    while q <= a:
        total += a // q
        q *= p
    return total


@dataclass(frozen=True)
class SmoothnessBasis:
    """A finite, strictly increasing set of primes."""

    primes: tuple

    def __init__(self, primes: Iterable[int]):
        primes = tuple(int(q) for q in primes)
        if not primes:
            raise ValueError("basis must be nonempty")
        for q in primes:
            _require_prime(q)
        if any(x >= y for x, y in zip(primes, primes[1:])):
            raise ValueError(f"basis must be strictly increasing: {primes}")
        object.__setattr__(self, "primes", primes)

    @property
    def largest_prime(self) -> int:
        return self.primes[-1]

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)


DEFAULT_BASIS = SmoothnessBasis((2, 3, 5, 7))


@dataclass(frozen=True)
class BasisFactorization:
    basis: SmoothnessBasis
    exponents: tuple
    cofactor: int

    @property
    def is_unit(self) -> bool:
        """True when the factored number is an S-unit over ``basis``."""
        return self.cofactor == 1

    def value(self) -> int:
        out = self.cofactor
        for q, e in zip(self.basis.primes, self.exponents):
            out *= q**e
        return out

    def as_dict(self) -> dict:
        return dict(zip(self.basis.primes, self.exponents))


def factor_over_basis(n: int, basis: SmoothnessBasis = DEFAULT_BASIS) -> BasisFactorization:
    if n <= 0:
        raise ValueError(f"factor_over_basis needs n >= 1, got {n}")
    exps = []
    for q in basis.primes:
        if q == 2:
            e = (n & -n).bit_length() - 1
            n >>= e
        else:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
        exps.append(e)
    return BasisFactorization(basis, tuple(exps), n)


def is_sunit(n: int, basis: SmoothnessBasis = DEFAULT_BASIS) -> bool:
    """Fast membership test; bails out at the first prime that leaves a remainder."""
    if n <= 0:
        return False
    for q in basis.primes:
        if q == 2:
            n >>= (n & -n).bit_length() - 1
        else:
            while n % q == 0:
                n //= q
    return n == 1


def greatest_prime_factor(y: int, timeout: float | None = None) -> int:
    """Largest prime dividing ``y`` by trial division.

    Meant for inputs below roughly 40 digits. ``timeout`` (seconds) turns an
    over-long run into a ``TimeoutError`` instead of hanging.
    """
    y = abs(y)
    if y <= 1:
        raise ValueError("greatest_prime_factor needs |y| >= 2")
    start = time.monotonic()
    largest = 1
    for q in (2, 3):
        if y % q == 0:
            largest = q
            while y % q == 0:
                y //= q
    d = 5
    step = 2
    checks = 0
    while d * d <= y:
        if y % d == 0:
            largest = d
            while y % d == 0:
                y //= d
        d += step
        step = 6 - step
        checks += 1
        if timeout is not None and checks % 65536 == 0 and time.monotonic() - start > timeout:
            raise TimeoutError(
                f"trial division passed {d} without finishing; input too large for this tool"
            )
    return max(largest, y) if y > 1 else largest


_WINDOW_BITS = 64
_ESCALATE_AT = 48
_WIDE_BITS = 192


def _nu2_exact(a: int, b: int, c: int) -> int:
    wide = 1 << _WIDE_BITS
    y = (pow(3, a, wide) * pow(5, b, wide) * pow(7, c, wide) - 1) % wide
    if y:
        return (y & -y).bit_length() - 1
    return vp(3**a * 5**b * 7**c - 1, 2)


def _trailing_zeros_u64(y: np.ndarray) -> np.ndarray:
    low = y & (~y + np.uint64(1))
    zero = low == 0
    low[zero] = 1
    # low is a power of two, exactly representable as float64
    tz = np.log2(low.astype(np.float64)).astype(np.int64)
    tz[zero] = _WINDOW_BITS
    return tz


def _box_rows(a_lo: int, a_hi: int, b_max: int, c_max: int):
    """Best (valuation, witness) for a in [a_lo, a_hi)."""
    mod = 1 << _WINDOW_BITS
    p5 = np.array([pow(5, b, mod) for b in range(b_max + 1)], dtype=np.uint64)
    p7 = np.array([pow(7, c, mod) for c in range(c_max + 1)], dtype=np.uint64)
    grid = np.multiply.outer(p5, p7)  # wraps mod 2**64
    best, witness = -1, None
    for a in range(a_lo, a_hi):
        x = np.uint64(pow(3, a, mod)) * grid
        tz = _trailing_zeros_u64(x - np.uint64(1))
        if a == 0:
            tz[0, 0] = -1
        for b, c in zip(*np.nonzero(tz >= _ESCALATE_AT)):
            if (a, b, c) != (0, 0, 0):
                tz[b, c] = _nu2_exact(a, int(b), int(c))
        idx = int(np.argmax(tz))
        b, c = divmod(idx, c_max + 1)
        if tz[b, c] > best:
            best, witness = int(tz[b, c]), (a, b, c)
    return best, witness


def _merge_box(results):
    best, witness = -1, None
    for v, w in results:
        if w is not None and (v > best or (v == best and w < witness)):
            best, witness = v, w
    return best, witness


def nu2_max_over_box(a_max: int, b_max: int, c_max: int, chunk: int | None = None):
    """Maximum of nu_2(3^a 5^b 7^c - 1) over the box, origin excluded.

    Returns ``(max_valuation, (a, b, c))``; ties go to the lexicographically
    smallest witness. Cells are evaluated modulo 2**64 and recomputed modulo
    2**192 whenever the window shows a valuation of 48 or more.
    """
    if min(a_max, b_max, c_max) < 0:
        raise ValueError("box bounds must be nonnegative")
    if a_max == b_max == c_max == 0:
        raise ValueError("box contains only the excluded origin")
    chunk = chunk or (a_max + 1)
    parts = [
        _box_rows(lo, min(lo + chunk, a_max + 1), b_max, c_max)
        for lo in range(0, a_max + 1, chunk)
    ]
    return _merge_box(parts)
