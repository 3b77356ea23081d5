"""Exhaustive desk-scale search for C_n = m1! + m2! + s with s an S-unit,
the degeneracy classifier, and the valuation scans behind the case analysis.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import partial

from .errors import CapEscalationFailed
from .padic_core import (
    DEFAULT_BASIS,
    INFINITY,
    BasisFactorization,
    SmoothnessBasis,
    factor_over_basis,
    is_sunit,
)
from .recurrence import ClosedForm, cullen

BLOCK = 1 << 14
# observed maxima over n < 236899 plus 4 headroom
DEFAULT_CAPS = {3: 16, 5: 11, 7: 10}
FALLBACK_CAP = 12
MAX_ESCALATIONS = 2


def cullen_number(n: int) -> int:
    return n * (1 << n) + 1


def woodall_number(n: int) -> int:
    return n * (1 << n) - 1


@dataclass(frozen=True)
class DegeneracyWitness:
    j1: int
    j2: int
    matched: str  # "alpha-part" for (an+c) alpha^n, "beta-part" for b beta^n


@dataclass(frozen=True)
class Solution:
    n: int
    ms: tuple
    s: int
    s_factorization: BasisFactorization
    degenerate: bool = False
    witness: DegeneracyWitness | None = None

    @property
    def key(self):
        return (self.n,) + self.ms + (self.s,)

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "m": [str(m) for m in self.ms],
            "s": str(self.s),
            "sFactorization": {str(q): str(e) for q, e in self.s_factorization.as_dict().items()},
            "degenerate": self.degenerate,
            "witness": None
            if self.witness is None
            else {"j1": str(self.witness.j1), "j2": str(self.witness.j2), "matched": self.witness.matched},
        }


def classify_degenerate(sol: Solution, cf: ClosedForm, coefficients=None):
    """Return ``(degenerate, witness)``.

    A solution is degenerate when some contiguous run a_j1 m_j1! + ... + a_j2 m_j2!
    equals (a n + c) alpha^n or b beta^n exactly. Coefficients default to 1.
    """
    ms = sol.ms
    coefficients = coefficients or (1,) * len(ms)
    parts = (("alpha-part", cf.alpha_part(sol.n)), ("beta-part", cf.beta_part(sol.n)))
    for j1 in range(len(ms)):
        total = 0
        for j2 in range(j1, len(ms)):
            total += coefficients[j2] * math.factorial(ms[j2])
            for name, part in parts:
                if Fraction(total) == part:
                    return True, DegeneracyWitness(j1 + 1, j2 + 1, name)
    return False, None


def check_inequality_n_gt_m1(n: int, m1: int) -> bool:
    """Whether (n, m1) can occur in C_n = m1! + m2! + s once m1 >= 6.

    Any solution with m1 >= 6 has n > m1, so ``False`` marks a prunable pair.
    """
    if m1 < 6:
        raise ValueError("the inequality n > m1 is only established for m1 >= 6")
    return n > m1


def solve_cullen(n_max: int, m1_max: int, basis: SmoothnessBasis = DEFAULT_BASIS) -> list:
    """All (n, m1, m2, s) with n <= n_max, m1_max >= m1 >= m2 >= 1 and s >= 1 an S-unit."""
    if n_max < 1 or m1_max < 1:
        raise ValueError("n_max and m1_max must be positive")
    cf = cullen().closed
    fact = [1]
    for i in range(1, m1_max + 1):
        fact.append(fact[-1] * i)
    found = []
    for n in range(1, n_max + 1):
        c_n = cullen_number(n)
        for m1 in range(1, m1_max + 1):
            if m1 >= 6 and not check_inequality_n_gt_m1(n, m1):
                break
            f1 = fact[m1]
            if f1 >= c_n:
                break
            for m2 in range(1, m1 + 1):
                s = c_n - f1 - fact[m2]
                if s < 1:
                    break
                if not is_sunit(s, basis):
                    continue
                if cullen_number(n) - math.factorial(m1) - math.factorial(m2) != s:
                    raise AssertionError(f"re-verification failed for {(n, m1, m2, s)}")
                sol = Solution(n, (m1, m2), s, factor_over_basis(s, basis))
                degenerate, witness = classify_degenerate(sol, cf)
                found.append(replace(sol, degenerate=degenerate, witness=witness))
    found.sort(key=lambda x: (x.n, x.ms))
    return found


# --- valuation scans ---------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    p: int
    n_lo: int
    n_hi: int
    max_valuation: object
    argmax: tuple
    hits: tuple = ()
    threshold: int | None = None
    zeros: tuple = ()

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "nLo": str(self.n_lo),
            "nHi": str(self.n_hi),
            "max": "inf" if self.max_valuation == INFINITY else str(self.max_valuation),
            "argmax": [str(n) for n in self.argmax],
            "threshold": None if self.threshold is None else str(self.threshold),
            "hits": [str(n) for n in self.hits],
            "zeros": [str(n) for n in self.zeros],
        }


def _small_vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _cell_valuation(p, n, t, cap):
    """Valuation of C_n - t, escalating the modulus when the cap is reached."""
    for _ in range(MAX_ESCALATIONS):
        cap *= 2
        modulus = p ** (cap + 1)
        r = (n * pow(2, n, modulus) + 1 - t) % modulus
        if r:
            return _small_vp(r, p)
    if cullen_number(n) == t:
        return INFINITY
    raise CapEscalationFailed(n, cap)


def _scan_block(p, t_builder, cap, threshold, lo, hi):
    modulus = p ** (cap + 1)
    power = pow(2, lo, modulus)
    best, argmax, hits, zeros = -1, [], [], []
    for n in range(lo, hi + 1):
        t = t_builder(n)
        r = (n * power + 1 - t) % modulus
        power = power * 2 % modulus
        v = _small_vp(r, p) if r else _cell_valuation(p, n, t, cap)
        if v == INFINITY:
            zeros.append(n)
            continue
        if v > best:
            best, argmax = v, [n]
        elif v == best:
            argmax.append(n)
        if threshold is not None and v >= threshold:
            hits.append(n)
    return best, argmax, hits, zeros


def _merge_blocks(parts):
    best, argmax, hits, zeros = -1, [], [], []
    for b, a, h, z in parts:
        if b > best:
            best, argmax = b, list(a)
        elif b == best:
            argmax.extend(a)
        hits.extend(h)
        zeros.extend(z)
    return best, sorted(argmax), sorted(hits), sorted(zeros)


def _zero(n):
    return 0


def scan_valuation(p: int, t_builder=_zero, n_lo: int = 1, n_hi: int = 1, v_cap: int | None = None,
                   threshold: int | None = None, jobs: int = 1) -> ScanResult:
    """Maximum of nu_p(C_n - t_builder(n)) over n_lo <= n <= n_hi.

    Residues are taken modulo p^(v_cap + 1); a cell that reaches the cap is
    recomputed with the exponent doubled, twice at most. Exact zeros of
    C_n - t are reported in ``zeros`` and left out of the maximum. With
    ``jobs > 1`` the range is split into blocks of 2^14 indices and scanned in
    worker processes, so ``t_builder`` must be picklable.
    """
    if n_lo > n_hi:
        raise ValueError("empty range")
    cap = v_cap if v_cap is not None else DEFAULT_CAPS.get(p, FALLBACK_CAP)
    blocks = [(lo, min(lo + BLOCK - 1, n_hi)) for lo in range(n_lo, n_hi + 1, BLOCK)]
    work = partial(_scan_block, p, t_builder, cap, threshold)
    if jobs > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, *zip(*blocks)))
    else:
        parts = [work(lo, hi) for lo, hi in blocks]
    best, argmax, hits, zeros = _merge_blocks(parts)
    max_v = best if best >= 0 else (INFINITY if zeros else 0)
    return ScanResult(p, n_lo, n_hi, max_v, tuple(argmax), tuple(hits), threshold, tuple(zeros))


NU11_LO, NU11_HI = 201, 236898


def scan_nu11_case(n_lo: int = NU11_LO, n_hi: int = NU11_HI):
    """Indices where C_n - s(n) has nu_11 >= 4, and those among them with nu_13 >= 3.

    s(n) = 2^nu_2(C_n) 3^nu_3(C_n) 5^nu_5(C_n) 7^nu_7(C_n), the only S-unit that
    can match C_n when m1 >= m2 >= 49.
    """
    if n_lo < NU11_LO or n_hi > NU11_HI:
        raise ValueError(f"range must lie within [{NU11_LO}, {NU11_HI}]")
    caps = {q: DEFAULT_CAPS[q] for q in (3, 5, 7)}
    mod_s = math.prod(q ** (c + 1) for q, c in caps.items())
    mod_11 = 11**8
    modulus = mod_s * mod_11
    power = pow(2, n_lo, modulus)
    list11 = []
    for n in range(n_lo, n_hi + 1):
        c = (n * power + 1) % modulus
        power = power * 2 % modulus
        s = 1
        for q, cap in caps.items():
            r = c % q ** (cap + 1)
            if r == 0:
                r = cullen_number(n)  # beyond the window: fall back to the exact value
            s *= q ** _small_vp(r, q)
        # C_n is odd, so the power of 2 in s is 1
        if (c - s) % 11**4 == 0:
            list11.append(n)
    list13 = [n for n in list11 if _nu13_at_least_3(n)]
    return list11, list13


def _nu13_at_least_3(n: int) -> bool:
    c = cullen_number(n)
    s = factor_over_basis(c, DEFAULT_BASIS)
    s_val = c // s.cofactor
    return (c - s_val) % 13**3 == 0


def woodall_check(n_max: int, basis: SmoothnessBasis = DEFAULT_BASIS) -> list:
    """All (n, s) with n <= n_max and W_n - 1 = s >= 1 an S-unit."""
    if n_max > 10**5:
        raise ValueError("woodall_check is a desk-scale scan; n_max must be <= 10^5")
    out = []
    for n in range(1, n_max + 1):
        s = woodall_number(n) - 1
        if s >= 1 and is_sunit(s, basis):
            out.append((n, s))
    return out
