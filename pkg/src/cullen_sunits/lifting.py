"""Solutions of n 2^n = t' (mod p^k) for odd primes p.

The solutions of ``p^k | n 2^n - t'`` are periodic modulo ``(p - 1) p^k`` and
there are exactly ``p - 1`` of them per period. Each one is reached from a
residue modulo ``p (p - 1)`` by a chain of digit choices

    n_j = n_(j-1) + (p - 1) p^j l_j,   l_j = 2^(-n_(j-1)) (n_(j-1) 2^(n_(j-1)) - t') / p^j  (mod p)

and ``n_(k-1)`` is the least nonnegative solution modulo ``p^k`` in its class.

For statements about ``C_n - t = n 2^n + 1 - t`` use ``LiftTarget.cullen(p, t)``,
which sets ``t' = t - 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InternalContradiction, RangeTooLarge
from .padic_core import is_prime

DIGIT_BUDGET = 10_000
BRUTE_FORCE_CAP = 10**7


@dataclass(frozen=True)
class LiftTarget:
    p: int
    t_prime: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"lifting needs an odd prime, got p={self.p}")

    @classmethod
    def cullen(cls, p: int, t: int) -> "LiftTarget":
        """Target for ``p^k | C_n - t``."""
        return cls(p, t - 1)

    def residue(self, n: int, modulus: int) -> int:
        """(n 2^n - t') mod ``modulus``."""
        return (n * pow(2, n, modulus) - self.t_prime) % modulus

    def is_exact_root(self, n: int) -> bool:
        """True when n 2^n == t' as integers (the valuation there is infinite)."""
        if n < 0 or n > max(self.t_prime.bit_length(), 1):
            return False
        return n * (1 << n) == self.t_prime


@dataclass(frozen=True)
class LiftChain:
    """Digits l_1..l_j on top of a base residue n0; ``nj`` solves the target mod p^(j+1)."""

    n0: int
    digits: tuple = ()
    nj: int = field(default=None)

    def __post_init__(self):
        if self.nj is None:
            object.__setattr__(self, "nj", self.n0)

    @property
    def j(self) -> int:
        return len(self.digits)

    def index_at(self, p: int, level: int) -> int:
        """n_level, rebuilt from the stored digits."""
        n = self.n0
        for i, digit in enumerate(self.digits[:level], start=1):
            n += (p - 1) * p**i * digit
        return n

    def to_json(self, target: LiftTarget) -> dict:
        return {
            "p": str(target.p),
            "tPrime": str(target.t_prime),
            "n0": str(self.n0),
            "digits": [str(d) for d in self.digits],
            "nj": str(self.nj),
            "j": str(self.j),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LiftChain":
        chain = cls(int(data["n0"]), tuple(int(d) for d in data["digits"]), int(data["nj"]))
        if "j" in data and int(data["j"]) != chain.j:
            raise ValueError("checkpoint digit count disagrees with its j field")
        return chain


def base_solutions(target: LiftTarget) -> list:
    """The p - 1 residues n in [0, p(p-1)) with p | n 2^n - t'."""
    p = target.p
    sols = [n for n in range(p * (p - 1)) if target.residue(n, p) == 0]
    if len(sols) != p - 1:
        raise InternalContradiction(f"expected {p - 1} base residues, found {sols}")
    return sols


def start_chain(target: LiftTarget, n0: int) -> LiftChain:
    if target.residue(n0, target.p):
        raise ValueError(f"{n0} is not a base solution modulo {target.p}")
    return LiftChain(n0)


def lift_step(chain: LiftChain, target: LiftTarget) -> LiftChain:
    """Append the unique digit that lifts the chain one power of p higher."""
    p = target.p
    j = chain.j + 1
    n = chain.nj
    pj = p**j
    modulus = pj * p
    # 2 has order dividing (p - 1) p^j modulo p^(j+1)
    power = pow(2, n % ((p - 1) * pj), modulus)
    value = (n * power - target.t_prime) % modulus
    if value % pj:
        raise InternalContradiction(f"chain at level {j - 1} does not solve mod p^{j}: n={n}")
    quotient = value // pj
    digit = pow(power, -1, p) * quotient % p
    new_n = n + (p - 1) * pj * digit
    if target.residue(new_n, modulus):
        raise InternalContradiction(f"lift to p^{j + 1} failed at n={new_n}")
    return LiftChain(chain.n0, chain.digits + (digit,), new_n)


def lift_chain(target: LiftTarget, n0: int, length: int, chain: LiftChain | None = None) -> LiftChain:
    """Chain of ``length`` digits from ``n0`` (optionally resuming ``chain``)."""
    chain = chain or start_chain(target, n0)
    while chain.j < length:
        chain = lift_step(chain, target)
    return chain


def _stalled_index(target: LiftTarget, root: int, level: int) -> int:
    # smallest n != root in root's class with p^(level+1) | n 2^n - t'
    return root + (target.p - 1) * target.p ** (level + 1)


@dataclass(frozen=True)
class BaseCeiling:
    n0: int
    J: int
    nJ: int
    chain: LiftChain
    exact_root: int | None = None


@dataclass(frozen=True)
class CeilingResult:
    """Result of ``valuation_ceiling``.

    ``J`` is the largest, over base residues, of the first chain level whose
    index exceeds ``N``; ``terminal`` holds every chain's index at level ``J``.
    At the level just below, some chain index is still at most ``N`` and attains
    valuation ``J`` there, so the guarantee is ``nu_p(n 2^n - t') <= J`` for
    ``n <= N`` (strictly below ``valuation_bound = J + 1``). Exact roots of
    ``n 2^n = t'`` have infinite valuation and are listed in ``exact_roots``.
    """

    p: int
    t_prime: int
    N: int
    J: int
    terminal: tuple
    per_base: tuple
    exact_roots: tuple = ()

    @property
    def nJ(self) -> int:
        return max(self.terminal)

    @property
    def valuation_bound(self) -> int:
        return self.J + 1

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "tPrime": str(self.t_prime),
            "N": str(self.N),
            "J": str(self.J),
            "valuationBound": str(self.valuation_bound),
            "terminal": [str(n) for n in self.terminal],
            "perBase": [
                {"n0": str(b.n0), "J": str(b.J), "nJ": str(b.nJ)} for b in self.per_base
            ],
            "exactRoots": [str(r) for r in self.exact_roots],
        }


def _ceiling_for_base(target, n0, N, chain=None) -> BaseCeiling:
    p = target.p
    chain = chain or start_chain(target, n0)
    root = chain.nj if target.is_exact_root(chain.nj) else None
    while root is None and chain.nj <= N:
        chain = lift_step(chain, target)
        if target.is_exact_root(chain.nj):
            root = chain.nj
    if root is None or root > N:
        # first level whose index exceeds N (indices never decrease)
        J = next(j for j in range(chain.j + 1) if chain.index_at(p, j) > N)
        return BaseCeiling(n0, J, chain.index_at(p, J), chain)
    # the chain is stuck on an exact root <= N (earlier indices are smaller still);
    # bound the other members of the root's class instead
    J = chain.j
    while _stalled_index(target, root, J) <= N:
        J += 1
    return BaseCeiling(n0, J, _stalled_index(target, root, J), chain, exact_root=root)


def valuation_ceiling(target: LiftTarget, N: int, resume: dict | None = None) -> CeilingResult:
    """Lift every base residue until its index passes ``N``.

    ``resume`` maps base residues to previously computed chains (checkpoints).
    """
    p = target.p
    if N < 1:
        raise ValueError("N must be positive")
    resume = resume or {}
    bases = [_ceiling_for_base(target, n0, N, resume.get(n0)) for n0 in base_solutions(target)]
    J = max(b.J for b in bases)
    terminal = []
    for b in bases:
        if b.exact_root is not None and J >= b.chain.j:
            terminal.append(_stalled_index(target, b.exact_root, J))
        else:
            terminal.append(lift_chain(target, b.n0, J, b.chain).index_at(p, J))
    roots = tuple(b.exact_root for b in bases if b.exact_root is not None)
    return CeilingResult(p, target.t_prime, N, J, tuple(terminal), tuple(bases), roots)


def solutions_mod_prime_power(target: LiftTarget, k: int, digit_budget: int = DIGIT_BUDGET) -> list:
    """The p - 1 residues modulo (p - 1) p^k with p^k | n 2^n - t', by lifting."""
    if k < 1:
        raise ValueError("k must be positive")
    if k * math.log10(target.p) > digit_budget:
        raise BudgetExceeded(f"p^k has more than {digit_budget} decimal digits")
    return sorted(lift_chain(target, n0, k - 1).nj for n0 in base_solutions(target))


def brute_force_solutions(target: LiftTarget, k: int, cap: int = BRUTE_FORCE_CAP) -> list:
    """Exhaustive scan of [0, (p - 1) p^k); test oracle for the lifting."""
    p = target.p
    period = (p - 1) * p**k
    if period > cap:
        raise RangeTooLarge(f"(p - 1) p^k = {period} exceeds the scan cap {cap}")
    modulus = p**k
    return [n for n in range(period) if target.residue(n, modulus) == 0]


def dump_checkpoint(target: LiftTarget, chains, path) -> None:
    payload = {"p": str(target.p), "tPrime": str(target.t_prime),
               "chains": [c.to_json(target) for c in chains]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)


def load_checkpoint(path):
    """Return ``(target, {n0: chain})`` from a checkpoint written by ``dump_checkpoint``."""
    with open(path) as fh:
        payload = json.load(fh)
    target = LiftTarget(int(payload["p"]), int(payload["tPrime"]))
    chains = {}
    for entry in payload["chains"]:
        chain = LiftChain.from_json(entry)
        # refuse corrupted checkpoints rather than lifting from a bad state
        modulus = target.p ** (chain.j + 1)
        if chain.index_at(target.p, chain.j) != chain.nj or target.residue(chain.nj, modulus):
            raise ValueError(f"checkpoint chain from n0={chain.n0} fails its divisibility check")
        chains[chain.n0] = chain
    return target, chains
