"""Prime sieve, von Mangoldt weights, and the smoothed Dirichlet polynomials.

The polynomials are the log-zeta majorants evaluated throughout the audits:
the Lambda-weighted sum

    sum_{n<=x} Lambda(n) / (n^{s_lam + it} log n) * log(x/n)/log(x)

and its prime-restricted companion with weight log(x/p)/log(x), both taken
at the shifted abscissa s_lam = 1/2 + lam/log(x).  The S1/S2 split cuts the
prime sum at z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .zetafn import CONSTANTS


class SieveRangeError(ValueError):
    """Query beyond the sieve table limit."""


class SieveTable:
    """Smallest-prime-factor table up to limit (inclusive)."""

    def __init__(self, limit: int):
        if limit < 2:
            raise ValueError(f"sieve limit must be >= 2 (got {limit})")
        self.limit = int(limit)
        spf = np.zeros(self.limit + 1, dtype=np.int64)
        for i in range(2, int(math.isqrt(self.limit)) + 1):
            if spf[i] == 0:
                sl = spf[i * i:: i]
                sl[sl == 0] = i
        rest = spf == 0
        rest[:2] = False
        spf[rest] = np.flatnonzero(rest)
        self.smallest_prime_factor = spf

    def is_prime(self, n: int) -> bool:
        self._check(n)
        return n >= 2 and self.smallest_prime_factor[n] == n

    def primes(self, upto: int | None = None) -> np.ndarray:
        hi = self.limit if upto is None else int(upto)
        self._check(hi)
        spf = self.smallest_prime_factor[: hi + 1]
        idx = np.arange(hi + 1)
        return idx[(idx >= 2) & (spf == idx)]

    def mangoldt(self, n: int) -> float:
        """Lambda(n): log p when n is a prime power p^k, else 0."""
        self._check(n)
        if n < 2:
            return 0.0
        p = int(self.smallest_prime_factor[n])
        m = n
        while m % p == 0:
            m //= p
        return math.log(p) if m == 1 else 0.0

    def mangoldt_table(self, upto: int) -> np.ndarray:
        """Lambda(0..upto) as an array (Lambda(0) = Lambda(1) = 0)."""
        self._check(upto)
        out = np.zeros(upto + 1)
        for p in self.primes(upto):
            lp = math.log(p)
            pk = p
            while pk <= upto:
                out[pk] = lp
                pk *= p
        return out

    def _check(self, n: int) -> None:
        if n > self.limit:
            raise SieveRangeError(f"{n} beyond sieve limit {self.limit}")


_SHARED: SieveTable | None = None


def shared_sieve(limit: int) -> SieveTable:
    """Process-wide sieve, regrown when a larger limit is requested."""
    global _SHARED
    if _SHARED is None or _SHARED.limit < limit:
        _SHARED = SieveTable(max(limit, 1 << 16))
    return _SHARED


@dataclass(frozen=True)
class DirichletPolySpec:
    """Parameters of one smoothed polynomial: length x, shift lam, options.

    The majorant inequality needs lambda0 <= lam <= log(x)/4, a range that is
    empty for x below e^{4 lambda0} ~ 9.7; the sums themselves are well
    defined for any lam > 0, so construction only enforces positivity and the
    audits check ``in_majorant_range`` per sample.
    """

    x: float
    lam: float = CONSTANTS.lambda0
    prime_only: bool = False
    split_z: float | None = None

    def __post_init__(self):
        if self.x < 2.0:
            raise ValueError(f"polynomial length x must be >= 2 (got {self.x})")
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive (got {self.lam})")
        if self.split_z is not None and not (2.0 <= self.split_z <= self.x):
            raise ValueError(f"split point z={self.split_z} outside [2, x]")

    @property
    def sigma_lam(self) -> float:
        return 0.5 + self.lam / math.log(self.x)

    @property
    def in_majorant_range(self) -> bool:
        return CONSTANTS.lambda0 <= self.lam <= math.log(self.x) / 4.0


def _poly_sum(ns: np.ndarray, coeff: np.ndarray, sigma: float, t: float) -> complex:
    if ns.size == 0:
        return 0.0 + 0.0j
    logn = np.log(ns.astype(np.float64))
    vals = coeff * np.exp(-sigma * logn) * np.exp(-1j * t * logn)
    return complex(vals.sum())


def smoothed_sum(spec: DirichletPolySpec, s: complex) -> complex:
    """Smoothed polynomial at sigma_lam + i Im(s), honoring spec.prime_only.

    The evaluation abscissa is always the shifted sigma_lam; only the height
    is taken from s.  With prime_only set this is the prime-restricted sum
    with weight log(x/p)/log x; otherwise the Lambda-weighted sum.
    """
    if spec.prime_only:
        return prime_sum(spec, s)
    t = complex(s).imag
    x = spec.x
    nmax = int(math.floor(x))
    sieve = shared_sieve(max(nmax, 4))
    lam_tab = sieve.mangoldt_table(nmax)
    ns = np.flatnonzero(lam_tab[: nmax + 1])
    logx = math.log(x)
    coeff = lam_tab[ns] / np.log(ns) * (logx - np.log(ns)) / logx
    return _poly_sum(ns, coeff, spec.sigma_lam, t)


def prime_sum(spec: DirichletPolySpec, s: complex,
              p_lo: float = 0.0, p_hi: float | None = None) -> complex:
    """Prime-restricted polynomial with weight log(x/p)/log(x) at sigma_lam + it.

    p_lo/p_hi restrict to primes p_lo < p <= p_hi (defaults: the full p <= x).
    """
    t = complex(s).imag
    x = spec.x
    hi = x if p_hi is None else min(p_hi, x)
    nmax = int(math.floor(hi))
    sieve = shared_sieve(max(nmax, 4))
    ps = sieve.primes(nmax)
    ps = ps[ps > p_lo]
    logx = math.log(x)
    coeff = (logx - np.log(ps)) / logx if ps.size else np.empty(0)
    return _poly_sum(ps, coeff, spec.sigma_lam, t)


def s1_s2(spec: DirichletPolySpec, gamma: float) -> tuple[complex, complex]:
    """(S1, S2) at rho = 1/2 + i*gamma: prime sums cut at z, shift lam/log x."""
    if spec.split_z is None:
        raise ValueError("spec.split_z is required for the S1/S2 split")
    s = complex(0.5, gamma)
    short = prime_sum(spec, s, p_hi=spec.split_z)
    tail = prime_sum(spec, s, p_lo=spec.split_z)
    return short, tail


def mangoldt(n: int, sieve: SieveTable | None = None) -> float:
    """Lambda(n) via the shared sieve (grown to cover n)."""
    if n < 1:
        raise ValueError(f"mangoldt needs n >= 1 (got {n})")
    table = sieve if sieve is not None else shared_sieve(max(n, 4))
    return table.mangoldt(n)


def chebyshev_psi(x: float, sieve: SieveTable | None = None) -> float:
    """psi(x) = sum_{n<=x} Lambda(n) by direct summation."""
    nmax = int(math.floor(x))
    table = sieve if sieve is not None else shared_sieve(max(nmax, 4))
    return float(table.mangoldt_table(nmax).sum())
