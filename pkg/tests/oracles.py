"""Independent oracle implementations used to pin expected values.

Everything here deliberately avoids the package's vectorized code paths:
plain Python loops, cmath powers, and classical formulas, so a shared bug
cannot hide.  The Euler-Maclaurin oracle runs at four times the package's
truncation with extra correction terms and reports its own remainder bound.
"""

from __future__ import annotations

import cmath
import math

# Bernoulli numbers B_2..B_36
_B2K = [
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
    43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730, 8553103 / 6,
    -23749461029 / 870, 8615841276005 / 14322, -7709321041217 / 510,
    2577687858367 / 6, -26315271553053477373 / 1919190,
]


def em_zeta_oracle(s: complex, mult: int = 4, corrections: int = 16,
                   derivative: int = 0):
    """(value, remainder_bound) for zeta^(derivative)(s), naive Euler-Maclaurin.

    Truncation is mult times the package's choice max(20, ceil(2|t|/pi)).
    """
    s = complex(s)
    n = mult * max(20, math.ceil(2.0 * abs(s.imag) / math.pi))
    val = 0.0 + 0.0j
    amp_sq = 0.0
    for m in range(1, n):
        term = m ** (-s) if derivative == 0 else \
            (-math.log(m)) ** derivative * m ** (-s)
        val += term
        amp_sq += m ** (-2.0 * s.real)
    log_n = math.log(n)
    n_pow = cmath.exp(-s * log_n)

    def tail_part(order):
        # d^order/ds^order of N^{1-s}/(s-1) and N^{-s}/2 via log-derivative
        g = n_pow * n / (s - 1.0)
        h = 0.5 * n_pow
        if order == 0:
            return g + h
        u = -log_n - 1.0 / (s - 1.0)
        if order == 1:
            return g * u - log_n * h
        return g * (u * u + 1.0 / (s - 1.0) ** 2) + log_n * log_n * h

    val += tail_part(derivative)
    fact = 2.0
    prod = [s]                      # prod_{j=0}^{2r-2}(s+j)
    recip = 1.0 / s
    recip2 = 1.0 / (s * s)
    scale = n_pow / n
    for r in range(1, corrections + 1):
        t_r = (_B2K[r - 1] / fact) * prod[0] * scale
        if derivative == 0:
            val += t_r
        elif derivative == 1:
            val += t_r * (recip - log_n)
        else:
            u = recip - log_n
            val += t_r * (u * u - recip2)
        a = s + (2 * r - 1)
        b = s + (2 * r)
        prod[0] = prod[0] * a * b
        recip += 1.0 / a + 1.0 / b
        recip2 += 1.0 / (a * a) + 1.0 / (b * b)
        fact *= (2 * r + 1) * (2 * r + 2)
        scale /= n * n
    m2 = 2 * corrections
    bound = (abs(_B2K[corrections]) / fact) * abs(prod[0]) \
        * n ** (-s.real - m2 - 1) * abs(s + m2 + 1) / (s.real + m2 + 1)
    deriv_slack = (log_n + 3.0) ** derivative
    # the oracle's own rounding noise: correlated phase error times the
    # quadrature amplitude of the summed terms
    fp_noise = 2.5e-16 * math.sqrt(amp_sq) * (1.0 + abs(s.imag) * log_n) \
        * deriv_slack
    return val, bound * deriv_slack + fp_noise + 1e-14 * (1.0 + abs(s.imag))


def lanczos_log_gamma(s: complex) -> complex:
    """Classic g=7, n=9 Lanczos approximation, Re s > 0."""
    coeffs = [
        0.99999999999980993, 676.5203681218851, -1259.1392167224028,
        771.32342877765313, -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
    ]
    s = complex(s)
    if s.imag < 0:
        return lanczos_log_gamma(s.conjugate()).conjugate()
    z = s - 1.0
    acc = coeffs[0]
    for i in range(1, 9):
        acc += coeffs[i] / (z + i)
    t = z + 7.5
    return (0.5 * math.log(2.0 * math.pi) + (z + 0.5) * cmath.log(t) - t
            + cmath.log(acc))


def mangoldt_oracle(n: int) -> float:
    """Lambda(n) by trial division."""
    if n < 2:
        return 0.0
    p = None
    m = n
    for d in range(2, int(math.isqrt(n)) + 1):
        if m % d == 0:
            p = d
            while m % d == 0:
                m //= d
            break
    if p is None:
        return math.log(n)          # n prime
    return math.log(p) if m == 1 else 0.0


def bisect_zero(z_func, lo: float, hi: float, scan_step: float = 1e-6,
                iters: int = 80) -> float:
    """Zero of z_func in (lo, hi): fine-grid scan then pure bisection."""
    a, fa = lo, z_func(lo)
    t = lo + scan_step
    b = None
    while t <= hi:
        ft = z_func(t)
        if fa * ft <= 0.0:
            b, fb = t, ft
            break
        a, fa = t, ft
        t += scan_step
    if b is None:
        raise AssertionError(f"no sign change of Z in ({lo}, {hi})")
    for _ in range(iters):
        mid = 0.5 * (a + b)
        fm = z_func(mid)
        if fa * fm <= 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def sign_change_count(z_func_grid, lo: float, hi: float, step: float) -> int:
    """Exhaustive sign-change count of Z on a uniform grid over (lo, hi)."""
    import numpy as np
    n = int(math.ceil((hi - lo) / step)) + 1
    ts = np.linspace(lo, hi, n)
    zs = z_func_grid(ts)
    sign = np.sign(zs)
    return int((sign[:-1] * sign[1:] < 0).sum())
