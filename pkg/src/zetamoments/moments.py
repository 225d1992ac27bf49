"""Discrete moments over zeros, large-value counts, and the derived audits.

Covers the package's headline quantities: the normalized derivative moments
J_k, shifted moments sum |zeta(rho+alpha)|^{2k} / N(T), the large-value
histogram with its three-case bound parameterization, the dyadic
histogram-to-moment reconstruction, the Cauchy derivative-moment transfer,
the continuous critical-line moment by quadrature, and the log-zeta majorant
audits (Lambda-weighted and prime-only variants).

Asymptotic bounds are audited, never asserted against unknown implied
constants: each audit reports the observed quantity scaled by the bound
shape evaluated with constant 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .primes import DirichletPolySpec, prime_sum, smoothed_sum
from .zeros import ZeroCache
from .zetafn import (
    DomainError,
    ZeroShiftEvaluator,
    hardy_z_grid,
    zeta,
    zeta_at_heights,
)

TAU_OFFSET_PRIME = math.exp(30.0)   # tau convention of the prime-only majorant


class GridError(ValueError):
    """V-grid does not satisfy the operation's requirements."""


@dataclass(frozen=True)
class MomentReport:
    """One normalized moment with its conjectured-scale ratio."""

    k: float
    ell: int
    alpha: complex
    t_max: float
    raw_sum: float
    normalized: float
    conjectured_exponent: float
    ratio_to_conjecture: float


@dataclass(frozen=True)
class LargeValueConfig:
    """Per-V parameters of the large-value bound at height t_max."""

    t_max: float
    alpha: complex
    v_grid: tuple[float, ...]
    a_values: tuple[float, ...]
    x_values: tuple[float, ...]
    z_values: tuple[float, ...]
    v1_values: tuple[float, ...]
    v2_values: tuple[float, ...]
    vacuity_threshold: float
    vacuity_threshold_plain: float


@dataclass(frozen=True)
class LargeValueHistogram:
    """Counts #S_alpha(T;V) on the V grid plus bound values (constant 1)."""

    config: LargeValueConfig
    counts: tuple[int, ...]
    bound_values: tuple[float, ...]
    bound_cases: tuple[str, ...]
    n_zeros: int
    max_observed: float


@dataclass(frozen=True)
class CauchyTransferReport:
    """Sampled two-sided data of the derivative-moment transfer inequality."""

    k: int
    ell: int
    radius: float
    n_samples: int
    lhs: float
    rhs_sampled: float
    prefactor: float
    argmax_alpha: complex

    @property
    def slack(self) -> float:
        return self.rhs_sampled / self.lhs


@dataclass(frozen=True)
class MajorantSample:
    sigma: float
    t: float
    lhs: float
    rhs_lambda: float
    rhs_prime: float
    skipped: bool = False
    reason: str = ""

    @property
    def slack_lambda(self) -> float:
        return self.rhs_lambda - self.lhs

    @property
    def slack_prime(self) -> float:
        return self.rhs_prime - self.lhs


@dataclass(frozen=True)
class MajorantAuditTable:
    """Per-sample slack of the log-zeta majorant inequalities."""

    spec: DirichletPolySpec
    samples: tuple[MajorantSample, ...]

    def _active(self) -> list[MajorantSample]:
        return [s for s in self.samples if not s.skipped]

    @property
    def min_slack_lambda(self) -> float:
        rows = self._active()
        return min(s.slack_lambda for s in rows) if rows else math.inf

    @property
    def min_slack_prime(self) -> float:
        rows = self._active()
        return min(s.slack_prime for s in rows) if rows else math.inf

    @property
    def fitted_constant_lambda(self) -> float:
        """Smallest nonnegative additive constant making the bound hold."""
        return max(0.0, -self.min_slack_lambda)

    @property
    def fitted_constant_prime(self) -> float:
        return max(0.0, -self.min_slack_prime)


# ---------------------------------------------------------------------------
# shared evaluation of zeta and derivatives at (possibly shifted) zeros

_VALUE_MEMO: dict[tuple, np.ndarray] = {}


def _cache_key(cache: ZeroCache, alpha: complex, order: int) -> tuple:
    first = cache.records[0].gamma if cache.records else 0.0
    last = cache.records[-1].gamma if cache.records else 0.0
    return (len(cache), cache.t_max, first, last, complex(alpha), order)


def values_at_zeros(cache: ZeroCache, alpha: complex = 0.0,
                    order: int = 0) -> np.ndarray:
    """zeta^(order)(rho + alpha) over the cached zeros, memoized."""
    key = _cache_key(cache, alpha, order)
    hit = _VALUE_MEMO.get(key)
    if hit is not None:
        return hit
    if len(cache) == 0:
        vals = np.empty(0, dtype=np.complex128)
    else:
        vals, _ = zeta_at_heights(cache.gammas(), alpha=alpha, order=order)
    if len(_VALUE_MEMO) > 64:
        _VALUE_MEMO.clear()
    _VALUE_MEMO[key] = vals
    return vals


_EVALUATOR_MEMO: dict[tuple, ZeroShiftEvaluator] = {}


def shift_evaluator(cache: ZeroCache) -> ZeroShiftEvaluator:
    """Shared Taylor evaluator of zeta(rho+alpha) for many-shift audits."""
    key = _cache_key(cache, 0.0, -1)
    hit = _EVALUATOR_MEMO.get(key)
    if hit is None:
        hit = ZeroShiftEvaluator(cache.gammas())
        _EVALUATOR_MEMO.clear()
        _EVALUATOR_MEMO[key] = hit
    return hit


# ---------------------------------------------------------------------------
# moments


def compute_Jk(cache: ZeroCache, k: float, ell: int) -> MomentReport:
    """J-type moment: (1/N) sum |zeta^(ell)(rho)|^{2k} and its (log T) ratio."""
    if len(cache) == 0:
        raise ValueError("empty cache")
    if k <= 0:
        raise ValueError(f"k must be positive (got {k})")
    if ell not in (0, 1, 2):
        raise ValueError(f"ell must be 0, 1 or 2 (got {ell})")
    vals = values_at_zeros(cache, 0.0, ell)
    raw = float(np.sum(np.abs(vals) ** (2.0 * k)))
    n = len(cache)
    exponent = k * (k + 2 * ell)
    log_t = math.log(cache.t_max)
    return MomentReport(k=k, ell=ell, alpha=0.0, t_max=cache.t_max,
                        raw_sum=raw, normalized=raw / n,
                        conjectured_exponent=exponent,
                        ratio_to_conjecture=(raw / n) / log_t ** exponent)


def shifted_moment(cache: ZeroCache, k: float, alpha: complex) -> MomentReport:
    """(1/N) sum |zeta(rho + alpha)|^{2k} against the (log T)^{k^2} scale.

    Requires |alpha| <= 1 and |Re alpha| <= 1/log T (the two-sided range the
    underlying argument actually uses).
    """
    if len(cache) == 0:
        raise ValueError("empty cache")
    if k <= 0:
        raise ValueError(f"k must be positive (got {k})")
    alpha = complex(alpha)
    log_t = math.log(cache.t_max)
    if abs(alpha) > 1.0 or abs(alpha.real) > 1.0 / log_t + 1e-15:
        raise ValueError(f"alpha = {alpha} outside |alpha|<=1, |Re alpha|<=1/log T")
    vals = values_at_zeros(cache, alpha, 0)
    raw = float(np.sum(np.abs(vals) ** (2.0 * k)))
    n = len(cache)
    exponent = k * k
    return MomentReport(k=k, ell=0, alpha=alpha, t_max=cache.t_max,
                        raw_sum=raw, normalized=raw / n,
                        conjectured_exponent=exponent,
                        ratio_to_conjecture=(raw / n) / log_t ** exponent)


# ---------------------------------------------------------------------------
# large values


def _loglog(t: float) -> float:
    return math.log(math.log(t))


def _a_param(t_max: float, v: float) -> float:
    ll = _loglog(t_max)
    l3 = math.log(ll)
    if v <= ll:
        return 0.5 * l3
    if v <= 0.5 * ll * l3:
        return (ll / (2.0 * v)) * l3
    return 1.0


def _vd_bound(t_max: float, v: float, n_zeros: int) -> tuple[float, str]:
    ll = _loglog(t_max)
    l3 = math.log(ll)
    sq = math.sqrt(ll)
    if sq <= v <= ll:
        return (n_zeros * (v / sq) * math.exp(-(v * v / ll) * (1.0 - 4.0 / l3)),
                "i")
    if ll < v <= 0.5 * ll * l3:
        return (n_zeros * (v / sq)
                * math.exp(-(v * v / ll) * (1.0 - 4.0 * v / (ll * l3))), "ii")
    if v > 0.5 * ll * l3:
        return n_zeros * math.exp(-(v / 201.0) * math.log(v)), "iii"
    return float(n_zeros), "trivial"


def vacuity_threshold(t_max: float, plain: bool = False) -> float:
    """Height above which the large-value set is predicted empty.

    The working threshold keeps the tau = T + e^30 convention of the
    prime-only majorant the bound is derived from; plain=True evaluates the
    same shape at tau = T (vacuous at desk scale, reported for reference).
    """
    tau = t_max if plain else t_max + TAU_OFFSET_PRIME
    return 0.4 * math.log(tau) / _loglog(tau)


def large_value_histogram(cache: ZeroCache, k_hint: float, alpha: complex,
                          v_grid=None) -> LargeValueHistogram:
    """Counts of zeros with log|zeta(rho+alpha)| >= V over a V grid."""
    if len(cache) == 0:
        raise ValueError("empty cache")
    if cache.t_max < 100.0:
        raise DomainError("large-value parameterization needs t_max >= 100")
    t_max = cache.t_max
    alpha = complex(alpha)
    if abs(alpha) > 1.0 or abs(alpha.real) > 1.0 / math.log(t_max) + 1e-15:
        raise ValueError(f"alpha = {alpha} outside |alpha|<=1, |Re alpha|<=1/log T")
    vals = np.abs(values_at_zeros(cache, complex(alpha), 0))
    with np.errstate(divide="ignore"):
        logs = np.log(vals)
    finite = logs[np.isfinite(logs)]
    max_obs = float(finite.max()) if finite.size else -math.inf
    if v_grid is None:
        ll = _loglog(t_max)
        top = max(4, int(math.ceil(max_obs)) if math.isfinite(max_obs) else 4,
                  int(math.ceil(4.0 * k_hint * ll)))
        v_grid = [float(v) for v in range(3, top + 1)]
    v_grid = [float(v) for v in v_grid]
    if any(b <= a for a, b in zip(v_grid, v_grid[1:])) or not v_grid:
        raise GridError("V grid must be nonempty and ascending")
    if v_grid[0] < 0.0:
        raise GridError("V grid values must be nonnegative")

    counts = tuple(int((logs >= v).sum()) for v in v_grid)
    bounds = []
    cases = []
    a_vals, x_vals, z_vals, v1_vals, v2_vals = [], [], [], [], []
    ll = _loglog(t_max)
    for v in v_grid:
        bound, case = _vd_bound(t_max, v, len(cache))
        bounds.append(bound)
        cases.append(case)
        a = _a_param(t_max, v)
        a_vals.append(a)
        x = min(math.sqrt(t_max), t_max ** (a / v)) if v > 0 else math.sqrt(t_max)
        x_vals.append(x)
        z_vals.append(x ** (1.0 / ll))
        v1_vals.append(v * (1.0 - 9.0 / (10.0 * a)))
        v2_vals.append(v / (10.0 * a))
    config = LargeValueConfig(
        t_max=t_max, alpha=complex(alpha), v_grid=tuple(v_grid),
        a_values=tuple(a_vals), x_values=tuple(x_vals), z_values=tuple(z_vals),
        v1_values=tuple(v1_vals), v2_values=tuple(v2_vals),
        vacuity_threshold=vacuity_threshold(t_max),
        vacuity_threshold_plain=vacuity_threshold(t_max, plain=True))
    return LargeValueHistogram(config=config, counts=counts,
                               bound_values=tuple(bounds),
                               bound_cases=tuple(cases),
                               n_zeros=len(cache), max_observed=max_obs)


def histogram_from_values(log_values, t_max: float, alpha: complex = 0.0,
                          v_grid=None) -> LargeValueHistogram:
    """Histogram over explicit log|zeta| values (synthetic-data entry point)."""
    logs = np.asarray(log_values, dtype=np.float64)
    max_obs = float(logs.max()) if logs.size else -math.inf
    if v_grid is None:
        top = max(4, int(math.ceil(max_obs)) if math.isfinite(max_obs) else 4)
        v_grid = [float(v) for v in range(3, top + 1)]
    v_grid = [float(v) for v in v_grid]
    counts = tuple(int((logs >= v).sum()) for v in v_grid)
    bounds, cases = [], []
    for v in v_grid:
        bound, case = _vd_bound(t_max, v, logs.size)
        bounds.append(bound)
        cases.append(case)
    ll = _loglog(t_max)
    a_vals = tuple(_a_param(t_max, v) for v in v_grid)
    x_vals = tuple(min(math.sqrt(t_max), t_max ** (a / v))
                   for a, v in zip(a_vals, v_grid))
    config = LargeValueConfig(
        t_max=t_max, alpha=complex(alpha), v_grid=tuple(v_grid),
        a_values=a_vals, x_values=x_vals,
        z_values=tuple(x ** (1.0 / ll) for x in x_vals),
        v1_values=tuple(v * (1.0 - 9.0 / (10.0 * a))
                        for a, v in zip(a_vals, v_grid)),
        v2_values=tuple(v / (10.0 * a) for a, v in zip(a_vals, v_grid)),
        vacuity_threshold=vacuity_threshold(t_max),
        vacuity_threshold_plain=vacuity_threshold(t_max, plain=True))
    return LargeValueHistogram(config=config, counts=counts,
                               bound_values=tuple(bounds),
                               bound_cases=tuple(cases),
                               n_zeros=int(logs.size), max_observed=max_obs)


def dyadic_reconstruction(histogram: LargeValueHistogram, k: float) -> float:
    """Upper-bound moment rebuilt from histogram decrements on integer bins.

    Zeros with log|zeta| below 3 are lumped into an e^{6k}-per-zero bottom
    term; each bin [nu-1, nu) contributes e^{2k nu} per zero.  The result
    dominates the direct moment and exceeds it by at most a factor e^{2k}
    plus the bottom term.
    """
    grid = histogram.config.v_grid
    if any(abs(v - round(v)) > 0.0 for v in grid):
        raise GridError("dyadic reconstruction needs an integer V grid")
    if grid[0] != 3.0:
        raise GridError("integer V grid must start at 3")
    if any(b - a != 1.0 for a, b in zip(grid, grid[1:])):
        raise GridError("integer V grid must be consecutive")
    if math.isfinite(histogram.max_observed) and grid[-1] < histogram.max_observed:
        raise GridError(
            f"grid top {grid[-1]} below max observed {histogram.max_observed:.3f}")
    counts = histogram.counts
    total = histogram.n_zeros
    recon = math.exp(6.0 * k) * (total - counts[0])
    for j in range(1, len(grid)):
        nu = grid[j]
        recon += math.exp(2.0 * k * nu) * (counts[j - 1] - counts[j])
    return recon


# ---------------------------------------------------------------------------
# Cauchy transfer


def _disk_samples(radius: float, n_samples: int) -> list[complex]:
    """Boundary circle plus four interior rings (max-modulus is sampled,
    not assumed: the summed modulus powers need not peak on the boundary)."""
    out = [radius * complex(math.cos(2.0 * math.pi * j / n_samples),
                            math.sin(2.0 * math.pi * j / n_samples))
           for j in range(n_samples)]
    ring_n = max(8, n_samples // 4)
    for m in range(1, 5):
        r = radius * m / 5.0
        out.extend(r * complex(math.cos(2.0 * math.pi * j / ring_n),
                               math.sin(2.0 * math.pi * j / ring_n))
                   for j in range(ring_n))
    return out


def cauchy_transfer_report(cache: ZeroCache, k: int, ell: int, radius: float,
                           n_samples: int = 64) -> CauchyTransferReport:
    if k < 1 or ell < 1:
        raise ValueError("k and ell must be >= 1")
    if not (0.0 < radius <= 1.0 / math.log(cache.t_max) + 1e-15):
        raise ValueError(f"radius {radius} outside (0, 1/log T]")
    if n_samples < 64:
        raise ValueError(f"n_samples must be >= 64 (got {n_samples})")
    lhs_vals = values_at_zeros(cache, 0.0, ell)
    lhs = float(np.sum(np.abs(lhs_vals) ** (2.0 * k)))
    evaluator = shift_evaluator(cache)
    best = -math.inf
    best_alpha = 0.0 + 0.0j
    for alpha in _disk_samples(radius, n_samples):
        vals = evaluator.values(alpha)
        total = float(np.sum(np.abs(vals) ** (2.0 * k)))
        if total > best:
            best, best_alpha = total, alpha
    prefactor = (math.factorial(ell) / radius ** ell) ** (2.0 * k)
    return CauchyTransferReport(k=k, ell=ell, radius=radius,
                                n_samples=n_samples, lhs=lhs,
                                rhs_sampled=prefactor * best,
                                prefactor=prefactor, argmax_alpha=best_alpha)


def cauchy_transfer_audit(cache: ZeroCache, k: int, ell: int, radius: float,
                          n_samples: int = 64) -> float:
    """Sampled slack RHS/LHS of the derivative-moment transfer (pass >= 0.95)."""
    return cauchy_transfer_report(cache, k, ell, radius, n_samples).slack


# ---------------------------------------------------------------------------
# continuous moment


def continuous_moment(k: float, t_max: float, step: float) -> float:
    """(1/T) integral_1^T |zeta(1/2+it)|^{2k} dt by composite Simpson.

    Starts at t = 1; the omitted [0, 1] sliver contributes O(1/T) relative
    (the integrand is bounded there by |zeta(1/2)|^{2k} ~ 2.1^k).
    """
    if k <= 0:
        raise ValueError(f"k must be positive (got {k})")
    if step > 0.01:
        raise ValueError(f"step must be <= 0.01 (got {step})")
    if t_max <= 1.0:
        raise ValueError("t_max must exceed 1")
    n_iv = int(math.ceil((t_max - 1.0) / step))
    if n_iv % 2 == 1:
        n_iv += 1
    ts = np.linspace(1.0, t_max, n_iv + 1)
    mods = np.empty(ts.size)
    below = ts < 10.0
    n_below = int(below.sum())
    if n_below:
        mods[:n_below] = np.abs([zeta(complex(0.5, float(t))).value
                                 for t in ts[:n_below]])
    if n_below < ts.size:
        zvals, _ = hardy_z_grid(ts[n_below:])
        mods[n_below:] = np.abs(zvals)
    f = mods ** (2.0 * k)
    h = (t_max - 1.0) / n_iv
    integral = (h / 3.0) * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum()
                            + 2.0 * f[2:-2:2].sum())
    return float(integral / t_max)


# ---------------------------------------------------------------------------
# log-zeta majorant audits


def log_plus(x: float) -> float:
    """log^+ |x|: zero below modulus one."""
    return math.log(x) if x >= 1.0 else 0.0


def majorant_audit(spec: DirichletPolySpec, sample_points) -> MajorantAuditTable:
    """Slack table of the two majorant inequalities over (sigma, t) samples.

    RHS terms carry no O(1): slack = |polynomial| + (1+lam)/2 * log tau/log x
    minus log^+|zeta|, with tau = |t|+3 for the Lambda variant and
    tau = |t|+e^30 for the prime variant.  Out-of-hypothesis samples are
    reported as skipped, not dropped silently.
    """
    x = spec.x
    lam = spec.lam
    logx = math.log(x)
    rows = []
    for sigma, t in sample_points:
        tau_l = abs(t) + 3.0
        tau_p = abs(t) + TAU_OFFSET_PRIME
        reason = ""
        if not (0.5 <= sigma <= spec.sigma_lam + 1e-12):
            reason = f"sigma {sigma} outside [1/2, sigma_lam]"
        elif not (2.0 <= x <= tau_l * tau_l):
            reason = f"x {x} outside [2, tau^2]"
        elif not spec.in_majorant_range:
            reason = f"lam {lam} outside [lambda0, log(x)/4]"
        if reason:
            rows.append(MajorantSample(sigma=sigma, t=t, lhs=math.nan,
                                       rhs_lambda=math.nan, rhs_prime=math.nan,
                                       skipped=True, reason=reason))
            continue
        lhs = log_plus(abs(zeta(complex(sigma, t)).value))
        phase_term = 0.5 * (1.0 + lam) / logx
        rhs_l = abs(smoothed_sum(spec, complex(sigma, t))) + phase_term * math.log(tau_l)
        rhs_p = abs(prime_sum(spec, complex(sigma, t))) + phase_term * math.log(tau_p)
        rows.append(MajorantSample(sigma=sigma, t=t, lhs=lhs,
                                   rhs_lambda=rhs_l, rhs_prime=rhs_p))
    return MajorantAuditTable(spec=spec, samples=tuple(rows))


def prime_lambda_difference(spec: DirichletPolySpec, t: float) -> tuple[float, float]:
    """(modulus of Lambda-weighted minus prime-only sums, fitted constant).

    The fitted constant divides by log log log tau with tau = |t| + e^30.
    """
    import dataclasses
    full = dataclasses.replace(spec, prime_only=False)
    s = complex(0.0, t)
    diff = abs(smoothed_sum(full, s) - prime_sum(full, s))
    shape = math.log(math.log(math.log(abs(t) + TAU_OFFSET_PRIME)))
    return diff, diff / shape
