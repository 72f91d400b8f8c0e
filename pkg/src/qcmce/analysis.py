"""Closed-form security and complexity estimates.

Work factors follow Stern's algorithm: per-iteration success probability
``P`` for one of ``A_w`` target words of weight ``w`` in an ``(n_S, k_S)``
code, per-iteration cost ``N`` in binary operations, and ``WF = N / P``
minimised over the algorithm parameters ``g`` (rows per half) and ``l``
(window length).  Everything is evaluated in the log2 domain.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .params import SystemParams

LOG2_12 = math.log2(12)
_LN2 = math.log(2.0)
G_MAX = 40
L_MAX = 64
SECURITY_TARGET = 80.0


class InfeasibleWeight(ValueError):
    """No (g, l) in the search box gives a non-zero success probability."""


@dataclass(frozen=True)
class WorkFactorReport:
    n_S: int
    k_S: int
    w: int
    A_w: int
    g_opt: int
    l_opt: int
    log2_P: float
    log2_N: float
    log2_c: float
    log2_WF: float
    speedup12_applied: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def _lbinom(n, k):
    """log2 C(n, k) elementwise; -inf where the binomial vanishes."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    ok = (k >= 0) & (n >= k)
    with np.errstate(invalid="ignore"):
        val = (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / _LN2
    return np.where(ok, val, -np.inf)


def _logaddexp2(*xs):
    out = xs[0]
    for x in xs[1:]:
        out = np.logaddexp2(out, x)
    return out


def _stern_grid(n: int, k: int, w, a_w, g_max: int = G_MAX, l_max: int = L_MAX):
    """log2 P and log2 N on the (g, l) box; ``w``/``a_w`` may carry a leading batch axis."""
    h = k / 2
    g = np.arange(1, min(int(h), g_max) + 1, dtype=float)
    l = np.arange(1, min(n - k, l_max) + 1, dtype=float)
    if g.size == 0 or l.size == 0:
        return g, l, None, None
    w = np.asarray(w, dtype=float)[..., None, None]
    a_w = np.asarray(a_w, dtype=float)[..., None, None]
    G = g[:, None]
    L = l[None, :]
    log_p = (np.log2(a_w)
             + _lbinom(w, G) + _lbinom(n - w, h - G) - _lbinom(n, h)
             + _lbinom(w - G, G) + _lbinom(n - h - w + G, h - G) - _lbinom(n - h, h)
             + _lbinom(n - k - w + 2 * G, L) - _lbinom(n - k, L))
    log_p = np.minimum(log_p, 0.0)
    bh = _lbinom(h, G)
    r = n - k
    log_n = _logaddexp2(
        np.full(G.shape, 3 * math.log2(r) - 1) + 0 * L,
        np.full(G.shape, math.log2(k) + 2 * math.log2(r)) + 0 * L,
        1 + np.log2(G * L) + bh,
        1 + np.log2(G * r) + 2 * bh - L,
    )
    return g, l, log_p, log_n


def stern_wf(n_S: int, k_S: int, w: int, A_w: int = 1) -> WorkFactorReport:
    """Minimum Stern work factor over the (g, l) search box."""
    if not 0 < w <= n_S:
        raise ValueError(f"need 0 < w <= n_S, got w={w}, n_S={n_S}")
    if A_w < 1:
        raise ValueError("A_w must be >= 1")
    if not 0 < k_S < n_S:
        raise InfeasibleWeight(f"k_S={k_S} leaves no redundancy in length {n_S}")
    g, l, log_p, log_n = _stern_grid(n_S, k_S, w, A_w)
    if log_p is None or not np.isfinite(log_p).any():
        raise InfeasibleWeight(f"no (g, l) can find weight {w} in a ({n_S}, {k_S}) code")
    wf = log_n - log_p
    i, j = np.unravel_index(np.argmin(wf), wf.shape)
    lp, ln = float(log_p[i, j]), float(log_n[i, j])
    return WorkFactorReport(n_S, k_S, w, A_w, int(g[i]), int(l[j]), lp, ln, -lp, ln - lp)


def apply_speedup12(report: WorkFactorReport) -> WorkFactorReport:
    """Credit the factor-12 speedup of improved information-set bookkeeping."""
    if report.speedup12_applied:
        raise ValueError("speedup already applied to this report")
    return replace(report, log2_WF=report.log2_WF - LOG2_12, log2_N=report.log2_N - LOG2_12,
                   speedup12_applied=True)


# attacks on the dual code

@dataclass(frozen=True)
class DualAttackReport:
    report: WorkFactorReport
    threshold_w: int
    target: float = SECURITY_TARGET


def dual_weight_threshold(n: int, r: int, target: float = SECURITY_TARGET) -> int:
    """Smallest weight w for which searching the dual costs at least 2^target."""
    def wf(w):
        # below 2g the collision split cannot apply; such weights are not a security margin
        try:
            return stern_wf(n, r, w, r).log2_WF
        except InfeasibleWeight:
            return -math.inf
    lo, hi = 1, max(2, n // 2)
    if wf(lo) >= target:
        return lo
    while wf(hi) < target:
        if hi >= n:
            raise InfeasibleWeight(f"no weight reaches 2^{target}")
        hi = min(n, hi * 2)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if wf(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def dual_attack_wf(params: SystemParams, target: float = SECURITY_TARGET) -> DualAttackReport:
    """Stern on the dual code: rows of H' have weight about d_c*m and there are about n-k of them."""
    n, r = params.n, params.n - params.k
    rep = stern_wf(n, r, params.d_c * params.m, r)
    return DualAttackReport(rep, dual_weight_threshold(n, r, target), target)


# decoding attack

def decoding_attack_wf(params: SystemParams, r: int) -> WorkFactorReport:
    """Stern on G' extended by r shifted ciphertexts: n_S=n, k_S=k+r, w=t', A_w=r.

    ``r = 0`` is read as the plain extension by the ciphertext alone.
    """
    r = max(int(r), 1)
    if r > params.p:
        raise ValueError(f"r must lie in [1, {params.p}]")
    return stern_wf(params.n, params.k + r, params.t_prime, r)


@dataclass(frozen=True)
class DecodingCurve:
    r: np.ndarray
    log2_WF: np.ndarray

    @property
    def argmin(self) -> int:
        return int(self.r[int(np.argmin(self.log2_WF))])

    @property
    def minimum(self) -> float:
        return float(np.min(self.log2_WF))


def decoding_attack_curve(params: SystemParams, shifts=None) -> DecodingCurve:
    """log2 WF as a function of the number of shifted ciphertexts; infeasible points are +inf."""
    rs = np.arange(1, params.p + 1) if shifts is None else np.asarray(shifts, dtype=int)
    out = np.full(rs.shape, np.inf)
    n, k, t = params.n, params.k, params.t_prime
    for idx, r in enumerate(rs):
        r = max(int(r), 1)
        if k + r >= n or t == 0:
            continue
        _, _, log_p, log_n = _stern_grid(n, k + r, t, r)
        if log_p is not None and np.isfinite(log_p).any():
            out[idx] = float(np.min(log_n - log_p))
    return DecodingCurve(rs, out)


def decoding_attack_min(params: SystemParams, shifts=None) -> tuple[int, WorkFactorReport]:
    curve = decoding_attack_curve(params, shifts)
    r = curve.argmin
    return r, decoding_attack_wf(params, r)


def original_mceliece_wf(n: int = 1024, k: int = 524, t: int = 50) -> WorkFactorReport:
    """Decoding attack on a Goppa-code McEliece instance: the ciphertext extends G by one row."""
    return stern_wf(n, k + 1, t, 1)


# OTD attacks

OTD_MODEL_VERSION = "otd-cost-1"
OTD_MODELS = {
    1: "C(m^2, m) tuples x (p^2 inversion + m*p product) per tuple",
    2: "p shifts x (p intersection + p^2 inversion + m*p product) per shift",
    3: "Stern with n_S=(n0-1)p, k_S=p, w=m(n0-1), A_w=p",
}


@dataclass(frozen=True)
class OtdReport:
    log2_strategy1: float
    log2_strategy2: float
    log2_strategy3: float
    strategy3: WorkFactorReport
    models: dict = field(default_factory=lambda: dict(OTD_MODELS))
    model_version: str = OTD_MODEL_VERSION

    def as_dict(self) -> dict:
        d = {f"log2_strategy{i}": getattr(self, f"log2_strategy{i}") for i in (1, 2, 3)}
        d.update({f"model_strategy{i}": s for i, s in self.models.items()})
        d["model_version"] = self.model_version
        return d


def otd_wf(params: SystemParams) -> OtdReport:
    p, m, n0 = params.p, params.m, params.n0
    validate = p * p + m * p
    s1 = float(_lbinom(m * m, m)) + math.log2(validate)
    s2 = math.log2(p * (p + validate))
    s3 = stern_wf((n0 - 1) * p, p, m * (n0 - 1), p)
    return OtdReport(s1, s2, s3.log2_WF, s3)


# implementation complexity

TOOM_OVERHEAD = 2.0


@lru_cache(maxsize=None)
def poly_mul_cost(n: float, alpha: float = TOOM_OVERHEAD) -> float:
    """Binary operations to multiply two length-n binary polynomials.

    Schoolbook needs n^2 ANDs and (n-1)^2 XORs; a Toom-3 split replaces one
    product by five of a third of the size plus ``alpha*n`` for evaluation and
    interpolation.  The cheaper option is taken at every level.
    """
    school = 2 * n * n - 2 * n + 1
    if n < 3:
        return school
    return min(school, 5 * poly_mul_cost(n / 3, alpha) + alpha * n)


def circulant_product_cost(p: int, alpha: float = TOOM_OVERHEAD) -> float:
    """Product of a vector by one circulant: polynomial product plus folding modulo x^p+1."""
    return poly_mul_cost(float(p), alpha) + p


@dataclass(frozen=True)
class ComplexityReport:
    params: SystemParams
    I_ave: float
    q: int
    C_mul_uG: float
    C_enc: float
    C_mul_xQ: float
    C_SPA: float
    C_mul_uS: float
    C_dec: float

    @property
    def C_enc_per_bit(self) -> float:
        return self.C_enc / self.params.k

    @property
    def C_dec_per_bit(self) -> float:
        return self.C_dec / self.params.k

    def as_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "params"}
        d.update(C_enc_per_bit=self.C_enc_per_bit, C_dec_per_bit=self.C_dec_per_bit)
        return d


def spa_cost(params: SystemParams, I_ave: float, q: int) -> float:
    n, d_v, rate = params.n, params.d_v, params.rate
    return I_ave * n * (q * (8 * d_v + 12 * rate - 11) + d_v)


def complexity_estimate(params: SystemParams, I_ave: float, q: int,
                        alpha: float = TOOM_OVERHEAD) -> ComplexityReport:
    """Encryption and decryption cost in binary operations.

    Dense circulant products go through :func:`circulant_product_cost`;
    ``x Q`` is sparse and costs ``n*m``.
    """
    if I_ave <= 0:
        raise ValueError("I_ave must be positive")
    if q < 1:
        raise ValueError("q must be >= 1")
    p, k0, n0 = params.p, params.k0, params.n0
    cp = circulant_product_cost(p, alpha)
    c_ug = k0 * n0 * cp + (k0 - 1) * n0 * p
    c_enc = c_ug + params.n
    c_xq = params.n * params.m
    c_spa = spa_cost(params, I_ave, q)
    c_us = k0 * k0 * cp + (k0 - 1) * k0 * p
    return ComplexityReport(params, I_ave, q, c_ug, c_enc, c_xq, c_spa, c_us, c_xq + c_spa + c_us)


def keysize(params: SystemParams) -> int:
    """Public-key size in bytes: k0*n0 circulant first rows."""
    return math.ceil(params.k0 * params.n0 * params.p / 8)
