"""Explicit constants of the relative-entropy estimate.

All comparisons against the growth bound are made in log-space, since
``exp(t / q)`` overflows double precision for admissible ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InadmissibleError


@dataclass(frozen=True)
class BoundParams:
    q: float
    k_const: float
    a_norm: float
    x: float
    y: float
    c_tq: float
    q_max: float

    @property
    def log_c(self) -> float:
        return math.log(self.c_tq)


def k_constant(lambda_min_m0: float, l_norm: float, t_horizon: float) -> float:
    """K = -log λ_min(m0) + ||L||^2 T, an upper bound for sup_t ||log m_t||."""
    if not lambda_min_m0 > 0:
        raise ValueError("lambda_min_m0 must be positive")
    if lambda_min_m0 > 1:
        raise ValueError("lambda_min_m0 of a state cannot exceed 1")
    return -math.log(lambda_min_m0) + l_norm**2 * t_horizon


def q_max(a_norm: float, k_const: float) -> float:
    prod = a_norm * k_const
    return math.inf if prod == 0 else math.exp(-2) / (8 * prod)


def bound_constants(q: float | None, a_norm: float, k_const: float) -> BoundParams:
    """x, y and C_{T,q} for an admissible q; q=None picks q_max / 2."""
    qm = q_max(a_norm, k_const)
    if q is None:
        if math.isinf(qm):
            raise InadmissibleError("q must be given explicitly when ||A|| K = 0")
        q = qm / 2
    if not 0 < q < qm:
        raise InadmissibleError(f"q={q!r} outside the admissible interval (0, {qm!r})")
    prod = a_norm * k_const
    x = 8 * math.e**2 * q * prod
    y = 16 * math.e * q * prod
    c = 1 + x / (1 - x) ** 2 + y / (1 - y)
    return BoundParams(q=q, k_const=k_const, a_norm=a_norm, x=x, y=y, c_tq=c, q_max=qm)


def theorem_rhs_log(t: float, h0: float, n: int, bp: BoundParams) -> float:
    """log of e^{t/q} (h0 + (log C + 2 q ||A|| K) / N); -inf when the bracket vanishes."""
    if t < 0 or n < 1:
        raise ValueError("need t >= 0 and n >= 1")
    inner = h0 + (math.log(bp.c_tq) + 2 * bp.q * bp.a_norm * bp.k_const) / n
    if inner <= 0:
        return -math.inf
    return t / bp.q + math.log(inner)


def log_entropy(h: float) -> float:
    """log H with H <= 0 mapped to -inf."""
    return math.log(h) if h > 0 else -math.inf


def marginal_bound(h_n: float, k: int) -> float:
    """2k H_N bounds the k-marginal entropy whenever N >= 2k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 2 * k * h_n


def faithfulness_floor(t: float, lambda_min_m0: float, l_norm: float) -> float:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return lambda_min_m0 * math.exp(-(l_norm**2) * t)
