"""Double-precision, log-space evaluation of the q-exponential and friends.

Everything that involves ``phi(x) = 1 / prod_{n>=0} (1 - q^n x)`` is computed
as ``ln phi``; near ``q -> 1`` the function itself behaves like
``exp(-Li2(x) / ln q)`` and overflows any float long before the interesting
regime.  Every truncated series uses an explicit geometric tail bound.

The central object of the limit analysis is

    g(x) = phi(a q^x) / phi(q^{1+x}) * z^x,    x >= 0,

whose integer samples sum to ``phi(a) phi(z) / (phi(q) phi(az))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

LI2_ONE = math.pi ** 2 / 6

# vectorized sums are evaluated in blocks of this many terms
_BLOCK = 1 << 20
_MAX_TERMS = 1 << 28


class DomainError(ValueError):
    """Argument outside the domain where the quantity is defined."""


class PreconditionError(ValueError):
    """Parameters violate a sufficient condition the computation relies on."""


class NumericError(ArithmeticError):
    """Non-finite values or a degenerate numerical problem."""


@dataclass(frozen=True)
class QParams:
    """Numeric parameters ``q, a, z`` in ``(0, 1)`` plus tolerances."""

    q: float
    a: float = 0.5
    z: float = 0.5
    tol_rel: float = 1e-9
    tol_term: float = 1e-18

    def __post_init__(self):
        for name in ("q", "a", "z"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 < v < 1.0):
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}")
        if not self.tol_rel > 0 or not self.tol_term > 0:
            raise DomainError("tolerances must be positive")

    @property
    def h(self) -> float:
        """``-ln q``, the natural small parameter as ``q -> 1``."""
        return -math.log(self.q)

    @property
    def unimodal_ok(self) -> bool:
        """``q > 1 - z(1 - a)``: guarantees ``g`` has a single interior peak."""
        return self.q > 1.0 - self.z * (1.0 - self.a)


@dataclass(frozen=True)
class BoundsReport:
    """``lower <= value <= upper`` check; PASS allows ``tol*(1+|value|)`` slack."""

    lower: float
    value: float
    upper: float
    label: str
    tol: float = 1e-9

    @property
    def slack(self) -> float:
        return self.tol * (1.0 + abs(self.value))

    @property
    def passed(self) -> bool:
        # an infinite upper bound is allowed for one-sided checks
        if not (math.isfinite(self.lower) and math.isfinite(self.value)) or math.isnan(self.upper):
            return False
        return self.lower - self.slack <= self.value <= self.upper + self.slack

    @property
    def strict(self) -> bool:
        """Inequalities hold with their orientation and no slack at all."""
        return self.lower <= self.value <= self.upper

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.label}: {self.lower:.17g} <= {self.value:.17g}"
                f" <= {self.upper:.17g}")


def _fsum_logexp(values: np.ndarray) -> float:
    """``ln sum exp(values)`` anchored at the maximum, compensated summation."""
    m = float(np.max(values))
    if not math.isfinite(m):
        raise NumericError("non-finite log term")
    return m + math.log(math.fsum(np.exp(values - m).tolist()))


# --------------------------------------------------------------------------
# dilogarithm

def _li2_series(x: float) -> float:
    # x <= 1/2: terms drop by at least a factor 2
    if x == 0.0:
        return 0.0
    terms = []
    p = x
    n = 1
    while True:
        t = p / (n * n)
        terms.append(t)
        if t < 1e-17 * terms[0]:
            break
        n += 1
        p *= x
    return math.fsum(terms)


def li2(x: float) -> float:
    """Real dilogarithm ``sum_{n>=1} x^n / n^2`` on ``[0, 1]``.

    For ``x > 1/2`` the reflection ``Li2(x) = Li2(1) - Li2(1-x) - ln x ln(1-x)``
    keeps the series argument at most 1/2.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"li2 is implemented on [0, 1], got {x}")
    if x == 1.0:
        return LI2_ONE
    if x <= 0.5:
        return _li2_series(x)
    y = 1.0 - x
    return LI2_ONE - _li2_series(y) - math.log(x) * math.log1p(-x)


# --------------------------------------------------------------------------
# q-exponential

def _powers(q: float, start: float, count: int) -> np.ndarray:
    return np.exp((start + np.arange(count, dtype=np.float64)) * math.log(q))


def _ln_phi(x: float, q: float, tol_term: float) -> float:
    if x == 0.0:
        return 0.0
    # first n with -ln(1 - q^n x) < tol_term; the terms contract by at least q
    thr = -math.expm1(-tol_term)
    n_last = max(0, math.ceil(math.log(thr / x) / math.log(q)))
    if n_last > _MAX_TERMS:
        raise NumericError(f"ln_phi needs {n_last} terms; q too close to 1")
    parts = []
    for start in range(0, n_last + 1, _BLOCK):
        cnt = min(_BLOCK, n_last + 1 - start)
        parts.append(math.fsum((-np.log1p(-x * _powers(q, start, cnt))).tolist()))
    return math.fsum(parts)


def ln_phi(x: float, p: QParams) -> float:
    """``ln phi(x) = -sum_{n>=0} ln(1 - q^n x)`` for ``0 <= x < 1``.

    Summation stops after the first term below ``p.tol_term``; the neglected
    tail is at most ``tol_term * q / (1 - q)``.
    """
    if not 0.0 <= x < 1.0:
        raise DomainError(f"ln_phi needs 0 <= x < 1, got {x}")
    return _ln_phi(float(x), p.q, p.tol_term)


def ln_phi_tail_bound(p: QParams) -> float:
    return p.tol_term * p.q / (1.0 - p.q)


def qpoch_float(x: float, q: float, k: int) -> float:
    """Finite product ``(x;q)_k`` evaluated term by term."""
    out = 1.0
    for n in range(k):
        out *= 1.0 - x * q ** n
    return out


def e7_numeric(m: int, n: int, q: float) -> tuple[float, float]:
    """Both sides of the (m, n) coefficient identity at a numeric ``q``."""
    qq = lambda k: qpoch_float(q, q, k)
    lhs = q ** (m * n) / (qq(m) * qq(n))
    rhs = math.fsum((-1) ** k * q ** (k * (k - 1) // 2) / (qq(m - k) * qq(n - k) * qq(k))
                    for k in range(min(m, n) + 1))
    return lhs, rhs


def phi_series(x: float, p: QParams) -> float:
    """``ln`` of the partial sum of ``sum_n x^n / (q;q)_n``, cut by its tail bound."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"phi_series needs 0 <= x < 1, got {x}")
    if x == 0.0:
        return 0.0
    lx, lq = math.log(x), math.log(p.q)
    logs = [0.0]
    peak = 0.0
    ln_poch = 0.0
    n = 0
    while True:
        n += 1
        ln_poch += math.log1p(-math.exp(n * lq))
        logs.append(n * lx - ln_poch)
        peak = max(peak, logs[-1])
        # term ratio x / (1 - q^{n+1}) decreases towards x
        r = x / (1.0 - p.q ** (n + 1))
        if r < 1.0:
            tail = logs[-1] + math.log(r / (1.0 - r))
            if tail < peak + math.log(p.tol_term):
                break
        if n > _MAX_TERMS:
            raise NumericError("phi_series did not converge")
    return _fsum_logexp(np.array(logs))


def inv_phi_series(x: float, p: QParams) -> float:
    """Partial sum of ``sum_n (-1)^n q^{n(n-1)/2} x^n / (q;q)_n`` (value, not log).

    Alternating with cancellation, so only meaningful for moderate ``q``.
    """
    if not 0.0 <= x < 1.0:
        raise DomainError(f"inv_phi_series needs 0 <= x < 1, got {x}")
    terms = [1.0]
    t = 1.0
    n = 0
    while True:
        n += 1
        t *= -x * p.q ** (n - 1) / (1.0 - p.q ** n)
        terms.append(t)
        if abs(t) < p.tol_term:
            break
    return math.fsum(terms)


# --------------------------------------------------------------------------
# sum / integral sandwiches

def check_sandwich_e13(x: float, p: QParams) -> BoundsReport:
    """``0 <= ln phi(x) + Li2(x)/ln q <= -ln(1-x)``."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"sandwich needs 0 < x < 1, got {x}")
    mid = ln_phi(x, p) + li2(x) / math.log(p.q)
    return BoundsReport(0.0, mid, -math.log1p(-x), f"phi sandwich q={p.q!r} x={x!r}",
                        p.tol_rel)


def _finite(v: float) -> float:
    if not math.isfinite(v):
        raise NumericError(f"non-finite function value {v}")
    return v


def check_sum_integral(f: Callable[[float], float], k: int = 0,
                       l: float = math.inf, *, decreasing: bool | None = None,
                       tol_rel: float = 1e-9, tol_term: float = 1e-18,
                       max_terms: int = 10_000_000) -> BoundsReport:
    """Monotone sum-versus-integral bounds on ``[k, l+1]``.

    For decreasing ``f`` the report is
    ``sum_{k+1}^{l+1} f <= int_k^{l+1} f <= sum_k^l f``; for increasing ``f``
    the two sums swap.  With ``l = inf`` (decreasing only) the bounds read
    ``S - f(k) <= I <= S``.
    """
    if decreasing is None:
        probe_hi = k + 1.0 if math.isinf(l) else l + 1.0
        decreasing = _finite(f(float(k))) >= _finite(f(probe_hi))
    if math.isinf(l):
        if not decreasing:
            raise DomainError("an increasing function is not summable on [k, inf)")
        vals = []
        n = k
        while True:
            v = _finite(f(float(n)))
            vals.append(v)
            if abs(v) < tol_term:
                break
            n += 1
            if n - k > max_terms:
                raise NumericError("sum did not reach the term cutoff")
        s = math.fsum(vals)
        integral, _ = integrate.quad(f, k, math.inf, epsabs=0.0, epsrel=1e-12, limit=400)
        lower, upper = s - vals[0], s
        label = "S(f) - f(k) <= I(f) <= S(f)"
    else:
        l = int(l)
        if l < k:
            raise DomainError("need k <= l")
        vals = [_finite(f(float(n))) for n in range(k, l + 2)]
        head, tail = math.fsum(vals[:-1]), math.fsum(vals[1:])
        integral, _ = integrate.quad(f, k, l + 1, epsabs=0.0, epsrel=1e-12, limit=400)
        lower, upper = (tail, head) if decreasing else (head, tail)
        label = f"sum/integral bounds on [{k}, {l + 1}]"
    if not math.isfinite(integral):
        raise NumericError("integral is not finite")
    return BoundsReport(lower, integral, upper, label, tol_rel)


# --------------------------------------------------------------------------
# the summand g and its derivative

def ln_g(x: float, p: QParams) -> float:
    """``ln g(x) = ln phi(a q^x) - ln phi(q^{1+x}) + x ln z``."""
    if x < 0:
        raise DomainError(f"g is defined for x >= 0, got {x}")
    qx = p.q ** x
    return (_ln_phi(p.a * qx, p.q, p.tol_term) - _ln_phi(p.q * qx, p.q, p.tol_term)
            + x * math.log(p.z))


def ln_g_integers(p: QParams, count: int, start: int = 0) -> np.ndarray:
    """``ln g(n)`` for ``n = start .. start+count-1`` by the one-step recurrence.

    ``ln g(n+1) = ln g(n) + ln(1 - a q^n) - ln(1 - q^{n+1}) + ln z``; only the
    first value needs full products.
    """
    if count <= 0:
        return np.empty(0)
    base = ln_g(start, p)
    qn = _powers(p.q, start, count - 1)
    inc = np.log1p(-p.a * qn) - np.log1p(-p.q * qn) + math.log(p.z)
    return base + np.concatenate(([0.0], np.cumsum(inc)))


def _h_terms(x: float, p: QParams) -> np.ndarray:
    # h_x(t) <= q^{x+t} / ((1-q)(1-a)) and the ratio of successive terms is <= q
    lq = math.log(p.q)
    scale = (1.0 - p.q) * (1.0 - p.a)
    n_last = max(0, math.ceil((math.log(p.tol_term * scale) - x * lq) / lq))
    if n_last > _MAX_TERMS:
        raise NumericError(f"h_sum needs {n_last} terms; q too close to 1")
    qs = _powers(p.q, x, n_last + 1)
    return qs / ((1.0 - p.q * qs) * (1.0 - p.a * qs))


def h_sum(x: float, p: QParams) -> float:
    """``S(h_x)`` with ``h_x(t) = q^{x+t} / ((1 - q^{1+x+t})(1 - a q^{x+t}))``."""
    if x < 0:
        raise DomainError("h_sum needs x >= 0")
    return math.fsum(_h_terms(x, p).tolist())


def h_integral(x: float, p: QParams) -> float:
    """``I(h_x) = ln((1 - a q^x)/(1 - q^{1+x})) / ((q - a) * -ln q)``.

    Written through ``log1p`` so that ``a`` close to ``q`` stays accurate;
    ``a == q`` uses the limit ``q^x / ((1 - q^{1+x}) * -ln q)``.
    """
    if x < 0:
        raise DomainError("h_integral needs x >= 0")
    y = p.q ** x
    h = -math.log(p.q)
    d = p.q - p.a
    if d == 0.0:
        return y / ((1.0 - p.q * y) * h)
    return math.log1p(d * y / (1.0 - p.q * y)) / (d * h)


def check_h_bound(x: float, p: QParams) -> BoundsReport:
    """``S(h_x) >= I(h_x)`` (``h_x`` is decreasing in ``t``)."""
    s = h_sum(x, p)
    return BoundsReport(h_integral(x, p), s, math.inf, f"S(h_x) >= I(h_x) at x={x!r}", p.tol_rel)


def log_derivative_g(x: float, p: QParams) -> float:
    """``g'(x)/g(x) = ln z - ln q * (q - a) * S(h_x)``."""
    return math.log(p.z) - math.log(p.q) * (p.q - p.a) * h_sum(x, p)


def _require_unimodal(p: QParams) -> None:
    if not p.unimodal_ok:
        raise PreconditionError(
            f"q={p.q!r} <= 1 - z(1-a) = {1 - p.z * (1 - p.a)!r}; g is not certified unimodal")


def bracket_x0(p: QParams) -> tuple[float, float]:
    """Interval ``[lo, hi]`` on which the log-derivative of ``g`` changes sign."""
    _require_unimodal(p)
    lo, hi = 0.0, 1.0
    if log_derivative_g(lo, p) <= 0:
        raise NumericError("log-derivative of g is not positive at 0")
    while log_derivative_g(hi, p) > 0:
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            raise NumericError("no sign change of g'/g found")
    return lo, hi


def find_x0(p: QParams) -> float:
    """The unique maximizer of ``g`` on ``(0, inf)``."""
    lo, hi = bracket_x0(p)
    return optimize.brentq(log_derivative_g, lo, hi, args=(p,), xtol=1e-10, rtol=1e-10)


def find_n0(p: QParams, x0: float | None = None) -> int:
    """Integer maximizer of ``g``: ``floor(x0)`` or ``floor(x0) + 1``."""
    if x0 is None:
        x0 = find_x0(p)
    n = math.floor(x0)
    return n if ln_g(n, p) >= ln_g(n + 1, p) else n + 1


# --------------------------------------------------------------------------
# S(g), I(g) and the q-binomial identity

def ln_S_g(p: QParams) -> float:
    """``ln sum_{n>=0} g(n)`` with a certified geometric tail.

    Terms come from the recurrence in :func:`ln_g_integers`; summation stops
    once the tail bound ``g(n) r / (1 - r)``, ``r = max(g(n+1)/g(n), z)``, is
    below ``tol_term`` times the partial sum.
    """
    chunk = max(512, int(4.0 / p.h))
    lz = math.log(p.z)
    last = ln_g(0, p)
    blocks = []
    start = 0
    ln_tol = math.log(p.tol_term)
    while True:
        qn = _powers(p.q, start, chunk)
        inc = np.log1p(-p.a * qn) - np.log1p(-p.q * qn) + lz
        steps = np.cumsum(inc)
        vals = last + np.concatenate(([0.0], steps[:-1]))
        blocks.append(vals)
        last = last + float(steps[-1])
        r = max(math.exp(float(inc[-1])), p.z)
        if r < 1.0:
            ln_tail = float(vals[-1]) + math.log(r / (1.0 - r))
            total = _fsum_logexp(np.concatenate(blocks))
            if ln_tail < total + ln_tol:
                return total
        start += chunk
        if start > _MAX_TERMS:
            raise NumericError("S(g) did not converge")


def ln_I_g(p: QParams, x0: float | None = None) -> float:
    """``ln int_0^inf g(x) dx`` via ``xi = q^x``.

    ``I(g) = (1/-ln q) int_0^1 g(ln xi / ln q) dxi / xi``; the integrand is
    rescaled by its value at the peak and the interval is split there.
    """
    _require_unimodal(p)
    if x0 is None:
        x0 = find_x0(p)
    lq = math.log(p.q)
    xi_peak = p.q ** x0
    anchor = ln_g(x0, p) - math.log(xi_peak)

    def integrand(xi: float) -> float:
        if xi <= 0.0:
            return 0.0
        return math.exp(ln_g(math.log(xi) / lq, p) - math.log(xi) - anchor)

    # Laplace width in xi is of order sqrt(-ln q)
    w = min(0.5, 8.0 * math.sqrt(p.h)) * xi_peak
    pts = sorted({max(0.0, xi_peak - w), xi_peak, min(1.0, xi_peak + w)})
    knots = [0.0] + [t for t in pts if 0.0 < t < 1.0] + [1.0]
    pieces = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
        pieces.append(val)
    total = math.fsum(pieces)
    if not total > 0:
        raise NumericError("I(g) quadrature returned a non-positive value")
    return anchor + math.log(total) - math.log(p.h)


def qbinomial_rhs(p: QParams) -> float:
    """``ln(phi(a) phi(z) / (phi(q) phi(az)))``."""
    return (ln_phi(p.a, p) + ln_phi(p.z, p) - ln_phi(p.q, p) - ln_phi(p.a * p.z, p))


def verify_qbinomial(p: QParams) -> BoundsReport:
    """Compare ``ln S(g)`` with the closed product form, relative in log space."""
    rhs = qbinomial_rhs(p)
    lhs = ln_S_g(p)
    return BoundsReport(rhs, lhs, rhs, f"q-binomial q={p.q!r} a={p.a!r} z={p.z!r}", p.tol_rel)


def check_sandwich_e14(p: QParams) -> BoundsReport:
    """``g(n0) <= S(g) <= I(g) + g(n0)``, all in log space."""
    x0 = find_x0(p)
    n0 = find_n0(p, x0)
    lg = ln_g(n0, p)
    li = ln_I_g(p, x0)
    upper = max(li, lg) + math.log1p(math.exp(-abs(li - lg)))
    return BoundsReport(lg, ln_S_g(p), upper, f"peak sandwich q={p.q!r}", p.tol_rel)


def scaled_log_g_deviation(xi: float, p: QParams) -> tuple[float, float]:
    """``(|ln q ln g(x_xi) - F_q(xi)|, bound)`` with ``x_xi = ln xi / ln q``.

    ``F_q(xi) = Li2(q xi) - Li2(a xi) + ln xi ln z`` and the bound is
    ``-ln q * (-ln(1 - a xi) - ln(1 - q xi))``.
    """
    if not 0.0 < xi < 1.0:
        raise DomainError("xi must lie in (0, 1)")
    lq = math.log(p.q)
    x = math.log(xi) / lq
    f_q = li2(p.q * xi) - li2(p.a * xi) + math.log(xi) * math.log(p.z)
    dev = abs(lq * ln_g(x, p) - f_q)
    bound = -lq * (-math.log1p(-p.a * xi) - math.log1p(-p.q * xi))
    return dev, bound
