"""The ``q -> 1`` experiment and the classical five-term dilogarithm identity.

Along ``q_k = 1 - 2^-k`` we record

* ``L(q) = ln q * ln S(g)``, which tends to ``F(xi0)`` with
  ``F(xi) = Li2(xi) - Li2(a xi) + ln xi ln z`` and ``xi0 = (1-z)/(1-az)``;
* ``R(q) = ln q * ln(phi(a)phi(z)/(phi(q)phi(az)))``, which tends to
  ``Li2(1) + Li2(az) - Li2(a) - Li2(z)``.

``S(g)`` equals that product ratio for every ``q``, so the two limits must
agree; their agreement is the Rogers identity.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .qnumeric import (LI2_ONE, DomainError, NumericError, QParams, li2, ln_phi,
                       ln_S_g)


@dataclass(frozen=True)
class RogersInput:
    a: float
    z: float

    def __post_init__(self):
        for name in ("a", "z"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}")

    @property
    def xi0(self) -> float:
        return (1.0 - self.z) / (1.0 - self.a * self.z)

    @property
    def a_xi0(self) -> float:
        return (self.a - self.a * self.z) / (1.0 - self.a * self.z)

    @property
    def one_minus_xi0(self) -> float:
        return (self.z - self.a * self.z) / (1.0 - self.a * self.z)


def xi0(a: float, z: float) -> float:
    """Stationary point ``(1 - z)/(1 - a z)`` of ``F``."""
    return RogersInput(a, z).xi0


def F_eval(xi: float, a: float, z: float) -> float:
    """``F(xi) = Li2(xi) - Li2(a xi) + ln(xi) ln(z)``."""
    if not 0.0 < xi < 1.0:
        raise DomainError(f"F needs 0 < xi < 1, got {xi}")
    return li2(xi) - li2(a * xi) + math.log(xi) * math.log(z)


def F_derivative(xi: float, a: float, z: float) -> float:
    """Closed form ``F'(xi) = (-ln(1 - xi) + ln(1 - a xi) + ln z) / xi``."""
    return (-math.log1p(-xi) + math.log1p(-a * xi) + math.log(z)) / xi


def rogers_target(a: float, z: float) -> float:
    """``Li2(1) + Li2(az) - Li2(a) - Li2(z)``."""
    return LI2_ONE + li2(a * z) - li2(a) - li2(z)


def rogers_residual(a: float, z: float) -> float:
    """Left minus right side of the five-term identity.

    ``Li2(a) + Li2(z) - Li2(az) - Li2(a xi0) - Li2(1 - xi0)
    - ln(xi0) ln((1-a)/(1-az))``
    """
    r = RogersInput(a, z)
    one_az = 1.0 - a * z
    rhs = (li2(a * z) + li2(r.a_xi0) + li2(r.one_minus_xi0)
           + math.log(r.xi0) * math.log((1.0 - a) / one_az))
    return li2(a) + li2(z) - rhs


def reflection_residual(x: float) -> float:
    """``Li2(x) + Li2(1-x) - Li2(1) + ln(x) ln(1-x)``.

    At ``x`` in ``{0, 1}`` the product of logarithms is taken as its limit 0.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reflection identity is checked on [0, 1], got {x}")
    # evaluate on the ordered pair so that x and 1 - x give identical results
    lo = min(x, 1.0 - x)
    hi = 1.0 - lo
    logs = 0.0 if lo == 0.0 else math.log(lo) * math.log(hi)
    return (li2(lo) + li2(hi)) - LI2_ONE + logs


@dataclass(frozen=True)
class LimitScanRecord:
    k: int
    q: float
    h: float
    lnSg: float
    L: float
    R: float
    target_F: float
    target_R: float
    residual_L: float
    residual_R: float
    envelope_R: float
    skipped: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


FIELDS = ("k", "q", "h", "lnSg", "L", "R", "target_F", "target_R",
          "residual_L", "residual_R")


def envelope_R(q: float, a: float, z: float) -> float:
    """``-ln q * (sum of -ln(1 - x) over x in {a, z, q, az})``."""
    return -math.log(q) * -(math.log1p(-a) + math.log1p(-z) + math.log1p(-q)
                            + math.log1p(-a * z))


def rigorous_envelope_R(q: float, a: float, z: float) -> float:
    """:func:`envelope_R` plus ``Li2(1) - Li2(q)``.

    The product sandwich bounds ``ln q ln phi(q)`` around ``-Li2(q)``, not
    ``-Li2(1)``; this extra term makes the bound on ``|R - target|`` airtight.
    """
    return envelope_R(q, a, z) + (LI2_ONE - li2(q))


def scan_record(k: int, a: float, z: float, tol_rel: float = 1e-9,
                tol_term: float = 1e-18) -> LimitScanRecord:
    """One row of the scan at ``q = 1 - 2^-k``; flagged if not unimodal."""
    q = 1.0 - 2.0 ** -k
    p = QParams(q, a, z, tol_rel=tol_rel, tol_term=tol_term)
    h = p.h
    target_F = F_eval(xi0(a, z), a, z)
    target_R = rogers_target(a, z)
    if not p.unimodal_ok:
        nan = math.nan
        return LimitScanRecord(k, q, h, nan, nan, nan, target_F, target_R, nan, nan,
                               nan, skipped=True)
    lnS = ln_S_g(p)
    lq = math.log(q)
    L = lq * lnS
    R = lq * (ln_phi(a, p) + ln_phi(z, p) - ln_phi(q, p) - ln_phi(a * z, p))
    return LimitScanRecord(k, q, h, lnS, L, R, target_F, target_R, L - target_F,
                           R - target_R, envelope_R(q, a, z))


def limit_scan(a: float, z: float, k_min: int = 4, k_max: int = 14, *,
               tol_rel: float = 1e-9, tol_term: float = 1e-18,
               workers: int = 1) -> list[LimitScanRecord]:
    """Records for ``k = k_min .. k_max``, in order of ``k``.

    Records are independent, so ``workers > 1`` evaluates them on a thread
    pool; the output order does not depend on completion order.
    """
    RogersInput(a, z)
    if k_min < 1 or k_max < k_min:
        raise DomainError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    ks = range(k_min, k_max + 1)
    run = lambda k: scan_record(k, a, z, tol_rel, tol_term)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, ks))
    return [run(k) for k in ks]


@dataclass(frozen=True)
class Extrapolation:
    value: float
    coefficients: tuple[float, ...]
    fit_residual: float
    n_points: int


def extrapolate(records, order: int = 2, log_term: bool = False,
                attr: str = "L") -> Extrapolation:
    """Least-squares fit ``L(h) = L* + c1 h + ... + c_order h^order``.

    Uses the smallest-``h`` half of the non-skipped records.  With
    ``log_term`` an extra ``h ln h`` column is added to the model.
    """
    rows = [r for r in records if not getattr(r, "skipped", False)]
    if len(rows) < 4:
        raise DomainError("extrapolation needs at least 4 records")
    rows = sorted(rows, key=lambda r: r.h)[: max(len(rows) // 2, order + 1 + log_term)]
    h = np.array([r.h for r in rows])
    y = np.array([getattr(r, attr) for r in rows])
    cols = [h ** j for j in range(order + 1)]
    if log_term:
        cols.insert(1, h * np.log(h))
    A = np.column_stack(cols)
    # columns scaled to unit norm for conditioning
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise NumericError("degenerate extrapolation design")
    coef, _, rank, _ = np.linalg.lstsq(A / norms, y, rcond=None)
    if rank < A.shape[1]:
        raise NumericError("rank-deficient extrapolation fit")
    coef = coef / norms
    resid = float(np.max(np.abs(A @ coef - y)))
    return Extrapolation(float(coef[0]), tuple(float(c) for c in coef), resid, len(rows))
