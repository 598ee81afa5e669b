"""Truncated power series in two q-commuting variables ``u v = q v u``.

Every element is kept in the normal-ordered basis ``v^n u^m``; a series is a
map ``(n, m) -> RatFuncQ`` truncated at total degree ``n + m <= trunc``.
Reordering uses

    (v^{n1} u^{m1}) (v^{n2} u^{m2}) = q^{m1 n2} v^{n1+n2} u^{m1+m2}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .exactq import RatFuncQ, e7_lhs, e7_rhs, qpochhammer_poly, verify_e7

Key = tuple[int, int]


class TruncationMismatch(ValueError):
    """Raised when combining series truncated at different orders."""


class SkewSeries:
    """Immutable truncated series ``sum c[n, m] v^n u^m``."""

    __slots__ = ("trunc", "_coeffs")

    def __init__(self, trunc: int, coeffs: Mapping[Key, RatFuncQ | int] | None = None):
        if trunc < 0:
            raise ValueError("truncation order must be nonnegative")
        self.trunc = trunc
        clean: dict[Key, RatFuncQ] = {}
        for (n, m), c in (coeffs or {}).items():
            if n < 0 or m < 0:
                raise ValueError(f"negative exponent in key {(n, m)}")
            if n + m > trunc:
                continue
            if not isinstance(c, RatFuncQ):
                c = RatFuncQ(c)
            if c:
                clean[(n, m)] = c
        self._coeffs = clean

    @classmethod
    def _raw(cls, trunc: int, coeffs: dict[Key, RatFuncQ]) -> "SkewSeries":
        s = object.__new__(cls)
        s.trunc = trunc
        s._coeffs = coeffs
        return s

    @classmethod
    def one(cls, trunc: int) -> "SkewSeries":
        return cls(trunc, {(0, 0): 1})

    @classmethod
    def zero(cls, trunc: int) -> "SkewSeries":
        return cls(trunc)

    @classmethod
    def u(cls, trunc: int) -> "SkewSeries":
        return cls(trunc, {(0, 1): 1})

    @classmethod
    def v(cls, trunc: int) -> "SkewSeries":
        return cls(trunc, {(1, 0): 1})

    @classmethod
    def monomial(cls, n: int, m: int, trunc: int, coeff: RatFuncQ | int = 1) -> "SkewSeries":
        """``coeff * v^n u^m``."""
        return cls(trunc, {(n, m): coeff})

    def coeff(self, n: int, m: int) -> RatFuncQ:
        """Coefficient of ``v^n u^m`` (zero if absent)."""
        c = self._coeffs.get((n, m))
        return c if c is not None else RatFuncQ()

    def items(self) -> Iterator[tuple[Key, RatFuncQ]]:
        return iter(sorted(self._coeffs.items()))

    def keys(self) -> list[Key]:
        return sorted(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SkewSeries):
            return NotImplemented
        return self.trunc == other.trunc and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.trunc, frozenset(self._coeffs.items())))

    def _check(self, other: "SkewSeries") -> None:
        if self.trunc != other.trunc:
            raise TruncationMismatch(
                f"truncation orders differ: {self.trunc} vs {other.trunc}")

    def __add__(self, other: "SkewSeries") -> "SkewSeries":
        self._check(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            s = out[k] + c if k in out else c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SkewSeries._raw(self.trunc, out)

    def __neg__(self) -> "SkewSeries":
        return SkewSeries._raw(self.trunc, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "SkewSeries") -> "SkewSeries":
        return self + (-other)

    def scale(self, c: RatFuncQ | int) -> "SkewSeries":
        """Multiply every coefficient by the central scalar ``c``."""
        if not isinstance(c, RatFuncQ):
            c = RatFuncQ(c)
        if not c:
            return SkewSeries.zero(self.trunc)
        return SkewSeries._raw(self.trunc, {k: v * c for k, v in self._coeffs.items()})

    def __mul__(self, other: "SkewSeries") -> "SkewSeries":
        return skew_mul(self, other)

    def __pow__(self, k: int) -> "SkewSeries":
        if k < 0:
            raise ValueError("negative power")
        out = SkewSeries.one(self.trunc)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c}" for k, c in self.items())
        return f"SkewSeries(trunc={self.trunc}, {{{body}}})"


def skew_mul(a: SkewSeries, b: SkewSeries) -> SkewSeries:
    """Product in the q-commuting algebra, re-ordered into ``v^n u^m``."""
    a._check(b)
    N = a.trunc
    buckets: dict[Key, list[RatFuncQ]] = {}
    for (n1, m1), c1 in a._coeffs.items():
        d1 = n1 + m1
        for (n2, m2), c2 in b._coeffs.items():
            if d1 + n2 + m2 > N:
                continue
            term = (c1 * c2).times_qpow(m1 * n2)
            buckets.setdefault((n1 + n2, m1 + m2), []).append(term)
    out = {}
    for k, terms in buckets.items():
        s = terms[0]
        for t in terms[1:]:
            s = s + t
        if s:
            out[k] = s
    return SkewSeries._raw(N, out)


def phi_expand(x: SkewSeries, trunc: int | None = None) -> SkewSeries:
    """``phi(X) = sum_k X^k / (q;q)_k`` for a series ``X`` without constant term."""
    N = x.trunc if trunc is None else trunc
    if N != x.trunc:
        raise TruncationMismatch(f"argument truncated at {x.trunc}, requested {N}")
    if (0, 0) in x._coeffs:
        raise ValueError("phi_expand needs an argument with zero constant term")
    total = SkewSeries.one(N)
    power = SkewSeries.one(N)
    for k in range(1, N + 1):
        power = power * x
        if not len(power):
            break
        total = total + power.scale(RatFuncQ(1, qpochhammer_poly(k)))
    return total


@dataclass(frozen=True)
class PentagonReport:
    """Coefficientwise comparison of ``phi(u)phi(v)`` and ``phi(v)phi(-vu)phi(u)``.

    ``coefficients`` maps ``(n, m)`` (the monomial ``v^n u^m``) to whether the
    two sides agree there.
    """

    trunc: int
    coefficients: dict[Key, bool] = field(repr=False)
    first_mismatch: Key | None
    left: SkewSeries = field(repr=False, compare=False)
    right: SkewSeries = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.first_mismatch is None

    def __bool__(self) -> bool:
        return self.passed


def pentagon_sides(trunc: int) -> tuple[SkewSeries, SkewSeries]:
    u, v = SkewSeries.u(trunc), SkewSeries.v(trunc)
    phi_u, phi_v = phi_expand(u), phi_expand(v)
    phi_mvu = phi_expand(-(v * u))
    return phi_u * phi_v, (phi_v * phi_mvu) * phi_u


def verify_pentagon(trunc: int) -> PentagonReport:
    """Compare both sides of the quantum pentagon identity up to total degree ``trunc``."""
    if trunc < 0:
        raise ValueError("truncation order must be nonnegative")
    left, right = pentagon_sides(trunc)
    coeffs = {}
    first = None
    for d in range(trunc + 1):
        for n in range(d + 1):
            key = (n, d - n)
            ok = left.coeff(*key) == right.coeff(*key)
            coeffs[key] = ok
            if not ok and first is None:
                first = key
    return PentagonReport(trunc, coeffs, first, left, right)


def coefficient_oracle(n: int, m: int) -> tuple[RatFuncQ, RatFuncQ]:
    """Expected coefficients of ``v^n u^m`` on the left and right sides."""
    return e7_lhs(m, n), e7_rhs(m, n)


def pentagon_matches_e7(report: PentagonReport) -> bool:
    """Whether every per-coefficient verdict equals ``verify_e7(m, n)``."""
    return all(ok == verify_e7(m, n) for (n, m), ok in report.coefficients.items())
