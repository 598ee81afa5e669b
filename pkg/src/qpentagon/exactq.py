"""Exact polynomial and rational-function arithmetic in one indeterminate ``q``.

Coefficients are Python integers, so nothing overflows or rounds.  Two types
are provided:

* :class:`IntPolyQ` -- dense integer polynomial, lowest power first.
* :class:`RatFuncQ` -- reduced quotient of two ``IntPolyQ`` in canonical form
  (coprime, integer content removed, denominator with positive leading
  coefficient), so that equality is plain representation equality.

On top of them sit the finite q-Pochhammer polynomials, Gaussian binomials
and an exact check of the coefficient identities

    q^{mn} / ((q;q)_m (q;q)_n)
        = sum_k (-1)^k q^{k(k-1)/2} / ((q;q)_{m-k} (q;q)_{n-k} (q;q)_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable


class IntPolyQ:
    """Immutable dense polynomial with integer coefficients.

    ``IntPolyQ([1, -1])`` is ``1 - q``.  The zero polynomial has no stored
    coefficients and degree ``-1``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)

    @classmethod
    def _raw(cls, coeffs: tuple[int, ...]) -> "IntPolyQ":
        # caller guarantees a normalized tuple
        p = object.__new__(cls)
        p.coeffs = coeffs
        return p

    @classmethod
    def constant(cls, c: int) -> "IntPolyQ":
        return cls((c,))

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> "IntPolyQ":
        if power < 0:
            raise ValueError("negative power")
        return cls([0] * power + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """Power of ``q`` dividing the polynomial (0 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 0

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def primitive(self) -> "IntPolyQ":
        """Divide out the content; sign is normalized to a positive lc."""
        if not self.coeffs:
            return self
        c = self.content()
        if self.coeffs[-1] < 0:
            c = -c
        if c == 1:
            return self
        return IntPolyQ._raw(tuple(x // c for x in self.coeffs))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = IntPolyQ.constant(other)
        if not isinstance(other, IntPolyQ):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(("IntPolyQ", self.coeffs))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __neg__(self) -> "IntPolyQ":
        return IntPolyQ._raw(tuple(-x for x in self.coeffs))

    def __add__(self, other: "IntPolyQ | int") -> "IntPolyQ":
        if isinstance(other, int):
            other = IntPolyQ.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, x in enumerate(b):
            res[i] += x
        return IntPolyQ(res)

    __radd__ = __add__

    def __sub__(self, other: "IntPolyQ | int") -> "IntPolyQ":
        if isinstance(other, int):
            other = IntPolyQ.constant(other)
        return self + (-other)

    def __rsub__(self, other: int) -> "IntPolyQ":
        return IntPolyQ.constant(other) - self

    def __mul__(self, other: "IntPolyQ | int") -> "IntPolyQ":
        if isinstance(other, int):
            if other == 0:
                return IntPolyQ()
            return IntPolyQ._raw(tuple(x * other for x in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPolyQ()
        res = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    res[i + j] += x * y
        return IntPolyQ._raw(tuple(res))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPolyQ":
        if k < 0:
            raise ValueError("negative exponent")
        result = IntPolyQ.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "IntPolyQ":
        """Multiply by ``q**k`` (``k >= 0``)."""
        if not self.coeffs or k == 0:
            return self
        return IntPolyQ._raw((0,) * k + self.coeffs)

    def unshift(self, k: int) -> "IntPolyQ":
        """Divide by ``q**k``; the low ``k`` coefficients must vanish."""
        if k == 0:
            return self
        if any(self.coeffs[:k]):
            raise ArithmeticError(f"q^{k} does not divide {self}")
        return IntPolyQ._raw(self.coeffs[k:])

    def __call__(self, x):
        """Horner evaluation; works for int, Fraction, float, ..."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def exact_div(self, d: "IntPolyQ") -> "IntPolyQ":
        """Quotient ``self / d`` in Z[q]; raises if it does not exist."""
        q, r = self.divmod_exact(d)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def divmod_exact(self, d: "IntPolyQ") -> tuple["IntPolyQ", "IntPolyQ"]:
        """Integer long division; raises if a quotient coefficient is not integral."""
        if not d.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.coeffs)
        dc = d.coeffs
        dd = len(dc) - 1
        lc = dc[-1]
        if len(r) - 1 < dd:
            return IntPolyQ(), self
        quot = [0] * (len(r) - dd)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c == 0:
                continue
            t, rem = divmod(c, lc)
            if rem:
                raise ArithmeticError("non-integral quotient coefficient")
            quot[i - dd] = t
            base = i - dd
            for j, y in enumerate(dc):
                r[base + j] -= t * y
        return IntPolyQ(quot), IntPolyQ(r)

    def divides(self, f: "IntPolyQ") -> bool:
        try:
            _, r = f.divmod_exact(self)
        except ArithmeticError:
            return False
        return not r

    def __repr__(self) -> str:
        return f"IntPolyQ({list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{'*' + mono if mono else ''}"
            parts.append(("-" if c < 0 else "+", s))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sgn, s in parts[1:]:
            out += f" {sgn} {s}"
        return out


ZERO = IntPolyQ()
ONE = IntPolyQ.constant(1)


def _max_norm(p: IntPolyQ) -> int:
    return max(abs(c) for c in p.coeffs)


def _pseudo_rem(a: IntPolyQ, b: IntPolyQ) -> IntPolyQ:
    r = list(a.coeffs)
    db, lc = b.degree, b.lc
    while len(r) - 1 >= db:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [x * lc for x in r]
        for j, y in enumerate(b.coeffs):
            r[shift + j] -= c * y
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return IntPolyQ(r)


def _prs_gcd(f: IntPolyQ, g: IntPolyQ) -> IntPolyQ:
    """Primitive polynomial remainder sequence; slow but unconditional."""
    a, b = f.primitive(), g.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while b:
        a, b = b, _pseudo_rem(a, b).primitive()
    return a.primitive()


def _heu_gcd(f: IntPolyQ, g: IntPolyQ) -> IntPolyQ | None:
    """Heuristic gcd of two primitive polynomials via integer evaluation.

    Returns ``None`` when the evaluation points fail; any returned value has
    been certified by exact division.
    """
    bound = 2 * min(_max_norm(f), _max_norm(g)) + 29
    xi = max(min(bound, 99 * math.isqrt(bound)),
             2 * min(_max_norm(f) // abs(f.lc), _max_norm(g) // abs(g.lc)) + 2)
    for _ in range(6):
        h = math.gcd(f(xi), g(xi))
        digits = []
        half = xi // 2
        while h:
            d = h % xi
            if d > half:
                d -= xi
            digits.append(d)
            h = (h - d) // xi
        cand = IntPolyQ(digits).primitive()
        if cand and cand.divides(f) and cand.divides(g):
            return cand
        xi = xi * 73794 // 27011
    return None


def poly_gcd(f: IntPolyQ, g: IntPolyQ) -> IntPolyQ:
    """Primitive gcd with positive leading coefficient (integer content ignored).

    ``poly_gcd(0, 0)`` is ``0``.
    """
    if not f:
        return g.primitive()
    if not g:
        return f.primitive()
    if f.degree == 0 or g.degree == 0:
        return ONE
    vf, vg = f.valuation(), g.valuation()
    v = min(vf, vg)
    fp, gp = f.unshift(vf).primitive(), g.unshift(vg).primitive()
    if fp.degree == 0 or gp.degree == 0:
        return ONE.shift(v)
    if fp == gp:
        return fp.shift(v)
    res = _heu_gcd(fp, gp)
    if res is None:
        res = _prs_gcd(fp, gp)
    return res.shift(v)


def _canonical(num: IntPolyQ, den: IntPolyQ) -> tuple[IntPolyQ, IntPolyQ]:
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    if not num:
        return ZERO, ONE
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    c = math.gcd(num.content(), den.content())
    if den.lc < 0:
        c = -c
    if c != 1:
        num = IntPolyQ._raw(tuple(x // c for x in num.coeffs))
        den = IntPolyQ._raw(tuple(x // c for x in den.coeffs))
    return num, den


class RatFuncQ:
    """Reduced rational function ``num/den`` over the integers.

    Construction always canonicalizes, so two equal rational functions have
    identical ``(num, den)`` pairs.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: IntPolyQ | int = 0, den: IntPolyQ | int = 1):
        if isinstance(num, int):
            num = IntPolyQ.constant(num)
        if isinstance(den, int):
            den = IntPolyQ.constant(den)
        self.num, self.den = _canonical(num, den)

    @classmethod
    def _raw(cls, num: IntPolyQ, den: IntPolyQ) -> "RatFuncQ":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def from_poly(cls, p: IntPolyQ) -> "RatFuncQ":
        return cls._raw(p, ONE)

    def reduced(self) -> "RatFuncQ":
        return RatFuncQ(self.num, self.den)

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, IntPolyQ)):
            other = RatFuncQ(other)
        if not isinstance(other, RatFuncQ):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash(("RatFuncQ", self.num.coeffs, self.den.coeffs))

    def __neg__(self) -> "RatFuncQ":
        return RatFuncQ._raw(-self.num, self.den)

    def __add__(self, other: "RatFuncQ | IntPolyQ | int") -> "RatFuncQ":
        if not isinstance(other, RatFuncQ):
            other = RatFuncQ(other)
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return RatFuncQ(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g.degree > 0:
            b1 = self.den.exact_div(g)
            d1 = other.den.exact_div(g)
        else:
            b1, d1 = self.den, other.den
        # den = lcm up to a constant
        return RatFuncQ(self.num * d1 + other.num * b1, b1 * other.den)

    __radd__ = __add__

    def __sub__(self, other: "RatFuncQ | IntPolyQ | int") -> "RatFuncQ":
        if not isinstance(other, RatFuncQ):
            other = RatFuncQ(other)
        return self + (-other)

    def __rsub__(self, other: "IntPolyQ | int") -> "RatFuncQ":
        return RatFuncQ(other) - self

    def __mul__(self, other: "RatFuncQ | IntPolyQ | int") -> "RatFuncQ":
        if not isinstance(other, RatFuncQ):
            other = RatFuncQ(other)
        if not self.num or not other.num:
            return RatFuncQ()
        # cross-cancel; each factor is already reduced
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        a, d = self.num, other.den
        c, b = other.num, self.den
        if g1.degree > 0:
            a, d = a.exact_div(g1), d.exact_div(g1)
        if g2.degree > 0:
            c, b = c.exact_div(g2), b.exact_div(g2)
        num, den = a * c, b * d
        k = math.gcd(num.content(), den.content())
        if den.lc < 0:
            k = -k
        if k != 1:
            num = IntPolyQ._raw(tuple(x // k for x in num.coeffs))
            den = IntPolyQ._raw(tuple(x // k for x in den.coeffs))
        return RatFuncQ._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFuncQ":
        if not self.num:
            raise ZeroDivisionError("inverse of the zero rational function")
        if self.num.lc < 0:
            return RatFuncQ._raw(-self.den, -self.num)
        return RatFuncQ._raw(self.den, self.num)

    def __truediv__(self, other: "RatFuncQ | IntPolyQ | int") -> "RatFuncQ":
        if not isinstance(other, RatFuncQ):
            other = RatFuncQ(other)
        return self * other.inverse()

    def __rtruediv__(self, other: "IntPolyQ | int") -> "RatFuncQ":
        return RatFuncQ(other) * self.inverse()

    def times_qpow(self, k: int) -> "RatFuncQ":
        """Multiply by ``q**k`` keeping the canonical form (``k >= 0``)."""
        if k == 0 or not self.num:
            return self
        v = min(k, self.den.valuation())
        return RatFuncQ._raw(self.num.shift(k - v), self.den.unshift(v))

    def __call__(self, x):
        """Evaluate at ``x``; pass a :class:`~fractions.Fraction` for exactness."""
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at q={x}")
        n = self.num(x)
        if isinstance(n, int) and isinstance(d, int):
            return Fraction(n, d)
        return n / d

    def __repr__(self) -> str:
        return f"RatFuncQ({self.num!r}, {self.den!r})"

    def __str__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"


def qpochhammer_poly(k: int) -> IntPolyQ:
    """The finite product ``(q;q)_k = prod_{n=1..k} (1 - q^n)``."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    p = ONE
    for n in range(1, k + 1):
        p = p - p.shift(n)
    return p


def gauss_binom(m: int, k: int) -> IntPolyQ:
    """Gaussian binomial ``[m, k]_q`` via the q-Pascal recurrence.

    ``[m, k] = [m-1, k-1] + q^k [m-1, k]``; no division is ever performed.
    """
    if m < 0 or k < 0 or k > m:
        raise ValueError(f"gauss_binom needs 0 <= k <= m, got m={m}, k={k}")
    k = min(k, m - k)
    # row[j] = [i, j] for the current i
    row = [ONE] + [ZERO] * k
    for i in range(1, m + 1):
        for j in range(min(i, k), 0, -1):
            row[j] = row[j - 1] + row[j].shift(j)
    return row[k]


def e7_lhs(m: int, n: int) -> RatFuncQ:
    """Left side ``q^{mn} / ((q;q)_m (q;q)_n)``."""
    _check_mn(m, n)
    return RatFuncQ(ONE.shift(m * n), qpochhammer_poly(m) * qpochhammer_poly(n))


def _rhs_cleared_terms(m: int, n: int) -> list[IntPolyQ]:
    # k-th summand multiplied by (q;q)_m (q;q)_n
    out = []
    for k in range(min(m, n) + 1):
        t = (gauss_binom(m, k) * gauss_binom(n, k) * qpochhammer_poly(k)).shift(k * (k - 1) // 2)
        out.append(-t if k % 2 else t)
    return out


def e7_rhs(m: int, n: int) -> RatFuncQ:
    """Right side ``sum_k (-1)^k q^{k(k-1)/2} / ((q;q)_{m-k} (q;q)_{n-k} (q;q)_k)``."""
    _check_mn(m, n)
    num = reduce(lambda x, y: x + y, _rhs_cleared_terms(m, n), ZERO)
    return RatFuncQ(num, qpochhammer_poly(m) * qpochhammer_poly(n))


def e7_residual(m: int, n: int) -> IntPolyQ:
    """``q^{mn} - sum_k (-1)^k q^{k(k-1)/2} [m,k] [n,k] (q;q)_k``, exactly."""
    _check_mn(m, n)
    acc = ONE.shift(m * n)
    for t in _rhs_cleared_terms(m, n):
        acc = acc - t
    return acc


def verify_e7(m: int, n: int) -> bool:
    """True iff the (m, n) coefficient identity holds identically in q."""
    return e7_residual(m, n).is_zero()


def _check_mn(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise ValueError(f"m, n must be nonnegative, got ({m}, {n})")


@dataclass(frozen=True)
class E7Report:
    max_m: int
    max_n: int
    results: dict[tuple[int, int], bool] = field(repr=False)
    max_degree: int

    @property
    def failures(self) -> list[tuple[int, int]]:
        return sorted(k for k, ok in self.results.items() if not ok)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_e7_range(max_m: int, max_n: int) -> E7Report:
    """Check every ``0 <= m <= max_m``, ``0 <= n <= max_n``.

    ``max_degree`` is the largest degree of any polynomial formed while
    clearing denominators.
    """
    if max_m < 0 or max_n < 0:
        raise ValueError("bounds must be nonnegative")
    results = {}
    max_deg = 0
    for m in range(max_m + 1):
        for n in range(max_n + 1):
            terms = _rhs_cleared_terms(m, n)
            max_deg = max(max_deg, m * n, *(t.degree for t in terms))
            acc = ONE.shift(m * n)
            for t in terms:
                acc = acc - t
            results[(m, n)] = acc.is_zero()
    return E7Report(max_m, max_n, results, max_deg)


def qpochhammer_value(q0: Fraction | int, k: int) -> Fraction:
    """Exact ``prod_{n=1..k} (1 - q0^n)`` for a rational ``q0``."""
    q0 = Fraction(q0)
    out = Fraction(1)
    for n in range(1, k + 1):
        out *= 1 - q0 ** n
    return out

