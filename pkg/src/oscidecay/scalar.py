"""Exact arithmetic in a real quadratic field Q(sqrt(m)).

A value is stored as ``(a + b*sqrt(m)) / den`` with integers ``a, b`` and a
positive ``den`` reduced so that ``gcd(a, b, den) == 1``.  The rational and
irrational parts are exposed as :class:`fractions.Fraction`.

Rational values (``b == 0``) are compatible with every radicand, so plain
integers mix freely with elements of any field.  Combining two genuinely
irrational values over different radicands raises
:class:`RadicandMismatchError`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

DEFAULT_RADICAND = 2


class RadicandMismatchError(ValueError):
    """Two irrational scalars from different quadratic fields were combined."""


def is_squarefree(m: int) -> bool:
    if m < 2:
        return False
    k = 2
    while k * k <= m:
        if m % (k * k) == 0:
            return False
        k += 1
    return True


def split_square(n: int) -> tuple[int, int]:
    """Return ``(s, k)`` with ``n == s*s*k`` and ``k`` square-free."""
    if n < 0:
        raise ValueError("square root of a negative integer is not real")
    if n == 0:
        return 0, 1
    s, k = 1, n
    f = 2
    while f * f <= k:
        while k % (f * f) == 0:
            k //= f * f
            s *= f
        f += 1
    return s, k


class QuadExtScalar:
    __slots__ = ("_a", "_b", "_den", "_m")

    def __init__(self, rat=0, irr=0, radicand: int = DEFAULT_RADICAND):
        if not is_squarefree(radicand):
            raise ValueError(f"radicand must be a square-free integer >= 2, got {radicand}")
        rat = Fraction(rat)
        irr = Fraction(irr)
        den = rat.denominator * irr.denominator // math.gcd(rat.denominator, irr.denominator)
        a = rat.numerator * (den // rat.denominator)
        b = irr.numerator * (den // irr.denominator)
        self._init(a, b, den, radicand)

    def _init(self, a: int, b: int, den: int, m: int) -> None:
        if den < 0:
            a, b, den = -a, -b, -den
        g = math.gcd(math.gcd(a, b), den)
        if g > 1:
            a //= g
            b //= g
            den //= g
        self._a = a
        self._b = b
        self._den = den
        self._m = m

    @classmethod
    def _raw(cls, a: int, b: int, den: int, m: int) -> QuadExtScalar:
        obj = cls.__new__(cls)
        obj._init(a, b, den, m)
        return obj

    @classmethod
    def sqrt(cls, n: int, radicand: int | None = None) -> QuadExtScalar:
        """sqrt(n) for a nonnegative integer n, simplified."""
        s, k = split_square(n)
        if k == 1:
            return cls(s, 0, radicand or DEFAULT_RADICAND)
        return cls(0, s, k)

    # -- accessors ---------------------------------------------------------
    @property
    def rat(self) -> Fraction:
        return Fraction(self._a, self._den)

    @property
    def irr(self) -> Fraction:
        return Fraction(self._b, self._den)

    @property
    def radicand(self) -> int:
        return self._m

    def is_rational(self) -> bool:
        return self._b == 0

    def conjugate(self) -> QuadExtScalar:
        return QuadExtScalar._raw(self._a, -self._b, self._den, self._m)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - m b^2`` of the element."""
        return Fraction(self._a * self._a - self._m * self._b * self._b, self._den * self._den)

    # -- coercion ----------------------------------------------------------
    def _coerce(self, other) -> QuadExtScalar:
        if isinstance(other, QuadExtScalar):
            return other
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            return QuadExtScalar._raw(f.numerator, 0, f.denominator, self._m)
        return NotImplemented

    def _field(self, other: QuadExtScalar) -> int:
        if self._b and other._b and self._m != other._m:
            raise RadicandMismatchError(
                f"cannot combine sqrt({self._m}) and sqrt({other._m}) values")
        return self._m if self._b or not other._b else other._m

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self._field(other)
        d1, d2 = self._den, other._den
        return QuadExtScalar._raw(self._a * d2 + other._a * d1,
                                  self._b * d2 + other._b * d1, d1 * d2, m)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtScalar._raw(-self._a, -self._b, self._den, self._m)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self._field(other)
        a1, b1, a2, b2 = self._a, self._b, other._a, other._b
        return QuadExtScalar._raw(a1 * a2 + b1 * b2 * m, a1 * b2 + a2 * b1,
                                  self._den * other._den, m)

    __rmul__ = __mul__

    def inverse(self) -> QuadExtScalar:
        a, b, m = self._a, self._b, self._m
        n = a * a - m * b * b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(m))")
        # den/(a + b sqrt m) = den (a - b sqrt m) / n
        return QuadExtScalar._raw(self._den * a, -self._den * b, n, m)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadExtScalar._raw(1, 0, 1, self._m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison --------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(m)`` via integer comparison of squares."""
        a, b = self._a, self._b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with m b^2
        d = a * a - self._m * b * b
        sd = (d > 0) - (d < 0)
        return sa * sd

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._b == 0 and other._b == 0:
            return self._a == other._a and self._den == other._den
        return (self._a, self._b, self._den, self._m) == (other._a, other._b, other._den, other._m)

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._den))
        return hash((self._a, self._b, self._den, self._m))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.rat) + float(self.irr) * math.sqrt(self._m)

    # -- text --------------------------------------------------------------
    def __repr__(self):
        return f"QuadExtScalar({self.rat!s}, {self.irr!s}, radicand={self._m})"

    def __str__(self):
        """Parser-compatible rendering, e.g. ``-1/2*sqrt(2)`` or ``1 + sqrt(2)``."""
        rat, irr = self.rat, self.irr
        root = f"sqrt({self._m})"
        if irr == 0:
            return str(rat)
        if irr == 1:
            irr_text = root
        elif irr == -1:
            irr_text = "-" + root
        else:
            irr_text = f"{irr}*{root}"
        if rat == 0:
            return irr_text
        if irr_text.startswith("-"):
            return f"{rat} - {irr_text[1:]}"
        return f"{rat} + {irr_text}"


def as_scalar(value, radicand: int = DEFAULT_RADICAND) -> QuadExtScalar:
    if isinstance(value, QuadExtScalar):
        return value
    return QuadExtScalar(value, 0, radicand)


ZERO = QuadExtScalar(0)
ONE = QuadExtScalar(1)


def scalar_arith(op: str, a: QuadExtScalar, b: QuadExtScalar) -> QuadExtScalar:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two scalars."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown scalar operation {op!r}")


def scalar_sign(a: QuadExtScalar) -> int:
    return as_scalar(a).sign()


def common_radicand(values) -> int | None:
    """The radicand shared by the irrational members of ``values`` (None if all rational)."""
    m = None
    for v in values:
        if isinstance(v, QuadExtScalar) and not v.is_rational():
            if m is None:
                m = v.radicand
            elif m != v.radicand:
                raise RadicandMismatchError(f"mixed radicands {m} and {v.radicand}")
    return m
