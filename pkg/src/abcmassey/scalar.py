"""Exact Gaussian rationals a + b i with a, b in Q."""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq

_Q0 = mpq(0)
_Q1 = mpq(1)


def _q(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        t = x.strip()
        return mpq(t[1:] if t.startswith("+") else t)
    return mpq(x)


def _new(re_: mpq, im: mpq) -> "Scalar":
    s = object.__new__(Scalar)
    s.re = re_
    s.im = im
    return s


class Scalar:
    """Element of Q(i).

    Components are ``gmpy2.mpq`` values, which are always stored reduced with
    positive denominator. Instances are treated as immutable.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            self.re, self.im = re.re, re.im + _q(im)
            return
        self.re = _q(re)
        self.im = _q(im)

    @staticmethod
    def coerce(x) -> "Scalar":
        return x if isinstance(x, Scalar) else Scalar(x)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse ``"3/2"``, ``"-i"``, ``"1/2+3/4i"`` and similar."""
        t = text.replace(" ", "").replace("*", "")
        try:
            if not t.endswith("i"):
                return cls(_q(t), 0)
            body = t[:-1]
            k = max(body.rfind("+"), body.rfind("-"))
            re_part, im_part = (body[:k], body[k:]) if k > 0 else ("0", body)
            im = {"": _Q1, "+": _Q1, "-": -_Q1}.get(im_part)
            return cls(_q(re_part), _q(im_part) if im is None else im)
        except ValueError:
            raise ValueError(f"cannot parse scalar {text!r}") from None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(other)
        return _new(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(other)
        return _new(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Scalar(other) - self

    def __neg__(self):
        return _new(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            q = _q(other)
            return _new(self.re * q, self.im * q)
        if not self.im and not other.im:
            return _new(self.re * other.re, _Q0)
        return _new(self.re * other.re - self.im * other.im,
                    self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.im:
            if not self.re:
                raise ZeroDivisionError("Scalar division by zero")
            return _new(_Q1 / self.re, _Q0)
        n = self.re * self.re + self.im * self.im
        return _new(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar(other) * self.inverse()

    def conjugate(self) -> "Scalar":
        return _new(self.re, -self.im)

    def norm2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    # -- predicates -------------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        try:
            o = _q(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.im == 0 and self.re == o

    def __hash__(self):
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((int(self.re.numerator), int(self.re.denominator),
                     int(self.im.numerator), int(self.im.denominator)))

    def is_real(self) -> bool:
        return not self.im

    # -- io ---------------------------------------------------------------
    def to_json(self) -> list[int]:
        return [int(self.re.numerator), int(self.re.denominator),
                int(self.im.numerator), int(self.im.denominator)]

    @classmethod
    def from_json(cls, data) -> "Scalar":
        if isinstance(data, (int, str)):
            return cls.parse(str(data))
        if len(data) == 2:
            return cls(mpq(int(data[0]), int(data[1])))
        if len(data) != 4:
            raise ValueError(f"scalar must be [re_num, re_den, im_num, im_den], got {data!r}")
        if int(data[1]) <= 0 or int(data[3]) <= 0:
            raise ValueError("scalar denominators must be positive")
        return cls(mpq(int(data[0]), int(data[1])), mpq(int(data[2]), int(data[3])))

    def __str__(self):
        def r(x):
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        if not self.im:
            return r(self.re)
        im = "" if abs(self.im) == 1 else r(abs(self.im))
        if not self.re:
            return ("-" if self.im < 0 else "") + im + "i"
        return f"{r(self.re)}{'-' if self.im < 0 else '+'}{im}i"

    def __repr__(self):
        return f"Scalar({self})"


ZERO = _new(_Q0, _Q0)
ONE = _new(_Q1, _Q0)
I = _new(_Q0, _Q1)
