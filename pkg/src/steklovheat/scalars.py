"""Exact scalars: Gaussian rationals (a + b*i)/d over Python integers.

``GQ`` wraps the kernel's normalized integer triples and interoperates with
``fractions.Fraction`` at the API boundary.  All engine arithmetic is exact;
floats appear only in the model-spectra module.
"""

from __future__ import annotations

from fractions import Fraction

from . import kernel


class GQ:
    """Immutable Gaussian rational."""

    __slots__ = ("t",)

    def __init__(self, re=0, im=0):
        if isinstance(re, tuple) and im == 0:
            self.t = re
            return
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator
        self.t = kernel.q_norm(
            re.numerator * im.denominator, im.numerator * re.denominator, d
        )

    @classmethod
    def from_triple(cls, t):
        obj = object.__new__(cls)
        obj.t = t
        return obj

    @property
    def re(self) -> Fraction:
        a, _, d = self.t
        return Fraction(a, d)

    @property
    def im(self) -> Fraction:
        _, b, d = self.t
        return Fraction(b, d)

    def is_zero(self) -> bool:
        return self.t[0] == 0 and self.t[1] == 0

    def is_real(self) -> bool:
        return self.t[1] == 0

    def as_fraction(self) -> Fraction:
        if self.t[1] != 0:
            raise ValueError(f"{self} is not real")
        return Fraction(self.t[0], self.t[2])

    def conjugate(self) -> "GQ":
        a, b, d = self.t
        return GQ.from_triple((a, -b, d))

    def __add__(self, other):
        return GQ.from_triple(kernel.q_add(self.t, _coerce(other).t))

    __radd__ = __add__

    def __sub__(self, other):
        return GQ.from_triple(kernel.q_sub(self.t, _coerce(other).t))

    def __rsub__(self, other):
        return GQ.from_triple(kernel.q_sub(_coerce(other).t, self.t))

    def __neg__(self):
        return GQ.from_triple(kernel.q_neg(self.t))

    def __mul__(self, other):
        return GQ.from_triple(kernel.q_mul(self.t, _coerce(other).t))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GQ.from_triple(kernel.q_div(self.t, _coerce(other).t))

    def __rtruediv__(self, other):
        return GQ.from_triple(kernel.q_div(_coerce(other).t, self.t))

    def __eq__(self, other):
        try:
            return self.t == _coerce(other).t
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.t)

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        a, b, d = self.t
        return complex(a / d, b / d)

    def __repr__(self):
        return f"GQ({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = GQ.from_triple(kernel.Q_ZERO)
ONE = GQ.from_triple(kernel.Q_ONE)
I = GQ.from_triple(kernel.Q_I)


def _coerce(x) -> GQ:
    if isinstance(x, GQ):
        return x
    if isinstance(x, (int, Fraction)):
        return GQ(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GQ")


def format_scalar(x: GQ) -> str:
    """Canonical text form: '0', 'p/q', 'p/q*i', or 'p/q+p/q*i'."""
    a, b, d = x.t
    if a == 0 and b == 0:
        return "0"
    re = _frac_str(a, d)
    im = _frac_str(b, d)
    if b == 0:
        return re
    if a == 0:
        return f"{im}*i"
    sign = "+" if b > 0 else "-"
    return f"{re}{sign}{_frac_str(abs(b), d)}*i"


def _frac_str(num: int, den: int) -> str:
    f = Fraction(num, den)
    return str(f)


def fraction_to_json(f: Fraction) -> str:
    return str(Fraction(f))


def fraction_from_json(s) -> Fraction:
    return Fraction(s)


def scalar_to_json(x: GQ):
    """Real scalars serialize as 'p/q'; complex ones as {'re':…, 'im':…}."""
    a, b, d = x.t
    if b == 0:
        return str(Fraction(a, d))
    return {"re": str(Fraction(a, d)), "im": str(Fraction(b, d))}


def scalar_from_json(obj) -> GQ:
    if isinstance(obj, dict):
        return GQ(Fraction(obj["re"]), Fraction(obj["im"]))
    return GQ(Fraction(obj))
