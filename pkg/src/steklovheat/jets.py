"""Truncated multivariate Taylor jets with exact Gaussian-rational coefficients.

A jet knows its number of variables and its validity ``order``: coefficients
of total degree <= order are exact, everything above is unknown and never
stored.  Differentiation lowers the validity by one; products and sums carry
the minimum of the operands' validities (absolute O(x^{N+1}) errors close
under both operations).  Exhausting the order raises ``JetOrderError`` rather
than returning silently wrong data.
"""

from __future__ import annotations

from fractions import Fraction

from . import kernel
from .scalars import GQ


class JetOrderError(Exception):
    """A computation needs deeper Taylor data than the jet carries."""


class Jet:
    __slots__ = ("n", "order", "coeffs")

    def __init__(self, n: int, order: int, coeffs=None):
        if order < 0:
            raise JetOrderError(f"jet order exhausted (order {order})")
        self.n = n
        self.order = order
        self.coeffs = coeffs if coeffs is not None else {}

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, order: int) -> "Jet":
        return cls(n, order, {})

    @classmethod
    def constant(cls, n: int, order: int, value) -> "Jet":
        v = value.t if isinstance(value, GQ) else GQ(value).t
        if v[0] == 0 and v[1] == 0:
            return cls(n, order, {})
        return cls(n, order, {(0,) * n: v})

    @classmethod
    def variable(cls, n: int, order: int, i: int) -> "Jet":
        if order < 1:
            raise JetOrderError("order < 1 cannot represent a variable")
        key = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, order, {key: kernel.Q_ONE})

    @classmethod
    def from_terms(cls, n: int, order: int, terms) -> "Jet":
        """terms: iterable of (exponent tuple, GQ/Fraction/int)."""
        coeffs = {}
        for mu, val in terms:
            if len(mu) != n:
                raise ValueError(f"exponent {mu} has wrong arity for n={n}")
            if sum(mu) > order:
                continue
            v = val.t if isinstance(val, GQ) else GQ(val).t
            cur = coeffs.get(tuple(mu))
            s = v if cur is None else kernel.q_add(cur, v)
            if s[0] == 0 and s[1] == 0:
                coeffs.pop(tuple(mu), None)
            else:
                coeffs[tuple(mu)] = s
        return cls(n, order, coeffs)

    # queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        zero_key = (0,) * self.n
        return all(k == zero_key for k in self.coeffs)

    def coefficient(self, mu) -> GQ:
        if sum(mu) > self.order:
            raise JetOrderError(
                f"coefficient {mu} beyond validity order {self.order}"
            )
        return GQ.from_triple(self.coeffs.get(tuple(mu), kernel.Q_ZERO))

    def eval0(self) -> GQ:
        return GQ.from_triple(kernel.jet_eval0(self.coeffs, self.n))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "Jet") -> "Jet":
        self._check(other)
        order = min(self.order, other.order)
        out = kernel.jet_add(
            kernel.jet_truncate(self.coeffs, order),
            kernel.jet_truncate(other.coeffs, order),
        )
        return Jet(self.n, order, out)

    def __sub__(self, other: "Jet") -> "Jet":
        return self + (-other)

    def __neg__(self) -> "Jet":
        return Jet(self.n, self.order, kernel.jet_neg(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            order = min(self.order, other.order)
            return Jet(self.n, order, kernel.jet_mul(self.coeffs, other.coeffs, order))
        c = other.t if isinstance(other, GQ) else GQ(other).t
        return Jet(self.n, self.order, kernel.jet_scale(self.coeffs, c))

    __rmul__ = __mul__

    def scale(self, c: GQ) -> "Jet":
        return Jet(self.n, self.order, kernel.jet_scale(self.coeffs, c.t))

    def diff(self, var: int) -> "Jet":
        if self.order < 1:
            raise JetOrderError("differentiating an order-0 jet")
        return Jet(self.n, self.order - 1, kernel.jet_diff(self.coeffs, var))

    def truncate(self, order: int) -> "Jet":
        order = min(order, self.order)
        return Jet(self.n, order, kernel.jet_truncate(self.coeffs, order))

    def restrict_last(self) -> "Jet":
        """Set the last variable to zero and drop it (boundary slice)."""
        out = {}
        for key, val in self.coeffs.items():
            if key[-1] == 0:
                out[key[:-1]] = val
        return Jet(self.n - 1, self.order, out)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        order = min(self.order, other.order)
        return kernel.jet_truncate(self.coeffs, order) == kernel.jet_truncate(
            other.coeffs, order
        )

    def __hash__(self):
        raise TypeError("Jet is not hashable")

    def _check(self, other: "Jet"):
        if self.n != other.n:
            raise ValueError(f"jet arity mismatch: {self.n} vs {other.n}")

    # display ---------------------------------------------------------------

    def dump(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for key in sorted(self.coeffs, key=lambda k: (sum(k), k)):
            c = GQ.from_triple(self.coeffs[key])
            mono = "*".join(
                f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}"
                for i, e in enumerate(key)
                if e
            )
            cs = str(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, {self.dump()})"


def jet_from_fraction_table(n: int, order: int, table: dict) -> Jet:
    """table maps exponent tuples to Fraction/GQ values."""
    return Jet.from_terms(n, order, table.items())


def invert_unit_matrix_of_jets(mat: dict, dim: int, n: int, order: int) -> dict:
    """Invert a dim x dim jet matrix equal to the identity at the origin.

    ``mat`` maps (i, j) with 0 <= i, j < dim to Jets; missing entries are 0.
    Neumann series in h = M - I terminates at the truncation order.
    """
    ident = {
        (i, j): Jet.constant(n, order, Fraction(1 if i == j else 0))
        for i in range(dim)
        for j in range(dim)
    }
    h = {}
    for i in range(dim):
        for j in range(dim):
            entry = mat.get((i, j), Jet.zero(n, order)) - ident[(i, j)]
            h[(i, j)] = entry
            if not entry.eval0().is_zero():
                raise ValueError("matrix is not the identity at the origin")
    inv = dict(ident)
    for _ in range(order):
        nxt = {}
        for i in range(dim):
            for j in range(dim):
                acc = Jet.zero(n, order)
                for l in range(dim):
                    hil = h[(i, l)]
                    if hil.is_zero():
                        continue
                    acc = acc + hil * inv[(l, j)]
                nxt[(i, j)] = ident[(i, j)] - acc
        inv = nxt
    return inv
