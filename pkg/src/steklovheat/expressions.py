"""Invariant-basis expressions and the reference coefficient tables.

An InvariantExpression is a rational linear combination of curvature-basis
elements, understood relative to the shared prefactor

    Gamma(gamma_arg) * vol(S^{n-2}) / (2 pi)^{n-1}.

The general-geometry tables (a_0..a_3 with the eleven alpha polynomials) and
their constant-curvature specializations (alpha_12..alpha_15) are
transcribed here once and treated as reference data; the engine must
reproduce them as exact rational identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import CurvatureInvariants
from .scalars import GQ


class BasisElement:
    __slots__ = ("name", "_fn", "needs_K")

    def __init__(self, name, fn, needs_K=False):
        self.name = name
        self._fn = fn
        self.needs_K = needs_K

    def value(self, inv: CurvatureInvariants, K=None) -> GQ:
        if self.needs_K:
            if K is None:
                raise ValueError(f"basis element {self.name} needs the sectional curvature K")
            return self._fn(inv, Fraction(K))
        return self._fn(inv, None)


def _gq(x) -> GQ:
    return x if isinstance(x, GQ) else GQ(x)


_ELEMENTS = {
    "1": BasisElement("1", lambda inv, K: GQ(1)),
    "H": BasisElement("H", lambda inv, K: GQ(inv.H)),
    "H2": BasisElement("H2", lambda inv, K: GQ(inv.H**2)),
    "H3": BasisElement("H3", lambda inv, K: GQ(inv.H**3)),
    "sum_k2": BasisElement("sum_k2", lambda inv, K: GQ(inv.sum_kappa2)),
    "sum_k3": BasisElement("sum_k3", lambda inv, K: GQ(inv.sum_kappa3)),
    "Rt": BasisElement("Rt", lambda inv, K: GQ(inv.R_tilde)),
    "R": BasisElement("R", lambda inv, K: GQ(inv.R_boundary)),
    "q": BasisElement("q", lambda inv, K: _gq(inv.q0)),
    "k2": BasisElement("k2", lambda inv, K: GQ(inv.k**2)),
    "HRt": BasisElement("HRt", lambda inv, K: GQ(inv.H * inv.R_tilde)),
    "HR": BasisElement("HR", lambda inv, K: GQ(inv.H * inv.R_boundary)),
    "Hsum_k2": BasisElement("Hsum_k2", lambda inv, K: GQ(inv.H * inv.sum_kappa2)),
    "sum_kRt": BasisElement(
        "sum_kRt",
        lambda inv, K: GQ(sum((ka * r for ka, r in zip(inv.kappa, inv.R_tilde_diag)), Fraction(0))),
    ),
    "sum_kR": BasisElement(
        "sum_kR",
        lambda inv, K: GQ(sum((ka * r for ka, r in zip(inv.kappa, inv.R_diag)), Fraction(0))),
    ),
    "nabla_Rt_nn": BasisElement("nabla_Rt_nn", lambda inv, K: GQ(inv.nabla_n_R_tilde_nn)),
    "dq_dn": BasisElement("dq_dn", lambda inv, K: _gq(inv.dq_dn)),
    "Hq": BasisElement("Hq", lambda inv, K: GQ(inv.H) * _gq(inv.q0)),
    "k2H": BasisElement("k2H", lambda inv, K: GQ(inv.k**2 * inv.H)),
    "K": BasisElement("K", lambda inv, K: GQ(K), needs_K=True),
    "HK": BasisElement("HK", lambda inv, K: GQ(inv.H * K), needs_K=True),
}

_BASES = {
    (0, False): ["1"],
    (1, False): ["H"],
    (2, False): ["H2", "sum_k2", "Rt", "R", "q", "k2"],
    (3, False): [
        "H3", "HRt", "HR", "Hsum_k2", "sum_k3",
        "sum_kRt", "sum_kR", "nabla_Rt_nn", "dq_dn", "Hq", "k2H",
    ],
    (0, True): ["1"],
    (1, True): ["H"],
    (2, True): ["H2", "R", "K", "q", "k2"],
    (3, True): ["H3", "HK", "HR", "sum_k3", "dq_dn", "Hq", "k2H"],
}

SPACE_FORM_TARGET = {
    "H3", "HK", "HR", "sum_k3", "dq_dn", "Hq", "k2H",
    "H2", "K", "R", "q", "k2", "H", "1",
}


def basis_for(k_index: int, space_form: bool = False):
    try:
        names = _BASES[(k_index, space_form)]
    except KeyError:
        raise ValueError(f"no reference basis for k={k_index}") from None
    return [_ELEMENTS[name] for name in names]


@dataclass(frozen=True)
class InvariantExpression:
    """Linear combination over the invariant basis, relative to the shared
    Gamma(gamma_arg) * vol(S^{n-2}) / (2 pi)^{n-1} prefactor."""

    n: int
    k_index: int
    gamma_arg: int
    coeffs: dict
    space_form: bool = False

    def __post_init__(self):
        cleaned = {k: Fraction(v) for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", cleaned)
        if self.space_form:
            allowed = SPACE_FORM_TARGET
        else:
            allowed = {name for name in _ELEMENTS if not _ELEMENTS[name].needs_K}
        stray = set(cleaned) - allowed
        if stray:
            raise ValueError(f"basis elements outside the supported set: {sorted(stray)}")

    def evaluate(self, inv: CurvatureInvariants, K=None) -> GQ:
        """Exact value relative to the prefactor."""
        total = GQ(0)
        for name, c in self.coeffs.items():
            total = total + _ELEMENTS[name].value(inv, K) * GQ(c)
        return total

    def __eq__(self, other):
        if not isinstance(other, InvariantExpression):
            return NotImplemented
        return (
            self.n == other.n
            and self.k_index == other.k_index
            and self.gamma_arg == other.gamma_arg
            and self.space_form == other.space_form
            and self.coeffs == other.coeffs
        )

    def scaled(self, factor: Fraction) -> "InvariantExpression":
        return InvariantExpression(
            self.n,
            self.k_index,
            self.gamma_arg,
            {k: v * factor for k, v in self.coeffs.items()},
            self.space_form,
        )

    def pretty(self) -> str:
        pref = f"Gamma({self.gamma_arg})*vol(S^{self.n - 2})/(2*pi)^{self.n - 1}"
        if not self.coeffs:
            return "0"
        body = " + ".join(f"({v})*{k}" for k, v in sorted(self.coeffs.items()))
        return f"[{body}] * {pref}"


def alpha_values(n: int) -> dict:
    """The eleven general alpha polynomials and the four constant-curvature
    ones, evaluated at integer n."""
    return {
        "alpha1": n**5 - 5 * n**4 - 10 * n**3 + 52 * n**2 + 2 * n - 114,
        "alpha2": 3 * (n + 3) * (n**3 - 6 * n**2 + 2 * n + 14),
        "alpha3": -(n + 3) * (3 * n**3 - 20 * n**2 + 12 * n + 42),
        "alpha4": 3 * (n**4 - n**3 - 12 * n**2 + 22 * n + 6),
        "alpha5": -8 * (n - 2) * (n - 3),
        "alpha6": 12 * (n + 3) * (n**2 - 3 * n + 1),
        "alpha7": -4 * n * (n + 3) * (3 * n - 8),
        "alpha8": 6 * (n + 1) * (n + 3) * (n - 2),
        "alpha9": -12 * (n + 3) * (n**2 - 1),
        "alpha10": -12 * (n + 3) * (n - 4) * (n**2 - 1),
        "alpha11": 12 * (n + 3) * (n - 4) * (n**2 - 1),
        "alpha12": n**5 - 2 * n**4 - 25 * n**3 + 12 * n**2 + 164 * n - 96,
        "alpha13": 2 * n * (n - 2) * (3 * n**4 - 12 * n**3 - 38 * n**2 + 108 * n - 21),
        "alpha14": -2 * (3 * n**4 - 13 * n**3 - 44 * n**2 + 120 * n + 72),
        "alpha15": 4 * (3 * n**3 - n**2 - 14 * n - 12),
    }


def theorem_reference(n: int, k_index: int, constant_curvature: bool = False) -> InvariantExpression:
    """Hard-coded reference tables for a_0 .. a_3.

    With constant_curvature the constant-sectional-curvature forms are
    returned (a_2, a_3 over the space-form basis; a_0, a_1 are unchanged).
    """
    mins = {0: 2, 1: 2, 2: 3, 3: 4}
    if k_index not in mins:
        raise ValueError(f"no reference table for k={k_index}")
    if n < mins[k_index]:
        raise ValueError(f"a_{k_index} reference requires n >= {mins[k_index]}, got {n}")
    al = alpha_values(n)
    if k_index == 0:
        return InvariantExpression(n, 0, n - 1, {"1": Fraction(1)}, constant_curvature)
    if k_index == 1:
        return InvariantExpression(
            n, 1, n - 1, {"H": Fraction(n - 2, 2 * (n - 1))}, constant_curvature
        )
    if k_index == 2:
        d = Fraction(1, 24 * (n**2 - 1))
        if not constant_curvature:
            coeffs = {
                "H2": 3 * (n**3 - 4 * n**2 + n + 8) * d,
                "sum_k2": 3 * n * (n - 3) * d,
                "Rt": 3 * (n + 1) * (n - 2) * d,
                "R": -(n + 1) * (n - 4) * d,
                "q": -12 * (n**2 - 1) * d,
                "k2": 12 * (n**2 - 1) * d,
            }
        else:
            coeffs = {
                "H2": 3 * (n - 2) * (n**2 - n - 4) * d,
                "R": -4 * (n**2 - 3 * n - 1) * d,
                "K": 6 * n * (n - 2) * (n - 1) ** 2 * d,
                "q": -12 * (n**2 - 1) * d,
                "k2": 12 * (n**2 - 1) * d,
            }
        return InvariantExpression(n, 2, n - 2, coeffs, constant_curvature)
    d = Fraction(1, 48 * (n + 3) * (n**2 - 1))
    if not constant_curvature:
        coeffs = {
            "H3": al["alpha1"] * d,
            "HRt": al["alpha2"] * d,
            "HR": al["alpha3"] * d,
            "Hsum_k2": al["alpha4"] * d,
            "sum_k3": al["alpha5"] * d,
            "sum_kRt": al["alpha6"] * d,
            "sum_kR": al["alpha7"] * d,
            "nabla_Rt_nn": al["alpha8"] * d,
            "dq_dn": al["alpha9"] * d,
            "Hq": al["alpha10"] * d,
            "k2H": al["alpha11"] * d,
        }
    else:
        coeffs = {
            "H3": al["alpha12"] * d,
            "HK": al["alpha13"] * d,
            "HR": al["alpha14"] * d,
            "sum_k3": al["alpha15"] * d,
            "dq_dn": al["alpha9"] * d,
            "Hq": al["alpha10"] * d,
            "k2H": al["alpha11"] * d,
        }
    return InvariantExpression(n, 3, n - 3, coeffs, constant_curvature)


_SPACE_FORM_RULES = {
    "Rt": lambda n: {"K": Fraction(n * (n - 1))},
    "sum_k2": lambda n: {"K": Fraction((n - 1) * (n - 2)), "H2": Fraction(1), "R": Fraction(-1)},
    "HRt": lambda n: {"HK": Fraction(n * (n - 1))},
    "Hsum_k2": lambda n: {"HK": Fraction((n - 1) * (n - 2)), "H3": Fraction(1), "HR": Fraction(-1)},
    "sum_kRt": lambda n: {"HK": Fraction(n - 1)},
    "sum_kR": lambda n: {
        "H3": Fraction(1),
        "HK": Fraction(n * (n - 2)),
        "HR": Fraction(-1),
        "sum_k3": Fraction(-1),
    },
    "nabla_Rt_nn": lambda n: {},
}


def space_form_substitute(expr: InvariantExpression, K=None) -> InvariantExpression:
    """Specialize a general-basis expression to constant sectional curvature.

    Applies Rt = n(n-1)K, Rt_aa = (n-1)K, nabla_n Rt_nn = 0 and the Gauss
    identities sum k^2 = (n-1)(n-2)K + H^2 - R and
    sum k R_aa = H^3 + n(n-2)HK - HR - sum k^3.  K stays a symbolic basis
    element unless a value is supplied, in which case it is folded into the
    K-free elements.
    """
    if expr.space_form:
        raise ValueError("expression is already over the space-form basis")
    n = expr.n
    out = {}
    for name, c in expr.coeffs.items():
        rule = _SPACE_FORM_RULES.get(name)
        if rule is None:
            if name not in SPACE_FORM_TARGET:
                raise ValueError(f"unsupported basis element {name}")
            out[name] = out.get(name, Fraction(0)) + c
        else:
            for tgt, factor in rule(n).items():
                out[tgt] = out.get(tgt, Fraction(0)) + c * factor
    if K is not None:
        K = Fraction(K)
        fold = {"K": "1", "HK": "H"}
        for src, tgt in fold.items():
            if src in out:
                out[tgt] = out.get(tgt, Fraction(0)) + out.pop(src) * K
        return InvariantExpression(expr.n, expr.k_index, expr.gamma_arg, out, False)
    return InvariantExpression(expr.n, expr.k_index, expr.gamma_arg, out, True)
