"""Heat-trace coefficients from the resolvent ladder.

Pipeline per coefficient index k:

    s_{-1-k}  --eval at base point-->  --tau contour-->  --xi moments-->  a_k

The contour integral replaces each resolvent power s^p by 1/(p-1)! (the
residue factor together with the orientation bookkeeping that makes a_0
positive); the xi integral maps even monomials to Gamma-function classes and
kills odd ones.  Values are exact: rational coefficient times
Gamma(g) * vol(S^{n-2}) / (2 pi)^{n-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expressions import InvariantExpression, basis_for, theorem_reference
from .geometry import CurvatureInvariants, GeometryJet, curvature_package, random_jet
from .dtn import dtn_full_symbol, operator_symbols, resolvent_symbols, w_recursion
from .jets import Jet
from .scalars import GQ
from .symbols import Symbol, factorial


class MomentError(ValueError):
    """The xi integral does not reduce to the reference Gamma class."""


@dataclass(frozen=True)
class HeatValue:
    """coeff * Gamma(gamma_arg) * vol(S^{n-2}) / (2 pi)^{n-1}, exact."""

    n: int
    k_index: int
    gamma_arg: int
    coeff: GQ

    def rational(self) -> GQ:
        """Fold the Gamma factor: exact multiple of vol(S^{n-2})/(2 pi)^{n-1}."""
        return self.coeff * GQ(factorial(self.gamma_arg - 1))

    def __eq__(self, other):
        if not isinstance(other, HeatValue):
            return NotImplemented
        return (
            self.n == other.n
            and self.k_index == other.k_index
            and self.rational() == other.rational()
        )

    def __str__(self):
        return (
            f"({self.coeff}) * Gamma({self.gamma_arg})"
            f" * vol(S^{self.n - 2}) / (2*pi)^{self.n - 1}"
        )


def gamma_reference(n: int, k_index: int) -> int:
    """Gamma argument the coefficient tables are stated with: n-1 for
    a_0, a_1 and n-k for a_2, a_3 (always >= 1 in the admissible range)."""
    return n - 1 if k_index <= 1 else n - k_index


def tau_integral(sym: Symbol) -> Symbol:
    """Contour-integrate the resolvent powers away.

    Every term must carry s_power >= 1; the factor applied is +1/(p-1)!,
    the residue value combined once and for all with the orientation of the
    contour formula so that the leading coefficient comes out positive.
    The result implicitly carries the weight e^{-w1} for the xi integral.
    """
    out = {}
    for (beta, eps, m, p), jet in sym.terms.items():
        if p < 1:
            raise MomentError(
                "tau-free term under the contour integral: "
                f"beta={beta}, eps={eps}, m={m}"
            )
        scaled = jet.scale(GQ(Fraction(1, factorial(p - 1))))
        key = (beta, eps, m, 0)
        cur = out.get(key)
        out[key] = scaled if cur is None else cur + scaled
    return Symbol(sym.ctx, {k: v for k, v in out.items() if not v.is_zero()}, sym.cap)


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def xi_moment(sym: Symbol, n: int) -> dict:
    """Integrate a tau-integrated symbol at the base point over xi-space.

    Returns {gamma_arg: GQ}: the value is sum over classes of
    coeff * Gamma(gamma_arg), in units of vol(S^{n-2}).  Odd monomials drop;
    an even monomial xi^{2 mu} against w1^e e^{-w1} contributes

        Gamma(n - 1 + e + 2|mu|) * prod_a (2 mu_a - 1)!!
                                 / prod_{j=1}^{|mu|} (n - 3 + 2 j).

    Requires constant coefficients (evaluate at the base point first, where
    the metric is the identity and Q^-m means w1^{-2m}).
    """
    classes = {}
    for (beta, eps, m, p), jet in sym.terms.items():
        if p != 0:
            raise MomentError("xi_moment needs tau-integrated input (s-power 0)")
        if not jet.is_constant():
            raise MomentError("xi_moment needs coefficients frozen at the base point")
        if any(b % 2 for b in beta):
            continue
        mu = tuple(b // 2 for b in beta)
        mu_len = sum(mu)
        g_arg = (n - 1) + (eps - 2 * m) + sum(beta)
        num = 1
        for mu_a in mu:
            num *= _double_factorial(2 * mu_a - 1)
        den = 1
        for j in range(1, mu_len + 1):
            den *= n - 3 + 2 * j
        val = jet.eval0() * GQ(Fraction(num, den))
        cur = classes.get(g_arg)
        tot = val if cur is None else cur + val
        if tot.is_zero():
            classes.pop(g_arg, None)
        else:
            classes[g_arg] = tot
    return classes


def reduce_gamma_classes(classes: dict, gamma_arg: int) -> GQ:
    """Collapse {g: coeff} to a single multiple of Gamma(gamma_arg).

    Classes at nonpositive g must have cancelled exactly (their xi integrals
    diverge individually; the admissible-dimension theorems guarantee the
    cancellation), else MomentError.
    """
    total = GQ(0)
    for g_arg, coeff in classes.items():
        if coeff.is_zero():
            continue
        if g_arg < 1:
            raise MomentError(
                f"divergent xi integral: Gamma argument {g_arg} <= 0 "
                "with nonzero total (dimension too small for this coefficient)"
            )
        total = total + coeff * GQ(Fraction(factorial(g_arg - 1), factorial(gamma_arg - 1)))
    return total


def heat_coefficients(jet: GeometryJet, k_max: int) -> list:
    """a_0 .. a_{k_max} at the base point, sharing one ladder computation."""
    n = jet.n
    if k_max > n - 1:
        raise ValueError(
            f"a_{k_max} requires dimension n >= {k_max + 1}, got n = {n}"
        )
    if k_max > jet.jet_order:
        raise ValueError(
            f"a_{k_max} requires jet_order >= {k_max}, got {jet.jet_order}"
        )
    depth = k_max + 1
    ops = operator_symbols(jet)
    ladder = w_recursion(ops, depth)
    dtn = dtn_full_symbol(ops, ladder)
    s_ladder = resolvent_symbols(dtn, depth)
    out = []
    for k in range(k_max + 1):
        frozen = s_ladder[-1 - k].eval_x0()
        classes = xi_moment(tau_integral(frozen), n)
        g_ref = gamma_reference(n, k)
        out.append(HeatValue(n, k, g_ref, reduce_gamma_classes(classes, g_ref)))
    return out


def heat_coefficient(jet: GeometryJet, k_index: int) -> HeatValue:
    """a_{k_index}(x) at the base point, exact."""
    return heat_coefficients(jet, k_index)[k_index]


def theorem_heat_value(n: int, k_index: int, inv: CurvatureInvariants) -> HeatValue:
    """Reference table evaluated on concrete invariants, as a HeatValue."""
    expr = theorem_reference(n, k_index)
    return HeatValue(n, k_index, expr.gamma_arg, expr.evaluate(inv))


# ---------------------------------------------------------------------------
# Coefficient recovery over the invariant basis


def _solve_gq(rows, rhs):
    """Exact Gaussian elimination over the Gaussian rationals.

    rows: list of lists of GQ; rhs: list of GQ.  Returns the solution or
    raises ValueError on a singular system.
    """
    nrows = len(rows)
    ncols = len(rows[0])
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    piv_cols = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if not aug[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("samples not in general position (singular system)")
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = GQ(1) / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(nrows):
            if r != row and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        piv_cols.append(col)
        row += 1
        if row == nrows:
            break
    if row < ncols:
        raise ValueError("samples not in general position (singular system)")
    for r in range(ncols, nrows):
        if not aug[r][ncols].is_zero():
            raise ValueError("basis insufficient: held-out residual nonzero")
    return [aug[r][ncols] for r in range(ncols)]


def invariant_projection(samples, n: int, k_index: int) -> InvariantExpression:
    """Recover the invariant-basis coefficients of a_k from engine samples.

    samples: [(CurvatureInvariants, HeatValue)]; needs more samples than
    basis elements -- the surplus rows are consistency checks and fail hard
    on any residual (this is what would surface an incomplete basis).
    """
    basis = basis_for(k_index)
    if len(samples) < len(basis) + 1:
        raise ValueError(
            f"need at least {len(basis) + 1} samples for k={k_index}, got {len(samples)}"
        )
    g_ref = gamma_reference(n, k_index)
    rows = []
    rhs = []
    for inv, value in samples:
        if value.gamma_arg != g_ref:
            raise ValueError("sample uses a different Gamma normalization")
        rows.append([elem.value(inv) for elem in basis])
        rhs.append(value.coeff)
    sol = _solve_gq(rows, rhs)
    coeffs = {}
    for elem, c in zip(basis, sol):
        if not c.is_zero():
            if not c.is_real():
                raise ValueError(f"non-real coefficient recovered for {elem.name}")
            coeffs[elem.name] = c.as_fraction()
    return InvariantExpression(n=n, k_index=k_index, gamma_arg=g_ref, coeffs=coeffs)


def projection_samples(n: int, k_index: int, count: int, seed_base: int = 1000):
    """Deterministic engine samples for invariant_projection."""
    out = []
    for i in range(count):
        jet = random_jet(n, 3, seed_base + i, with_A=True, with_q=True)
        inv = curvature_package(jet)
        out.append((inv, heat_coefficient(jet, k_index)))
    return out


# ---------------------------------------------------------------------------
# Verification driver


def _q_shifted(jet: GeometryJet, delta: Fraction) -> GeometryJet:
    shifted = jet.q + Jet.constant(jet.n, jet.q.order, delta)
    return jet.with_fields(q=shifted)


def verify(n_values, seeds, k_max: int = 3, extras: bool = True) -> dict:
    """Pointwise engine-vs-theorem verification grid on random jets, plus the
    magnetic-potential cancellation and electric-potential coupling checks.

    Every comparison is an exact rational identity; any mismatch makes
    summary.all_equal false and is listed individually.
    """
    runs = []
    a_independence = []
    q_coupling = []
    ok = True
    for n in n_values:
        kcap = min(k_max, n - 1)
        for seed in seeds:
            jet = random_jet(n, 3, seed, with_A=True, with_q=True)
            inv = curvature_package(jet)
            values = heat_coefficients(jet, kcap)
            for k in range(kcap + 1):
                ref = theorem_heat_value(n, k, inv)
                equal = values[k] == ref
                ok = ok and equal
                runs.append(
                    {
                        "n": n,
                        "seed": seed,
                        "k": k,
                        "engine": str(values[k]),
                        "reference": str(ref),
                        "equal": equal,
                    }
                )
    if extras:
        for n in n_values:
            kcap = min(k_max, n - 1)
            for seed in seeds[: max(1, len(seeds) // 2)]:
                base = random_jet(n, 3, seed, with_A=False, with_q=True)
                twin = random_jet(n, 3, seed + 7919, with_A=True, with_q=False)
                with_a = base.with_fields(A=twin.A)
                va = heat_coefficients(with_a, kcap)
                vb = heat_coefficients(base, kcap)
                equal = all(va[k] == vb[k] for k in range(kcap + 1))
                ok = ok and equal
                a_independence.append(
                    {"n": n, "seed": seed, "k_max": kcap, "equal": equal}
                )
            if n >= 3:
                seed = seeds[0]
                delta = Fraction(3, 7)
                jet = random_jet(n, 3, seed, with_A=True, with_q=True)
                a2 = heat_coefficient(jet, 2)
                a2s = heat_coefficient(_q_shifted(jet, delta), 2)
                got = a2s.rational() - a2.rational()
                want = GQ(-delta / 2) * GQ(factorial(n - 3)) if n >= 3 else GQ(0)
                equal = got == want
                ok = ok and equal
                q_coupling.append(
                    {
                        "n": n,
                        "seed": seed,
                        "delta": str(delta),
                        "observed_shift": str(got),
                        "expected_shift": str(want),
                        "equal": equal,
                    }
                )
    return {
        "runs": runs,
        "a_independence": a_independence,
        "q_coupling": q_coupling,
        "summary": {
            "total_runs": len(runs) + len(a_independence) + len(q_coupling),
            "failures": sum(not r["equal"] for r in runs)
            + sum(not r["equal"] for r in a_independence)
            + sum(not r["equal"] for r in q_coupling),
            "all_equal": ok,
        },
    }
