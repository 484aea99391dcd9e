"""Operator symbols, the factorization ladder for the outgoing first-order
factor, the Dirichlet-to-Neumann full symbol, and the resolvent parametrix
ladder.

The second-order operator splits as d^2/dx_n^2 + B d/dx_n + C with

    b  = (1/2) sum g^{ab} d_n g_ab + 2 i A_n
    c2 = -Q
    c1 = i sum_b [ sum_a ((1/2) g^{ab} tr(g^-1 d_a g) + d_a g^{ab}) ] xi_b
         - 2 sum_a A_a xi_a
    c0 = -V,   V = |A|^2 - i div A + q - k^2

(the first-order tangential symbol is rederived from the Laplace-Beltrami
expansion in divergence form; the factorization residual test adjudicates
the transcription).  The ladder entries solve the full symbol equation

    sum_J ((-i)^{|J|}/J!) dxi^J w dx^J w - b w - d_n w + c = 0

degree by degree; the displayed closed forms for the first entries are kept
as independent cross-check routes (w0_closed_form etc.), never as the
production path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import GeometryJet
from .jets import Jet
from .scalars import GQ
from .symbols import Symbol, SymbolContext, compose_part, multi_indices

I = GQ(0, 1)
HALF = GQ(Fraction(1, 2))


@dataclass
class OperatorSymbols:
    """Full symbols of the normal/tangential split of the operator."""

    ctx: SymbolContext
    b: Symbol
    c2: Symbol
    c1: Symbol
    c0: Symbol
    a_n: Jet

    def c_part(self, degree: int) -> Symbol:
        if degree == 2:
            return self.c2
        if degree == 1:
            return self.c1
        if degree == 0:
            return self.c0
        return Symbol.zero(self.ctx)


@dataclass
class SymbolLadder:
    """Homogeneous symbol per parametric degree, contiguous from the top."""

    entries: dict = field(default_factory=dict)

    def __getitem__(self, degree: int) -> Symbol:
        return self.entries[degree]

    def __contains__(self, degree: int) -> bool:
        return degree in self.entries

    def degrees(self):
        return sorted(self.entries, reverse=True)

    def bottom(self) -> int:
        return min(self.entries)

    def dump_lines(self):
        lines = []
        for d in self.degrees():
            lines.append(f"degree {d}:")
            lines.extend("  " + s for s in self.entries[d].dump_lines())
        return lines


def _metric_trace_jet(jet: GeometryJet, ctx: SymbolContext, i: int) -> Jet:
    """tr(g^{-1} d_i g) = sum_{a,b} g^{ab} d_i g_ab (tangential block only;
    the normal block is constant)."""
    n = jet.n
    acc = Jet.zero(n, jet.jet_order - 1)
    for a in range(n - 1):
        for b in range(n - 1):
            gab = ctx.ginv[(a, b)]
            dg = jet.g_jet(a, b).diff(i)
            if gab.is_zero() or dg.is_zero():
                continue
            acc = acc + gab * dg
    return acc


def operator_symbols(jet: GeometryJet) -> OperatorSymbols:
    ctx = SymbolContext(jet)
    n = jet.n
    m = n - 1
    nrm = n - 1  # index of the normal variable

    a_n = jet.A[nrm]

    b_jet = _metric_trace_jet(jet, ctx, nrm).scale(HALF)
    if not a_n.is_zero():
        b_jet = b_jet + a_n.scale(2 * I)
    b = Symbol.from_jet(ctx, b_jet)

    c2 = Symbol(
        ctx,
        {
            (beta, 0, 0, 0): -qjet
            for beta, qjet in ctx.q_terms()
        },
    )

    c1_terms = {}
    c1 = Symbol(ctx)
    for bidx in range(m):
        coeff = Jet.zero(n, jet.jet_order - 1)
        for a in range(m):
            gab = ctx.ginv[(a, bidx)]
            if not gab.is_zero():
                coeff = coeff + (gab * _metric_trace_jet(jet, ctx, a)).scale(HALF)
            coeff = coeff + ctx.ginv[(a, bidx)].diff(a)
        coeff = coeff.scale(I)
        if not jet.A[bidx].is_zero():
            coeff = coeff + jet.A[bidx].scale(GQ(-2))
        if not coeff.is_zero():
            beta = tuple(1 if t == bidx else 0 for t in range(m))
            c1._add_term(c1_terms, (beta, 0, 0, 0), coeff)
    c1 = Symbol(ctx, c1_terms)

    c0 = Symbol.from_jet(ctx, _potential_jet(jet, ctx).scale(GQ(-1)))
    return OperatorSymbols(ctx, b, c2, c1, c0, a_n)


def _potential_jet(jet: GeometryJet, ctx: SymbolContext) -> Jet:
    """V = sum g_jk A_j A_k - i (sum_j d_j A_j + (1/2) sum_l tr(g^-1 d_l g) A_l)
    + q - k^2, assembled on the block metric (g_nj = delta_nj)."""
    n = jet.n
    nrm = n - 1
    acc = Jet.constant(n, jet.jet_order, GQ(-(jet.k**2)))
    acc = acc + jet.q
    have_a = any(not aj.is_zero() for aj in jet.A)
    if have_a:
        a_order = min(a.order for a in jet.A)
        quad = Jet.zero(n, a_order)
        for a in range(n - 1):
            for bidx in range(n - 1):
                gab = jet.g_jet(a, bidx)
                if gab.is_zero() or jet.A[a].is_zero() or jet.A[bidx].is_zero():
                    continue
                quad = quad + gab * jet.A[a] * jet.A[bidx]
        if not jet.A[nrm].is_zero():
            quad = quad + jet.A[nrm] * jet.A[nrm]
        div = Jet.zero(n, max(a_order - 1, 0))
        for j in range(n):
            if not jet.A[j].is_zero():
                div = div + jet.A[j].diff(j)
                tr = _metric_trace_jet(jet, ctx, j)
                if not tr.is_zero():
                    div = div + (tr * jet.A[j]).scale(HALF)
        acc = acc + quad + div.scale(-I)
    return acc


def w_recursion(ops: OperatorSymbols, depth: int) -> SymbolLadder:
    """Solve the full symbol equation degree by degree.

    Entries at parametric degrees 1, 0, ..., 2-depth; the degree-(e+1) slice
    of the equation determines the entry of degree e via division by 2 w1.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    ctx = ops.ctx
    ladder = SymbolLadder({1: Symbol.w1(ctx)})
    for entry_degree in range(0, 1 - depth, -1):
        eq_degree = entry_degree + 1
        residual = compose_part(ladder.entries, ladder.entries, eq_degree)
        if eq_degree in ladder:
            w_eq = ladder[eq_degree]
            residual = residual - (ops.b * w_eq) - w_eq.diff_x(ctx.n - 1)
        residual = residual + ops.c_part(eq_degree)
        ladder.entries[entry_degree] = residual.mul_w1_inv().scale(GQ(Fraction(-1, 2)))
    return ladder


def factorization_residual(ops: OperatorSymbols, ladder: SymbolLadder) -> Symbol:
    """Left-hand side of the full symbol equation over all degrees the ladder
    can certify (2 down to bottom+1); exact zero iff the ladder solves it."""
    ctx = ops.ctx
    acc = Symbol.zero(ctx)
    for degree in range(2, ladder.bottom(), -1):
        part = compose_part(ladder.entries, ladder.entries, degree)
        if degree in ladder:
            w_d = ladder[degree]
            part = part - (ops.b * w_d) - w_d.diff_x(ctx.n - 1)
        part = part + ops.c_part(degree)
        acc = acc + part
    return acc


def dtn_full_symbol(ops: OperatorSymbols, ladder: SymbolLadder) -> SymbolLadder:
    """sigma(M) = w1 + (w0 - i A_n) + sum_{j <= -1} w_j."""
    out = {}
    for degree, sym in ladder.entries.items():
        if degree == 0:
            sym = sym - Symbol.from_jet(ops.ctx, ops.a_n.scale(I))
        out[degree] = sym
    return SymbolLadder(out)


def resolvent_symbols(dtn: SymbolLadder, depth: int) -> SymbolLadder:
    """Parametrix ladder: s_{-1} = (w1 - tau)^{-1}, then degree by degree

        s_{-1-m} = -s_{-1} * [degree -m part of sigma(M) o s].
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    ctx = dtn[1].ctx
    ladder = SymbolLadder({-1: Symbol.s_inv1(ctx)})
    for m in range(1, depth):
        part = compose_part(dtn.entries, ladder.entries, -m)
        ladder.entries[-1 - m] = part.mul_s().scale(GQ(-1))
    return ladder


def parametrix_residual(dtn: SymbolLadder, s_ladder: SymbolLadder) -> Symbol:
    """compose(sigma(M) - tau, s) - 1, over certifiable degrees (0 down to
    bottom+1).  Exact zero iff s is a parametrix to the computed depth."""
    ctx = dtn[1].ctx
    acc = Symbol.zero(ctx)
    one = Symbol.from_scalar(ctx, 1)
    for degree in range(0, s_ladder.bottom(), -1):
        part = compose_part(dtn.entries, s_ladder.entries, degree)
        if degree - 1 in s_ladder:
            part = part - s_ladder[degree - 1].mul_tau()
        if degree == 0:
            part = part - one
        acc = acc + part
    return acc


# ---------------------------------------------------------------------------
# Displayed closed forms (independent cross-check routes for the recursions)


def _sum_xi_x(f: Symbol, g: Symbol) -> Symbol:
    """sum_a dxi_a f * dx_a g."""
    ctx = f.ctx
    acc = Symbol.zero(ctx)
    for a in range(ctx.m):
        left = f.diff_xi(a)
        if not left.terms:
            continue
        right = g.diff_x(a)
        if not right.terms:
            continue
        acc = acc + left * right
    return acc


def _sum_xi2_x2(f: Symbol, g: Symbol) -> Symbol:
    """sum_{a,b} dxi_a dxi_b f * dx_a dx_b g (ordered sum)."""
    ctx = f.ctx
    acc = Symbol.zero(ctx)
    for a in range(ctx.m):
        fa = f.diff_xi(a)
        if not fa.terms:
            continue
        for b in range(ctx.m):
            left = fa.diff_xi(b)
            if not left.terms:
                continue
            right = g.diff_x(a).diff_x(b)
            if not right.terms:
                continue
            acc = acc + left * right
    return acc


def _sum_xi3_x3(f: Symbol, g: Symbol) -> Symbol:
    """sum_{a,b,c} dxi^3 f * dx^3 g (ordered sum)."""
    ctx = f.ctx
    acc = Symbol.zero(ctx)
    for a in range(ctx.m):
        fa = f.diff_xi(a)
        if not fa.terms:
            continue
        for b in range(ctx.m):
            fab = fa.diff_xi(b)
            if not fab.terms:
                continue
            for c in range(ctx.m):
                left = fab.diff_xi(c)
                if not left.terms:
                    continue
                right = g.dx_multi(_bump(ctx.m, a, b, c))
                if not right.terms:
                    continue
                acc = acc + left * right
    return acc


def _bump(m, *idxs):
    J = [0] * m
    for i in idxs:
        J[i] += 1
    return tuple(J)


def w0_closed_form(ops: OperatorSymbols, ladder: SymbolLadder) -> Symbol:
    """(1/2) w1^{-1} (i sum dxi w1 dx w1 + b w1 + dn w1 - c1)."""
    ctx = ops.ctx
    w1 = ladder[1]
    inner = (
        _sum_xi_x(w1, w1).scale(I)
        + ops.b * w1
        + w1.diff_x(ctx.n - 1)
        - ops.c1
    )
    return inner.mul_w1_inv().scale(HALF)


def w_minus1_closed_form(ops: OperatorSymbols, ladder: SymbolLadder) -> Symbol:
    ctx = ops.ctx
    w1, w0 = ladder[1], ladder[0]
    inner = (
        -(w0 * w0)
        + (_sum_xi_x(w1, w0) + _sum_xi_x(w0, w1)).scale(I)
        + _sum_xi2_x2(w1, w1).scale(HALF)
        + ops.b * w0
        + w0.diff_x(ctx.n - 1)
        - ops.c0
    )
    return inner.mul_w1_inv().scale(HALF)


def w_minus2_closed_form(ops: OperatorSymbols, ladder: SymbolLadder) -> Symbol:
    ctx = ops.ctx
    w1, w0, wm1 = ladder[1], ladder[0], ladder[-1]
    inner = (
        (w0 * wm1).scale(GQ(-2))
        + (_sum_xi_x(w1, wm1) + _sum_xi_x(w0, w0) + _sum_xi_x(wm1, w1)).scale(I)
        + (_sum_xi2_x2(w1, w0) + _sum_xi2_x2(w0, w1)).scale(HALF)
        - _sum_xi3_x3(w1, w1).scale(I / GQ(6))
        + ops.b * wm1
        + wm1.diff_x(ctx.n - 1)
    )
    return inner.mul_w1_inv().scale(HALF)


def s_minus2_closed_form(dtn: SymbolLadder, s: SymbolLadder) -> Symbol:
    sigma0 = dtn[0]
    s1 = s[-1]
    inner = sigma0 * s1 - _sum_xi_x(dtn[1], s1).scale(I)
    return inner.mul_s().scale(GQ(-1))


def s_minus3_closed_form(dtn: SymbolLadder, s: SymbolLadder) -> Symbol:
    sigma1, sigma0, sigmam1 = dtn[1], dtn[0], dtn[-1]
    s1, s2 = s[-1], s[-2]
    inner = (
        sigma0 * s2
        + sigmam1 * s1
        - (_sum_xi_x(sigma1, s2) + _sum_xi_x(sigma0, s1)).scale(I)
        - _sum_xi2_x2(sigma1, s1).scale(HALF)
    )
    return inner.mul_s().scale(GQ(-1))


def s_minus4_closed_form(dtn: SymbolLadder, s: SymbolLadder) -> Symbol:
    sigma1, sigma0, sigmam1, sigmam2 = dtn[1], dtn[0], dtn[-1], dtn[-2]
    s1, s2, s3 = s[-1], s[-2], s[-3]
    inner = (
        sigma0 * s3
        + sigmam1 * s2
        + sigmam2 * s1
        - (
            _sum_xi_x(sigma1, s3)
            + _sum_xi_x(sigma0, s2)
            + _sum_xi_x(sigmam1, s1)
        ).scale(I)
        - (_sum_xi2_x2(sigma1, s2) + _sum_xi2_x2(sigma0, s1)).scale(HALF)
        + _sum_xi3_x3(sigma1, s1).scale(I / GQ(6))
    )
    return inner.mul_s().scale(GQ(-1))
