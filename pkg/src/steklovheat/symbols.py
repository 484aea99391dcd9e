"""Exact algebra of parameter-dependent boundary symbols.

A symbol is a canonical sum of terms

    coeff_jet(x) * xi^beta * w1^eps * Q^-m * s^p

where Q(x, xi) = sum g^{ab}(x) xi_a xi_b, w1 = sqrt(Q) = |xi'| (eps in
{0, 1}: even w1-powers fold into Q-powers, positive Q-powers expand into
xi-monomials), and s = (w1 - tau)^{-1} carries all tau dependence.  The
parametric degree of a term counts tau as degree one:

    deg = |beta| + eps - 2m - p.

Derivatives follow the chain rules d_xi Q = 2 sum g^{ab} xi_b,
d_x Q = sum (d g^{ab}) xi_a xi_b, d w1 = (1/2) w1 Q^{-1} dQ,
d s = -s^2 dw1; everything stays inside the term algebra, the only
divisions ever needed are by 2 w1 and by (w1 - tau).

Validity bookkeeping: besides each coefficient jet's own order, a symbol
carries `cap`, the Taylor order to which the symbol as a whole is honest.
Caps propagate as the minimum through sums and products and drop by one per
x-derivative.  Individual stored coefficients above the cap may be ragged
(cancellation against an exhausted jet can silently drop siblings), so all
semantic operations -- zero tests, equality, evaluation, dumps -- truncate
to the cap first.
"""

from __future__ import annotations

from fractions import Fraction

from .geometry import GeometryJet, inverse_tangential_metric
from .jets import Jet, JetOrderError
from .scalars import GQ

HALF = GQ(Fraction(1, 2))
MINUS_I_POWERS = (GQ(1), GQ(0, -1), GQ(-1), GQ(0, 1))  # (-i)^j cycle
UNCAPPED = 1 << 30


def term_degree(key) -> int:
    beta, eps, m, p = key
    return sum(beta) + eps - 2 * m - p


class SymbolContext:
    """Shared geometric data: jets of the inverse tangential metric and its
    derivatives, pre-expanded Q and dQ term lists."""

    def __init__(self, jet: GeometryJet):
        self.jet = jet
        self.n = jet.n
        self.m = jet.n - 1
        self.order = jet.jet_order
        self.ginv = inverse_tangential_metric(jet)
        self._xi_lin = {}
        self._q_terms = None
        self._dq_terms = {}

    def xi_lin(self, alpha: int):
        """sum_g g^{alpha g} xi_g as [(gamma, jet)] with zero jets dropped."""
        got = self._xi_lin.get(alpha)
        if got is None:
            got = []
            for gamma in range(self.m):
                gj = self.ginv[(alpha, gamma)]
                if not gj.is_zero():
                    got.append((gamma, gj))
            self._xi_lin[alpha] = got
        return got

    def q_terms(self):
        """Q as [(beta, jet)]: g^{aa} xi_a^2 and 2 g^{ab} xi_a xi_b."""
        if self._q_terms is None:
            out = []
            for a in range(self.m):
                for b in range(a, self.m):
                    gj = self.ginv[(a, b)]
                    if gj.is_zero():
                        continue
                    beta = [0] * self.m
                    beta[a] += 1
                    beta[b] += 1
                    out.append((tuple(beta), gj if a == b else 2 * gj))
            self._q_terms = out
        return self._q_terms

    def dq_terms(self, i: int):
        """d_i Q as [(beta, jet)] (jets one order shallower)."""
        got = self._dq_terms.get(i)
        if got is None:
            got = []
            for a in range(self.m):
                for b in range(a, self.m):
                    gj = self.ginv[(a, b)]
                    if gj.is_zero():
                        continue
                    dj = gj.diff(i)
                    if dj.is_zero():
                        continue
                    beta = [0] * self.m
                    beta[a] += 1
                    beta[b] += 1
                    got.append((tuple(beta), dj if a == b else 2 * dj))
            self._dq_terms[i] = got
        return got


class Symbol:
    """Canonical term multiset; treat instances as immutable."""

    __slots__ = ("ctx", "terms", "cap", "_dxi", "_dx")

    def __init__(self, ctx: SymbolContext, terms=None, cap=None):
        self.ctx = ctx
        self.terms = terms if terms is not None else {}
        if cap is None:
            cap = min((j.order for j in self.terms.values()), default=UNCAPPED)
        self.cap = cap
        self._dxi = None
        self._dx = None

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {}, UNCAPPED)

    @classmethod
    def from_jet(cls, ctx, jet: Jet):
        if jet.is_zero():
            return cls(ctx, {}, jet.order)
        key = ((0,) * ctx.m, 0, 0, 0)
        return cls(ctx, {key: jet}, jet.order)

    @classmethod
    def from_scalar(cls, ctx, value, order=None):
        order = ctx.order if order is None else order
        return cls.from_jet(ctx, Jet.constant(ctx.n, order, value))

    @classmethod
    def w1(cls, ctx):
        key = ((0,) * ctx.m, 1, 0, 0)
        return cls(ctx, {key: Jet.constant(ctx.n, ctx.order, 1)}, ctx.order)

    @classmethod
    def s_inv1(cls, ctx):
        """The resolvent atom s = (w1 - tau)^{-1}."""
        key = ((0,) * ctx.m, 0, 0, 1)
        return cls(ctx, {key: Jet.constant(ctx.n, ctx.order, 1)}, ctx.order)

    # bookkeeping -------------------------------------------------------------

    def is_zero(self) -> bool:
        """Exact zero test at the symbol's honest validity.

        Term keys are canonical only up to the relation w1^2 = Q: an expanded
        positive Q-power meeting a Q^-m factor yields a different (equally
        valid) representation of the same symbol.  Zero is decided by
        clearing Q denominators within each (eps, s-power) class --
        multiplication by Q^m is injective because the x-constant part of Q
        is the nondegenerate form |xi|^2.
        """
        if not self.terms:
            return True
        if self.cap < 0:
            raise JetOrderError("zero test on a symbol with exhausted validity")
        groups = {}
        for (beta, eps, m, p), jet in self.terms.items():
            groups.setdefault((eps, p), []).append((beta, m, jet))
        for items in groups.values():
            m_max = max(m for _, m, _ in items)
            poly = {}
            for beta, m, jet in items:
                expanded = {beta: jet.truncate(self.cap)}
                for _ in range(m_max - m):
                    nxt = {}
                    for b2, j2 in expanded.items():
                        for qb, qj in self.ctx.q_terms():
                            nb = tuple(map(int.__add__, b2, qb))
                            prod = j2 * qj
                            cur = nxt.get(nb)
                            nxt[nb] = prod if cur is None else cur + prod
                    expanded = nxt
                for b2, j2 in expanded.items():
                    cur = poly.get(b2)
                    poly[b2] = j2 if cur is None else cur + j2
            for j2 in poly.values():
                if not j2.truncate(self.cap).is_zero():
                    return False
        return True

    def degrees(self):
        return sorted({term_degree(k) for k in self.terms})

    def top_degree(self):
        return max((term_degree(k) for k in self.terms), default=None)

    def homogeneous_part(self, d: int) -> "Symbol":
        return Symbol(
            self.ctx,
            {k: v for k, v in self.terms.items() if term_degree(k) == d},
            self.cap,
        )

    def truncate_below(self, lowest: int) -> "Symbol":
        return Symbol(
            self.ctx,
            {k: v for k, v in self.terms.items() if term_degree(k) >= lowest},
            self.cap,
        )

    def eval_x0(self) -> "Symbol":
        """Freeze coefficients at the base point (metric there is the
        identity, so Q means |xi|^2 downstream).  The result must not be
        differentiated in x."""
        if self.cap < 0:
            raise JetOrderError("evaluating a symbol with exhausted validity")
        out = {}
        for key, jet in self.terms.items():
            c = jet.eval0()
            if not c.is_zero():
                out[key] = Jet.constant(self.ctx.n, 0, c)
        return Symbol(self.ctx, out, 0)

    # arithmetic ---------------------------------------------------------------

    def _add_term(self, out: dict, key, jet: Jet):
        if jet.is_zero():
            return
        cur = out.get(key)
        if cur is None:
            out[key] = jet
        else:
            s = cur + jet
            if s.is_zero():
                del out[key]
            else:
                out[key] = s

    def __add__(self, other: "Symbol") -> "Symbol":
        self._check(other)
        out = dict(self.terms)
        for key, jet in other.terms.items():
            self._add_term(out, key, jet)
        return Symbol(self.ctx, out, min(self.cap, other.cap))

    def __sub__(self, other: "Symbol") -> "Symbol":
        return self + (-other)

    def __neg__(self) -> "Symbol":
        return Symbol(self.ctx, {k: -v for k, v in self.terms.items()}, self.cap)

    def scale(self, c) -> "Symbol":
        c = c if isinstance(c, GQ) else GQ(c)
        if c.is_zero():
            return Symbol(self.ctx, {}, self.cap)
        return Symbol(
            self.ctx, {k: v.scale(c) for k, v in self.terms.items()}, self.cap
        )

    def mul_jet(self, jet: Jet) -> "Symbol":
        out = {}
        for key, c in self.terms.items():
            self._add_term(out, key, c * jet)
        return Symbol(self.ctx, out, min(self.cap, jet.order))

    def _emit_product(self, out, beta, eps_sum, m, p, jet):
        """Fold w1^eps_sum (eps_sum <= 2) into canonical form."""
        if eps_sum <= 1:
            self._add_term(out, (beta, eps_sum, m, p), jet)
        elif m >= 1:
            self._add_term(out, (beta, 0, m - 1, p), jet)
        else:
            for qbeta, qjet in self.ctx.q_terms():
                nb = tuple(map(int.__add__, beta, qbeta))
                self._add_term(out, (nb, 0, 0, p), jet * qjet)

    def __mul__(self, other: "Symbol") -> "Symbol":
        self._check(other)
        out = {}
        for (b1, e1, m1, p1), c1 in self.terms.items():
            for (b2, e2, m2, p2), c2 in other.terms.items():
                beta = tuple(map(int.__add__, b1, b2))
                self._emit_product(
                    out, beta, e1 + e2, m1 + m2, p1 + p2, c1 * c2
                )
        return Symbol(self.ctx, out, min(self.cap, other.cap))

    def mul_w1(self) -> "Symbol":
        out = {}
        for (beta, eps, m, p), c in self.terms.items():
            self._emit_product(out, beta, eps + 1, m, p, c)
        return Symbol(self.ctx, out, self.cap)

    def mul_w1_inv(self) -> "Symbol":
        """Multiply by w1^{-1} = w1 * Q^{-1}."""
        out = {}
        for (beta, eps, m, p), c in self.terms.items():
            if eps == 1:
                self._add_term(out, (beta, 0, m, p), c)
            else:
                self._add_term(out, (beta, 1, m + 1, p), c)
        return Symbol(self.ctx, out, self.cap)

    def mul_s(self) -> "Symbol":
        """Multiply by the resolvent factor s = (w1 - tau)^{-1}."""
        return Symbol(
            self.ctx,
            {(b, e, m, p + 1): c for (b, e, m, p), c in self.terms.items()},
            self.cap,
        )

    def mul_tau(self) -> "Symbol":
        """Multiply by tau = w1 - s^{-1} (every term must carry s-powers)."""
        out = {}
        for (beta, eps, m, p), c in self.terms.items():
            if p < 1:
                raise ValueError("mul_tau on a term without resolvent factor")
            self._emit_product(out, beta, eps + 1, m, p, c)
            self._add_term(out, (beta, eps, m, p - 1), -c)
        return Symbol(self.ctx, out, self.cap)

    # derivatives ---------------------------------------------------------------

    def diff_xi(self, alpha: int) -> "Symbol":
        ctx = self.ctx
        out = {}
        for (beta, eps, m, p), c in self.terms.items():
            e_a = beta[alpha]
            if e_a:
                nb = beta[:alpha] + (e_a - 1,) + beta[alpha + 1 :]
                self._add_term(out, (nb, eps, m, p), c * GQ(e_a))
            if eps == 0 and m == 0 and p == 0:
                continue
            lin = ctx.xi_lin(alpha)
            if eps == 1:
                for gamma, gj in lin:
                    nb = beta[:gamma] + (beta[gamma] + 1,) + beta[gamma + 1 :]
                    self._add_term(out, (nb, 1, m + 1, p), c * gj)
            if m:
                c2 = c.scale(GQ(-2 * m))
                for gamma, gj in lin:
                    nb = beta[:gamma] + (beta[gamma] + 1,) + beta[gamma + 1 :]
                    self._add_term(out, (nb, eps, m + 1, p), c2 * gj)
            if p:
                c3 = c.scale(GQ(-p))
                for gamma, gj in lin:
                    nb = beta[:gamma] + (beta[gamma] + 1,) + beta[gamma + 1 :]
                    if eps == 0:
                        self._add_term(out, (nb, 1, m + 1, p + 1), c3 * gj)
                    else:
                        self._add_term(out, (nb, 0, m, p + 1), c3 * gj)
        return Symbol(ctx, out, self.cap)

    def diff_x(self, i: int) -> "Symbol":
        if self.cap < 1 and self.terms:
            raise JetOrderError("x-derivative exceeds the symbol's validity")
        ctx = self.ctx
        out = {}
        for (beta, eps, m, p), c in self.terms.items():
            dc = c.diff(i)
            if not dc.is_zero():
                self._add_term(out, (beta, eps, m, p), dc)
            if eps == 0 and m == 0 and p == 0:
                continue
            dq = ctx.dq_terms(i)
            if not dq:
                continue
            if eps == 1:
                ch = c.scale(HALF)
                for qbeta, dqj in dq:
                    nb = tuple(map(int.__add__, beta, qbeta))
                    self._add_term(out, (nb, 1, m + 1, p), ch * dqj)
            if m:
                cm = c.scale(GQ(-m))
                for qbeta, dqj in dq:
                    nb = tuple(map(int.__add__, beta, qbeta))
                    self._add_term(out, (nb, eps, m + 1, p), cm * dqj)
            if p:
                cp = c.scale(GQ(Fraction(-p, 2)))
                for qbeta, dqj in dq:
                    nb = tuple(map(int.__add__, beta, qbeta))
                    if eps == 0:
                        self._add_term(out, (nb, 1, m + 1, p + 1), cp * dqj)
                    else:
                        self._add_term(out, (nb, 0, m, p + 1), cp * dqj)
        return Symbol(ctx, out, self.cap - 1 if self.terms else self.cap)

    def dxi_multi(self, J) -> "Symbol":
        if not any(J):
            return self
        if self._dxi is None:
            self._dxi = {}
        got = self._dxi.get(J)
        if got is None:
            idx = next(i for i, e in enumerate(J) if e)
            parent = J[:idx] + (J[idx] - 1,) + J[idx + 1 :]
            got = self.dxi_multi(parent).diff_xi(idx)
            self._dxi[J] = got
        return got

    def dx_multi(self, J) -> "Symbol":
        if not any(J):
            return self
        if self._dx is None:
            self._dx = {}
        got = self._dx.get(J)
        if got is None:
            idx = next(i for i, e in enumerate(J) if e)
            parent = J[:idx] + (J[idx] - 1,) + J[idx + 1 :]
            got = self.dx_multi(parent).diff_x(idx)
            self._dx[J] = got
        return got

    # misc ------------------------------------------------------------------------

    def _check(self, other: "Symbol"):
        if self.ctx is not other.ctx:
            raise ValueError("symbols from different contexts")

    def __eq__(self, other):
        if not isinstance(other, Symbol):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("Symbol is not hashable")

    def dump_lines(self):
        """Stable text rendering at the honest validity, one term per line."""
        lines = []
        for key in sorted(
            self.terms, key=lambda k: (-term_degree(k), k[0], k[1], k[2], k[3])
        ):
            beta, eps, m, p = key
            jet = self.terms[key].truncate(min(self.cap, self.terms[key].order))
            if jet.is_zero():
                continue
            piece = [f"({jet.dump()})"]
            if any(beta):
                piece.append("xi^" + ",".join(str(b) for b in beta))
            if eps:
                piece.append("w1")
            if m:
                piece.append(f"Q^-{m}")
            if p:
                piece.append(f"s^{p}")
            lines.append(" * ".join(piece))
        return lines if lines else ["0"]

    def __repr__(self):
        return "Symbol[\n  " + "\n  ".join(self.dump_lines()) + "\n]"


def normalize(ctx: SymbolContext, raw_terms) -> Symbol:
    """Canonicalize raw terms (coeff, beta, w1_power, s_power).

    coeff may be a Jet, GQ, Fraction or int; w1_power is any integer (even
    powers fold into Q, positive Q-powers expand into xi-monomials).
    """
    acc = Symbol.zero(ctx)
    for coeff, beta, w_pow, s_pow in raw_terms:
        jet = coeff if isinstance(coeff, Jet) else Jet.constant(ctx.n, ctx.order, coeff)
        beta = tuple(beta)
        eps = w_pow & 1
        sym = Symbol(ctx, {(beta, eps, 0, s_pow): jet} if not jet.is_zero() else {}, jet.order)
        if w_pow >= 0:
            for _ in range(w_pow // 2):
                out = {}
                for (kb, ke, km, kp), c in sym.terms.items():
                    for qbeta, qjet in ctx.q_terms():
                        nb = tuple(map(int.__add__, kb, qbeta))
                        sym._add_term(out, (nb, ke, km, kp), c * qjet)
                sym = Symbol(ctx, out, sym.cap)
        else:
            mshift = (eps - w_pow) // 2
            sym = Symbol(
                ctx,
                {
                    (kb, ke, km + mshift, kp): c
                    for (kb, ke, km, kp), c in sym.terms.items()
                },
                sym.cap,
            )
        acc = acc + sym
    return acc


def multi_indices(nvars: int, total: int):
    """All exponent tuples over nvars variables with the given total."""
    if nvars == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in multi_indices(nvars - 1, total - head):
            yield (head,) + rest


def factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _j_scalar(J) -> GQ:
    """(-i)^{|J|} / J!"""
    jlen = sum(J)
    denom = 1
    for e in J:
        denom *= factorial(e)
    return MINUS_I_POWERS[jlen % 4] / GQ(denom)


def compose_part(f_ladder, g_ladder, target: int) -> Symbol:
    """Degree-`target` part of sum_J ((-i)^{|J|}/J!) dxi^J f dx^J g for
    graded symbol ladders (dicts degree -> homogeneous Symbol)."""
    if not f_ladder:
        raise ValueError("empty symbol ladder")
    ctx = next(iter(f_ladder.values())).ctx
    acc = Symbol.zero(ctx)
    for j, fj in f_ladder.items():
        if not fj.terms:
            continue
        for k, gk in g_ladder.items():
            if not gk.terms:
                continue
            jlen = j + k - target
            if jlen < 0:
                continue
            for J in multi_indices(ctx.m, jlen):
                left = fj.dxi_multi(J)
                if not left.terms:
                    continue
                right = gk.dx_multi(J)
                if not right.terms:
                    continue
                acc = acc + (left * right).scale(_j_scalar(J))
    return acc


def compose(f: Symbol, g: Symbol, lowest_degree: int) -> Symbol:
    """Full symbol of the operator product, truncated to parametric degree
    >= lowest_degree."""
    if not f.terms or not g.terms:
        return Symbol.zero(f.ctx)
    ctx = f.ctx
    top = f.top_degree() + g.top_degree()
    acc = Symbol.zero(ctx)
    for jlen in range(0, top - lowest_degree + 1):
        for J in multi_indices(ctx.m, jlen):
            left = f.dxi_multi(J)
            if not left.terms:
                continue
            right = g.dx_multi(J)
            if not right.terms:
                continue
            acc = acc + (left * right).scale(_j_scalar(J))
    return acc.truncate_below(lowest_degree)
