"""Boundary-point geometry: truncated Taylor data of (g, A, q, k) and the
curvature invariants extracted from it.

Coordinates are boundary normal coordinates: x_1..x_{n-1} tangential, x_n the
distance to the boundary, metric block form g = sum g_ab dx_a dx_b + dx_n^2.
At the base point the metric is the identity, all first tangential
derivatives of g vanish, and d(g_ab)/dx_n = -2 kappa_a delta_ab for the
(diagonalized) principal curvatures kappa.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .jets import Jet, JetOrderError, invert_unit_matrix_of_jets
from .scalars import GQ, scalar_from_json, scalar_to_json


@dataclass(frozen=True)
class CurvatureInvariants:
    """Exact values at the base point of everything the coefficient tables use.

    Tilde quantities are ambient (dimension n); plain R / R_diag refer to the
    boundary (the x_n = 0 slice, dimension n-1).
    """

    n: int
    kappa: tuple
    H: Fraction
    sum_kappa2: Fraction
    sum_kappa3: Fraction
    R_boundary: Fraction
    R_tilde: Fraction
    R_diag: tuple
    R_tilde_diag: tuple
    R_tilde_nn: Fraction
    nabla_n_R_tilde_nn: Fraction
    q0: GQ
    dq_dn: GQ
    k: Fraction


class GeometryJet:
    """Taylor data of the metric, magnetic potential, electric potential and
    the spectral shift constant k at a boundary point.

    g is stored on unordered tangential index pairs (a <= b, 0-based); the
    normal row/column is the identity by construction and never stored.  A is
    stored per component (n entries, order jet_order - 1), q at order
    jet_order - 2: the minimal depths that determine a_0..a_{jet_order}.
    """

    __slots__ = ("n", "jet_order", "kappa", "g", "A", "q", "k")

    def __init__(self, n, jet_order, kappa, g, A=None, q=None, k=Fraction(0)):
        self.n = n
        self.jet_order = jet_order
        self.kappa = tuple(Fraction(x) for x in kappa)
        self.g = g
        a_order = max(jet_order - 1, 0)
        q_order = max(jet_order - 2, 0)
        self.A = A if A is not None else [Jet.zero(n, a_order) for _ in range(n)]
        self.q = q if q is not None else Jet.zero(n, q_order)
        self.k = Fraction(k)

    def g_jet(self, a: int, b: int) -> Jet:
        if a > b:
            a, b = b, a
        return self.g[(a, b)]

    def metric_entry(self, i: int, j: int) -> Jet:
        """Full n x n metric entry, including the structural normal block."""
        nn = self.n - 1
        if i == nn or j == nn:
            val = Fraction(1 if i == j else 0)
            return Jet.constant(self.n, self.jet_order, val)
        return self.g_jet(i, j)

    def with_fields(self, A=None, q=None, k=None) -> "GeometryJet":
        return GeometryJet(
            self.n,
            self.jet_order,
            self.kappa,
            self.g,
            A if A is not None else self.A,
            q if q is not None else self.q,
            self.k if k is None else Fraction(k),
        )

    def __eq__(self, other):
        if not isinstance(other, GeometryJet):
            return NotImplemented
        return (
            self.n == other.n
            and self.jet_order == other.jet_order
            and self.kappa == other.kappa
            and all(self.g[p].coeffs == other.g[p].coeffs for p in self.g)
            and set(self.g) == set(other.g)
            and all(a.coeffs == b.coeffs for a, b in zip(self.A, other.A))
            and self.q.coeffs == other.q.coeffs
            and self.k == other.k
        )


def validate_jet(jet: GeometryJet):
    """Return None when every structural invariant holds, else the first
    violated constraint as a message."""
    n = jet.n
    if n < 2:
        return f"dimension must be >= 2, got {n}"
    if jet.jet_order < 0:
        return f"jet_order must be >= 0, got {jet.jet_order}"
    if len(jet.kappa) != n - 1:
        return f"kappa must have n-1 = {n - 1} entries, got {len(jet.kappa)}"
    zero_key = (0,) * n
    for a in range(n - 1):
        for b in range(a, n - 1):
            if (a, b) not in jet.g:
                return f"missing metric pair ({a + 1},{b + 1})"
            gj = jet.g[(a, b)]
            if gj.n != n:
                return f"g[{a + 1},{b + 1}] has wrong arity"
            c0 = gj.coefficient(zero_key)
            want = GQ(1 if a == b else 0)
            if c0 != want:
                return f"g[{a + 1},{b + 1}](x0) != {'1' if a == b else '0'}"
            for gamma in range(n - 1):
                key = tuple(1 if t == gamma else 0 for t in range(n))
                if jet.jet_order >= 1 and not gj.coefficient(key).is_zero():
                    return (
                        f"tangential derivative d g[{a + 1},{b + 1}]"
                        f"/dx{gamma + 1}(x0) != 0"
                    )
            nkey = tuple(0 if t < n - 1 else 1 for t in range(n))
            if jet.jet_order >= 1:
                cn = gj.coefficient(nkey)
                if a == b:
                    if cn != GQ(-2 * jet.kappa[a]):
                        return (
                            f"normal derivative of g[{a + 1},{a + 1}] "
                            f"inconsistent with kappa[{a + 1}]"
                        )
                elif not cn.is_zero():
                    return "second fundamental form not diagonal"
            for mu, val in gj.coeffs.items():
                if val[1] != 0:
                    return f"g[{a + 1},{b + 1}] has a non-real coefficient"
    if len(jet.A) != n:
        return f"A must have {n} components"
    return None


def _tangential_metric(jet: GeometryJet) -> dict:
    return {
        (a, b): jet.g_jet(a, b)
        for a in range(jet.n - 1)
        for b in range(jet.n - 1)
    }


def inverse_tangential_metric(jet: GeometryJet) -> dict:
    """Jets of g^{ab} on the tangential block (exact to jet_order)."""
    return invert_unit_matrix_of_jets(
        _tangential_metric(jet), jet.n - 1, jet.n, jet.jet_order
    )


class _TensorCalc:
    """Exact curvature tensors from a metric jet matrix (any dimension)."""

    def __init__(self, g: dict, ginv: dict, dim: int, nvars: int, order: int):
        self.g = g
        self.ginv = ginv
        self.dim = dim
        self.nvars = nvars
        self.order = order
        self._gamma = {}
        self._riem_up = {}
        self._ricci = {}

    def gamma(self, k: int, i: int, j: int) -> Jet:
        if i > j:
            i, j = j, i
        key = (k, i, j)
        got = self._gamma.get(key)
        if got is not None:
            return got
        acc = Jet.zero(self.nvars, self.order - 1)
        for l in range(self.dim):
            gkl = self.ginv[(k, l)]
            if gkl.is_zero():
                continue
            inner = (
                self.g[(j, l)].diff(i)
                + self.g[(i, l)].diff(j)
                - self.g[(i, j)].diff(l)
            )
            if inner.is_zero():
                continue
            acc = acc + gkl * inner
        out = acc.scale(GQ(Fraction(1, 2)))
        self._gamma[key] = out
        return out

    def riem_up(self, l: int, i: int, j: int, k: int) -> Jet:
        """R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik} + sum_p (
        Gamma^p_{jk} Gamma^l_{ip} - Gamma^p_{ik} Gamma^l_{jp})."""
        if i == j:
            return Jet.zero(self.nvars, self.order - 2)
        key = (l, i, j, k)
        got = self._riem_up.get(key)
        if got is not None:
            return got
        acc = self.gamma(l, j, k).diff(i) - self.gamma(l, i, k).diff(j)
        for p in range(self.dim):
            t1 = self.gamma(p, j, k)
            if not t1.is_zero():
                lip = self.gamma(l, i, p)
                if not lip.is_zero():
                    acc = acc + t1 * lip
            t2 = self.gamma(p, i, k)
            if not t2.is_zero():
                ljp = self.gamma(l, j, p)
                if not ljp.is_zero():
                    acc = acc - t2 * ljp
        self._riem_up[key] = acc
        return acc

    def riem_lower(self, i: int, j: int, k: int, l: int) -> Jet:
        """R_{ijkl} = sum_m g_{lm} R^m_{ijk}."""
        acc = Jet.zero(self.nvars, self.order - 2)
        for m in range(self.dim):
            glm = self.g[(l, m)]
            if glm.is_zero():
                continue
            r = self.riem_up(m, i, j, k)
            if r.is_zero():
                continue
            acc = acc + glm * r
        return acc

    def ricci(self, i: int, j: int) -> Jet:
        """R_{ij} = sum_{k,l} g^{kl} R_{iklj}."""
        key = (i, j)
        got = self._ricci.get(key)
        if got is not None:
            return got
        acc = Jet.zero(self.nvars, self.order - 2)
        for k in range(self.dim):
            for l in range(self.dim):
                gkl = self.ginv[(k, l)]
                if gkl.is_zero():
                    continue
                r = self.riem_lower(i, k, l, j)
                if r.is_zero():
                    continue
                acc = acc + gkl * r
        self._ricci[key] = acc
        return acc

    def scalar0(self) -> Fraction:
        """Scalar curvature at the origin (metric is the identity there)."""
        acc = GQ(0)
        for i in range(self.dim):
            for j in range(self.dim):
                gij0 = self.ginv[(i, j)].eval0()
                if gij0.is_zero():
                    continue
                acc = acc + gij0 * self.ricci(i, j).eval0()
        return acc.as_fraction()


def ambient_calc(jet: GeometryJet) -> _TensorCalc:
    n = jet.n
    g = {(i, j): jet.metric_entry(i, j) for i in range(n) for j in range(n)}
    ginv_t = inverse_tangential_metric(jet)
    ginv = {}
    for i in range(n):
        for j in range(n):
            if i == n - 1 or j == n - 1:
                ginv[(i, j)] = Jet.constant(
                    n, jet.jet_order, Fraction(1 if i == j else 0)
                )
            else:
                ginv[(i, j)] = ginv_t[(i, j)]
    return _TensorCalc(g, ginv, n, n, jet.jet_order)


def boundary_calc(jet: GeometryJet) -> _TensorCalc:
    m = jet.n - 1
    g = {
        (a, b): jet.g_jet(a, b).restrict_last() for a in range(m) for b in range(m)
    }
    ginv = invert_unit_matrix_of_jets(g, m, m, jet.jet_order)
    return _TensorCalc(g, ginv, m, m, jet.jet_order)


def curvature_package(jet: GeometryJet) -> CurvatureInvariants:
    """All curvature invariants at the base point, as exact rationals."""
    bad = validate_jet(jet)
    if bad is not None:
        raise ValueError(f"invalid jet: {bad}")
    if jet.jet_order < 3:
        raise JetOrderError(
            "order too low: curvature_package needs jet_order >= 3 "
            f"(third-order metric data for the normal Ricci derivative), got {jet.jet_order}"
        )
    n = jet.n
    nn = n - 1
    amb = ambient_calc(jet)
    rt_diag = tuple(amb.ricci(a, a).eval0().as_fraction() for a in range(nn))
    rt_nn = amb.ricci(nn, nn).eval0().as_fraction()
    r_tilde = amb.scalar0()
    # covariant derivative along the inward normal; Gamma^l_nn vanishes
    # identically in these coordinates but is kept for fidelity
    nab = amb.ricci(nn, nn).diff(nn)
    cov = nab.eval0()
    for l in range(n):
        gl = amb.gamma(l, nn, nn)
        if gl.is_zero():
            continue
        cov = cov - GQ(2) * gl.eval0() * amb.ricci(l, nn).eval0()
    bnd = boundary_calc(jet)
    r_diag = tuple(bnd.ricci(a, a).eval0().as_fraction() for a in range(nn))
    r_boundary = bnd.scalar0()
    kappa = jet.kappa
    H = sum(kappa, Fraction(0))
    q_jet = jet.q
    dq = (
        q_jet.diff(nn).eval0()
        if q_jet.order >= 1
        else _require_order(jet, "dq/dx_n", 3)
    )
    return CurvatureInvariants(
        n=n,
        kappa=kappa,
        H=H,
        sum_kappa2=sum((x * x for x in kappa), Fraction(0)),
        sum_kappa3=sum((x * x * x for x in kappa), Fraction(0)),
        R_boundary=r_boundary,
        R_tilde=r_tilde,
        R_diag=r_diag,
        R_tilde_diag=rt_diag,
        R_tilde_nn=rt_nn,
        nabla_n_R_tilde_nn=cov.as_fraction(),
        q0=q_jet.eval0(),
        dq_dn=dq,
        k=jet.k,
    )


def _require_order(jet, what, need):
    raise JetOrderError(
        f"order too low: {what} needs jet_order >= {need}, got {jet.jet_order}"
    )


def gauss_check(jet: GeometryJet):
    """Verify the Gauss equation relating boundary and ambient curvature.

    Checks R_aa = Rt_aa - Rt_{naan} + H k_a - k_a^2 for every tangential a
    and the traced identity R = Rt - 2 Rt_nn + H^2 - sum k^2, exactly.
    Returns None on success, else a mismatch description.
    """
    bad = validate_jet(jet)
    if bad is not None:
        raise ValueError(f"invalid jet: {bad}")
    if jet.jet_order < 2:
        raise JetOrderError(
            f"order too low: gauss_check needs jet_order >= 2, got {jet.jet_order}"
        )
    n = jet.n
    nn = n - 1
    amb = ambient_calc(jet)
    bnd = boundary_calc(jet)
    kappa = jet.kappa
    H = sum(kappa, Fraction(0))
    for a in range(nn):
        lhs = bnd.ricci(a, a).eval0().as_fraction()
        r_naan = amb.riem_lower(nn, a, a, nn).eval0().as_fraction()
        rhs = (
            amb.ricci(a, a).eval0().as_fraction()
            - r_naan
            + H * kappa[a]
            - kappa[a] ** 2
        )
        if lhs != rhs:
            return f"Gauss equation fails at alpha={a + 1}: {lhs} != {rhs}"
    lhs = bnd.scalar0()
    rhs = (
        amb.scalar0()
        - 2 * amb.ricci(nn, nn).eval0().as_fraction()
        + H * H
        - sum((x * x for x in kappa), Fraction(0))
    )
    if lhs != rhs:
        return f"traced Gauss equation fails: {lhs} != {rhs}"
    return None


def ball_jet(n: int, r, jet_order: int = 3) -> GeometryJet:
    """Boundary-normal-coordinate jet of the radius-r ball in flat space.

    Realizes g_ab(x) = (1 - x_n/r)^2 * (round sphere metric of radius r in
    normal coordinates), truncated at jet_order.  kappa_a = 1/r, ambient
    curvature vanishes, the boundary is the round sphere.
    """
    r = Fraction(r)
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    if jet_order > 3:
        raise ValueError("ball_jet supports jet_order <= 3")
    m = n - 1
    inv_r = 1 / r
    g = {}
    for a in range(m):
        for b in range(a, m):
            terms = {}

            def put(mu, val):
                if sum(mu) <= jet_order and val != 0:
                    terms[tuple(mu)] = terms.get(tuple(mu), Fraction(0)) + val

            e_n = tuple(0 if t < m else 1 for t in range(n))
            two_n = tuple(0 if t < m else 2 for t in range(n))
            if a == b:
                put((0,) * n, Fraction(1))
                put(e_n, -2 * inv_r)
                put(two_n, inv_r * inv_r)
                for c in range(m):
                    if c == a:
                        continue
                    mu = [0] * n
                    mu[c] = 2
                    put(tuple(mu), Fraction(-1, 3) * inv_r**2)
                    mu[n - 1] = 1
                    put(tuple(mu), Fraction(2, 3) * inv_r**3)
            else:
                mu = [0] * n
                mu[a] = 1
                mu[b] = 1
                put(tuple(mu), Fraction(1, 3) * inv_r**2)
                mu[n - 1] = 1
                put(tuple(mu), Fraction(-2, 3) * inv_r**3)
            g[(a, b)] = Jet.from_terms(n, jet_order, terms.items())
    return GeometryJet(n, jet_order, [inv_r] * m, g)


def flat_jet(n: int, jet_order: int = 3) -> GeometryJet:
    """Flat half-space: identity metric, zero A, q, k."""
    g = {}
    for a in range(n - 1):
        for b in range(a, n - 1):
            g[(a, b)] = Jet.constant(n, jet_order, Fraction(1 if a == b else 0))
    return GeometryJet(n, jet_order, [Fraction(0)] * (n - 1), g)


def _rand_frac(rng, allow_zero=True) -> Fraction:
    while True:
        f = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if allow_zero or f != 0:
            return f


def _rand_multiindex(rng, n, degree):
    mu = [0] * n
    for _ in range(degree):
        mu[rng.randrange(n)] += 1
    return tuple(mu)


def random_jet(
    n: int,
    jet_order: int = 3,
    seed: int = 0,
    with_A: bool = False,
    with_q: bool = False,
) -> GeometryJet:
    """Deterministic fuzz jet: small sparse rational coefficients, distinct
    principal curvatures, all validate_jet constraints satisfied."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    rng = random.Random(f"steklovheat:{n}:{jet_order}:{seed}")
    m = n - 1
    kappa = []
    while len(kappa) < m:
        f = _rand_frac(rng, allow_zero=False)
        if f not in kappa:
            kappa.append(f)
    g = {}
    for a in range(m):
        for b in range(a, m):
            terms = {(0,) * n: Fraction(1 if a == b else 0)}
            if a == b and jet_order >= 1:
                e_n = tuple(0 if t < m else 1 for t in range(n))
                terms[e_n] = -2 * kappa[a]
            for degree in range(2, jet_order + 1):
                for _ in range(2):
                    mu = _rand_multiindex(rng, n, degree)
                    terms[mu] = terms.get(mu, Fraction(0)) + _rand_frac(rng)
            g[(a, b)] = Jet.from_terms(n, jet_order, terms.items())
    A = None
    if with_A:
        a_order = max(jet_order - 1, 0)
        A = []
        for _ in range(n):
            terms = []
            for degree in range(0, a_order + 1):
                for _ in range(2 if degree else 1):
                    mu = _rand_multiindex(rng, n, degree)
                    terms.append((mu, GQ(_rand_frac(rng), _rand_frac(rng))))
            A.append(Jet.from_terms(n, a_order, terms))
    q = None
    if with_q:
        q_order = max(jet_order - 2, 0)
        terms = []
        for degree in range(0, q_order + 1):
            for _ in range(2 if degree else 1):
                mu = _rand_multiindex(rng, n, degree)
                terms.append((mu, GQ(_rand_frac(rng), _rand_frac(rng))))
        q = Jet.from_terms(n, q_order, terms)
    k = _rand_frac(rng, allow_zero=False) if with_q else Fraction(0)
    return GeometryJet(n, jet_order, kappa, g, A, q, k)


# ---------------------------------------------------------------------------
# JSON import/export (bit-exact round trip)


def _jet_to_json(jet: Jet) -> dict:
    return {
        ",".join(str(e) for e in mu): scalar_to_json(GQ.from_triple(val))
        for mu, val in sorted(jet.coeffs.items())
    }


def _jet_from_json(obj: dict, n: int, order: int) -> Jet:
    terms = []
    for key, val in obj.items():
        mu = tuple(int(p) for p in key.split(","))
        terms.append((mu, scalar_from_json(val)))
    return Jet.from_terms(n, order, terms)


def jet_to_json(jet: GeometryJet) -> dict:
    return {
        "n": jet.n,
        "jet_order": jet.jet_order,
        "kappa": [str(x) for x in jet.kappa],
        "g": {
            f"{a + 1},{b + 1}": _jet_to_json(jet.g[(a, b)])
            for (a, b) in sorted(jet.g)
        },
        "A": {str(j + 1): _jet_to_json(aj) for j, aj in enumerate(jet.A)},
        "q": _jet_to_json(jet.q),
        "k": str(jet.k),
    }


def jet_from_json(obj: dict) -> GeometryJet:
    n = int(obj["n"])
    order = int(obj["jet_order"])
    kappa = [Fraction(s) for s in obj["kappa"]]
    g = {}
    for key, table in obj["g"].items():
        a, b = (int(p) - 1 for p in key.split(","))
        g[(a, b)] = _jet_from_json(table, n, order)
    a_order = max(order - 1, 0)
    A = [
        _jet_from_json(obj["A"][str(j + 1)], n, a_order) if str(j + 1) in obj.get("A", {}) else Jet.zero(n, a_order)
        for j in range(n)
    ]
    q = _jet_from_json(obj.get("q", {}), n, max(order - 2, 0))
    return GeometryJet(n, order, kappa, g, A, q, Fraction(obj.get("k", 0)))
