"""Pure-Python exact-arithmetic kernel.

Scalars are Gaussian rationals stored as normalized triples ``(a, b, d)``
meaning ``(a + b*i)/d`` with ``d >= 1`` and ``gcd(a, b, d) == 1``.  Jets are
truncated multivariate Taylor polynomials stored as dicts mapping exponent
tuples to scalar triples; entries above the truncation order are never kept.

The compiled twin (``_kernel_cy``) implements the same functions with the
same semantics; both must stay in lockstep (see tests/test_kernel_backends).
"""

from math import gcd

BACKEND = "python"

Q_ZERO = (0, 0, 1)
Q_ONE = (1, 0, 1)
Q_I = (0, 1, 1)


def q_norm(a, b, d):
    if d < 0:
        a, b, d = -a, -b, -d
    if a == 0 and b == 0:
        return Q_ZERO
    g = gcd(a, b, d)
    if g > 1:
        return (a // g, b // g, d // g)
    return (a, b, d)


def q_add(x, y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    if d1 == d2:
        return q_norm(a1 + a2, b1 + b2, d1)
    return q_norm(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)


def q_sub(x, y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    if d1 == d2:
        return q_norm(a1 - a2, b1 - b2, d1)
    return q_norm(a1 * d2 - a2 * d1, b1 * d2 - b2 * d1, d1 * d2)


def q_neg(x):
    return (-x[0], -x[1], x[2])


def q_mul(x, y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    if b1 == 0 and b2 == 0:
        return q_norm(a1 * a2, 0, d1 * d2)
    return q_norm(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, d1 * d2)


def q_div(x, y):
    a2, b2, d2 = y
    if a2 == 0 and b2 == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    # 1/((a+bi)/d) = d*(a-bi)/(a^2+b^2)
    return q_mul(x, q_norm(d2 * a2, -d2 * b2, a2 * a2 + b2 * b2))


def q_is_zero(x):
    return x[0] == 0 and x[1] == 0


def jet_add(f, g):
    out = dict(f)
    for key, val in g.items():
        cur = out.get(key)
        if cur is None:
            out[key] = val
        else:
            s = q_add(cur, val)
            if s[0] == 0 and s[1] == 0:
                del out[key]
            else:
                out[key] = s
    return out


def jet_neg(f):
    return {key: (-a, -b, d) for key, (a, b, d) in f.items()}


def jet_scale(f, c):
    if c[0] == 0 and c[1] == 0:
        return {}
    out = {}
    for key, val in f.items():
        p = q_mul(val, c)
        if p[0] != 0 or p[1] != 0:
            out[key] = p
    return out


def jet_mul(f, g, order):
    if not f or not g:
        return {}
    if len(f) > len(g):
        f, g = g, f
    gitems = sorted(((sum(k), k, v) for k, v in g.items()))
    out = {}
    for kf, vf in f.items():
        df = sum(kf)
        room = order - df
        for dg, kg, vg in gitems:
            if dg > room:
                break
            key = tuple(map(int.__add__, kf, kg))
            p = q_mul(vf, vg)
            cur = out.get(key)
            if cur is None:
                out[key] = p
            else:
                out[key] = q_add(cur, p)
    return {k: v for k, v in out.items() if v[0] != 0 or v[1] != 0}


def jet_diff(f, var):
    out = {}
    for key, (a, b, d) in f.items():
        e = key[var]
        if e == 0:
            continue
        nk = key[:var] + (e - 1,) + key[var + 1 :]
        val = q_norm(a * e, b * e, d)
        cur = out.get(nk)
        out[nk] = val if cur is None else q_add(cur, val)
    return out


def jet_truncate(f, order):
    return {k: v for k, v in f.items() if sum(k) <= order}


def jet_eval0(f, nvars):
    return f.get((0,) * nvars, Q_ZERO)
