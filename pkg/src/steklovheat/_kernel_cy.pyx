# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exact-arithmetic kernel: the Cython twin of _kernel_py.

Same data layout and semantics: Gaussian-rational triples (a, b, d) over
Python integers (arbitrary precision), jets as dicts keyed by exponent
tuples.  Only loop/dispatch overhead is compiled away; all arithmetic stays
exact.
"""

from math import gcd

import cython

BACKEND = "cython"

Q_ZERO = (0, 0, 1)
Q_ONE = (1, 0, 1)
Q_I = (0, 1, 1)


cpdef tuple q_norm(a, b, d):
    if d < 0:
        a, b, d = -a, -b, -d
    if a == 0 and b == 0:
        return Q_ZERO
    g = gcd(a, b, d)
    if g > 1:
        return (a // g, b // g, d // g)
    return (a, b, d)


cpdef tuple q_add(tuple x, tuple y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    if d1 == d2:
        return q_norm(a1 + a2, b1 + b2, d1)
    return q_norm(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)


cpdef tuple q_sub(tuple x, tuple y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    if d1 == d2:
        return q_norm(a1 - a2, b1 - b2, d1)
    return q_norm(a1 * d2 - a2 * d1, b1 * d2 - b2 * d1, d1 * d2)


cpdef tuple q_neg(tuple x):
    return (-x[0], -x[1], x[2])


cpdef tuple q_mul(tuple x, tuple y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    if b1 == 0 and b2 == 0:
        return q_norm(a1 * a2, 0, d1 * d2)
    return q_norm(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, d1 * d2)


cpdef tuple q_div(tuple x, tuple y):
    a2, b2, d2 = y
    if a2 == 0 and b2 == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    return q_mul(x, q_norm(d2 * a2, -d2 * b2, a2 * a2 + b2 * b2))


cpdef bint q_is_zero(tuple x):
    return x[0] == 0 and x[1] == 0


cpdef dict jet_add(dict f, dict g):
    cdef dict out = dict(f)
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


cpdef dict jet_neg(dict f):
    cdef dict out = {}
    for key, val in f.items():
        out[key] = (-val[0], -val[1], val[2])
    return out


cpdef dict jet_scale(dict f, tuple c):
    cdef dict out = {}
    if c[0] == 0 and c[1] == 0:
        return out
    for key, val in f.items():
        p = q_mul(val, c)
        if p[0] != 0 or p[1] != 0:
            out[key] = p
    return out


cdef inline int _tuple_sum(tuple k):
    cdef int s = 0
    cdef Py_ssize_t i
    for i in range(len(k)):
        s += <int> k[i]
    return s


cdef inline tuple _tuple_add(tuple a, tuple b):
    cdef Py_ssize_t i, m = len(a)
    res = [0] * m
    for i in range(m):
        res[i] = <int> a[i] + <int> b[i]
    return tuple(res)


cpdef dict jet_mul(dict f, dict g, int order):
    cdef dict out = {}
    if not f or not g:
        return out
    if len(f) > len(g):
        f, g = g, f
    cdef list gitems = sorted(
        [(_tuple_sum(k), k, v) for k, v in g.items()]
    )
    cdef int df, dg, room
    cdef Py_ssize_t idx, ng = len(gitems)
    for kf, vf in f.items():
        df = _tuple_sum(<tuple> kf)
        room = order - df
        for idx in range(ng):
            trip = <tuple> gitems[idx]
            dg = <int> trip[0]
            if dg > room:
                break
            key = _tuple_add(<tuple> kf, <tuple> trip[1])
            p = q_mul(<tuple> vf, <tuple> trip[2])
            cur = out.get(key)
            if cur is None:
                out[key] = p
            else:
                out[key] = q_add(<tuple> cur, p)
    cdef dict clean = {}
    for key, val in out.items():
        if val[0] != 0 or val[1] != 0:
            clean[key] = val
    return clean


cpdef dict jet_diff(dict f, int var):
    cdef dict out = {}
    cdef int e
    for key, val in f.items():
        e = <int> (<tuple> key)[var]
        if e == 0:
            continue
        nk = (<tuple> key)[:var] + (e - 1,) + (<tuple> key)[var + 1:]
        nv = q_norm(val[0] * e, val[1] * e, val[2])
        cur = out.get(nk)
        out[nk] = nv if cur is None else q_add(<tuple> cur, nv)
    return out


cpdef dict jet_truncate(dict f, int order):
    cdef dict out = {}
    for key, val in f.items():
        if _tuple_sum(<tuple> key) <= order:
            out[key] = val
    return out


cpdef tuple jet_eval0(dict f, int nvars):
    got = f.get((0,) * nvars)
    return Q_ZERO if got is None else <tuple> got
