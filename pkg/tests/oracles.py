"""Brute-force references used by the tests. Nothing here calls SNF or HNF."""

from __future__ import annotations

from itertools import combinations, product
from math import gcd

from divkummer.exactalg import IntMatrix, ModuleMap


def det(rows) -> int:
    """Laplace expansion; fine up to 6x6."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * det(minor)
    return total


def determinantal_divisors(rows, ncols: int) -> list[int]:
    """``d_k`` = gcd of all k x k minors, for k = 1 .. min(n, m)."""
    out = []
    n = len(rows)
    for k in range(1, min(n, ncols) + 1):
        g = 0
        for r in combinations(range(n), k):
            for c in combinations(range(ncols), k):
                g = gcd(g, det([[rows[i][j] for j in c] for i in r]))
        out.append(g)
    return out


def snf_diagonal_oracle(rows, ncols: int) -> list[int]:
    ds = determinantal_divisors(rows, ncols)
    out, prev = [], 1
    for d in ds:
        out.append(d // prev if d else 0)
        prev = d or 1
    return out


# explicit Z/d1 + ... + Z/dk, elements as reduced tuples

def elements(factors) -> list[tuple]:
    return list(product(*(range(d) for d in factors)))


def add(a, b, factors):
    return tuple((x + y) % d for x, y, d in zip(a, b, factors))


def scale(k, a, factors):
    return tuple((k * x) % d for x, d in zip(a, factors))


def span(gens, factors) -> frozenset:
    zero = tuple(0 for _ in factors)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = add(x, g, factors)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def subgroups(factors) -> set[frozenset]:
    """Every subgroup, grown one generator at a time."""
    els = elements(factors)
    start = span([], factors)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for h in frontier:
            for x in els:
                if x not in h:
                    k = span(list(h) + [x], factors)
                    if k not in seen:
                        seen.add(k)
                        nxt.append(k)
        frontier = nxt
    return seen


def hom_count(a_factors, b_factors) -> int:
    """Number of homomorphisms by trying every tuple of generator images."""
    count = 0
    b_els = elements(b_factors)
    for imgs in product(b_els, repeat=len(a_factors)):
        if all(not any(scale(d, y, b_factors)) for d, y in zip(a_factors, imgs)):
            count += 1
    return count


def abelian_groups(max_order: int) -> list[list[int]]:
    """Invariant factor lists ``d1 | d2 | ...`` of all finite abelian groups up to the bound."""
    out = []

    def grow(prefix, order):
        out.append(list(prefix))
        start = prefix[-1] if prefix else 2
        for d in range(start, max_order // order + 1):
            if prefix and d % prefix[-1]:
                continue
            grow(prefix + [d], order * d)

    grow([], 1)
    return out


# group cohomology

def mat_mul(a, b, mod):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) % mod for j in range(n))
                 for i in range(n))


def close_group(gens, mod):
    s = len(gens[0]) if gens else 0
    ident = tuple(tuple(int(i == j) for j in range(s)) for i in range(s))
    gens = [tuple(tuple(x % mod for x in r) for r in g) for g in gens]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mat_mul(x, g, mod)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def vec_mat(v, m, mod):
    return tuple(sum(v[k] * m[k][j] for k in range(len(v))) % mod for j in range(len(m[0])))


def h1_order_bruteforce(gens, mod) -> int:
    """``|Z^1| / |B^1|`` for a matrix group acting on ``(Z/mod)^s`` by ``a -> a M``.

    Group element ``X`` then ``Y`` has matrix ``X Y``; a cocycle satisfies
    ``f(XY) = f(Y) + f(X) Y``.
    """
    group = close_group(gens, mod)
    s = len(group[0])
    mods = [mod] * s
    a_els = elements(mods)
    index = {g: k for k, g in enumerate(group)}
    z1 = 0
    for values in product(a_els, repeat=len(group)):
        ok = True
        for x in group:
            fx = values[index[x]]
            for y in group:
                lhs = values[index[mat_mul(x, y, mod)]]
                rhs = add(values[index[y]], vec_mat(fx, y, mod), mods)
                if lhs != rhs:
                    ok = False
                    break
            if not ok:
                break
        z1 += ok
    b1 = {tuple(add(vec_mat(a, g, mod), scale(-1, a, mods), mods) for g in group) for a in a_els}
    return z1 // len(b1)


def h1_cyclic_order(g, mod) -> int:
    """``H^1`` of a cyclic group ``<g>``: ``ker(norm) / (g - 1)A``."""
    group = close_group([g], mod)
    s = len(g)
    mods = [mod] * s
    a_els = elements(mods)
    ker = 0
    for a in a_els:
        total = tuple(0 for _ in range(s))
        for x in group:
            total = add(total, vec_mat(a, x, mod), mods)
        ker += not any(total)
    image = {add(vec_mat(a, g, mod), scale(-1, a, mods), mods) for a in a_els}
    return ker // len(image)


# automorphisms of an extension over its base

def aut_over_base_count(ext) -> int:
    """``|Aut_M(N)|`` from ``sigma = id + h``, ``h`` landing in ``N[J]`` and vanishing on ``M``."""
    n = ext.total.module
    tinc = ext.total.tor_inc
    tors = [tinc(x) for x in tinc.source.elements()]
    factors = n.factors
    base_rows = [n.to_canonical(ext.inc.underlying(g)) for g in ext.base.module.gens()]
    count = 0
    for ts in product(tors, repeat=len(factors)):
        if any(d and not n.is_zero([d * c for c in t]) for d, t in zip(factors, ts)):
            continue
        shift = lambda coords: tuple(sum(c * t[i] for c, t in zip(coords, ts)) for i in range(n.ngens))
        if any(not n.is_zero(shift(r)) for r in base_rows):
            continue
        rows = [tuple(a + b for a, b in zip(g, shift(n.to_canonical(g)))) for g in n.gens()]
        f = ModuleMap(n, n, IntMatrix(rows, cols=n.ngens))
        count += f.is_isomorphism()
    return count


def subring_index_bruteforce(gens, mod) -> int:
    """Close ``{I} + gens`` under sums and products, then find the least ``m | mod``
    with every ``m E_ij`` inside."""
    s = len(gens[0])
    ident = tuple(tuple(int(i == j) for j in range(s)) for i in range(s))
    start = {ident} | {tuple(tuple(x % mod for x in r) for r in g) for g in gens}
    ring = set(start)
    changed = True
    while changed:
        changed = False
        snapshot = list(ring)
        for a in snapshot:
            for b in snapshot:
                for c in (mat_mul(a, b, mod),
                          tuple(tuple((x + y) % mod for x, y in zip(ra, rb)) for ra, rb in zip(a, b))):
                    if c not in ring:
                        ring.add(c)
                        changed = True
    for m in range(1, mod + 1):
        if mod % m:
            continue
        units = [tuple(tuple(m % mod if (i, j) == (a, b) else 0 for j in range(s)) for i in range(s))
                 for a in range(s) for b in range(s)]
        if all(u in ring for u in units):
            return m
    return mod


# division and torsion by element enumeration

def division_by_enumeration(j, minc, ninc, p) -> set:
    """``{x in N : k x in M}`` with ``k`` the largest filter element that matters in ``P``."""
    m_set = {p.to_canonical(minc(x)) for x in minc.source.elements()}
    order = p.order()
    if j.kind == "zero":
        k = 0
    elif j.kind == "one":
        k = 1
    elif j.kind == "ppower":
        k = j.p ** order.bit_length()
    else:
        k = order
    out = set()
    for x in ninc.source.elements():
        y = ninc(x)
        if p.to_canonical([k * c for c in y]) in m_set:
            out.add(p.to_canonical(y))
    return out


def element_set(p, inc) -> set:
    return {p.to_canonical(inc(x)) for x in inc.source.elements()}


def prime_powers(n: int) -> dict:
    out, q = {}, 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 1) * q
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 1) * n
    return out


def invariant_factors_oracle(factors) -> list[int]:
    """Invariant factors of ``Z/d_1 + ... + Z/d_k`` (finite ``d_i``) from elementary divisors."""
    by_prime = {}
    for d in factors:
        for q, e in prime_powers(d).items():
            by_prime.setdefault(q, []).append(e)
    width = max((len(v) for v in by_prime.values()), default=0)
    out = [1] * width
    for v in by_prime.values():
        v.sort(reverse=True)
        for i, e in enumerate(v):
            out[width - 1 - i] *= e
    return [d for d in out if d > 1]


def has_element_of_order(factors, p) -> bool:
    return any(d % p == 0 for d in factors)
