"""Random desk-size instances shared by the verification corpus and the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from .exactalg import (
    FgModule,
    IntMatrix,
    ModuleMap,
    cyclic_sum,
    direct_sum,
    submodule,
)
from .hulls import maximal_extension, subextension
from .modfilter import p_part
from .pointed import JTExtension, PointedMap, PointedModule, TorsionTarget


def random_unimodular(rng: random.Random, n: int, steps: int = 6) -> IntMatrix:
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    if n and rng.random() < 0.5:
        k = rng.randrange(n)
        rows[k] = [-a for a in rows[k]]
    return IntMatrix(rows, cols=n)


def disguise(factors, rng: random.Random) -> FgModule:
    """``Z/d_1 + ... + Z/d_k`` presented on scrambled generators."""
    n = len(factors)
    u = random_unimodular(rng, n)
    diag = IntMatrix.diagonal(list(factors)) if n else IntMatrix([], cols=0)
    rels = [r for r in (diag @ u).data if any(r)] if n else []
    extra = []
    if n and rels and rng.random() < 0.5:
        a, b = rng.sample(range(len(rels)), 2) if len(rels) > 1 else (0, 0)
        extra.append(tuple(x + y for x, y in zip(rels[a], rels[b])))
    return FgModule(n, IntMatrix(rels + extra, cols=n))


def random_factors(rng: random.Random, max_order: int, max_gens: int = 3) -> list[int]:
    out, order = [], 1
    for _ in range(rng.randint(0, max_gens)):
        d = rng.randint(2, 12)
        if order * d > max_order:
            break
        out.append(d)
        order *= d
    return out


def random_finite_module(rng: random.Random, max_order: int = 64, max_gens: int = 3) -> FgModule:
    return disguise(random_factors(rng, max_order, max_gens), rng)


def random_fg_module(rng: random.Random, max_rank: int = 2, max_order: int = 64) -> FgModule:
    return disguise([0] * rng.randint(0, max_rank) + random_factors(rng, max_order), rng)


def random_subgroup_gens(rng: random.Random, n: FgModule, count: int | None = None) -> IntMatrix:
    count = rng.randint(0, 3) if count is None else count
    rows = [tuple(rng.randint(-6, 6) for _ in range(n.ngens)) for _ in range(count)]
    return IntMatrix(rows, cols=n.ngens)


def random_triple(rng: random.Random, max_order: int = 1000):
    """Submodule inclusions ``M -> N -> P`` of a random finite ``P``, as maps into ``P``."""
    p = random_finite_module(rng, max_order, 4)
    _, ninc = submodule(p, random_subgroup_gens(rng, p, rng.randint(0, 3)))
    gens = [ninc(tuple(rng.randint(-4, 4) for _ in range(ninc.source.ngens)))
            for _ in range(rng.randint(0, 2))]
    _, minc = submodule(p, IntMatrix(gens, cols=p.ngens))
    return minc, ninc, p


def random_pointed(rng: random.Random, prime: int | None, s: int | None = None,
                   max_rank: int = 1, max_jorder: int = 16, max_other: int = 6) -> PointedModule:
    """``Z^r + (J-torsion of at most s cyclic factors) + (non-J torsion)`` with a random
    injective pointing."""
    s = rng.randint(1, 2) if s is None else s
    jparts = []
    order = 1
    for _ in range(rng.randint(0, s)):
        if prime is None:
            d = rng.randint(2, 6)
        else:
            d = prime ** rng.randint(1, 3)
        if order * d > max_jorder:
            break
        jparts.append(d)
        order *= d
    other = []
    if prime is not None and rng.random() < 0.5:
        c = rng.choice([d for d in range(2, max_other + 1) if p_part(d, prime) == 1] or [1])
        if c > 1:
            other.append(c)
    rank = rng.randint(0, max_rank)
    factors = [0] * rank + jparts + other
    m = cyclic_sum(factors)
    t = TorsionTarget(s, prime)
    coords = rng.sample(range(s), len(jparts))
    gens, images = [], []
    for k, d in enumerate(jparts):
        g = [0] * len(factors)
        g[rank + k] = 1
        u = rng.choice([x for x in range(1, d) if _coprime(x, d)] or [1])
        v = [Fraction(0)] * s
        v[coords[k]] = Fraction(u, d)
        gens.append(tuple(g))
        images.append(tuple(v))
    return PointedModule(m, t, gens, images)


def _coprime(a: int, b: int) -> bool:
    from math import gcd

    return gcd(a, b) == 1


def random_extension(rng: random.Random, base: PointedModule, level: int,
                     count: int | None = None) -> JTExtension:
    """A (J,T)-extension of ``base`` generated inside the level window of its hull."""
    w = maximal_extension(base).window(level)
    count = rng.randint(0, 2) if count is None else count
    elems = [tuple(rng.randint(-3, 3) for _ in range(w.module.ngens)) for _ in range(count)]
    return subextension(w, elems)


def graph_map(rng: random.Random, base: PointedModule, extra: PointedModule) -> PointedMap:
    """A pure injective map ``base -> base + extra``: ``x -> (x, h(x))`` with ``h`` killing
    the J-torsion. ``extra`` is re-pointed into fresh coordinates."""
    t0 = base.target
    s = t0.s + extra.target.s
    t = TorsionTarget(s, t0.prime)
    pad = lambda v, off: tuple([Fraction(0)] * off + list(v) + [Fraction(0)] * (s - off - len(v)))
    b2 = PointedModule(base.module, t, base.gens, [pad(v, 0) for v in base.images])
    e2 = PointedModule(extra.module, t, extra.gens, [pad(v, t0.s) for v in extra.images])
    total, (ia, ib), _ = direct_sum(b2.module, e2.module)
    gens = [ia(g) for g in b2.gens] + [ib(g) for g in e2.gens]
    pointed = PointedModule(total, t, gens, list(b2.images) + list(e2.images))
    # h: kill base torsion by landing in multiples of the torsion exponent
    e = max(base.tor_level(), 1)
    rows = []
    for g in base.module.gens():
        tor = base.module.element_order(g) != 0
        h = [0] * extra.module.ngens if tor or rng.random() < 0.5 else \
            [e * rng.randint(-2, 2) for _ in range(extra.module.ngens)]
        rows.append(ia(g)[: total.ngens] if not any(h) else
                    tuple(a + b for a, b in zip(ia(g), ib(h))))
    f = ModuleMap(b2.module, total, IntMatrix(rows, cols=total.ngens))
    return PointedMap(f, b2, pointed)


__all__ = [
    "disguise",
    "graph_map",
    "random_extension",
    "random_factors",
    "random_fg_module",
    "random_finite_module",
    "random_pointed",
    "random_subgroup_gens",
    "random_triple",
    "random_unimodular",
    "sample_extensions",
]


def sample_extensions(rng: random.Random, i, h, count: int) -> list:
    """Up to ``count`` random solutions ``f`` of ``f o i = h`` (distinct, possibly fewer)."""
    from .exactalg import extension_coset

    c = extension_coset(i, h)
    if c.empty:
        return []
    k = c.kernel
    seen, out = set(), []
    for _ in range(4 * count):
        v = tuple(rng.randrange(d) if d else rng.randint(-3, 3) for d in k.factors)
        f = c.member(k.from_canonical(v))
        if f not in seen:
            seen.add(f)
            out.append(f)
            if len(out) == count:
                break
    return out
