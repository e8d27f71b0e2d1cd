"""Built-in property corpus run by ``divkummer verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Callable

from .autseq import exact_sequence
from .duality import duality_check
from .errors import IncompatibleMap
from .exactalg import (
    IntMatrix,
    ModuleMap,
    cyclic_sum,
    intersect,
    same_submodule,
    snf,
    sum_submodules,
)
from .hulls import is_normal, maximal_extension, min_level
from .kummer import BoundInputs, closed_form_bound, h1, kummer_bound
from .modfilter import ALL, ONE, ZERO, baer_check, divide_filter, p_divisible, p_power, torsion
from .pointed import (
    JTExtension,
    PointedModule,
    adjunction_check,
    count_mediators,
    pushout,
    saturate,
)
from .testbed import (
    graph_map,
    random_extension,
    random_finite_module,
    random_pointed,
    random_triple,
    sample_extensions,
)

FILTERS = [p_power(2), p_power(3), ALL, ZERO, ONE]


def _minors_gcd(rows, k):
    from itertools import combinations

    from .exactalg.matrix import IntMatrix as M

    g = 0
    n, m = len(rows), len(rows[0]) if rows else 0
    for r in combinations(range(n), k):
        for c in combinations(range(m), k):
            g = gcd(g, M([[rows[i][j] for j in c] for i in r], cols=k).det())
    return g


def check_snf(rng: random.Random) -> bool:
    n, m = rng.randint(1, 4), rng.randint(1, 4)
    rows = [[rng.randint(-9, 9) for _ in range(m)] for _ in range(n)]
    a = IntMatrix(rows, cols=m)
    u, s, v = snf(a)
    if u @ a @ v != s or abs(u.det()) != 1 or abs(v.det()) != 1:
        return False
    prev = 1
    for k in range(1, min(n, m) + 1):
        dk = _minors_gcd(rows, k)
        want = dk // prev if prev else 0
        if abs(s[k - 1, k - 1]) != want:
            return False
        prev = dk
    return True


def check_division(rng: random.Random) -> bool:
    j = rng.choice(FILTERS)
    minc, ninc, p = random_triple(rng, 200)
    d_n = _divide_inside(j, minc, ninc)
    _, d_p = divide_filter(j, minc)
    _, meet = intersect(d_p, ninc)
    return same_submodule(d_n, meet)


def _divide_inside(j, minc, ninc):
    """``D_J(M, N)`` computed inside ``N`` and mapped into ``P``."""
    from .exactalg import factor_through

    m_in_n = factor_through(minc, ninc)
    _, d = divide_filter(j, m_in_n)
    return ninc.compose(d)


def check_complete(rng: random.Random) -> bool:
    j = rng.choice(FILTERS)
    minc, _, p = random_triple(rng, 200)
    _, d1 = divide_filter(j, minc)
    _, d2 = divide_filter(j, d1)
    return same_submodule(d1, d2)


def check_baer(rng: random.Random) -> bool:
    q = random_finite_module(rng, 64)
    p = rng.choice([2, 3])
    e = max(q.exponent(), 1)
    return baer_check(e * e * p, p_power(p), q) == p_divisible(q, p)


def check_pushout(rng: random.Random) -> bool:
    prime = rng.choice([2, 3])
    f = graph_map(rng, random_pointed(rng, prime, s=1), random_pointed(rng, prime, s=1))
    g = random_extension(rng, f.source, prime).inc
    po = pushout(f, g)
    pm, pn = f.target, g.target
    level = lcm(max(pm.tor_level(), 1), max(pn.tor_level(), 1))
    t = pm.target
    x = t.level_module(level)
    q = PointedModule(x, t, x.gens(), [t.from_level(v, level) for v in x.gens()])
    from .pointed import PointedMap

    for k in sample_extensions(rng, pm.tor_inc, pm.level_map(level), 3):
        k = PointedMap(k, pm, q)
        for l in sample_extensions(rng, g.underlying, k.underlying.compose(f.underlying), 3):
            try:
                l = PointedMap(l, pn, q)
            except IncompatibleMap:
                continue
            if count_mediators(po, k, l) != 1:
                return False
    _, both = sum_submodules(po.module.module, po.i.underlying.compose(pm.tor_inc).matrix,
                             po.j.underlying.compose(pn.tor_inc).matrix)
    return same_submodule(both, po.module.tor_inc)


def check_adjunction(rng: random.Random) -> bool:
    prime = rng.choice([2, 3])
    phi = graph_map(rng, random_pointed(rng, prime, s=1), random_pointed(rng, prime, s=1))
    n = random_extension(rng, phi.source, prime)
    p = random_extension(rng, phi.target, prime)
    return adjunction_check(phi, n, p)


def check_counit_saturated(rng: random.Random) -> bool:
    from .pointed import counit_map

    prime = rng.choice([2, 3])
    phi = graph_map(rng, random_pointed(rng, prime, s=1), random_pointed(rng, prime, s=1))
    level = max(phi.target.tor_level(), 1) * prime
    w, inc = saturate(phi.target).window(level)
    return counit_map(phi, JTExtension(phi.target, w, inc)).is_isomorphism()


def check_autseq(rng: random.Random) -> bool:
    prime = rng.choice([2, 3])
    m = random_pointed(rng, prime, s=rng.randint(1, 2), max_jorder=8)
    ext = random_extension(rng, m, prime)
    g = maximal_extension(m)
    level = max(min_level(ext, g), 1) * prime
    if not is_normal(ext, g, level):
        return True
    return exact_sequence(ext, g, level).ok()


def check_duality(rng: random.Random) -> bool:
    m = random_finite_module(rng, 16)
    return duality_check(m, rng.randint(1, 2))


def check_h1_annihilated(rng: random.Random) -> bool:
    from .kummer import matrix_group

    s = rng.randint(1, 2)
    level = rng.choice([2, 3, 4, 6])
    a = cyclic_sum([level] * s)
    gens = []
    for _ in range(rng.randint(1, 2)):
        while True:
            g = [[rng.randrange(level) for _ in range(s)] for _ in range(s)]
            if gcd(IntMatrix(g, cols=s).det(), level) == 1:
                gens.append(g)
                break
    h = h1(gens, a, level)
    order = len(matrix_group(gens, level))
    return all(h.is_zero(tuple(order * c for c in x)) for x in h.gens())


def check_bound(rng: random.Random) -> bool:
    b = BoundInputs(rng.choice([1, 2, 3]), rng.choice([1, 2]), rng.choice([1, 3]), rng.randint(0, 2), 2)
    level = rng.choice([6, 12, 36])
    rep = kummer_bound(b, [], level)
    return rep.c == closed_form_bound(b, level) and rep.consistent()


def check_roundtrip(rng: random.Random) -> bool:
    from .io import Document, extension_document

    prime = rng.choice([2, 3])
    m = random_pointed(rng, prime)
    ext = random_extension(rng, m, prime)
    doc = Document(extension_document(ext))
    again = doc.extension()
    return (again.base.module == ext.base.module and again.total.module == ext.total.module
            and again.inc.matrix == ext.inc.matrix
            and again.total.torsion_image() == ext.total.torsion_image())


def check_torsion(rng: random.Random) -> bool:
    j = rng.choice(FILTERS)
    q = random_finite_module(rng, 64)
    _, t = torsion(j, q)
    zero = ModuleMap(cyclic_sum([]), q, IntMatrix([], cols=q.ngens))
    _, d = divide_filter(j, zero)
    return same_submodule(t, d)


CHECKS: dict[str, tuple[Callable[[random.Random], bool], int]] = {
    "snf-determinantal-divisors": (check_snf, 60),
    "division-intersection": (check_division, 40),
    "division-complete": (check_complete, 40),
    "torsion-is-division-of-zero": (check_torsion, 40),
    "baer-criterion": (check_baer, 30),
    "pushout-universal": (check_pushout, 10),
    "adjunction": (check_adjunction, 8),
    "counit-saturated": (check_counit_saturated, 8),
    "aut-exact-sequence": (check_autseq, 10),
    "duality-bijection": (check_duality, 8),
    "h1-annihilated": (check_h1_annihilated, 30),
    "bound-closed-form": (check_bound, 20),
    "document-roundtrip": (check_roundtrip, 10),
}


@dataclass
class CorpusResult:
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(p for p, _ in self.counts.values())

    @property
    def failed(self) -> int:
        return sum(f for _, f in self.counts.values())


def run_corpus(seed: int = 0, scale: float = 1.0) -> CorpusResult:
    res = CorpusResult()
    for name, (fn, n) in CHECKS.items():
        rng = random.Random(f"{seed}:{name}")
        ok = bad = 0
        for case in range(max(1, int(n * scale))):
            try:
                good = fn(rng)
            except Exception as e:  # any crash counts against the property
                good = False
                res.failures.append(f"{name}#{case}: {type(e).__name__}: {e}")
            else:
                if not good:
                    res.failures.append(f"{name}#{case}: property violated")
            if good:
                ok += 1
            else:
                bad += 1
        res.counts[name] = (ok, bad)
    return res
