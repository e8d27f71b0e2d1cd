"""Finite Kummer-theory models: H^1 of matrix groups, the subring index,
divisibility indices, the bound ``c`` and simulated Galois images.

A simulated torsion-Kummer image is a finite subgroup ``G`` of
``Hom(X, T[L]) x| GL_s(Z/L)``. An element ``(f, sigma)`` acts on ``X x T[L]`` by
``(x, t) -> (x, t sigma + f(x))``; composing "``b`` first, then ``a``" gives
``(f_a + f_b sigma_a, sigma_b sigma_a)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .duality import HomElement, HomSpace, joint_kernel
from .errors import EnumerationLimit, HypothesisFailure, PreconditionError
from .exactalg import (
    FgModule,
    IntMatrix,
    ModuleMap,
    coords_in,
    contains,
    cyclic_sum,
    hnf,
    direct_sum,
    factor_through,
    kernel,
    quotient,
    simplify,
    submodule,
)
from .exactalg.module import max_enum, unit
from .pointed import TorsionTarget

Mat = tuple  # tuple of row tuples, entries reduced mod a modulus


def _mat(m, modulus: int) -> Mat:
    rows = m.data if isinstance(m, IntMatrix) else m
    return tuple(tuple(int(x) % modulus for x in r) for r in rows)


def _mul(a: Mat, b: Mat, modulus: int) -> Mat:
    n = len(b)
    return tuple(
        tuple(sum(r[k] * b[k][j] for k in range(n)) % modulus for j in range(len(b[0])))
        for r in a
    )


def _vecmat(v, m: Mat, modulus: int) -> tuple:
    """``v m``, reduced mod ``modulus`` unless it is 0."""
    if not m:
        return ()
    out = (sum(v[k] * m[k][j] for k in range(len(m))) for j in range(len(m[0])))
    return tuple(x % modulus for x in out) if modulus else tuple(out)


def _identity(n: int, modulus: int) -> Mat:
    return tuple(tuple(int(i == j) % modulus for j in range(n)) for i in range(n))


def matrix_group(gens: Sequence, modulus: int) -> list[Mat]:
    """Closure of invertible matrices mod ``modulus`` under products; identity first."""
    gens = [_mat(g, modulus) for g in gens]
    if not gens:
        raise PreconditionError("at least one matrix is needed to fix the size")
    ident = _identity(len(gens[0]), modulus)
    seen = {ident: None}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _mul(x, g, modulus)
                if y not in seen:
                    seen[y] = None
                    nxt.append(y)
                    if len(seen) > max_enum():
                        raise EnumerationLimit("matrix group too large")
        frontier = nxt
    return list(seen)


def _compose_action(s: Mat, h: Mat, modulus: int) -> Mat:
    """Matrix of "``h`` first, then ``s``" for the row action ``a -> a M``."""
    return _mul(h, s, modulus)


@dataclass
class H1Data:
    """``H^1`` with cocycles stored by their values on the generators (canonical coordinates)."""

    group: list
    gens: list
    module: FgModule
    cocycles: FgModule
    cocycle_inc: ModuleMap  # cocycles -> a^{|gens|} in canonical coordinates
    h1: FgModule
    to_h1: ModuleMap  # cocycles -> h1
    _tree: dict = field(repr=False, default_factory=dict)
    _canon_action: dict = field(repr=False, default_factory=dict)

    def _extend(self, gen_values) -> dict:
        """Values on every group element of the cocycle with the given generator values."""
        factors = self.module.factors
        out = {self.group[0]: tuple(0 for _ in factors)}
        for g in self.group[1:]:
            s, h = self._tree[g]
            v = _vecmat(out[h], self._canon_action[s], 0)
            out[g] = tuple((a + b) % d if d else a + b
                           for a, b, d in zip(gen_values[self.gens.index(s)], v, factors))
        return out

    def cocycle_class(self, values: Sequence[Sequence[int]]):
        """Class in ``h1`` of the cocycle given by its values on ``group`` (in order)."""
        a = self.module
        canon = {g: a.to_canonical(v) for g, v in zip(self.group, values)}
        gv = [canon[s] for s in self.gens]
        if self._extend(gv) != {g: tuple(c % d if d else c for c, d in zip(v, a.factors))
                                for g, v in canon.items()}:
            raise PreconditionError("values do not form a cocycle")
        y = coords_in(self.cocycle_inc, tuple(c for v in gv for c in v))
        if y is None:
            raise PreconditionError("values do not form a cocycle")
        return self.h1.reduce(self.to_h1(y))

    def is_coboundary(self, values) -> bool:
        return self.h1.is_zero(self.cocycle_class(values))


def _reduce_columns(cols: list, n: int, d: int, chunk: int = 64) -> list:
    """Generators of the span of ``cols`` modulo ``d Z^n`` (at most ``n`` vectors)."""
    if not cols:
        return []
    basis = [tuple(d * int(i == j) for j in range(n)) for i in range(n)]
    for start in range(0, len(cols), chunk):
        rows = basis + [tuple(x % d for x in c) for c in cols[start:start + chunk]]
        basis = [r for r in hnf(IntMatrix(rows, cols=n)).data if any(r)]
    return [r for r in basis if any(x % d for x in r)]


def generating_set(elements: Sequence, modulus: int) -> list[Mat]:
    """A few elements of a finite matrix group that generate all of it."""
    els = [_mat(g, modulus) for g in elements]
    gens, span = [], {_identity(len(els[0]), modulus)} if els else set()
    for g in els:
        if g not in span:
            gens.append(g)
            span = set(matrix_group(gens, modulus))
    return gens or els[:1]


def h1_data(gens: Sequence, a: FgModule, modulus: int | None = None) -> H1Data:
    """``H^1(G, a)`` for the group ``G`` generated by ``gens`` acting by ``x -> x M``.

    Unknowns are the values on ``gens``; a BFS tree spreads them over ``G`` and every
    non-tree product gives a linear constraint.
    """
    if not a.is_finite():
        raise PreconditionError("the coefficient module must be finite")
    modulus = modulus or max(a.exponent(), 1)
    group = matrix_group(gens, modulus)
    if len(group) * (a.order() or 1) > max_enum():
        raise EnumerationLimit("group and module too large for cocycle computation")
    sgens = list(dict.fromkeys(_mat(g, modulus) for g in gens))
    for g in sgens:
        ModuleMap(a, a, IntMatrix(g, cols=a.ngens))  # well-defined on a
    factors = a.factors
    k, ns = len(factors), len(sgens)
    n = ns * k
    canon = {}
    for g in group:
        canon[g] = tuple(a.to_canonical(IntMatrix(g, cols=a.ngens).vecmul(a.from_canonical(unit(k, i))))
                         for i in range(k))
    # C_g: n x k integer matrix with f(g) = x C_g
    zero = tuple(tuple(0 for _ in range(k)) for _ in range(n))

    def step(s, ch):
        si = sgens.index(s)
        moved = tuple(_vecmat(r, canon[s], 0) for r in ch) if k else ch
        return tuple(
            tuple(moved[r][c] + int(r == si * k + c) for c in range(k)) for r in range(n)
        )

    cmat = {group[0]: zero}
    tree = {}
    frontier = [group[0]]
    while frontier:
        nxt = []
        for h in frontier:
            for s in sgens:
                g = _compose_action(s, h, modulus)
                if g not in cmat:
                    cmat[g] = step(s, cmat[h])
                    tree[g] = (s, h)
                    nxt.append(g)
        frontier = nxt
    by_mod = {}
    for h in group:
        for s in sgens:
            g = _compose_action(s, h, modulus)
            if tree.get(g) == (s, h):
                continue
            want = step(s, cmat[h])
            for c in range(k):
                col = tuple(cmat[g][r][c] - want[r][c] for r in range(n))
                if any(x % factors[c] for x in col):
                    by_mod.setdefault(factors[c], []).append(col)
    ccols, cmods = [], []
    for d in sorted(by_mod):
        for r in _reduce_columns(by_mod[d], n, d):
            ccols.append(r)
            cmods.append(d)
    c1, _, _ = direct_sum(*([cyclic_sum(factors)] * ns))
    c2 = cyclic_sum(cmods)
    rows = [tuple(col[r] for col in ccols) for r in range(n)]
    dmap = ModuleMap(c1, c2, IntMatrix(rows, cols=len(ccols)), check=False)
    z1, zinc = kernel(dmap)
    acan = cyclic_sum(factors)
    brows = []
    for i in range(k):
        e = unit(k, i)
        brows.append(tuple(c for s in sgens for c in (x - y for x, y in zip(_vecmat(e, canon[s], 0), e))))
    bmap = ModuleMap(acan, c1, IntMatrix(brows, cols=n), check=False)
    into_z = factor_through(bmap, zinc)
    q, proj = quotient(z1, into_z.matrix)
    h, iso = simplify(q)
    to_canon = factor_through(ModuleMap.identity(q), iso)
    return H1Data(group, sgens, a, z1, zinc, h, to_canon.compose(proj), tree, canon)


def h1(gens: Sequence, a: FgModule, modulus: int | None = None) -> FgModule:
    """First cohomology of a finite matrix group, as a simplified module."""
    return h1_data(gens, a, modulus).h1


def _flat_algebra_key(span_rows, n2, modulus):
    rows = list(span_rows) + [tuple(modulus * int(i == j) for j in range(n2)) for i in range(n2)]
    sub, inc = submodule(FgModule(n2, IntMatrix([], cols=n2)), IntMatrix(rows, cols=n2))
    return inc


def generated_subring(gens: Sequence, modulus: int) -> ModuleMap:
    """Inclusion of the subring of ``M_s(Z/L)`` generated by ``gens`` into ``Z^{s^2}``
    (the lattice contains ``L Z^{s^2}``)."""
    mats = [_mat(g, modulus) for g in gens]
    s = len(mats[0])
    n2 = s * s
    flat = lambda m: tuple(x for r in m for x in r)
    unflat = lambda v: tuple(tuple(v[i * s + j] % modulus for j in range(s)) for i in range(s))
    basis = mats
    inc = _flat_algebra_key([flat(m) for m in basis], n2, modulus)
    while True:
        cur = [unflat(r) for r in inc.matrix.data]
        prods = [flat(_mul(x, y, modulus)) for x in cur for y in cur]
        new = _flat_algebra_key(list(inc.matrix.data) + prods, n2, modulus)
        if new.matrix == inc.matrix:
            return inc
        inc = new


def contains_scaled_full(inc: ModuleMap, m: int, s: int) -> bool:
    amb = inc.target
    return all(
        contains(amb, inc, tuple(m * int(k == i * s + j) for k in range(s * s)))
        for i in range(s) for j in range(s)
    )


def subring_index(gens: Sequence, modulus: int) -> int:
    """Smallest ``m | L`` with ``m * M_s(Z/L)`` inside the subring generated by ``gens``.

    ``m = L`` always qualifies, so the answer is ``L`` when nothing smaller works.
    """
    inc = generated_subring(gens, modulus)
    s = len(_mat(gens[0], modulus))
    for m in sorted(d for d in range(1, modulus + 1) if modulus % d == 0):
        if contains_scaled_full(inc, m, s):
            return m
    return modulus


def divisibility_index(x: FgModule, s: int, k: int, target: TorsionTarget | None = None) -> int:
    """``[Hom(x, T) : k Hom(x, T)]`` from the invariant factors of the Hom module."""
    if not x.is_finite():
        raise PreconditionError("x must be finite")
    if x.is_zero_module():
        return 1
    target = target or TorsionTarget(s)
    hom = HomSpace(x, target).module
    out = 1
    for d in hom.factors:
        out *= gcd(k, d)
    return out


@dataclass
class BoundInputs:
    d: int
    n: int
    m: int
    rank: int
    s: int
    provenance: dict = field(default_factory=lambda: {"d": "user", "n": "user", "m": "user"})

    def __post_init__(self):
        for name in ("d", "n", "m", "s"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"{name} must be positive")
        if self.rank < 0:
            raise PreconditionError("rank must be non-negative")

    @property
    def dnm(self) -> int:
        return self.d * self.n * self.m


@dataclass
class BoundReport:
    c: int
    per_level_index: dict
    notes: list

    def consistent(self) -> bool:
        return all(self.c % v == 0 for v in self.per_level_index.values())


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def level_quotient(rank: int, level: int, target: TorsionTarget) -> FgModule:
    """``(R/L)^r``: the level-``L`` model of ``Gamma / sat(M)`` for ``M`` of rank ``r``."""
    ring = target.ring
    if ring.is_integers:
        return cyclic_sum([level] * rank)
    # R = Z[w] with basis (1, w): multiplication by w is [[0, 1], [-n, t]]
    n2 = 2 * rank
    rel = [tuple(level * int(i == j) for j in range(n2)) for i in range(n2)]
    act = [[0] * n2 for _ in range(n2)]
    for b in range(rank):
        act[2 * b][2 * b + 1] = 1
        act[2 * b + 1][2 * b] = -ring.n
        act[2 * b + 1][2 * b + 1] = ring.t
    return FgModule(n2, IntMatrix(rel, cols=n2), action=act, ring=ring)


def kummer_bound(inputs: BoundInputs, torsion_structure: Sequence[int], level: int,
                 target: TorsionTarget | None = None) -> BoundReport:
    """The constant ``c = [Hom(X, T) : dnm Hom(X, T)]`` for ``X`` the level-``L`` model."""
    if level < 1:
        raise PreconditionError("level must be positive")
    target = target or TorsionTarget(inputs.s)
    notes = [f"{k} supplied by {v}" for k, v in sorted(inputs.provenance.items())]
    if level % inputs.dnm:
        notes.append(f"dnm = {inputs.dnm} does not divide L = {level}; index truncated at level {level}")
    if any(int(t) for t in torsion_structure):
        notes.append("torsion of M is absorbed by the saturation and does not enter c")
    x = level_quotient(inputs.rank, level, target)
    c = divisibility_index(x, inputs.s, inputs.dnm, target)
    table = {}
    for lv in _divisors(level):
        table[lv] = divisibility_index(level_quotient(inputs.rank, lv, target), inputs.s, inputs.dnm, target)
    return BoundReport(c, table, notes)


def closed_form_bound(inputs: BoundInputs, level: int) -> int:
    """``gcd(dnm, L)^{r s}``, the value of ``c`` over ``Z``."""
    return gcd(inputs.dnm, level) ** (inputs.rank * inputs.s)


class GaloisSimInstance:
    """A finite subgroup of ``Hom(X, T[L]) x| GL_s(Z/L)`` standing for the image of
    the torsion-Kummer representation, with its Kummer and torsion parts."""

    def __init__(self, level: int, x: FgModule, s: int, rho_gens: Sequence):
        if not x.is_finite() or level % max(x.exponent(), 1):
            raise PreconditionError("X must be finite with exponent dividing the level")
        self.level = level
        self.x = x
        self.s = s
        self.target = TorsionTarget(s)
        self.tmod = self.target.level_module(level)
        gens = [self._normalize(f, sg) for f, sg in rho_gens]
        if not gens:
            gens = [self._normalize(None, None)]
        for f, sg in gens:
            ModuleMap(x, self.tmod, IntMatrix(f, cols=s))
            ModuleMap(self.tmod, self.tmod, IntMatrix(sg, cols=s))
        self.elements = self._closure(gens)
        ident = _identity(s, level)
        self.kummer_rows = sorted({f for f, sg in self.elements if sg == ident})
        self.torsion_image = sorted({sg for f, sg in self.elements})
        self.check()

    @classmethod
    def split(cls, level: int, x: FgModule, s: int, torsion_gens: Sequence, kummer_gens: Sequence):
        """``im(kappa) x| im(tau)``; kummer generators are HomElements or level rows."""
        zero = tuple((0,) * s for _ in range(x.ngens))
        ident = _identity(s, level)
        rho = [(zero, t) for t in torsion_gens] + [(k, ident) for k in kummer_gens]
        inst = cls(level, x, s, rho)
        return inst

    def _normalize(self, f, sg):
        level, s = self.level, self.s
        if f is None:
            f = tuple((0,) * s for _ in range(self.x.ngens))
        if isinstance(f, HomElement):
            f = tuple(self.target.to_level(v, level) for v in f.images)
        f = tuple(tuple(int(c) % level for c in r) for r in f)
        sg = _identity(s, level) if sg is None else _mat(sg, level)
        return f, sg

    def compose(self, a, b):
        """``b`` first, then ``a``."""
        fa, sa = a
        fb, sb = b
        f = tuple(
            tuple((u + v) % self.level for u, v in zip(ra, _vecmat(rb, sa, self.level)))
            for ra, rb in zip(fa, fb)
        )
        return f, _mul(sb, sa, self.level)

    def _closure(self, gens):
        ident = self._normalize(None, None)
        seen = {ident: None}
        frontier = [ident]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    y = self.compose(g, e)
                    if y not in seen:
                        seen[y] = None
                        nxt.append(y)
                        if len(seen) > max_enum():
                            raise EnumerationLimit("simulated Galois group too large")
            frontier = nxt
        return list(seen)

    def kummer_image(self) -> list[HomElement]:
        return [HomElement(self.x, self.target, [self.target.from_level(r, self.level) for r in f])
                for f in self.kummer_rows]

    def act(self, sigma: Mat, f) -> tuple:
        return tuple(_vecmat(r, sigma, self.level) for r in f)

    def check(self) -> None:
        """The torsion image is a group and the Kummer image is stable under it."""
        tset = set(self.torsion_image)
        for a in self.torsion_image:
            for b in self.torsion_image:
                if _mul(a, b, self.level) not in tset:
                    raise PreconditionError("torsion image is not closed under products")
        kset = set(self.kummer_rows)
        for sg in self.torsion_image:
            for f in self.kummer_rows:
                if self.act(sg, f) not in kset:
                    raise PreconditionError("Kummer image is not stable under the torsion image")

    def eval(self, f, xvec) -> tuple:
        return tuple(sum(c * r[j] for c, r in zip(xvec, f)) % self.level for j in range(self.s))

    def fixed_points_quotient(self) -> tuple[FgModule, ModuleMap]:
        """``{x in X : exists t, t (sigma - 1) + f(x) = 0 for all (f, sigma)}``: the image
        in ``X`` of the rational points of the level model."""
        tl = list(self.tmod.elements())
        good = []
        for xv in self.x.elements():
            for t in tl:
                if all(
                    all((a - b + c) % self.level == 0
                        for a, b, c in zip(_vecmat(t, sg, self.level), t, self.eval(f, xv)))
                    for f, sg in self.elements
                ):
                    good.append(xv)
                    break
        return submodule(self.x, IntMatrix(good, cols=self.x.ngens) if good else IntMatrix([], cols=self.x.ngens))

    def h1(self) -> H1Data:
        return h1_data(generating_set(self.torsion_image, self.level), self.tmod, self.level)


@dataclass
class SesReport:
    points_order: int
    kernel_order: int
    h1_order: int
    injective: bool
    exact_middle: bool
    supplied_matches: bool = True

    def ok(self) -> bool:
        return self.injective and self.exact_middle and self.supplied_matches


def ses_report(inst: GaloisSimInstance, sat_points_quotient=None) -> SesReport:
    x = inst.x
    a, ainc = inst.fixed_points_quotient()
    supplied_ok = True
    if sat_points_quotient is not None:
        _, sinc = submodule(x, sat_points_quotient)
        from .exactalg import same_submodule

        supplied_ok = same_submodule(sinc, ainc)
    kummer = inst.kummer_image()
    k, kinc = joint_kernel(kummer)
    data = inst.h1()
    reps = {}
    for f, sg in inst.elements:
        reps.setdefault(sg, f)
    # delta(x): sigma -> f_sigma(x); well defined because x dies under im(kappa)
    in_kernel = set()
    for y in k.elements():
        xv = kinc(y)
        values = [inst.eval(reps[g], xv) for g in data.group]
        if data.is_coboundary(values):
            in_kernel.add(x.to_canonical(xv))
    a_set = {x.to_canonical(ainc(y)) for y in a.elements()}
    injective = all(coords_in(kinc, ainc(g)) is not None for g in a.gens())
    return SesReport(
        points_order=a.order(),
        kernel_order=k.order(),
        h1_order=data.h1.order(),
        injective=injective,
        exact_middle=in_kernel == a_set,
        supplied_matches=supplied_ok,
    )


def ses_cohomology_check(inst: GaloisSimInstance, sat_points_quotient=None) -> bool:
    """Exactness of ``0 -> points -> ker(im kappa) -> H^1(im tau, T[L])`` on the model."""
    return ses_report(inst, sat_points_quotient).ok()


def check_hypotheses(inst: GaloisSimInstance, inputs: BoundInputs) -> None:
    a, ainc = inst.fixed_points_quotient()
    if any(not inst.x.is_zero(tuple(inputs.d * c for c in ainc(g))) for g in a.gens()):
        raise HypothesisFailure(f"d = {inputs.d} does not kill the rational points modulo sat(M)", 1)
    hd = inst.h1()
    if any(not hd.h1.is_zero(tuple(inputs.n * c for c in g)) for g in hd.h1.gens()):
        raise HypothesisFailure(f"n = {inputs.n} does not kill H^1 (order {hd.h1.order()})", 2)
    ring = generated_subring(inst.torsion_image, inst.level)
    if not contains_scaled_full(ring, inputs.m, inst.s):
        raise HypothesisFailure(
            f"m = {inputs.m} is not a valid subring index "
            f"(smallest is {subring_index(inst.torsion_image, inst.level)})", 3)


def thm_main_containment_check(inst: GaloisSimInstance, inputs: BoundInputs) -> bool:
    """After verifying the three hypotheses, test ``im(kappa) >= dnm Hom(X, T[L])``."""
    check_hypotheses(inst, inputs)
    space = HomSpace(inst.x, inst.target)
    kgens = [space.coords(f) for f in inst.kummer_image()]
    _, kinc = submodule(space.module, IntMatrix(kgens, cols=space.module.ngens))
    k = inputs.dnm
    return all(
        contains(space.module, kinc, tuple(k * c for c in g)) for g in space.module.gens()
    )


__all__ = [
    "BoundInputs",
    "BoundReport",
    "GaloisSimInstance",
    "H1Data",
    "SesReport",
    "check_hypotheses",
    "closed_form_bound",
    "divisibility_index",
    "generated_subring",
    "generating_set",
    "h1",
    "h1_data",
    "kummer_bound",
    "level_quotient",
    "matrix_group",
    "ses_cohomology_check",
    "ses_report",
    "subring_index",
    "thm_main_containment_check",
]
