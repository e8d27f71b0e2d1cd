"""Pointed modules over a torsion target ``T`` and (J,T)-extensions.

``T`` is ``(Q/Z)^s`` (filter ``inf``) or ``(Z[1/p]/Z)^s`` (filter ``p^inf``).
Elements of ``T`` are tuples of ``Fraction`` reduced into ``[0, 1)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import (
    IncompatibleMap,
    InvariantViolation,
    NonInjectivePointing,
    NotPure,
    PreconditionError,
)
from .exactalg import (
    ZZ,
    FgModule,
    IntMatrix,
    ModuleMap,
    Ring,
    contains,
    coords_in,
    direct_sum,
    extensions_along,
    factor_through,
    kernel,
    lcm,
    left_kernel,
    quotient,
    same_submodule,
    simplify,
    solve_left,
    submodule,
    sum_submodules,
)
from .exactalg.module import unit
from .modfilter import ALL, divide_filter, is_jmap, is_p_power, p_power, torsion, torsion_projection

TVec = tuple[Fraction, ...]


class TorsionTarget:
    """``(Q/Z)^s`` or ``(Z[1/p]/Z)^s``, optionally with an integer matrix ``W``
    giving the action of the order generator."""

    def __init__(self, s: int, prime: int | None = None, ring: Ring = ZZ, action=None):
        if s < 0:
            raise InvariantViolation("torsion rank must be non-negative")
        self.s = s
        self.prime = prime
        self.ring = ring
        if prime is not None:
            p_power(prime)  # validates primality
        if ring.is_integers:
            if action is not None:
                raise InvariantViolation("action on T is only meaningful over a quadratic order")
            self.action = None
        else:
            if action is None:
                raise InvariantViolation("T over a quadratic order needs an action matrix")
            w = IntMatrix(action, cols=s) if not isinstance(action, IntMatrix) else action
            if w.rows != s:
                raise InvariantViolation("action on T must be s x s")
            w2 = w @ w
            for i in range(s):
                for j in range(s):
                    if w2[i, j] - ring.t * w[i, j] + ring.n * int(i == j):
                        raise InvariantViolation("action on T does not satisfy the minimal polynomial")
            self.action = w

    @property
    def filter(self):
        return ALL if self.prime is None else p_power(self.prime)

    def normalize(self, v: Sequence) -> TVec:
        if len(v) != self.s:
            raise InvariantViolation(f"element of T must have {self.s} coordinates")
        out = tuple(Fraction(x) % 1 for x in v)
        if self.prime is not None:
            for x in out:
                if not is_p_power(x.denominator, self.prime):
                    raise InvariantViolation(f"{x} is not in the {self.prime}-primary target")
        return out

    def zero(self) -> TVec:
        return (Fraction(0),) * self.s

    def add(self, a: TVec, b: TVec) -> TVec:
        return tuple((x + y) % 1 for x, y in zip(a, b))

    def scale(self, k: int, a: TVec) -> TVec:
        return tuple((k * x) % 1 for x in a)

    def combine(self, coeffs: Sequence[int], vecs: Sequence[TVec]) -> TVec:
        out = [Fraction(0)] * self.s
        for c, v in zip(coeffs, vecs):
            if c:
                for i, x in enumerate(v):
                    out[i] += c * x
        return tuple(x % 1 for x in out)

    def act(self, a: TVec) -> TVec:
        w = self.action
        return tuple(sum(a[i] * w[i, j] for i in range(self.s)) % 1 for j in range(self.s))

    def order(self, a: TVec) -> int:
        e = 1
        for x in a:
            e = lcm(e, x.denominator)
        return e

    def level_module(self, level: int) -> FgModule:
        """``T[L]``, identified with ``(Z/L)^s`` through ``c -> c / L``."""
        rel = [tuple(level * int(i == j) for j in range(self.s)) for i in range(self.s)]
        act = None
        if not self.ring.is_integers:
            act = self.action
        return FgModule(self.s, IntMatrix(rel, cols=self.s), action=act, ring=self.ring, check=False)

    def to_level(self, a: TVec, level: int) -> tuple[int, ...]:
        out = []
        for x in a:
            y = x * level
            if y.denominator != 1:
                raise PreconditionError(f"{x} is not killed by {level}")
            out.append(int(y) % level)
        return tuple(out)

    def from_level(self, c: Sequence[int], level: int) -> TVec:
        return tuple(Fraction(x, level) % 1 for x in c)

    def key(self):
        return (self.s, self.prime, self.ring, None if self.action is None else self.action.data)

    def __eq__(self, other):
        return isinstance(other, TorsionTarget) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        base = "Q/Z" if self.prime is None else f"Z[1/{self.prime}]/Z"
        return f"TorsionTarget(({base})^{self.s})"


def fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class PointedModule:
    """A module with an injective homomorphism ``M[J] -> T``.

    ``gens`` are elements of ``M[J]`` spanning it; ``images`` their values in ``T``.
    """

    def __init__(self, module: FgModule, target: TorsionTarget, gens=(), images=()):
        if module.ring != target.ring:
            raise InvariantViolation("module and torsion target over different rings")
        self.module = module
        self.target = target
        self.gens = [tuple(int(c) for c in g) for g in gens]
        self.images = [target.normalize(v) for v in images]
        if len(self.gens) != len(self.images):
            raise InvariantViolation("pointing needs one image per generator")
        self.tor, self.tor_inc = torsion(target.filter, module)
        k = len(self.gens)
        gmat = IntMatrix(self.gens, cols=module.ngens)
        for g in self.gens:
            if len(g) != module.ngens:
                raise InvariantViolation("pointing generator has the wrong length")
            if not contains(module, self.tor_inc, g):
                raise NonInjectivePointing(f"pointing generator {list(g)} is not J-torsion")
        stacked = gmat.stack(module.relations)
        rows = []
        for r in self.tor_inc.matrix.data:
            y = solve_left(stacked, r)
            if y is None:
                raise InvariantViolation("pointing generators do not span the J-torsion")
            rows.append(target.combine(y[:k], self.images))
        for c in left_kernel(stacked).data:
            if any(target.combine(c[:k], self.images)):
                raise NonInjectivePointing("pointing is not well defined on the given generators")
        self._rows = rows
        if not module.ring.is_integers:
            for i, r in enumerate(self.tor_inc.matrix.data):
                if self.point(module.act(r)) != target.act(rows[i]):
                    raise InvariantViolation("pointing does not commute with the ring action")
        if not self.level_map(self.tor_level()).is_injective():
            raise NonInjectivePointing("pointing is not injective on the J-torsion")

    @classmethod
    def trivial(cls, module: FgModule, target: TorsionTarget) -> "PointedModule":
        """Pointing of a module without J-torsion."""
        return cls(module, target)

    @classmethod
    def from_torsion_images(cls, module, target, tor_inc_rows, images):
        return cls(module, target, tor_inc_rows, images)

    def tor_level(self) -> int:
        return self.tor.exponent()

    def point(self, x: Sequence[int]) -> TVec:
        """Value of the pointing at ``x`` in ``M[J]``."""
        y = coords_in(self.tor_inc, x)
        if y is None:
            raise PreconditionError(f"{list(x)} is not J-torsion")
        return self.target.combine(y, self._rows)

    def level_map(self, level: int) -> ModuleMap:
        """The pointing as a map ``M[J] -> T[level]``."""
        x = self.target.level_module(level)
        rows = [self.target.to_level(r, level) for r in self._rows]
        return ModuleMap(self.tor, x, IntMatrix(rows, cols=self.target.s), check=False)

    def torsion_image(self) -> frozenset:
        return frozenset(self.target.combine(y, self._rows) for y in self.tor.elements())

    def torsion_generators(self) -> list[tuple[int, ...]]:
        return list(self.tor_inc.matrix.data)

    def torsion_gen_images(self) -> list[TVec]:
        return list(self._rows)

    @property
    def filter(self):
        return self.target.filter

    def __repr__(self):
        return f"PointedModule({self.module.describe()}, {self.target})"


def restrict_pointing(p: PointedModule, inc: ModuleMap) -> PointedModule:
    """Pointed structure on a submodule given by an injective ``inc``."""
    tor, tinc = torsion(p.filter, inc.source)
    gens = list(tinc.matrix.data)
    return PointedModule(inc.source, p.target, gens, [p.point(inc(g)) for g in gens])


class PointedMap:
    """A module map compatible with the pointings."""

    def __init__(self, underlying: ModuleMap, source: PointedModule, target: PointedModule,
                 check: bool = True):
        if source.target != target.target:
            raise InvariantViolation("pointed modules over different torsion targets")
        self.underlying = underlying
        self.source = source
        self.target = target
        if check:
            for g, v in zip(source.torsion_generators(), source.torsion_gen_images()):
                if target.point(underlying(g)) != v:
                    raise IncompatibleMap("map is not compatible with the pointings")

    @property
    def matrix(self) -> IntMatrix:
        return self.underlying.matrix

    def __call__(self, x):
        return self.underlying(x)

    def compose(self, inner: "PointedMap") -> "PointedMap":
        return PointedMap(self.underlying.compose(inner.underlying), inner.source, self.target,
                          check=False)

    def is_injective(self) -> bool:
        return self.underlying.is_injective()

    def is_surjective(self) -> bool:
        return self.underlying.is_surjective()

    def is_isomorphism(self) -> bool:
        return self.underlying.is_isomorphism()

    def __eq__(self, other):
        return isinstance(other, PointedMap) and self.underlying == other.underlying

    def __hash__(self):
        return hash(self.underlying)

    @classmethod
    def identity(cls, m: PointedModule) -> "PointedMap":
        return cls(ModuleMap.identity(m.module), m, m, check=False)

    def __repr__(self):
        return f"PointedMap({self.underlying!r})"


class JTExtension:
    """An injective J-map of pointed modules ``inc: base -> total``."""

    def __init__(self, base: PointedModule, total: PointedModule, inc: PointedMap):
        self.base = base
        self.total = total
        self.inc = inc
        if not inc.is_injective():
            raise InvariantViolation("inclusion of a (J,T)-extension must be injective")
        if not is_jmap(total.filter, inc.underlying):
            raise InvariantViolation("inclusion of a (J,T)-extension must be a J-map")

    @classmethod
    def trivial(cls, base: PointedModule) -> "JTExtension":
        return cls(base, base, PointedMap.identity(base))

    @property
    def filter(self):
        return self.total.filter

    def quotient_order(self) -> int | None:
        q, _ = quotient(self.total.module, self.inc.underlying)
        return q.order()

    def __repr__(self):
        return f"JTExtension({self.base.module.describe()} -> {self.total.module.describe()})"


def is_pure(f) -> bool:
    """``D_J(f(L), M) == f(L) + M[J]``."""
    j = f.target.filter
    u = f.underlying
    m = u.target
    _, dinc = divide_filter(j, u)
    _, tinc = torsion(j, m)
    _, sinc = sum_submodules(m, u.matrix, tinc.matrix)
    return same_submodule(dinc, sinc)


class Pushout:
    """Result of ``pushout``: the pointed module with its two maps."""

    def __init__(self, module, i, j, f, g, presentation, from_presentation):
        self.module = module
        self.i = i
        self.j = j
        self.f = f
        self.g = g
        self._pres = presentation
        self._from_pres = from_presentation

    def mediator(self, k: PointedMap, l: PointedMap) -> PointedMap:
        """The unique map ``phi`` with ``phi o i = k`` and ``phi o j = l``."""
        q = k.target
        stacked = k.matrix.stack(l.matrix)
        phi0 = ModuleMap(self._pres, q.module, stacked)
        phi = phi0.compose(self._from_pres)
        return PointedMap(phi, self.module, q)

    def __iter__(self):
        return iter((self.module, self.i, self.j))


def pushout(f: PointedMap, g: PointedMap) -> Pushout:
    """Pushout of pointed modules along ``f: L -> M`` (injective, pure) and ``g: L -> N``."""
    if f.source.target != g.source.target:
        raise InvariantViolation("maps over different torsion targets")
    if not f.is_injective() or not is_pure(f):
        raise NotPure("the first map must be injective and pure")
    pm, pn = f.target, g.target
    t = pm.target
    m, n = pm.module, pn.module
    s_mod, (im, jn), _ = direct_sum(m, n)
    rels = [tuple(a) + tuple(-b for b in c) for a, c in zip(f.matrix.data, g.matrix.data)]
    # K: pairs (a, b) of torsion elements with s(a) + t(b) = 0
    tor_sum, (ta, tb), _ = direct_sum(pm.tor, pn.tor)
    level = lcm(max(pm.tor_level(), 1), max(pn.tor_level(), 1))
    x = t.level_module(level)
    rows = [t.to_level(r, level) for r in pm.torsion_gen_images()]
    rows += [t.to_level(r, level) for r in pn.torsion_gen_images()]
    u = ModuleMap(tor_sum, x, IntMatrix(rows, cols=t.s), check=False)
    _, kinc = kernel(u)
    a_inc, b_inc = pm.tor_inc.matrix, pn.tor_inc.matrix
    for r in kinc.matrix.data:
        a, b = r[: pm.tor.ngens], r[pm.tor.ngens:]
        rels.append(a_inc.vecmul(a) + b_inc.vecmul(b))
    pres, _ = quotient(s_mod, IntMatrix(rels, cols=s_mod.ngens))
    canon, iso = simplify(pres)
    to_canon = factor_through(ModuleMap.identity(pres), iso)
    i_mat = to_canon.compose(ModuleMap(m, pres, im.matrix, check=False))
    j_mat = to_canon.compose(ModuleMap(n, pres, jn.matrix, check=False))
    gens, images = [], []
    for gm, v in zip(pm.torsion_generators(), pm.torsion_gen_images()):
        gens.append(i_mat(gm))
        images.append(v)
    for gn, v in zip(pn.torsion_generators(), pn.torsion_gen_images()):
        gens.append(j_mat(gn))
        images.append(v)
    pt = PointedModule(canon, t, gens, images)
    i = PointedMap(i_mat, pm, pt)
    j = PointedMap(j_mat, pn, pt)
    return Pushout(pt, i, j, f, g, pres, iso)


def count_mediators(po: Pushout, k: PointedMap, l: PointedMap) -> int:
    """Brute-force number of pointed maps ``phi`` with ``phi o i = k`` and ``phi o j = l``."""
    p = po.module
    both, (a, b), _ = direct_sum(po.i.source.module, po.j.source.module)
    ij = ModuleMap(both, p.module, po.i.matrix.stack(po.j.matrix), check=False)
    kl = ModuleMap(both, k.target.module, k.matrix.stack(l.matrix), check=False)
    count = 0
    for phi in extensions_along(ij, kl):
        try:
            PointedMap(phi, p, k.target)
        except IncompatibleMap:
            continue
        count += 1
    return count


class SaturatedModule:
    """Saturation ``T + M/M[J]`` of a pointed module, kept structurally.

    ``proj`` is ``M -> M/M[J]`` and ``psi`` sends ``m`` to ``s(pi(m))`` where
    ``pi`` is a projection of ``M`` onto ``M[J]``; the structural map
    ``M -> sat(M)`` is ``m -> (psi(m), proj(m))``.
    """

    def __init__(self, source: PointedModule):
        self.source = source
        self.target = source.target
        m = source.module
        q, proj = quotient(m, source.tor_inc)
        self.free_part, iso = simplify(q)
        self.proj = factor_through(ModuleMap.identity(q), iso).compose(proj)
        self._pi = torsion_projection(source.filter, m)

    def psi(self, x) -> TVec:
        return self.source.point(self._pi(x))

    def incs(self, x):
        return self.psi(x), self.proj(x)

    def min_level(self) -> int:
        return max(self.source.tor_level(), 1)

    def window(self, level: int) -> tuple[PointedModule, PointedMap]:
        """Level-``L`` piece ``M/M[J] + T[L]`` with the pointed map from ``M``.

        It is the pushout of ``T[L] <- M[J] -> M`` and needs ``exp(M[J]) | L``.
        """
        if level % self.min_level():
            raise PreconditionError(f"level must be a multiple of {self.min_level()}")
        t = self.target
        f = self.free_part
        x = t.level_module(level)
        total, (_, b), _ = direct_sum(f, x)
        m = self.source.module
        rows = []
        for g in m.gens():
            rows.append(tuple(self.proj(g)) + t.to_level(self.psi(g), level))
        gens = [b(unit(t.s, i)) for i in range(t.s)]
        images = [t.from_level(unit(t.s, i), level) for i in range(t.s)]
        pm = PointedModule(total, t, gens, images)
        inc = PointedMap(ModuleMap(m, total, IntMatrix(rows, cols=total.ngens)), self.source, pm)
        return pm, inc

    def describe(self) -> str:
        t = self.target
        base = "Q/Z" if t.prime is None else f"Z[1/{t.prime}]/Z"
        return f"{self.free_part.describe()} + ({base})^{t.s}"


def saturate(m) -> SaturatedModule:
    if isinstance(m, SaturatedModule):
        return m
    return SaturatedModule(m)


def _pointed_sub(p: PointedModule, inc: ModuleMap) -> PointedModule:
    return restrict_pointing(p, inc)


def pullback(phi: PointedMap, ext: JTExtension) -> JTExtension:
    """``D_J(i(phi(L)), N)`` as an extension of ``phi(L)`` (of ``L`` when ``phi`` is injective).

    The result carries ``into_original``, the inclusion of its total into ``ext.total``.
    """
    j = ext.filter
    i = ext.inc.underlying
    iphi = i.compose(phi.underlying)
    _, dinc = divide_filter(j, iphi)
    total = _pointed_sub(ext.total, dinc)
    if phi.is_injective():
        base = phi.source
        inc = factor_through(iphi, dinc)
    else:
        _, img = submodule(phi.target.module, phi.matrix)
        base = _pointed_sub(phi.target, img)
        inc = factor_through(i.compose(img), dinc)
    out = JTExtension(base, total, PointedMap(inc, base, total))
    out.into_original = PointedMap(dinc, total, ext.total, check=False)
    return out


def pushforward(phi: PointedMap, ext: JTExtension) -> JTExtension:
    """Pushout of ``ext.inc`` along ``phi``; carries ``from_original`` and ``pushout``."""
    po = pushout(phi, ext.inc)
    out = JTExtension(phi.target, po.module, po.i)
    out.from_original = po.j
    out.pushout = po
    return out


def pullback_map(phi: PointedMap, h: PointedMap, a: JTExtension, b: JTExtension) -> PointedMap:
    """``phi^*(h)`` for a map ``h: a -> b`` of extensions of ``phi.target``."""
    pa, pb = pullback(phi, a), pullback(phi, b)
    u = h.underlying.compose(pa.into_original.underlying)
    return PointedMap(factor_through(u, pb.into_original.underlying), pa.total, pb.total)


def pushforward_map(phi: PointedMap, h: PointedMap, a: JTExtension, b: JTExtension) -> PointedMap:
    """``phi_*(h)`` for a map ``h: a -> b`` of extensions of ``phi.source``."""
    pa, pb = pushforward(phi, a), pushforward(phi, b)
    return pa.pushout.mediator(pb.pushout.i, pb.from_original.compose(h))


def extension_maps(a: JTExtension, b: JTExtension) -> list[PointedMap]:
    """All maps of (J,T)-extensions ``a -> b`` over the same base."""
    if a.base.module != b.base.module:
        raise PreconditionError("extensions must share their base")
    out = []
    for f in extensions_along(a.inc.underlying, b.inc.underlying):
        try:
            out.append(PointedMap(f, a.total, b.total))
        except IncompatibleMap:
            continue
    return out


def isomorphic_extensions(a: JTExtension, b: JTExtension) -> bool:
    return any(f.is_surjective() for f in extension_maps(a, b))


def unit_map(phi: PointedMap, n: JTExtension) -> PointedMap:
    """``n -> phi^* phi_* n``."""
    pf = pushforward(phi, n)
    pb = pullback(phi, pf)
    u = factor_through(pf.from_original.underlying, pb.into_original.underlying)
    return PointedMap(u, n.total, pb.total)


def counit_map(phi: PointedMap, p: JTExtension) -> PointedMap:
    """``phi_* phi^* p -> p``."""
    pb = pullback(phi, p)
    pf = pushforward(phi, pb)
    return pf.pushout.mediator(p.inc, pb.into_original)


def _ext_over(base: PointedModule, total: PointedModule, inc: PointedMap) -> JTExtension:
    return JTExtension(base, total, inc)


def adjunction_bijection(phi: PointedMap, n: JTExtension, p: JTExtension):
    """Both hom-sets and the map ``Psi: Hom(n, phi^* p) -> Hom(phi_* n, p)``."""
    pb = pullback(phi, p)
    pf = pushforward(phi, n)
    left = extension_maps(n, pb)
    right = extension_maps(pf, p)
    psi = []
    for h in left:
        l = pb.into_original.compose(h)
        psi.append(pf.pushout.mediator(p.inc, l))
    return left, right, psi


def adjunction_check(phi: PointedMap, n: JTExtension, p: JTExtension) -> bool:
    """Hom-set bijection through ``Psi`` plus both triangle identities."""
    if not phi.is_injective() or not is_pure(phi):
        raise NotPure("adjunction needs an injective pure map")
    left, right, psi = adjunction_bijection(phi, n, p)
    if len(left) != len(right):
        return False
    if len(set(psi)) != len(psi) or not all(any(x == y for y in right) for x in psi):
        return False
    # triangle 1: eps_{phi_* n} o phi_*(eta_n) = id
    pf = pushforward(phi, n)
    eta = unit_map(phi, n)
    target = pullback(phi, pf)
    step = pushforward_map(phi, eta, n, target)
    eps = counit_map(phi, pf)
    if eps.compose(step).underlying != ModuleMap.identity(pf.total.module):
        return False
    # triangle 2: phi^*(eps_p) o eta_{phi^* p} = id
    pb = pullback(phi, p)
    eta2 = unit_map(phi, pb)
    eps_p = counit_map(phi, p)
    mid = pushforward(phi, pb)
    back = pullback_map(phi, eps_p, mid, p)
    if back.compose(eta2).underlying != ModuleMap.identity(pb.total.module):
        return False
    return True


__all__ = [
    "JTExtension",
    "PointedMap",
    "PointedModule",
    "Pushout",
    "SaturatedModule",
    "TorsionTarget",
    "adjunction_bijection",
    "adjunction_check",
    "count_mediators",
    "counit_map",
    "extension_maps",
    "is_pure",
    "isomorphic_extensions",
    "pullback",
    "pullback_map",
    "pushforward",
    "pushforward_map",
    "pushout",
    "restrict_pointing",
    "saturate",
    "unit_map",
]
