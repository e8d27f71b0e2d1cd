"""Joint kernels and the lattice duality between submodules of a finite module
``M`` and End(T)-submodules of ``Hom(M, T)``.

Everything is computed at the level ``e = exponent(M)``: ``Hom(M, T) = Hom(M, T[e])``
and ``End(T)`` acts through ``s x s`` matrices modulo ``e``.
"""

from __future__ import annotations

from typing import Sequence

from .errors import EnumerationLimit, IllDefinedMap, InputError, PreconditionError
from .exactalg import (
    FgModule,
    IntMatrix,
    ModuleMap,
    direct_sum,
    hnf,
    hom_module,
    kernel,
    quotient,
    submodule,
)
from .pointed import TorsionTarget

MAX_LATTICE = 2**10


class HomElement:
    """A homomorphism ``M -> T`` stored as the images of the generators of ``M``."""

    def __init__(self, source: FgModule, target: TorsionTarget, images: Sequence):
        if len(images) != source.ngens:
            raise IllDefinedMap("one image per generator is required")
        self.source = source
        self.target = target
        self.images = tuple(target.normalize(v) for v in images)
        for r in source.relations.data:
            if any(target.combine(r, self.images)):
                raise IllDefinedMap("images do not respect the relations")
        if not source.ring.is_integers:
            for i, g in enumerate(source.gens()):
                if self(source.act(g)) != target.act(self.images[i]):
                    raise IllDefinedMap("map does not commute with the ring action")

    def __call__(self, x):
        return self.target.combine(x, self.images)

    def to_level_map(self, level: int) -> ModuleMap:
        x = self.target.level_module(level)
        rows = [self.target.to_level(v, level) for v in self.images]
        return ModuleMap(self.source, x, IntMatrix(rows, cols=self.target.s), check=False)

    @classmethod
    def from_level_map(cls, f: ModuleMap, target: TorsionTarget, level: int) -> "HomElement":
        return cls(f.source, target, [target.from_level(r, level) for r in f.matrix.data])

    def __eq__(self, other):
        return isinstance(other, HomElement) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"HomElement({[[str(x) for x in v] for v in self.images]})"


class EndLevel:
    """``End_R(T)`` at level ``e``: Z-basis of ``s x s`` matrices mod ``e``
    (all matrices over Z, the commutant of the action over a quadratic order)."""

    def __init__(self, level: int, s: int, action=None):
        if level < 1:
            raise PreconditionError("level must be positive")
        self.level = level
        self.s = s
        self.action = action
        if action is None:
            self.basis = [self._eij(i, j) for i in range(s) for j in range(s)]
        else:
            self.basis = self._commutant_basis(IntMatrix(action, cols=s) if not isinstance(action, IntMatrix) else action)

    def _eij(self, i, j) -> IntMatrix:
        return IntMatrix([[int(a == i and b == j) for b in range(self.s)] for a in range(self.s)], cols=self.s)

    def _commutant_basis(self, w: IntMatrix) -> list[IntMatrix]:
        s, e = self.s, self.level
        n = s * s
        space = FgModule(n, IntMatrix([tuple(e * int(i == j) for j in range(n)) for i in range(n)], cols=n))
        rows = []
        for i in range(s):
            for j in range(s):
                x = self._eij(i, j)
                c = (x @ w).data
                d = (w @ x).data
                rows.append(tuple(c[a][b] - d[a][b] for a in range(s) for b in range(s)))
        k, inc = kernel(ModuleMap(space, space, IntMatrix(rows, cols=n), check=False))
        out = []
        for r in inc.matrix.data:
            out.append(IntMatrix([[r[a * s + b] % e for b in range(s)] for a in range(s)], cols=s))
        return out

    def is_closed(self) -> bool:
        """Identity in the span and the span closed under products (mod ``level``)."""
        s, e = self.s, self.level
        n = s * s
        span = FgModule(n, IntMatrix([tuple(e * int(i == j) for j in range(n)) for i in range(n)], cols=n))
        flat = IntMatrix([sum(b.data, ()) for b in self.basis], cols=n)

        def inside(m: IntMatrix) -> bool:
            from .exactalg import contains

            return contains(span, flat, sum(m.data, ()))

        if not inside(IntMatrix.identity(s)):
            return False
        return all(inside(a @ b) for a in self.basis for b in self.basis)


def _check_nonempty(v):
    if not v:
        raise InputError("the family of homomorphisms is empty")


def joint_kernel(v: Sequence[HomElement]) -> tuple[FgModule, ModuleMap]:
    """Intersection of the kernels of the maps in ``v``."""
    _check_nonempty(v)
    m = v[0].source
    e = max(m.exponent(), 1)
    for f in v:
        if f.source != m:
            raise PreconditionError("all maps must share their source")
    maps = [f.to_level_map(e) for f in v]
    big, _, _ = direct_sum(*[f.target for f in maps])
    rows = [sum((f.matrix.row(i) for f in maps), ()) for i in range(m.ngens)]
    return kernel(ModuleMap(m, big, IntMatrix(rows, cols=big.ngens), check=False))


class HomSpace:
    """``Hom_R(M, T)`` as a finite module with the End(T) action."""

    def __init__(self, m: FgModule, target: TorsionTarget, endlevel: EndLevel | None = None):
        if not m.is_finite():
            raise PreconditionError("M must be finite")
        self.m = m
        self.target = target
        self.level = max(m.exponent(), 1)
        self.endlevel = endlevel or EndLevel(self.level, target.s,
                                             None if target.action is None else target.action)
        self.x = target.level_module(self.level)
        self.hom = hom_module(m, self.x)
        self.module = self.hom.module

    def element(self, h) -> HomElement:
        return HomElement.from_level_map(self.hom.to_map(h), self.target, self.level)

    def coords(self, f: HomElement):
        return self.hom.from_map(f.to_level_map(self.level))

    def act(self, h, e: IntMatrix):
        f = self.hom.to_map(h)
        mat = IntMatrix([tuple(c % self.level for c in r) for r in (f.matrix @ e).data], cols=self.target.s)
        return self.hom.from_map(ModuleMap(self.m, self.x, mat, check=False))

    def end_span_gens(self, hs) -> list:
        return [self.act(h, b) for h in hs for b in self.endlevel.basis] + list(hs)

    def evaluation(self, x) -> ModuleMap:
        """``h -> h(x)`` as a map ``Hom -> T[e]``."""
        rows = [self.hom.to_map(g)(x) for g in self.module.gens()]
        return ModuleMap(self.module, self.x, IntMatrix(rows, cols=self.target.s), check=False)


def _key(mod: FgModule, gens) -> tuple:
    """Canonical key of the submodule of a finite module spanned by ``gens``."""
    k = len(mod.factors)
    rows = [mod.to_canonical(g) for g in gens]
    rows += [tuple(d * int(i == j) for j in range(k)) for i, d in enumerate(mod.factors)]
    if not rows:
        return ()
    return tuple(r for r in hnf(IntMatrix(rows, cols=k)).data if any(r))


def _key_gens(mod: FgModule, key) -> list:
    return [mod.from_canonical(r) for r in key]


def closure(v: Sequence[HomElement], endlevel: EndLevel | None = None):
    """``(W, equal)``: all maps vanishing on ``ker(v)``, and whether the
    End-module generated by ``v`` already equals ``W``."""
    _check_nonempty(v)
    m = v[0].source
    space = HomSpace(m, v[0].target, endlevel)
    ker, kinc = joint_kernel(v)
    q, proj = quotient(m, kinc)
    hq = hom_module(q, space.x)
    w_gens = [space.hom.from_map(f.compose(proj)) for f in hq.maps()]
    w_key = _key(space.module, w_gens)
    span_key = _key(space.module, space.end_span_gens([space.coords(f) for f in v]))
    w = [space.element(h) for h in _elements_of_key(space.module, w_key)]
    return w, w_key == span_key


def _elements_of_key(mod: FgModule, key) -> list:
    sub, inc = submodule(mod, _key_gens(mod, key) or IntMatrix([], cols=mod.ngens))
    return [inc(x) for x in sub.elements()]


def _lattice(mod: FgModule, cyclic_gens) -> set:
    zero = _key(mod, [])
    cyclic = {_key(mod, g) for g in cyclic_gens}
    seen = {zero} | cyclic
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for c in cyclic:
                s = _key(mod, _key_gens(mod, a) + _key_gens(mod, c))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
                    if len(seen) > MAX_LATTICE:
                        raise EnumerationLimit("submodule lattice too large")
        frontier = nxt
    return seen


def _contained(mod, a, b) -> bool:
    return _key(mod, _key_gens(mod, a) + _key_gens(mod, b)) == b


class DualityReport:
    def __init__(self, submodules, end_submodules, inverse_ok, reversing_ok):
        self.submodules = submodules
        self.end_submodules = end_submodules
        self.inverse_ok = inverse_ok
        self.reversing_ok = reversing_ok

    @property
    def holds(self) -> bool:
        return (self.inverse_ok and self.reversing_ok
                and len(self.submodules) == len(self.end_submodules))


def duality_lattices(m: FgModule, target: TorsionTarget, endlevel: EndLevel | None = None) -> DualityReport:
    space = HomSpace(m, target, endlevel)
    hmod = space.module
    if m.order() > MAX_LATTICE or hmod.order() > 64 * MAX_LATTICE:
        raise EnumerationLimit("module too large for lattice enumeration")
    melems = list(m.elements())
    r_cyc = [[x] + ([m.act(x)] if not m.ring.is_integers else []) for x in melems]
    subs = _lattice(m, r_cyc)
    helems = list(hmod.elements())
    e_cyc = [space.end_span_gens([h]) for h in helems]
    esubs = _lattice(hmod, e_cyc)
    def ann(key):
        gens = _key_gens(m, key)
        if not gens:
            return _key(hmod, hmod.gens())
        maps = [space.evaluation(x) for x in gens]
        big, _, _ = direct_sum(*[f.target for f in maps])
        rows = [sum((f.matrix.row(i) for f in maps), ()) for i in range(hmod.ngens)]
        _, inc = kernel(ModuleMap(hmod, big, IntMatrix(rows, cols=big.ngens), check=False))
        return _key(hmod, inc.matrix.data)

    def ker(key):
        gens = _key_gens(hmod, key)
        if not gens:
            return _key(m, m.gens())
        fs = [space.element(h) for h in gens]
        _, inc = joint_kernel(fs)
        return _key(m, inc.matrix.data)

    a_of = {k: ann(k) for k in subs}
    k_of = {k: ker(k) for k in esubs}
    inverse_ok = all(a_of[k] in esubs and k_of[a_of[k]] == k for k in subs)
    inverse_ok = inverse_ok and all(k_of[v] in subs and a_of[k_of[v]] == v for v in esubs)
    reversing_ok = True
    for a in subs:
        for b in subs:
            if _contained(m, a, b) and not _contained(hmod, a_of[b], a_of[a]):
                reversing_ok = False
    for a in esubs:
        for b in esubs:
            if _contained(hmod, a, b) and not _contained(m, k_of[b], k_of[a]):
                reversing_ok = False
    return DualityReport(subs, esubs, inverse_ok, reversing_ok)


def duality_check(m: FgModule, s: int, endlevel: EndLevel | None = None, target: TorsionTarget | None = None) -> bool:
    """Submodules of ``M`` and End-submodules of ``Hom(M, T^s)`` correspond
    bijectively and inclusion-reversingly through ``Ann`` and ``ker``."""
    target = target or TorsionTarget(s)
    return duality_lattices(m, target, endlevel).holds


def is_cogenerated(m: FgModule, target: TorsionTarget) -> bool:
    """Joint kernel of all of ``Hom(M, T)`` is zero."""
    space = HomSpace(m, target)
    fs = [space.element(h) for h in space.module.elements()]
    if not fs:
        return m.is_zero_module()
    k, _ = joint_kernel(fs)
    return k.is_zero_module()


__all__ = [
    "DualityReport",
    "EndLevel",
    "HomElement",
    "HomSpace",
    "closure",
    "duality_check",
    "duality_lattices",
    "is_cogenerated",
    "joint_kernel",
]
