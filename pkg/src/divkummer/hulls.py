"""J-hulls and maximal (J,T)-extensions of finitely generated Z-modules.

A hull ``Z[1/p]^r + (T-part) + residual`` is never built in full; quantifiers run
inside the level-``L`` window ``{x : L x in iota(M)}``, which is a finitely
generated module containing every extension whose quotient is killed by ``L``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import LevelTooSmall, PreconditionError
from .exactalg import (
    FgModule,
    IntMatrix,
    ModuleMap,
    coords_in,
    cyclic_sum,
    direct_sum,
    extensions_along,
    free_module,
    preimage,
    quotient,
    same_submodule,
    scalar_map,
    submodule,
)
from .modfilter import IdealFilter, is_p_power, p_part
from .pointed import JTExtension, PointedMap, PointedModule, TorsionTarget, saturate


class HullWindow:
    """The level-``L`` window of a hull: a module with the embedding of the source."""

    def __init__(self, hull, level, module, iota, pointed, tpart_inc, tlevel):
        self.hull = hull
        self.level = level
        self.module = module
        self.iota = iota
        self.pointed = pointed
        self._tinc = tpart_inc
        self._tlevel = tlevel

    def to_element(self, w: Sequence[int]):
        """Exact coordinates ``(free rationals, T vector, residual vector)``."""
        h = self.hull
        r, ntp = h.rank, self._tinc.source.ngens
        free = tuple(Fraction(c, self.level) for c in w[:r])
        tvec = h.target.from_level(self._tinc(w[r:r + ntp]), self._tlevel)
        res = h.residual.reduce(w[r + ntp:])
        return free, tvec, res

    def from_element(self, free, tvec, res) -> tuple[int, ...]:
        h = self.hull
        fc = []
        for q in free:
            y = Fraction(q) * self.level
            if y.denominator != 1:
                raise PreconditionError("free coordinate outside the window")
            fc.append(int(y))
        c = coords_in(self._tinc, h.target.to_level(h.target.normalize(tvec), self._tlevel))
        if c is None:
            raise PreconditionError("torsion coordinate outside the window")
        return tuple(fc) + tuple(c) + tuple(res)

    def extension(self) -> JTExtension:
        """The window as a (J,T)-extension of the pointed source."""
        base = self.hull.base
        return JTExtension(base, self.pointed, PointedMap(self.iota, base, self.pointed))


class DivisibleHull:
    """``Z[1/p]^r + T + residual`` (or ``Q^r + T + 0`` for the filter ``inf``).

    ``base`` is the pointed source; the images of its generators are
    ``free_images`` (integer vectors in ``Z^r``), ``torsion_images`` (in ``T``)
    and ``residual_images``.
    """

    def __init__(self, base: PointedModule):
        if not base.module.ring.is_integers:
            raise PreconditionError("hulls are constructed for Z-modules only")
        self.base = base
        self.source = base.module
        self.target = base.target
        self.prime = base.target.prime
        sat = saturate(base)
        f = sat.free_part
        tor_pos = [i for i, d in enumerate(f.factors) if d]
        free_pos = [i for i, d in enumerate(f.factors) if d == 0]
        self.rank = len(free_pos)
        self.prufer_count = base.target.s
        self.residual = cyclic_sum([f.factors[i] for i in tor_pos])
        self.free_images, self.torsion_images, self.residual_images = [], [], []
        for g in self.source.gens():
            c = f.to_canonical(sat.proj(g))
            self.free_images.append(tuple(c[i] for i in free_pos))
            self.residual_images.append(tuple(c[i] for i in tor_pos))
            self.torsion_images.append(sat.psi(g))

    @property
    def filter(self) -> IdealFilter:
        return self.target.filter

    def shape(self) -> dict:
        return {
            "localized_rank": self.rank,
            "prufer_count": self.prufer_count,
            "residual": list(self.residual.factors),
            "prime": self.prime,
        }

    def describe(self) -> str:
        loc = "Q" if self.prime is None else f"Z[1/{self.prime}]"
        tor = "Q/Z" if self.prime is None else f"Z[1/{self.prime}]/Z"
        parts = []
        if self.rank:
            parts.append(f"({loc})^{self.rank}")
        if self.prufer_count:
            parts.append(f"({tor})^{self.prufer_count}")
        if self.residual.factors:
            parts.append(self.residual.describe())
        return " + ".join(parts) if parts else "0"

    def check_level(self, level: int) -> None:
        if level < 1:
            raise PreconditionError("level must be positive")
        if self.prime is not None and not is_p_power(level, self.prime):
            raise PreconditionError(f"level must be a power of {self.prime}")

    def window(self, level: int) -> HullWindow:
        """``{x in Gamma : level * x in iota(M)}`` with the embedding of ``M``."""
        self.check_level(level)
        t = self.target
        e = self.base.tor_level()
        tl = level * e
        x = t.level_module(tl)
        smap = self.base.level_map(tl)
        tpart, tinc = preimage(scalar_map(x, level), smap)
        w, (a, b, c), _ = direct_sum(free_module(self.rank), tpart, self.residual)
        rows = []
        for fi, ti, ri in zip(self.free_images, self.torsion_images, self.residual_images):
            tc = coords_in(tinc, t.to_level(ti, tl))
            rows.append(tuple(level * v for v in fi) + tuple(tc) + tuple(ri))
        iota = ModuleMap(self.source, w, IntMatrix(rows, cols=w.ngens))
        gens = [b(g) for g in tpart.gens()]
        images = [t.from_level(tinc(g), tl) for g in tpart.gens()]
        pointed = PointedModule(w, t, gens, images)
        return HullWindow(self, level, w, iota, pointed, tinc, tl)


def canonical_pointing(j: IdealFilter, m: FgModule) -> PointedModule:
    """Point ``m`` into ``k`` Prufer coordinates, one per cyclic factor with
    nontrivial J-part, sending the factor generator to ``1/a`` (``a`` its J-part)."""
    if j.kind not in ("ppower", "all"):
        raise PreconditionError("hulls are built for the filters p^inf and inf")
    prime = j.p if j.kind == "ppower" else None
    parts = []
    for i, d in enumerate(m.factors):
        if d == 0:
            continue
        a = p_part(d, prime) if prime else d
        if a > 1:
            parts.append((i, d, a))
    t = TorsionTarget(len(parts), prime)
    gens, images = [], []
    for k, (i, d, a) in enumerate(parts):
        c = [0] * len(m.factors)
        c[i] = d // a
        gens.append(m.from_canonical(c))
        images.append(tuple(Fraction(1, a) if kk == k else 0 for kk in range(len(parts))))
    return PointedModule(m, t, gens, images)


def jhull(j: IdealFilter, m: FgModule) -> DivisibleHull:
    """J-hull of a finitely generated Z-module."""
    if not m.ring.is_integers:
        raise PreconditionError("hulls are constructed for Z-modules only")
    return DivisibleHull(canonical_pointing(j, m))


def maximal_extension(m: PointedModule) -> DivisibleHull:
    """Hull of the saturation: the maximal (J,T)-extension of ``m``."""
    return DivisibleHull(m)


def quotient_exponent(ext: JTExtension) -> int:
    q, _ = quotient(ext.total.module, ext.inc.underlying)
    if not q.is_finite():
        raise PreconditionError("extension quotient is not finite")
    return q.exponent()


def min_level(ext: JTExtension, gamma: DivisibleHull) -> int:
    e = quotient_exponent(ext)
    if gamma.prime is not None:
        e = p_part(e, gamma.prime)
    return e


def embeddings_at_level(ext: JTExtension, gamma: DivisibleHull, level: int) -> list[ModuleMap]:
    """All injective maps ``f: N -> Gamma_L`` with ``f o i = iota``."""
    gamma.check_level(level)
    if ext.base.module != gamma.source:
        raise PreconditionError("extension and hull have different bases")
    need = min_level(ext, gamma)
    if level % need:
        raise LevelTooSmall(f"level {level} is too small", need)
    w = gamma.window(level)
    return [f for f in extensions_along(ext.inc.underlying, w.iota) if f.is_injective()]


def is_normal(ext: JTExtension, gamma: DivisibleHull, level: int) -> bool:
    """Whether all embeddings over ``iota`` at the given level share one image."""
    embs = embeddings_at_level(ext, gamma, level)
    if not embs:
        raise PreconditionError("no embedding found; is the extension a (J,T)-extension of the hull's base?")
    first = embs[0]
    _, i0 = submodule(first.target, first.matrix)
    for f in embs[1:]:
        _, i1 = submodule(f.target, f.matrix)
        if not same_submodule(i0, i1):
            return False
    return True


def subextension(window: HullWindow, elements: Sequence[Sequence[int]]) -> JTExtension:
    """Extension of the base generated inside a hull window by ``iota(M)`` and ``elements``."""
    w = window.module
    gens = IntMatrix(list(window.iota.matrix.data) + [tuple(e) for e in elements], cols=w.ngens)
    n, inc = submodule(w, gens)
    pointed = _restrict(window.pointed, inc)
    from .exactalg import factor_through

    i = factor_through(window.iota, inc)
    base = window.hull.base
    return JTExtension(base, pointed, PointedMap(i, base, pointed))


def _restrict(p: PointedModule, inc: ModuleMap) -> PointedModule:
    from .pointed import restrict_pointing

    return restrict_pointing(p, inc)


__all__ = [
    "DivisibleHull",
    "HullWindow",
    "canonical_pointing",
    "embeddings_at_level",
    "is_normal",
    "jhull",
    "maximal_extension",
    "min_level",
    "subextension",
]
