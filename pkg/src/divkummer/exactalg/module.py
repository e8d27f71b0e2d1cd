"""Finitely generated modules over Z and imaginary quadratic orders.

A module is ``Z^g / rowspace(relations)``; elements are integer row vectors of
length ``g`` (generator coordinates).  Over a quadratic order ``Z[w]`` with
``w^2 - t w + n = 0`` the module additionally carries the matrix ``A`` of
multiplication by ``w`` (acting as ``x -> x @ A``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import product
from math import gcd, prod
from typing import Iterable, Iterator, Sequence

from ..errors import (
    BadAction,
    BadDiscriminant,
    EnumerationLimit,
    IllDefinedMap,
    InfiniteSearch,
    RingMismatch,
)
from .matrix import (
    IntMatrix,
    as_matrix,
    hnf,
    inverse_unimodular,
    lcm,
    left_kernel,
    snf,
    solve_left,
)

Vector = tuple[int, ...]


def max_enum() -> int:
    return int(os.environ.get("DIVKUMMER_MAX_ENUM", 10**6))


def check_enum(count: int, what: str = "enumeration") -> None:
    if count > max_enum():
        raise EnumerationLimit(f"{what} of size {count} exceeds DIVKUMMER_MAX_ENUM={max_enum()}")


def vadd(x: Sequence[int], y: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Sequence[int], y: Sequence[int]) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def vscale(k: int, x: Sequence[int]) -> Vector:
    return tuple(k * a for a in x)


def unit(n: int, i: int) -> Vector:
    return tuple(int(j == i) for j in range(n))


@dataclass(frozen=True)
class Ring:
    """``Z`` or the order ``Z[w]/(w^2 - t w + n)`` with ``t^2 - 4n < 0``."""

    kind: str = "Z"
    t: int = 0
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "quadratic"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "quadratic" and self.t * self.t - 4 * self.n >= 0:
            raise BadDiscriminant(
                f"t^2 - 4n = {self.t * self.t - 4 * self.n} is not negative"
            )

    @property
    def is_integers(self) -> bool:
        return self.kind == "Z"

    @property
    def discriminant(self) -> int:
        return self.t * self.t - 4 * self.n

    def __str__(self):
        if self.is_integers:
            return "Z"
        return f"Z[w]/(w^2 - {self.t}w + {self.n})"


ZZ = Ring()


def quadratic_order(t: int, n: int) -> Ring:
    return Ring("quadratic", t, n)


def _diag_relations(factors: Sequence[int]) -> IntMatrix:
    k = len(factors)
    return IntMatrix([vscale(d, unit(k, i)) for i, d in enumerate(factors) if d], cols=k)


class FgModule:
    """A finitely presented module; equality compares canonical SNF data."""

    def __init__(self, ngens: int, relations=(), action=None, ring: Ring = ZZ, check: bool = True):
        rel = as_matrix(relations, cols=ngens) if not isinstance(relations, IntMatrix) else relations
        if rel.cols != ngens:
            raise ValueError(f"relations have {rel.cols} columns, expected {ngens}")
        h = hnf(rel) if rel.rows else rel
        self.ring = ring
        self.ngens = ngens
        self.relations = IntMatrix([r for r in h.data if any(r)], cols=ngens)
        if action is not None:
            action = as_matrix(action, cols=ngens)
            if action.rows != ngens or action.cols != ngens:
                raise BadAction("action must be a square matrix on the generators")
        if ring.is_integers:
            if action is not None:
                raise BadAction("an action matrix is only meaningful over a quadratic order")
        elif action is None:
            if ngens:
                raise BadAction("modules over a quadratic order need an action matrix")
            action = IntMatrix([], cols=0)
        self.action = action
        self._canon = None
        if check and action is not None and ngens:
            self._check_action()

    def _check_action(self):
        a = self.action
        for r in self.relations.data:
            if not self.is_zero(a.vecmul(r)):
                raise BadAction("action does not preserve the relation lattice")
        t, n = self.ring.t, self.ring.n
        a2 = a @ a
        for i in range(self.ngens):
            v = [a2[i, j] - t * a[i, j] + n * int(i == j) for j in range(self.ngens)]
            if not self.is_zero(v):
                raise BadAction("action does not satisfy w^2 - t w + n = 0")

    # canonical data -----------------------------------------------------
    def _canonical(self):
        if self._canon is None:
            g = self.ngens
            _, s, v = snf(self.relations)
            k = min(s.rows, g)
            d = [s[i, i] if i < k else 0 for i in range(g)]
            keep = [j for j in range(g) if d[j] != 1]
            self._canon = (v, inverse_unimodular(v), d, keep)
        return self._canon

    @property
    def factors(self) -> list[int]:
        """Cyclic factors ``Z/d`` of the canonical decomposition (0 means ``Z``)."""
        _, _, d, keep = self._canonical()
        return [d[j] for j in keep]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.factors if d == 0)

    @property
    def torsion_factors(self) -> list[int]:
        return [d for d in self.factors if d]

    @property
    def canonical_gens(self) -> list[Vector]:
        _, vinv, _, keep = self._canonical()
        return [vinv.row(j) for j in keep]

    def to_canonical(self, x: Sequence[int]) -> Vector:
        v, _, d, keep = self._canonical()
        y = v.vecmul(x)
        return tuple(y[j] % d[j] if d[j] else y[j] for j in keep)

    def from_canonical(self, c: Sequence[int]) -> Vector:
        _, vinv, _, keep = self._canonical()
        full = [0] * self.ngens
        for k, j in enumerate(keep):
            full[j] = c[k]
        return vinv.vecmul(full)

    def reduce(self, x: Sequence[int]) -> Vector:
        return self.from_canonical(self.to_canonical(x))

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.to_canonical(x))

    def equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.is_zero(vsub(x, y))

    @property
    def canonical_action(self) -> tuple[Vector, ...] | None:
        if self.ring.is_integers:
            return None
        return tuple(self.to_canonical(self.action.vecmul(g)) for g in self.canonical_gens)

    def key(self):
        return (self.ring, tuple(self.factors), self.canonical_action)

    def __eq__(self, other):
        return isinstance(other, FgModule) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # sizes ----------------------------------------------------------------
    def is_finite(self) -> bool:
        return self.rank == 0

    def order(self) -> int | None:
        """Number of elements, or ``None`` when infinite."""
        if self.rank:
            return None
        return prod(self.factors)

    def exponent(self) -> int:
        """Exponent of the torsion submodule (1 when torsion-free)."""
        e = 1
        for d in self.torsion_factors:
            e = lcm(e, d)
        return e

    def is_zero_module(self) -> bool:
        return not self.factors

    def element_order(self, x: Sequence[int]) -> int:
        """Additive order of ``x``; 0 when ``x`` has infinite order."""
        e = 1
        for d, c in zip(self.factors, self.to_canonical(x)):
            if d == 0:
                if c:
                    return 0
            else:
                e = lcm(e, d // gcd(d, c))
        return e

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def gens(self) -> list[Vector]:
        return [unit(self.ngens, i) for i in range(self.ngens)]

    def elements(self) -> Iterator[Vector]:
        """All elements (as reduced generator vectors) of a finite module."""
        if not self.is_finite():
            raise InfiniteSearch("cannot enumerate an infinite module")
        check_enum(self.order(), "module enumeration")
        for c in product(*(range(d) for d in self.factors)):
            yield self.from_canonical(c)

    # ring action ----------------------------------------------------------
    def act(self, x: Sequence[int]) -> Vector:
        """Multiplication by the order generator ``w``."""
        return self.action.vecmul(x)

    def ring_mul(self, a: int, b: int, x: Sequence[int]) -> Vector:
        """``(a + b w) * x``."""
        out = vscale(a, x)
        if b:
            out = vadd(out, vscale(b, self.act(x)))
        return out

    def describe(self) -> str:
        if not self.factors:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z/{d}" for d in self.factors)

    def __repr__(self):
        return f"FgModule({self.describe()}, ngens={self.ngens}, ring={self.ring})"


def free_module(rank: int, ring: Ring = ZZ) -> FgModule:
    return cyclic_sum([0] * rank, ring)


def cyclic_sum(factors: Sequence[int], ring: Ring = ZZ) -> FgModule:
    """``Z/d1 + Z/d2 + ...`` over Z (for a quadratic order use ``FgModule``)."""
    if not ring.is_integers and factors:
        raise BadAction("cyclic_sum builds Z-modules only")
    return FgModule(len(factors), _diag_relations(factors), ring=ring)


def zero_module(ring: Ring = ZZ) -> FgModule:
    return FgModule(0, IntMatrix([], cols=0), ring=ring)


class ModuleMap:
    """Homomorphism given by the images of the source generators (rows)."""

    def __init__(self, source: FgModule, target: FgModule, matrix, check: bool = True):
        m = as_matrix(matrix, cols=target.ngens) if not isinstance(matrix, IntMatrix) else matrix
        if m.rows != source.ngens or m.cols != target.ngens:
            raise IllDefinedMap(
                f"matrix shape {m.rows}x{m.cols} does not match {source.ngens}x{target.ngens}"
            )
        if source.ring != target.ring:
            raise RingMismatch("source and target live over different rings")
        self.source = source
        self.target = target
        self.matrix = m
        if check:
            self._check()

    def _check(self):
        for r in self.source.relations.data:
            if not self.target.is_zero(self.matrix.vecmul(r)):
                raise IllDefinedMap("matrix does not respect the source relations")
        if not self.source.ring.is_integers:
            for i in range(self.source.ngens):
                lhs = self.matrix.vecmul(self.source.act(unit(self.source.ngens, i)))
                rhs = self.target.act(self.matrix.row(i))
                if not self.target.equal(lhs, rhs):
                    raise IllDefinedMap("matrix does not commute with the ring action")

    @classmethod
    def identity(cls, m: FgModule) -> "ModuleMap":
        return cls(m, m, IntMatrix.identity(m.ngens), check=False)

    @classmethod
    def zero(cls, a: FgModule, b: FgModule) -> "ModuleMap":
        return cls(a, b, IntMatrix.zeros(a.ngens, b.ngens), check=False)

    def __call__(self, x: Sequence[int]) -> Vector:
        return self.matrix.vecmul(x)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """``self o inner``."""
        return ModuleMap(inner.source, self.target, inner.matrix @ self.matrix, check=False)

    def images(self) -> list[Vector]:
        return [self.matrix.row(i) for i in range(self.matrix.rows)]

    def _key(self):
        return tuple(self.target.to_canonical(r) for r in self.matrix.data)

    def __eq__(self, other):
        return (
            isinstance(other, ModuleMap)
            and self.source == other.source
            and self.target == other.target
            and all(self.target.equal(a, b) for a, b in zip(self.matrix.data, other.matrix.data))
        )

    def __hash__(self):
        return hash(self._key())

    def is_injective(self) -> bool:
        return kernel(self)[0].is_zero_module()

    def is_surjective(self) -> bool:
        return all(contains(self.target, self, g) for g in self.target.gens())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self):
        return f"ModuleMap({self.source.describe()} -> {self.target.describe()}, {self.matrix.tolist()})"


def _rows(m: IntMatrix, k: int) -> list[Vector]:
    return [r[:k] for r in m.data]


def _gens_matrix(n: FgModule, gens) -> IntMatrix:
    if isinstance(gens, ModuleMap):
        return gens.matrix
    if isinstance(gens, IntMatrix):
        return gens
    return IntMatrix([tuple(g) for g in gens], cols=n.ngens)


def submodule(n: FgModule, gens) -> tuple[FgModule, ModuleMap]:
    """Submodule generated (over the ring) by ``gens``, in canonical presentation."""
    g = _gens_matrix(n, gens)
    if not n.ring.is_integers and g.rows:
        g = g.stack(g @ n.action)
    lat = hnf(g.stack(n.relations))
    basis = IntMatrix([r for r in lat.data if any(r)], cols=n.ngens)
    rel = [solve_left(basis, r) for r in n.relations.data]
    p = FgModule(basis.rows, IntMatrix(rel, cols=basis.rows), check=False)
    cg = p.canonical_gens
    inc_mat = IntMatrix(cg, cols=basis.rows) @ basis if cg else IntMatrix([], cols=n.ngens)
    k = inc_mat.rows
    factors = p.factors
    action = None
    if not n.ring.is_integers:
        big = inc_mat.stack(n.relations)
        rows = []
        for r in inc_mat.data:
            y = solve_left(big, n.act(r))
            rows.append(_reduce_diag(y[:k], factors))
        action = IntMatrix(rows, cols=k)
    s = FgModule(k, _diag_relations(factors), action=action, ring=n.ring, check=False)
    return s, ModuleMap(s, n, inc_mat, check=False)


def _reduce_diag(x: Sequence[int], factors: Sequence[int]) -> Vector:
    return tuple(c % d if d else c for c, d in zip(x, factors))


def simplify(m: FgModule) -> tuple[FgModule, ModuleMap]:
    """Canonical presentation of ``m`` with an isomorphism onto ``m``."""
    return submodule(m, IntMatrix.identity(m.ngens))


def image(f: ModuleMap) -> tuple[FgModule, ModuleMap]:
    return submodule(f.target, f.matrix)


def kernel(f: ModuleMap) -> tuple[FgModule, ModuleMap]:
    gs = f.source.ngens
    k = left_kernel(f.matrix.stack(f.target.relations))
    return submodule(f.source, IntMatrix(_rows(k, gs), cols=gs))


def quotient(n: FgModule, sub) -> tuple[FgModule, ModuleMap]:
    """``n / sub`` presented on the generators of ``n``; ``sub`` is a map or vectors."""
    g = _gens_matrix(n, sub)
    if not n.ring.is_integers and g.rows:
        g = g.stack(g @ n.action)
    q = FgModule(n.ngens, n.relations.stack(g), action=n.action if not n.ring.is_integers else None,
                 ring=n.ring, check=False)
    return q, ModuleMap(n, q, IntMatrix.identity(n.ngens), check=False)


def preimage(f: ModuleMap, sub) -> tuple[FgModule, ModuleMap]:
    """``{x : f(x) in sub}`` as a submodule of the source."""
    gs = f.source.ngens
    g = _gens_matrix(f.target, sub)
    k = left_kernel(f.matrix.stack(g).stack(f.target.relations))
    return submodule(f.source, IntMatrix(_rows(k, gs), cols=gs))


def coords_in(sub: ModuleMap, x: Sequence[int]) -> Vector | None:
    """Some ``y`` with ``sub(y) = x`` in the target, or ``None``."""
    y = solve_left(sub.matrix.stack(sub.target.relations), x)
    if y is None:
        return None
    return sub.source.reduce(y[: sub.source.ngens])


def contains(n: FgModule, sub, x: Sequence[int]) -> bool:
    g = _gens_matrix(n, sub)
    return solve_left(g.stack(n.relations), x) is not None


def is_contained(a: ModuleMap, b: ModuleMap) -> bool:
    """Whether ``image(a)`` lies in ``image(b)`` (same target)."""
    return all(contains(b.target, b, r) for r in a.matrix.data)


def same_submodule(a: ModuleMap, b: ModuleMap) -> bool:
    return is_contained(a, b) and is_contained(b, a)


def sum_submodules(n: FgModule, *subs) -> tuple[FgModule, ModuleMap]:
    g = IntMatrix([], cols=n.ngens)
    for s in subs:
        g = g.stack(_gens_matrix(n, s))
    return submodule(n, g)


def intersect(a: ModuleMap, b: ModuleMap) -> tuple[FgModule, ModuleMap]:
    _, inc = preimage(a, b)
    return submodule(a.target, inc.matrix @ a.matrix)


def factor_through(f: ModuleMap, sub: ModuleMap) -> ModuleMap:
    """The map ``g`` with ``sub o g = f``; requires ``image(f)`` inside ``image(sub)``."""
    rows = []
    for r in f.matrix.data:
        y = coords_in(sub, r)
        if y is None:
            raise IllDefinedMap("map does not land in the given submodule")
        rows.append(y)
    return ModuleMap(f.source, sub.source, IntMatrix(rows, cols=sub.source.ngens), check=False)


def direct_sum(*mods: FgModule) -> tuple[FgModule, list[ModuleMap], list[ModuleMap]]:
    """Direct sum with its injections and projections."""
    if not mods:
        raise ValueError("direct_sum needs at least one summand")
    ring = mods[0].ring
    total = sum(m.ngens for m in mods)
    rels, acts, offsets = [], [], []
    off = 0
    for m in mods:
        offsets.append(off)
        for r in m.relations.data:
            rels.append((0,) * off + r + (0,) * (total - off - m.ngens))
        if not ring.is_integers:
            for r in m.action.data:
                acts.append((0,) * off + r + (0,) * (total - off - m.ngens))
        off += m.ngens
    s = FgModule(total, IntMatrix(rels, cols=total),
                 action=IntMatrix(acts, cols=total) if not ring.is_integers else None,
                 ring=ring, check=False)
    incs, projs = [], []
    for m, off in zip(mods, offsets):
        inc = [(0,) * off + unit(m.ngens, i) + (0,) * (total - off - m.ngens) for i in range(m.ngens)]
        incs.append(ModuleMap(m, s, IntMatrix(inc, cols=total), check=False))
        pr = [unit(m.ngens, j - off) if off <= j < off + m.ngens else (0,) * m.ngens
              for j in range(total)]
        projs.append(ModuleMap(s, m, IntMatrix(pr, cols=m.ngens), check=False))
    return s, incs, projs


def scalar_map(n: FgModule, k: int, b: int = 0) -> ModuleMap:
    """Multiplication by the ring element ``k + b w``."""
    m = [vscale(k, unit(n.ngens, i)) for i in range(n.ngens)]
    if b:
        m = [vadd(r, vscale(b, n.act(unit(n.ngens, i)))) for i, r in enumerate(m)]
    return ModuleMap(n, n, IntMatrix(m, cols=n.ngens), check=False)


def torsion_free_quotient_rank(n: FgModule) -> int:
    return n.rank


class HomGroup:
    """``Hom_R(a, b)`` as a module, with conversions to and from maps."""

    def __init__(self, a: FgModule, b: FgModule):
        if a.ring != b.ring:
            raise RingMismatch("Hom between modules over different rings")
        self.source = a
        self.target = b
        ga = a.canonical_gens
        k = len(ga)
        self._k = k
        d, incs, _ = direct_sum(*([b] * k)) if k else (zero_module(a.ring), [], [])
        self._space = d
        gb = b.ngens
        # constraints: d_i * beta_i = 0, and beta(g_i w) = beta(g_i) w
        factors = a.factors
        blocks = [("scale", i) for i in range(k)]
        if not a.ring.is_integers:
            acan = a.canonical_action
            for i in range(k):
                blocks.append(("act", i, acan[i]))
        nb = len(blocks)
        big, _, _ = direct_sum(*([b] * nb)) if nb else (zero_module(a.ring), [], [])
        rows = []
        for kk in range(k):
            for r in range(gb):
                # image of basis vector (beta_kk = e_r) under the constraint map
                e = unit(gb, r)
                out = []
                for blk in blocks:
                    if blk[0] == "scale":
                        out.extend(vscale(factors[kk], e) if blk[1] == kk else (0,) * gb)
                    else:
                        i, coeff = blk[1], blk[2]
                        v = vscale(coeff[kk], e)
                        if i == kk:
                            v = vsub(v, b.act(e))
                        out.extend(v)
                rows.append(tuple(out))
        cmap = ModuleMap(d, big, IntMatrix(rows, cols=big.ngens), check=False)
        self.module, self._inc = kernel(cmap)
        cmat = [a.to_canonical(g) for g in a.gens()]
        self._coord = IntMatrix(cmat, cols=k)

    def to_map(self, h: Sequence[int]) -> ModuleMap:
        vec = self._inc(h)
        gb = self.target.ngens
        beta = IntMatrix([vec[i * gb:(i + 1) * gb] for i in range(self._k)], cols=gb)
        if self._k == 0:
            mat = IntMatrix.zeros(self.source.ngens, gb)
        else:
            mat = self._coord @ beta
        mat = IntMatrix([self.target.reduce(r) for r in mat.data], cols=gb)
        return ModuleMap(self.source, self.target, mat, check=False)

    def from_map(self, f: ModuleMap) -> Vector:
        vec = []
        for g in self.source.canonical_gens:
            vec.extend(f(g))
        y = coords_in(self._inc, vec)
        if y is None:
            raise IllDefinedMap("map is not a module homomorphism")
        return y

    def order(self) -> int | None:
        return self.module.order()

    def maps(self) -> Iterator[ModuleMap]:
        for h in self.module.elements():
            yield self.to_map(h)


def hom_module(a: FgModule, b: FgModule) -> HomGroup:
    return HomGroup(a, b)


def restriction_map(i: ModuleMap, b: FgModule) -> tuple[HomGroup, HomGroup, ModuleMap]:
    """``Hom(A, B) -> Hom(M, B)``, ``f -> f o i`` for ``i: M -> A``."""
    ha = hom_module(i.target, b)
    hm = hom_module(i.source, b)
    rows = [hm.from_map(ha.to_map(g).compose(i)) for g in ha.module.gens()]
    r = ModuleMap(ha.module, hm.module, IntMatrix(rows, cols=hm.module.ngens), check=False)
    return ha, hm, r


class ExtensionCoset:
    """Solutions of ``f o i = h``: ``f0 + kinc(Hom(A / i(M), B))`` inside ``Hom(A, B)``."""

    def __init__(self, hom: HomGroup, base, kernel_module: FgModule, kernel_inc: ModuleMap):
        self.hom = hom
        self.base = base
        self.kernel = kernel_module
        self.kernel_inc = kernel_inc

    @property
    def empty(self) -> bool:
        return self.base is None

    def member(self, k: Sequence[int]) -> ModuleMap:
        return self.hom.to_map(vadd(self.base, self.kernel_inc(k)))


def extension_coset(i: ModuleMap, h: ModuleMap) -> ExtensionCoset:
    if i.source != h.source:
        raise IllDefinedMap("maps must share their source")
    ha, hm, r = restriction_map(i, h.target)
    target = hm.from_map(h)
    y = solve_left(r.matrix.stack(hm.module.relations), target)
    ker, kinc = kernel(r)
    return ExtensionCoset(ha, None if y is None else y[: ha.module.ngens], ker, kinc)


def extensions_along(i: ModuleMap, h: ModuleMap) -> list[ModuleMap]:
    """All ``f: A -> B`` with ``f o i = h``, where ``i: M -> A`` and ``h: M -> B``.

    The solutions form a coset of ``Hom(A / i(M), B)``; it must be finite.
    """
    c = extension_coset(i, h)
    if c.empty:
        return []
    if not c.kernel.is_finite():
        raise InfiniteSearch("the set of extensions is infinite")
    return [c.member(k) for k in c.kernel.elements()]


def all_homs(a: FgModule, b: FgModule) -> list[ModuleMap]:
    hg = hom_module(a, b)
    if not hg.module.is_finite():
        raise InfiniteSearch("Hom group is infinite")
    return list(hg.maps())


def invariant_factors(m: FgModule) -> tuple[int, list[int], bool]:
    """``(rank, [d1 | d2 | ...], over_z)`` with all ``d > 1``.

    For quadratic-order modules the invariants describe the underlying
    abelian group and ``over_z`` is ``False``.
    """
    return m.rank, m.torsion_factors, m.ring.is_integers


def iter_submodule_elements(sub: ModuleMap) -> Iterable[Vector]:
    return (sub(x) for x in sub.source.elements())
