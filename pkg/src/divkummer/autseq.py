"""Automorphism groups of (J,T)-extensions and the exact sequence

    1 -> Hom(N / (i(M) + N[J]), N[J]) -> Aut_M(N) -> Aut_{M[J]}(N[J]) -> 1

for normal extensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EnumerationLimit, InvariantViolation, NotNormal
from .exactalg import (
    IntMatrix,
    ModuleMap,
    coords_in,
    extensions_along,
    factor_through,
    hom_module,
    quotient,
    sum_submodules,
)
from .exactalg.module import vsub
from .hulls import DivisibleHull, is_normal
from .pointed import JTExtension, saturate

MAX_GROUP = 10**4


class AutGroup:
    """A finite group of module automorphisms given by its element table."""

    def __init__(self, elements: list[ModuleMap], check: bool = True):
        if len(elements) > MAX_GROUP:
            raise EnumerationLimit(f"group of order {len(elements)} is too large")
        self.elements = list(elements)
        self._index = {e._key(): k for k, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise InvariantViolation("repeated group elements")
        self.generators = self._greedy_generators()
        if check:
            self.check()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, f: ModuleMap) -> bool:
        return f._key() in self._index

    def identity(self) -> ModuleMap:
        return ModuleMap.identity(self.elements[0].source)

    def _span(self, gens) -> set:
        ident = self.identity()
        seen = {ident._key(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = g.compose(x)
                    k = y._key()
                    if k not in seen:
                        seen[k] = y
                        nxt.append(y)
            frontier = nxt
        return set(seen)

    def _greedy_generators(self) -> list[ModuleMap]:
        if not self.elements:
            return []
        gens, span = [], {self.identity()._key()}
        for e in self.elements:
            if e._key() not in span:
                gens.append(e)
                span = self._span(gens)
        return gens

    def check(self) -> None:
        """Closure under composition with generators, identity present, and the
        generators span exactly the element set."""
        if not self.elements:
            raise InvariantViolation("empty group")
        if self.identity()._key() not in self._index:
            raise InvariantViolation("identity missing")
        for g in self.generators:
            for x in self.elements:
                if g.compose(x)._key() not in self._index:
                    raise InvariantViolation("element set is not closed under composition")
        if self._span(self.generators) != set(self._index):
            raise InvariantViolation("generators do not span the element set")

    def is_abelian(self) -> bool:
        return all(
            a.compose(b) == b.compose(a) for a in self.generators for b in self.generators
        )

    def inverse(self, f: ModuleMap) -> ModuleMap:
        ident = self.identity()
        for g in self.elements:
            if g.compose(f) == ident:
                return g
        raise InvariantViolation("element has no inverse in the group")


def _automorphisms_fixing(sub: ModuleMap) -> list[ModuleMap]:
    """Module automorphisms of ``sub.target`` restricting to the identity on ``image(sub)``."""
    return [f for f in extensions_along(sub, sub) if f.is_isomorphism()]


def aut_over_base(n: JTExtension) -> AutGroup:
    """``Aut_M(N)``: automorphisms of ``N`` fixing ``i(M)`` pointwise."""
    return AutGroup(_automorphisms_fixing(n.inc.underlying))


def base_plus_torsion(n: JTExtension) -> ModuleMap:
    nm = n.total.module
    return sum_submodules(nm, n.inc.matrix, n.total.tor_inc.matrix)[1]


class FixedAutGroup:
    """``Aut_{M+N[J]}(N)`` computed two ways, with the map ``sigma -> phi_sigma``."""

    def __init__(self, n: JTExtension):
        self.extension = n
        nm = n.total.module
        sub = base_plus_torsion(n)
        self.group = AutGroup(_automorphisms_fixing(sub))
        self.quotient, self._proj = quotient(nm, sub)
        self.hom = hom_module(self.quotient, n.total.tor)
        self._tinc = n.total.tor_inc

    def phi(self, sigma: ModuleMap):
        """``[n] -> sigma(n) - n`` as an element of the Hom group."""
        nm = self.extension.total.module
        rows = []
        for g in nm.gens():
            d = vsub(sigma(g), g)
            y = coords_in(self._tinc, d)
            if y is None:
                raise InvariantViolation("sigma(n) - n is not torsion")
            rows.append(y)
        f = ModuleMap(self.quotient, self.hom.target, IntMatrix(rows, cols=self.hom.target.ngens))
        return self.hom.from_map(f)

    def sigma_of(self, h) -> ModuleMap:
        """``n -> n + h([n])``."""
        f = self.hom.to_map(h)
        nm = self.extension.total.module
        rows = [tuple(a + b for a, b in zip(g, self._tinc(f(g)))) for g in nm.gens()]
        return ModuleMap(nm, nm, IntMatrix(rows, cols=nm.ngens))

    def cross_check(self) -> bool:
        """``phi`` is a bijective homomorphism onto the Hom group, and both orders agree."""
        hm = self.hom.module
        if self.hom.order() != self.group.order:
            return False
        images = {}
        for s in self.group.elements:
            k = hm.to_canonical(self.phi(s))
            if k in images:
                return False
            images[k] = s
        if len(images) != hm.order():
            return False
        for a in self.group.elements:
            for b in self.group.generators:
                lhs = hm.to_canonical(self.phi(a.compose(b)))
                rhs = hm.to_canonical(tuple(x + y for x, y in zip(self.phi(a), self.phi(b))))
                if lhs != rhs:
                    return False
        for h in hm.elements():
            if self.sigma_of(h) not in self.group:
                return False
        return True


def aut_fixing_base_and_torsion(n: JTExtension) -> AutGroup:
    fg = FixedAutGroup(n)
    if not fg.cross_check():
        raise InvariantViolation("automorphism group and Hom group disagree")
    return fg.group


def _restriction_to_torsion(n: JTExtension, sigma: ModuleMap) -> ModuleMap:
    tinc = n.total.tor_inc
    return factor_through(sigma.compose(tinc), tinc)


def base_torsion_inclusion(n: JTExtension) -> ModuleMap:
    """``M[J] -> N[J]`` induced by the inclusion."""
    mt = n.base.tor_inc
    return factor_through(n.inc.underlying.compose(mt), n.total.tor_inc)


def all_torsion_automorphisms(n: JTExtension) -> AutGroup:
    """``Aut_{M[J]}(N[J])`` without the extension condition."""
    return AutGroup(_automorphisms_fixing(base_torsion_inclusion(n)))


def aut_torsion_quotient(n: JTExtension, middle: AutGroup | None = None) -> AutGroup:
    """Restrictions to ``N[J]`` of the elements of ``Aut_M(N)``."""
    middle = middle or aut_over_base(n)
    seen = {}
    for s in middle.elements:
        r = _restriction_to_torsion(n, s)
        seen.setdefault(r._key(), r)
    return AutGroup(list(seen.values()))


@dataclass
class ExactSequenceReport:
    kernel_order: int
    middle_order: int
    quotient_order: int
    kernel_abelian: bool
    order_identity: bool
    restriction_surjective: bool
    phi_bijection: bool
    action_table: list = field(default_factory=list)
    action_by_conjugation: bool = True
    level: int = 0

    @property
    def orders(self) -> tuple[int, int, int]:
        return self.kernel_order, self.middle_order, self.quotient_order

    def ok(self) -> bool:
        return (self.kernel_abelian and self.order_identity and self.restriction_surjective
                and self.phi_bijection and self.action_by_conjugation)


def exact_sequence(n: JTExtension, gamma: DivisibleHull, level: int) -> ExactSequenceReport:
    """Assemble and verify the exact sequence for a normal extension."""
    if not is_normal(n, gamma, level):
        raise NotNormal(f"extension is not normal (witnessed at level {level})")
    fixed = FixedAutGroup(n)
    middle = aut_over_base(n)
    quot = aut_torsion_quotient(n, middle)
    full = all_torsion_automorphisms(n)
    hm = fixed.hom.module
    k = hm.order()
    table = []
    conj_ok = True
    lifts = {}
    for s in middle.elements:
        lifts.setdefault(_restriction_to_torsion(n, s)._key(), s)
    for rho in quot.elements:
        lift = lifts[rho._key()]
        inv = middle.inverse(lift)
        row = []
        for h in hm.elements():
            f = fixed.hom.to_map(h)
            composed = hm.to_canonical(fixed.hom.from_map(rho.compose(f)))
            row.append(composed)
            # lift o sigma_h o lift^-1 = sigma_{rho o h}
            conj = lift.compose(fixed.sigma_of(h)).compose(inv)
            if conj != fixed.sigma_of(composed):
                conj_ok = False
        table.append(row)
    return ExactSequenceReport(
        kernel_order=k,
        middle_order=middle.order,
        quotient_order=quot.order,
        kernel_abelian=fixed.group.is_abelian(),
        order_identity=middle.order == k * quot.order,
        restriction_surjective=quot.order == full.order,
        phi_bijection=fixed.cross_check(),
        action_table=table,
        action_by_conjugation=conj_ok,
        level=level,
    )


def saturated_fixed_count(n: JTExtension, level: int) -> int:
    """Order of the automorphism group of the level window of ``sat(N)`` fixing
    the image of ``M`` and the torsion ``T[level]`` pointwise."""
    sat = saturate(n.total)
    w, inc = sat.window(level)
    wm = w.module
    img = inc.underlying.compose(n.inc.underlying)
    sub = sum_submodules(wm, img.matrix, w.tor_inc.matrix)[1]
    return len(_automorphisms_fixing(sub))


__all__ = [
    "AutGroup",
    "ExactSequenceReport",
    "FixedAutGroup",
    "all_torsion_automorphisms",
    "aut_fixing_base_and_torsion",
    "aut_over_base",
    "aut_torsion_quotient",
    "base_torsion_inclusion",
    "exact_sequence",
    "saturated_fixed_count",
]
