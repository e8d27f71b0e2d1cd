"""Ideal filters, division modules, torsion and the Baer-type injectivity test."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import InputError, PreconditionError, RingMismatch
from .exactalg import (
    FgModule,
    IntMatrix,
    ModuleMap,
    Ring,
    contains,
    hnf,
    intersect,
    kernel,
    lcm,
    preimage,
    quotient,
    scalar_map,
    submodule,
    zero_module,
)


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(p: int) -> bool:
    return p > 1 and prime_factors(p) == [p]


def p_part(n: int, p: int) -> int:
    """Largest power of ``p`` dividing ``n`` (``n`` nonzero)."""
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n: int, p: int) -> bool:
    return n > 0 and p_part(n, p) == n


@dataclass(frozen=True)
class IdealFilter:
    """``zero``, ``one``, ``ppower`` (``p^inf``), ``all`` (``inf``) or ``principal``."""

    kind: str
    p: int = 0
    gens: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("zero", "one", "ppower", "all", "principal"):
            raise InputError(f"unknown filter kind {self.kind!r}")
        if self.kind == "ppower" and not is_prime(self.p):
            raise InputError(f"{self.p} is not prime")
        if self.kind == "principal" and (not self.gens or any(g == 0 for g in self.gens)):
            raise InputError("principal filter generators must be nonzero")

    @classmethod
    def parse(cls, text: str) -> "IdealFilter":
        t = text.strip().replace(" ", "")
        if t == "0":
            return ZERO
        if t == "1":
            return ONE
        if t in ("inf", "oo", "infinity"):
            return ALL
        if t.endswith("^inf"):
            try:
                return p_power(int(t[:-4]))
            except ValueError:
                raise InputError(f"cannot parse filter {text!r}") from None
        if t.startswith("(") and t.endswith(")"):
            try:
                return principal([int(x) for x in t[1:-1].split(",") if x])
            except ValueError:
                raise InputError(f"cannot parse filter {text!r}") from None
        raise InputError(f"cannot parse filter {text!r}")

    def __str__(self):
        if self.kind == "zero":
            return "0"
        if self.kind == "one":
            return "1"
        if self.kind == "all":
            return "inf"
        if self.kind == "ppower":
            return f"{self.p}^inf"
        return "(" + ",".join(str(g) for g in self.gens) + ")"

    @property
    def generator_lcm(self) -> int:
        out = 1
        for g in self.gens:
            out = lcm(out, abs(g))
        return out


ZERO = IdealFilter("zero")
ONE = IdealFilter("one")
ALL = IdealFilter("all")


def p_power(p: int) -> IdealFilter:
    return IdealFilter("ppower", p)


def principal(gens: Sequence[int]) -> IdealFilter:
    return IdealFilter("principal", gens=tuple(int(g) for g in gens))


def _omega_matrix(ring: Ring) -> list[list[int]]:
    # multiplication by w on a + b w, as a row vector (a, b)
    return [[0, 1], [-ring.n, ring.t]]


class Ideal:
    """An ideal of Z (non-negative generator) or of a quadratic order (lattice)."""

    def __init__(self, ring: Ring, gen: int = 0, basis=None):
        self.ring = ring
        if ring.is_integers:
            self.gen = abs(gen)
            self.basis = None
            return
        if basis is None:
            basis = [[gen, 0], [0, gen]]
        h = hnf(IntMatrix(basis, cols=2))
        rows = [r for r in h.data if any(r)]
        self.basis = IntMatrix(rows, cols=2)
        self.gen = None
        w = IntMatrix(_omega_matrix(ring))
        for r in rows:
            if not contains(_lattice_module(), self.basis, w.vecmul(r)):
                raise PreconditionError("lattice is not closed under multiplication by w")

    @classmethod
    def principal(cls, ring: Ring, a: int, b: int = 0) -> "Ideal":
        if ring.is_integers:
            return cls(ring, a)
        w = IntMatrix(_omega_matrix(ring))
        x = (a, b)
        return cls(ring, basis=[x, w.vecmul(x)])

    def exponent(self) -> int:
        """Smallest ``k > 0`` with ``kR`` inside the ideal, or 0 if there is none."""
        if self.ring.is_integers:
            return self.gen
        if self.basis.rows < 2:
            return 0
        q = FgModule(2, self.basis)
        return q.exponent() if q.is_finite() else 0

    def z_basis(self) -> list[tuple[int, int]]:
        """Ring elements ``(a, b)`` meaning ``a + b w`` spanning the ideal over Z."""
        if self.ring.is_integers:
            return [(self.gen, 0)]
        return [tuple(r) for r in self.basis.data]

    def is_whole(self) -> bool:
        return self.exponent() == 1

    def __eq__(self, other):
        return (
            isinstance(other, Ideal)
            and self.ring == other.ring
            and self.gen == other.gen
            and self.basis == other.basis
        )

    def __repr__(self):
        if self.ring.is_integers:
            return f"Ideal({self.gen}Z)"
        return f"Ideal({self.basis.tolist()})"


def _lattice_module() -> FgModule:
    return FgModule(2, IntMatrix([], cols=2))


def _exponent_member(j: IdealFilter, e: int) -> bool:
    """Membership of an ideal whose quotient ring has additive exponent ``e`` (0 = infinite)."""
    if j.kind == "zero":
        return True
    if j.kind == "one":
        return e == 1
    if e == 0:
        return False
    if j.kind == "ppower":
        return is_p_power(e, j.p)
    if j.kind == "all":
        return True
    return j.generator_lcm % e == 0


def filter_member(j: IdealFilter, i: Ideal) -> bool:
    """Whether the ideal ``i`` belongs to the filter ``j``."""
    return _exponent_member(j, i.exponent())


def stabilization_exponent(j: IdealFilter, q: FgModule) -> int:
    """``k`` such that dividing by ``kR`` agrees with dividing by all of ``j``
    for any pair whose quotient is ``q``."""
    if j.kind == "zero":
        raise PreconditionError("the zero filter has no finite stage")
    if j.kind == "one":
        return 1
    e = q.exponent()
    if j.kind == "ppower":
        return p_part(e, j.p)
    if j.kind == "all":
        return e
    return gcd(j.generator_lcm, e)


def _whole(n: FgModule) -> tuple[FgModule, ModuleMap]:
    return submodule(n, IntMatrix.identity(n.ngens))


def divide_ideal(k, sub: ModuleMap) -> tuple[FgModule, ModuleMap]:
    """``{x in N : I x inside sub}`` for ``I = kR`` (``k`` an integer) or an ``Ideal``."""
    n = sub.target
    if isinstance(k, Ideal):
        if k.ring != n.ring:
            raise RingMismatch("ideal and module over different rings")
        if k.exponent() == 0 and all(a == 0 and b == 0 for a, b in k.z_basis()):
            raise PreconditionError("division by the zero ideal is only done by the zero filter")
        current = _whole(n)[1]
        for a, b in k.z_basis():
            _, inc = preimage(scalar_map(n, a, b), sub)
            _, current = intersect(current, inc)
        return current.source, current
    if k == 0:
        raise PreconditionError("division by 0 is only done by the zero filter")
    return preimage(scalar_map(n, k), sub)


def divide_filter(j: IdealFilter, sub: ModuleMap) -> tuple[FgModule, ModuleMap]:
    """The J-division module of ``image(sub)`` in its target, with inclusion."""
    n = sub.target
    if j.kind == "zero":
        return _whole(n)
    if j.kind == "one":
        return submodule(n, sub.matrix)
    q, _ = quotient(n, sub)
    return divide_ideal(stabilization_exponent(j, q), sub)


def zero_map_into(n: FgModule) -> ModuleMap:
    return ModuleMap(zero_module(n.ring), n, IntMatrix([], cols=n.ngens), check=False)


def torsion(j: IdealFilter, n: FgModule) -> tuple[FgModule, ModuleMap]:
    """The J-torsion submodule ``n[J]``."""
    return divide_filter(j, zero_map_into(n))


def is_torsion_module(j: IdealFilter, q: FgModule) -> bool:
    if j.kind == "zero":
        return True
    if not q.is_finite():
        return False
    return _exponent_member(j, q.exponent())


def is_jmap(j: IdealFilter, f: ModuleMap) -> bool:
    """Whether ``image(f)`` J-divides to the whole target."""
    _, inc = divide_filter(j, f)
    return all(contains(f.target, inc, g) for g in f.target.gens())


def _socle_essential(f: ModuleMap) -> bool:
    """Brute-force essentiality of an injective map ``f``: every element of
    prime order generates a submodule meeting ``image(f)``, and the quotient
    has no free part."""
    n = f.target
    q, _ = quotient(n, f)
    if not q.is_finite():
        return False
    for p in prime_factors(n.exponent()):
        socle, sinc = kernel(scalar_map(n, p))
        for x in socle.elements():
            y = sinc(x)
            if n.is_zero(y):
                continue
            if n.ring.is_integers:
                if not contains(n, f, y):
                    return False
            else:
                cyc, cinc = submodule(n, [y])
                meet, _ = intersect(cinc, f)
                if meet.is_zero_module():
                    return False
    return True


def restrict_to_torsion(j: IdealFilter, f: ModuleMap) -> ModuleMap:
    """``f`` restricted to ``source[J] -> target[J]``."""
    from .exactalg import factor_through

    _, ms = torsion(j, f.source)
    _, nt = torsion(j, f.target)
    return factor_through(f.compose(ms), nt)


def is_essential(j: IdealFilter, f: ModuleMap) -> bool:
    """Essentiality of an injective J-map, decided on J-torsion."""
    if not f.is_injective():
        raise PreconditionError("essentiality is only defined for injective maps")
    if not is_jmap(j, f):
        raise PreconditionError("map is not a J-map")
    return _socle_essential(restrict_to_torsion(j, f))


def is_essential_bruteforce(f: ModuleMap) -> bool:
    """Every nonzero cyclic submodule of a finite target meets ``image(f)``."""
    n = f.target
    img = {n.to_canonical(f(x)) for x in f.source.elements()}
    for x in n.elements():
        if n.is_zero(x):
            continue
        _, cinc = submodule(n, [x])
        if not any(n.to_canonical(cinc(y)) in img and not n.is_zero(cinc(y))
                   for y in cinc.source.elements()):
            return False
    return True


def torsion_projection(j: IdealFilter, n: FgModule) -> ModuleMap:
    """A Z-linear idempotent ``n -> n`` with image ``n[J]``, killing the free
    part and the torsion outside J (chosen through the canonical splitting)."""
    factors = n.factors
    cols = []
    for d in factors:
        if d == 0:
            cols.append(0)
            continue
        if j.kind == "zero":
            a = d
        elif j.kind == "one":
            a = 1
        elif j.kind == "ppower":
            a = p_part(d, j.p)
        elif j.kind == "all":
            a = d
        else:
            raise PreconditionError("torsion projection needs a complete filter")
        m = d // a
        # alpha = 1 mod a, 0 mod m
        alpha = (m * pow(m, -1, a)) % d if a > 1 else 0
        cols.append(alpha)
    if j.kind == "zero":
        cols = [1] * len(factors)
    rows = []
    for g in n.gens():
        c = n.to_canonical(g)
        rows.append(n.from_canonical([ci * ai for ci, ai in zip(c, cols)]))
    return ModuleMap(n, n, IntMatrix(rows, cols=n.ngens), check=False)


def baer_ideals(modulus: int, j: IdealFilter) -> list[int]:
    """Generators ``d | modulus`` of the ideals ``dZ/NZ`` of ``Z/N`` lying in ``j``."""
    divs = [d for d in range(1, modulus + 1) if modulus % d == 0]
    if j.kind in ("zero", "all"):
        return divs
    if j.kind == "one":
        return [1]
    if j.kind == "ppower":
        return [d for d in divs if is_p_power(d, j.p)]
    bound = 1
    for s in j.gens:
        bound = lcm(bound, gcd(s, modulus))
    return [d for d in divs if bound % d == 0]


def default_baer_modulus(q: FgModule) -> int:
    e = q.exponent()
    return e * e


def baer_check(modulus: int, j: IdealFilter, q: FgModule) -> bool:
    """Baer test over ``Z/N``: every map from an ideal in ``j`` to ``q`` extends."""
    if not q.ring.is_integers:
        raise PreconditionError("the Baer testbed works over Z/N only")
    if not q.is_finite():
        raise PreconditionError("Baer testbed needs a finite module")
    if modulus <= 0:
        raise PreconditionError("modulus must be positive")
    if any(modulus % d for d in q.factors):
        raise PreconditionError(f"module is not annihilated by {modulus}")
    elems = [q.to_canonical(x) for x in q.elements()]
    factors = q.factors

    def times(k, c):
        return tuple((k * a) % d for a, d in zip(c, factors))

    zero = (0,) * len(factors)
    for d in baer_ideals(modulus, j):
        # a map dR -> q is d -> y with (N/d) y = 0; it extends iff y is in d q
        dq = {times(d, c) for c in elems}
        for y in elems:
            if times(modulus // d, y) == zero and y not in dq:
                return False
    return True


def p_divisible(q: FgModule, p: int) -> bool:
    """Whether ``q[p] = 0`` for a finite module (equivalently ``pq = q``)."""
    return all(d % p for d in q.factors)


__all__ = [
    "ALL",
    "ONE",
    "ZERO",
    "Ideal",
    "IdealFilter",
    "baer_check",
    "baer_ideals",
    "default_baer_modulus",
    "divide_filter",
    "divide_ideal",
    "filter_member",
    "is_essential",
    "is_essential_bruteforce",
    "is_jmap",
    "is_torsion_module",
    "p_divisible",
    "p_power",
    "prime_factors",
    "principal",
    "restrict_to_torsion",
    "stabilization_exponent",
    "torsion",
    "torsion_projection",
    "zero_map_into",
]
