import random
from fractions import Fraction as F

import pytest

from divkummer.errors import IncompatibleMap, NonInjectivePointing, NotPure
from divkummer.exactalg import ModuleMap, cyclic_sum, free_module, same_submodule, submodule, zero_module
from divkummer.hulls import maximal_extension
from divkummer.pointed import (
    JTExtension,
    PointedMap,
    PointedModule,
    TorsionTarget,
    adjunction_check,
    count_mediators,
    extension_maps,
    isomorphic_extensions,
    is_pure,
    pullback,
    pullback_map,
    pushforward,
    pushforward_map,
    pushout,
    saturate,
)
from divkummer.testbed import graph_map, random_extension, random_pointed

T2 = TorsionTarget(1, 2)


def z_z6_z2():
    t = TorsionTarget(2)
    m = cyclic_sum([0, 6, 2])
    return PointedModule(m, t, [(0, 1, 0), (0, 0, 1)], [(F(1, 6), 0), (0, F(1, 2))])


def example_pair():
    """Two pointings of the same extension module over ``Z + Z/2 + Z/2``."""
    t = TorsionTarget(2, 2)
    m, n = cyclic_sum([0, 2, 2]), cyclic_sum([0, 4, 2])
    pm = PointedModule(m, t, [(0, 1, 0), (0, 0, 1)], [(F(1, 2), 0), (0, F(1, 2))])
    n1 = PointedModule(n, t, [(0, 1, 0), (0, 0, 1)], [(F(1, 4), 0), (0, F(1, 2))])
    n2 = PointedModule(n, t, [(0, 1, 0), (0, 0, 1)], [(0, F(1, 4)), (F(1, 2), 0)])
    f1 = ModuleMap(m, n, [[2, 0, 0], [0, 2, 0], [0, 0, 1]])
    f2 = ModuleMap(m, n, [[2, 0, 0], [0, 0, 1], [0, 2, 0]])
    e1 = JTExtension(pm, n1, PointedMap(f1, pm, n1))
    e2 = JTExtension(pm, n2, PointedMap(f2, pm, n2))
    return pm, n2, f1, e1, e2


def test_torsion_target_arithmetic():
    t = TorsionTarget(2)
    a = t.normalize((F(5, 4), F(-1, 3)))
    assert a == (F(1, 4), F(2, 3))
    assert t.order(a) == 12
    assert t.from_level(t.to_level(a, 12), 12) == a


def test_pointed_example_module():
    pm = z_z6_z2()
    assert pm.tor == cyclic_sum([2, 6])
    assert len(pm.torsion_image()) == 12


def test_non_injective_pointing():
    with pytest.raises(NonInjectivePointing):
        PointedModule(cyclic_sum([6]), TorsionTarget(1), [(1,)], [(F(1, 4),)])
    with pytest.raises(NonInjectivePointing):
        PointedModule(cyclic_sum([4]), TorsionTarget(1), [(1,)], [(F(1, 2),)])


def test_incompatible_map():
    pm, n2, f1, _, _ = example_pair()
    with pytest.raises(IncompatibleMap):
        PointedMap(f1, pm, n2)


def test_purity_examples():
    pm = z_z6_z2()
    assert is_pure(PointedMap(pm.tor_inc, PointedModule(pm.tor, pm.target, [(1, 0), (0, 1)],
                                                        [pm.point(pm.tor_inc((1, 0))),
                                                         pm.point(pm.tor_inc((0, 1)))]), pm))
    z = free_module(1)
    lz = PointedModule(z, T2)
    assert not is_pure(PointedMap(ModuleMap(z, z, [[2]]), lz, lz))
    assert is_pure(PointedMap.identity(pm))


def test_pushout_refuses_impure_map():
    z = free_module(1)
    lz = PointedModule(z, T2)
    f = PointedMap(ModuleMap(z, z, [[2]]), lz, lz)
    with pytest.raises(NotPure):
        pushout(f, f)


def test_pushout_along_identity():
    _, _, _, e1, _ = example_pair()
    po = pushout(PointedMap.identity(e1.base), e1.inc)
    assert po.j.is_isomorphism()
    assert count_mediators(po, po.i, po.j) == 1


def test_pushout_universal_property_random():
    rng = random.Random(17)
    for _ in range(10):
        prime = rng.choice([2, 3])
        f = graph_map(rng, random_pointed(rng, prime, s=1), random_pointed(rng, prime, s=1))
        g = random_extension(rng, f.source, prime).inc
        po = pushout(f, g)
        assert count_mediators(po, po.i, po.j) == 1
        assert po.i.compose(f).underlying == po.j.compose(g).underlying


def test_saturation_of_example():
    sat = saturate(z_z6_z2())
    assert sat.free_part == free_module(1)
    w, inc = sat.window(6)
    assert w.tor == cyclic_sum([6, 6])
    assert inc.is_injective()
    empty = saturate(PointedModule(zero_module(), TorsionTarget(1)))
    assert empty.free_part == zero_module()


def test_extension_maps_example_pair():
    _, _, _, e1, e2 = example_pair()
    assert not isomorphic_extensions(e1, e2)
    assert extension_maps(e1, e2) == []
    assert any(f.is_isomorphism() for f in extension_maps(e1, e1))


def test_extension_maps_are_injective():
    rng = random.Random(3)
    for _ in range(15):
        m = random_pointed(rng, 2)
        a = random_extension(rng, m, 4)
        b = maximal_extension(m).window(8).extension()
        for f in extension_maps(a, b):
            assert f.is_injective()
        auts = extension_maps(a, a)
        ident = ModuleMap.identity(a.total.module)
        assert any(f.underlying == ident for f in auts)
        assert all(f.is_isomorphism() for f in auts if f.is_surjective())


def test_half_z_over_z_has_one_self_map():
    z = free_module(1)
    lz = PointedModule(z, T2)
    ext = JTExtension(lz, lz, PointedMap(ModuleMap(z, z, [[2]]), lz, lz))
    assert len(extension_maps(ext, ext)) == 1


def test_pullback_and_pushforward_along_identity():
    rng = random.Random(4)
    m = random_pointed(rng, 2, s=1)
    ext = random_extension(rng, m, 4, count=2)
    ident = PointedMap.identity(m)
    pb = pullback(ident, ext)
    assert pb.into_original.is_isomorphism()
    pf = pushforward(ident, ext)
    assert pf.from_original.is_isomorphism()


def test_pullback_of_hull_window_along_doubling():
    """Pulling back along ``2Z -> Z`` recovers the whole window."""
    z = free_module(1)
    lz = PointedModule(z, T2)
    w = maximal_extension(lz).window(8).extension()
    phi = PointedMap(ModuleMap(z, z, [[2]]), lz, lz)
    pb = pullback(phi, w)
    assert pb.into_original.is_isomorphism()


def test_pushforward_example():
    t = TorsionTarget(1, 2)
    z2, z4 = cyclic_sum([2]), cyclic_sum([4])
    base = PointedModule(z2, t, [(1,)], [(F(1, 2),)])
    top = PointedModule(z4, t, [(1,)], [(F(1, 4),)])
    ext = JTExtension(base, top, PointedMap(ModuleMap(z2, z4, [[2]]), base, top))
    tt = TorsionTarget(2, 2)
    b2 = PointedModule(z2, tt, [(1,)], [(F(1, 2), 0)])
    e2 = JTExtension(b2, PointedModule(z4, tt, [(1,)], [(F(1, 4), 0)]),
                     PointedMap(ModuleMap(z2, z4, [[2]]), b2, PointedModule(z4, tt, [(1,)], [(F(1, 4), 0)])))
    v = cyclic_sum([2, 2])
    pv = PointedModule(v, tt, [(1, 0), (0, 1)], [(F(1, 2), 0), (0, F(1, 2))])
    phi = PointedMap(ModuleMap(z2, v, [[1, 0]]), b2, pv)
    assert is_pure(phi)
    pf = pushforward(phi, e2)
    assert pf.total.module == cyclic_sum([2, 4])
    assert ext.total.module == z4


def _composable_maps(rng, base, level):
    """Self-maps of a small random extension, enough to test composition."""
    a = random_extension(rng, base, level, count=2)
    return a, extension_maps(a, a)[:3]


def test_pullback_functorial():
    rng = random.Random(9)
    checked = 0
    for _ in range(12):
        phi = graph_map(rng, random_pointed(rng, 2, s=1), random_pointed(rng, 2, s=1))
        a, maps = _composable_maps(rng, phi.target, 4)
        for h in maps:
            for g in maps:
                lhs = pullback_map(phi, g.compose(h), a, a)
                rhs = pullback_map(phi, g, a, a).compose(pullback_map(phi, h, a, a))
                assert lhs.underlying == rhs.underlying
                checked += 1
    assert checked > 12


def test_pushforward_functorial():
    rng = random.Random(10)
    checked = 0
    for _ in range(12):
        phi = graph_map(rng, random_pointed(rng, 2, s=1), random_pointed(rng, 2, s=1))
        a, maps = _composable_maps(rng, phi.source, 4)
        for h in maps:
            for g in maps:
                lhs = pushforward_map(phi, g.compose(h), a, a)
                rhs = pushforward_map(phi, g, a, a).compose(pushforward_map(phi, h, a, a))
                assert lhs.underlying == rhs.underlying
                checked += 1
    assert checked > 12


def test_adjunction_trivial_extensions():
    m = random_pointed(random.Random(1), 2, s=1)
    ident = PointedMap.identity(m)
    triv = JTExtension.trivial(m)
    assert adjunction_check(ident, triv, triv)


def test_adjunction_random():
    rng = random.Random(21)
    for _ in range(8):
        phi = graph_map(rng, random_pointed(rng, 2, s=1), random_pointed(rng, 2, s=1))
        assert adjunction_check(phi, random_extension(rng, phi.source, 2),
                                random_extension(rng, phi.target, 2))


def test_pushout_torsion_generated_by_images():
    rng = random.Random(5)
    for _ in range(10):
        f = graph_map(rng, random_pointed(rng, 3, s=1), random_pointed(rng, 3, s=1))
        g = random_extension(rng, f.source, 3).inc
        po = pushout(f, g)
        p = po.module
        rows = list(po.i.underlying.compose(f.target.tor_inc).matrix.data)
        rows += list(po.j.underlying.compose(g.target.tor_inc).matrix.data)
        from divkummer.exactalg import IntMatrix

        _, both = submodule(p.module, IntMatrix(rows, cols=p.module.ngens))
        assert same_submodule(both, p.tor_inc)
