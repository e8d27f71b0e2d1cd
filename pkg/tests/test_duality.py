import random
from fractions import Fraction as F

import pytest

from divkummer.duality import (
    EndLevel,
    HomElement,
    HomSpace,
    closure,
    duality_check,
    duality_lattices,
    is_cogenerated,
    joint_kernel,
)
from divkummer.errors import InputError
from divkummer.exactalg import FgModule, cyclic_sum, quadratic_order, zero_module
from divkummer.pointed import TorsionTarget

import oracles

T1 = TorsionTarget(1)
Z6 = cyclic_sum([6])


def kernel_set(m, inc):
    return {m.to_canonical(inc(x)) for x in inc.source.elements()}


def test_joint_kernel_examples():
    k, _ = joint_kernel([HomElement(Z6, T1, [(0,)])])
    assert k == Z6
    k, _ = joint_kernel([HomElement(Z6, T1, [(F(1, 6),)])])
    assert k == zero_module()
    _, inc = joint_kernel([HomElement(Z6, T1, [(F(1, 3),)])])
    assert kernel_set(Z6, inc) == {(0,), (3,)}
    with pytest.raises(InputError):
        joint_kernel([])


def test_closure_examples():
    w, equal = closure([HomElement(Z6, T1, [(F(1, 3),)])])
    assert len(w) == 3 and equal
    v22 = cyclic_sum([2, 2])
    w, equal = closure([HomElement(v22, T1, [(F(1, 2),), (0,)]),
                        HomElement(v22, T1, [(0,), (F(1, 2),)])])
    assert len(w) == 4 and equal
    space = HomSpace(Z6, T1)
    everything = [space.element(h) for h in space.module.elements()]
    assert closure(everything)[1]


def test_closure_is_idempotent():
    rng = random.Random(1)
    m = cyclic_sum([2, 4])
    t = TorsionTarget(2)
    space = HomSpace(m, t)
    hs = list(space.module.elements())
    for _ in range(10):
        v = [space.element(rng.choice(hs)) for _ in range(rng.randint(1, 2))]
        w, _ = closure(v)
        again, _ = closure(w)
        assert set(again) == set(w)


@pytest.mark.parametrize("factors,s,count", [([], 1, 1), ([2, 2], 1, 5), ([4], 2, 3)])
def test_duality_examples(factors, s, count):
    r = duality_lattices(cyclic_sum(factors), TorsionTarget(s))
    assert r.holds
    assert len(r.submodules) == len(r.end_submodules) == count


@pytest.mark.parametrize("factors", [[2], [6], [2, 4], [3, 3], [2, 2, 2], [12]])
def test_lattice_size_matches_subgroup_enumeration(factors):
    r = duality_lattices(cyclic_sum(factors), TorsionTarget(2))
    assert len(r.submodules) == len(oracles.subgroups(factors))
    assert r.holds


def test_hom_space_matches_count():
    for factors in ([2, 4], [3], [6, 2]):
        space = HomSpace(cyclic_sum(factors), TorsionTarget(1))
        assert space.module.order() == oracles.hom_count(factors, [max(factors)])


def test_cogenerator():
    for factors in ([2, 2], [12], [3, 9]):
        assert is_cogenerated(cyclic_sum(factors), TorsionTarget(1))


def test_end_level_closed():
    assert EndLevel(4, 2).is_closed()
    assert EndLevel(6, 1).is_closed()


def test_gaussian_duality():
    r = quadratic_order(0, 1)
    t = TorsionTarget(2, None, r, [[0, 1], [-1, 0]])
    m = FgModule(2, [[2, 0], [0, 2]], action=[[0, 1], [-1, 0]], ring=r)
    el = EndLevel(2, 2, [[0, 1], [-1, 0]])
    assert el.is_closed()
    assert duality_lattices(m, t, el).holds


def test_duality_check_small_groups():
    for factors in oracles.abelian_groups(8):
        assert duality_check(cyclic_sum(factors), 1)
