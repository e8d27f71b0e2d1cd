"""Acceptance criteria 1-11, one PASS/FAIL line each.

Every criterion runs its full corpus, times the library work against its budget
and compares with a brute-force oracle from ``oracles`` wherever one exists.
"""

import itertools
import json
import random
import time
from math import gcd, lcm
from pathlib import Path

import pytest

from divkummer.autseq import base_plus_torsion, exact_sequence
from divkummer.cli import dumps, run
from divkummer.duality import duality_lattices
from divkummer.errors import HypothesisFailure, IncompatibleMap, NotPure
from divkummer.exactalg import (
    IntMatrix,
    cyclic_sum,
    direct_sum,
    factor_through,
    intersect,
    quotient,
    same_submodule,
    snf,
    sum_submodules,
)
from divkummer.hulls import is_normal, jhull, maximal_extension, min_level
from divkummer.io import Document, canonical_json, load
from divkummer.kummer import (
    BoundInputs,
    GaloisSimInstance,
    closed_form_bound,
    h1,
    kummer_bound,
    matrix_group,
    subring_index,
    thm_main_containment_check,
)
from divkummer.modfilter import (
    ALL,
    ONE,
    ZERO,
    baer_check,
    default_baer_modulus,
    divide_filter,
    is_jmap,
    is_torsion_module,
    p_divisible,
    p_power,
    torsion,
)
from divkummer.pointed import (
    PointedMap,
    PointedModule,
    TorsionTarget,
    adjunction_check,
    count_mediators,
    counit_map,
    pushout,
    saturate,
)
from divkummer.pointed import JTExtension
from divkummer.testbed import (
    disguise,
    graph_map,
    random_extension,
    random_factors,
    random_finite_module,
    random_pointed,
    random_triple,
    sample_extensions,
)

import oracles

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
FILTERS = [p_power(2), p_power(3), ALL, ZERO, ONE]


class Tally:
    def __init__(self):
        self.failures = []
        self.elapsed = 0.0

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def timed(self, fn, *args, **kw):
        t = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.elapsed += time.perf_counter() - t


@pytest.fixture
def tally(request, capsys):
    t = Tally()
    yield t
    with capsys.disabled():
        status = "FAIL" if t.failures else "PASS"
        print(f"\n{status} {request.node.name} ({t.elapsed:.1f}s library time,"
              f" {len(t.failures)} failures)")


def finish(t, budget=None):
    assert not t.failures, t.failures[:5]
    if budget is not None:
        assert t.elapsed < budget, f"{t.elapsed:.1f}s exceeds {budget}s"


def test_criterion_01_snf_matches_determinantal_divisors(tally):
    rng = random.Random(101)
    for case in range(1000):
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[rng.randint(-20, 20) for _ in range(m)] for _ in range(n)]
        a = IntMatrix(rows, cols=m)
        u, s, v = tally.timed(snf, a)
        tally.check(u @ a @ v == s, f"#{case}: U A V != S")
        tally.check(abs(oracles.det([list(r) for r in u.data])) == 1, f"#{case}: U not unimodular")
        tally.check(abs(oracles.det([list(r) for r in v.data])) == 1, f"#{case}: V not unimodular")
        diag = [abs(s[i, i]) for i in range(min(n, m))]
        tally.check(diag == oracles.snf_diagonal_oracle(rows, m), f"#{case}: diagonal {diag}")
        off = [s[i, j] for i in range(n) for j in range(m) if i != j]
        tally.check(not any(off), f"#{case}: off-diagonal entries")
    finish(tally, 10)


def _inside(j, minc, ninc):
    """``D_J(M, N)`` computed inside ``N``, mapped into ``P``."""
    _, d = divide_filter(j, factor_through(minc, ninc))
    return ninc.compose(d)


def _division_identities(j, minc, ninc, p, extra):
    d_n = _inside(j, minc, ninc)
    out = {}
    _, d_p = divide_filter(j, minc)
    _, meet = intersect(d_p, ninc)
    out[1] = same_submodule(d_n, meet)
    _, again = divide_filter(j, factor_through(minc, d_n))
    out[2] = same_submodule(d_n.compose(again), d_n)
    n_mod = ninc.source
    q, proj = quotient(n_mod, factor_through(minc, ninc))
    _, tq = torsion(j, q)
    d_in_n = factor_through(d_n, ninc)
    _, img = sum_submodules(q, proj.compose(d_in_n).matrix)
    out[3] = same_submodule(img, tq)
    whole = same_submodule(d_n, ninc)
    out[4] = whole == is_torsion_module(j, q)
    m_mod = minc.source
    total, (ia, ib), _ = direct_sum(m_mod, extra)
    _, t_sum = torsion(j, total)
    _, ta = torsion(j, m_mod)
    _, tb = torsion(j, extra)
    _, parts = sum_submodules(total, ia.compose(ta).matrix, ib.compose(tb).matrix)
    out[5] = same_submodule(t_sum, parts)
    return out, d_n


def test_criterion_02_division_identities(tally):
    for j in FILTERS:
        rng = random.Random(f"division:{j}")
        for case in range(500):
            minc, ninc, p = random_triple(rng, 1000)
            extra = random_finite_module(rng, 64)
            ids, d_n = tally.timed(_division_identities, j, minc, ninc, p, extra)
            for k, ok in ids.items():
                tally.check(ok, f"{j} #{case}: identity {k}")
            if case < 100:
                want = oracles.division_by_enumeration(j, minc, ninc, p)
                tally.check(oracles.element_set(p, d_n) == want, f"{j} #{case}: enumeration")
    finish(tally, 60)


def test_criterion_03_completeness_and_jmap_composition(tally):
    for j in FILTERS:
        rng = random.Random(f"division:{j}")
        for case in range(500):
            minc, ninc, p = random_triple(rng, 1000)
            random_finite_module(rng, 64)
            d_n = tally.timed(_inside, j, minc, ninc)
            twice = tally.timed(_inside, j, d_n, ninc)
            tally.check(same_submodule(twice, d_n), f"{j} #{case}: not complete")
            m_to_n = factor_through(minc, ninc)
            f_j = tally.timed(is_jmap, j, m_to_n)
            g_j = tally.timed(is_jmap, j, ninc)
            gf_j = tally.timed(is_jmap, j, minc)
            if f_j and g_j:
                tally.check(gf_j, f"{j} #{case}: composite of J-maps")
            if f_j and gf_j:
                tally.check(g_j, f"{j} #{case}: cancellation")
            if case < 100:
                n_set = oracles.element_set(p, ninc)
                tally.check(f_j == (oracles.division_by_enumeration(j, minc, ninc, p) == n_set),
                            f"{j} #{case}: is_jmap against enumeration")
    finish(tally)


def test_criterion_04_baer_testbed(tally):
    groups = oracles.abelian_groups(64)
    rng = random.Random(4)
    for factors in groups:
        for p in (2, 3):
            for q in (cyclic_sum(factors), disguise(factors, rng)):
                got = tally.timed(baer_check, default_baer_modulus(q), p_power(p), q)
                want = not oracles.has_element_of_order(factors, p)
                tally.check(got == want, f"{factors} p={p}: baer {got}")
                tally.check(p_divisible(q, p) == want, f"{factors} p={p}: divisibility")
    finish(tally, 30)


def test_criterion_05_worked_examples(tally):
    rng = random.Random(5)
    for case in range(50):
        j, prime = rng.choice([(p_power(2), 2), (p_power(3), 3), (ALL, None)])
        rank = rng.randint(0, 2)
        factors = random_factors(rng, 64)
        m = disguise([0] * rank + factors, rng)
        shape = tally.timed(jhull, j, m).shape()
        if prime is None:
            want_k = len(oracles.invariant_factors_oracle(factors))
            residual = []
        else:
            want_k = sum(1 for d in factors if d % prime == 0)
            residual = oracles.invariant_factors_oracle(
                [d // oracles.prime_powers(d).get(prime, 1) for d in factors])
        want = {"localized_rank": rank, "prufer_count": want_k, "residual": residual, "prime": prime}
        tally.check(shape == want, f"#{case} {factors} r={rank}: {shape}")

    report, code = tally.timed(run, "pushout", [str(SAMPLES / "no_pushout.json")])
    tally.check(code == 1 and report["result"]["error"]["kind"] == "NotPure", "noPushout")
    _, doc = load(str(SAMPLES / "no_pushout.json"))
    f = doc.pointed_map()
    with pytest.raises(NotPure):
        pushout(f, JTExtension.trivial(f.source).inc)

    report, code = tally.timed(run, "maps", [str(SAMPLES / "extension_t1.json"),
                                             str(SAMPLES / "extension_t2.json")])
    tally.check(code == 0 and not report["result"]["isomorphic"], "t1/t2 reported isomorphic")

    _, doc = load(str(SAMPLES / "pointed_z_z6_z2.json"))
    pm = doc.pointed
    tally.check(pm.tor_inc.source == cyclic_sum([6, 2]), "torsion is not Z/6 + Z/2")
    tally.check(torsion(ALL, pm.module)[0] == cyclic_sum([6, 2]), "library torsion")
    images = {pm.point(pm.tor_inc(x)) for x in pm.tor_inc.source.elements()}
    tally.check(len(images) == 12, "pointing is not injective")
    finish(tally, 10)


def _competitors(rng, f, g):
    pm, pn = f.target, g.target
    level = lcm(max(pm.tor_level(), 1), max(pn.tor_level(), 1)) * f.source.target.prime
    t = pm.target
    x = t.level_module(level)
    q = PointedModule(x, t, x.gens(), [t.from_level(v, level) for v in x.gens()])
    out = []
    for k in sample_extensions(rng, pm.tor_inc, pm.level_map(level), 6):
        k = PointedMap(k, pm, q)
        for l in sample_extensions(rng, g.underlying, k.underlying.compose(f.underlying), 6):
            try:
                out.append((k, PointedMap(l, pn, q)))
            except IncompatibleMap:
                continue
    return out


def test_criterion_06_pushout_universal_property(tally):
    rng = random.Random(6)
    competitors = 0
    for case in range(200):
        prime = rng.choice([2, 3])
        f = graph_map(rng, random_pointed(rng, prime, s=1), random_pointed(rng, prime, s=1, max_rank=1))
        g = random_extension(rng, f.source, prime).inc
        po = tally.timed(pushout, f, g)
        for k, l in _competitors(rng, f, g):
            competitors += 1
            tally.check(tally.timed(count_mediators, po, k, l) == 1, f"#{case}: mediator count")
        tally.check(count_mediators(po, po.i, po.j) == 1, f"#{case}: identity mediator")
        pm, pn = f.target, g.target
        _, both = sum_submodules(po.module.module, po.i.underlying.compose(pm.tor_inc).matrix,
                                 po.j.underlying.compose(pn.tor_inc).matrix)
        tally.check(same_submodule(both, po.module.tor_inc), f"#{case}: torsion generation")
    tally.check(competitors >= 200, f"only {competitors} competitors enumerated")
    finish(tally, 120)


def test_criterion_07_adjunction(tally):
    rng = random.Random(7)
    for case in range(100):
        prime = rng.choice([2, 3])
        phi = graph_map(rng, random_pointed(rng, prime, s=1), random_pointed(rng, prime, s=1, max_rank=1))
        n = random_extension(rng, phi.source, prime)
        p = random_extension(rng, phi.target, prime)
        tally.check(tally.timed(adjunction_check, phi, n, p), f"#{case}: adjunction")
        level = max(phi.target.tor_level(), 1) * prime
        w, inc = tally.timed(saturate(phi.target).window, level)
        c = tally.timed(counit_map, phi, JTExtension(phi.target, w, inc))
        tally.check(c.is_isomorphism(), f"#{case}: counit on saturated target")
    finish(tally, 120)


def _check_sequence(tally, ext, level, label):
    rep = tally.timed(exact_sequence, ext, maximal_extension(ext.base), level)
    tally.check(rep.ok(), f"{label}: report {rep}")
    tally.check(rep.middle_order == oracles.aut_over_base_count(ext), f"{label}: |Aut_M(N)|")
    n = ext.total.module
    q, _ = quotient(n, base_plus_torsion(ext))
    tors = ext.total.tor_inc.source
    tally.check(rep.kernel_order == oracles.hom_count(list(q.factors), list(tors.factors)),
                f"{label}: kernel order")
    return rep


def test_criterion_08_aut_exact_sequence(tally):
    from test_hulls_autseq import half_z4_over, z4_over

    for make, orders in ((z4_over, (1, 2, 2)), (half_z4_over, (2, 4, 2))):
        rep = _check_sequence(tally, make(), 16, make.__name__)
        tally.check(rep.orders == orders, f"{make.__name__}: orders {rep.orders}")
    rng = random.Random(8)
    done = tried = 0
    while done < 100 and tried < 1000:
        tried += 1
        prime = rng.choice([2, 3])
        m = random_pointed(rng, prime, s=rng.randint(1, 2), max_jorder=8)
        ext = random_extension(rng, m, prime)
        g = maximal_extension(m)
        level = max(min_level(ext, g), 1) * prime
        if not tally.timed(is_normal, ext, g, level):
            continue
        _check_sequence(tally, ext, level, f"#{tried}")
        done += 1
    tally.check(done == 100, f"only {done} normal extensions certified")
    finish(tally, 120)


def test_criterion_09_duality_bijection(tally):
    for factors in oracles.abelian_groups(24):
        subgroups = len(oracles.subgroups(factors))
        for s in (1, 2):
            r = tally.timed(duality_lattices, cyclic_sum(factors), TorsionTarget(s))
            tally.check(r.inverse_ok and r.reversing_ok and r.holds, f"{factors} s={s}")
            tally.check(len(r.submodules) == subgroups, f"{factors} s={s}: lattice size")
    finish(tally, 60)


def _random_invertible(rng, s, level):
    while True:
        g = [[rng.randrange(level) for _ in range(s)] for _ in range(s)]
        if gcd(oracles.det(g), level) == 1:
            return g


def test_criterion_10_cohomology_and_bound(tally):
    tally.check(tally.timed(h1, [[[-1]]], cyclic_sum([4])) == cyclic_sum([2]), "h1 example")

    rng = random.Random(10)
    for case in range(200):
        s = rng.randint(1, 2)
        level = rng.choice([2, 3, 4, 6])
        gens = [_random_invertible(rng, s, level) for _ in range(rng.randint(1, 2))]
        h = tally.timed(h1, gens, cyclic_sum([level] * s), level)
        order = len(matrix_group(gens, level))
        tally.check(order == len(oracles.close_group(gens, level)), f"#{case}: group order")
        tally.check(all(h.is_zero(tuple(order * c for c in x)) for x in h.gens()),
                    f"#{case}: |G| H^1 != 0")
        if case < 40 and (level ** s) ** order <= 5000:
            tally.check(h.order() == oracles.h1_order_bruteforce(gens, level), f"#{case}: |H^1|")

    tally.check(subring_index([[[1, 0], [0, 1]], [[-1, 0], [0, -1]]], 4) == 4, "subring index")

    for rank in (0, 1, 2, 3):
        for d, n, m in itertools.product((1, 2, 3, 6), repeat=3):
            if d * n * m not in (2, 3, 6):
                continue
            b = BoundInputs(d, n, m, rank, 2)
            rep = tally.timed(kummer_bound, b, [], 36)
            want = (d * n * m) ** (rank * 2)
            tally.check(rep.c == want == closed_form_bound(b, 36) and rep.consistent(),
                        f"bound r={rank} dnm={d * n * m}: {rep.c}")

    verified = 0
    for case in range(40):
        level = rng.choice([2, 3, 4])
        s = rng.randint(1, 2)
        r = 1 if s == 2 else rng.randint(1, 2)
        tg = [_random_invertible(rng, s, level) for _ in range(rng.randint(0, 2))]
        kg = [tuple(tuple(rng.randrange(level) for _ in range(s)) for _ in range(r))
              for _ in range(rng.randint(0, 2))]
        inst = GaloisSimInstance.split(level, cyclic_sum([level] * r), s, tg, kg)
        divisors = [k for k in range(1, level + 1) if level % k == 0]
        for d, n, m in itertools.product(divisors, repeat=3):
            try:
                ok = tally.timed(thm_main_containment_check, inst, BoundInputs(d, n, m, r, s))
            except HypothesisFailure:
                continue
            verified += 1
            tally.check(ok, f"#{case} L={level} d={d} n={n} m={m}: containment")
    tally.check(verified > 0, "no instance verified its hypotheses")
    finish(tally, 60)


VALID = sorted(p for p in SAMPLES.glob("*.json") if p.stem != "bad_pointing")


def test_criterion_11_cli(tally, tmp_path):
    for path in VALID:
        _, doc = tally.timed(load, str(path))
        printed = doc.to_json()
        tally.check(Document(json.loads(canonical_json(printed))).to_json() == printed,
                    f"{path.stem}: round trip")
    for path in sorted(SAMPLES.glob("*.json")):
        a, ca = tally.timed(run, "info", [str(path)])
        b, cb = tally.timed(run, "info", [str(path)])
        tally.check(dumps(a) == dumps(b) and ca == cb, f"{path.stem}: nondeterministic")
    codes = [
        (("info", [SAMPLES / "minimal.json"]), 0),
        (("pushout", [SAMPLES / "no_pushout.json"]), 1),
        (("info", [SAMPLES / "bad_pointing.json"]), 2),
        (("info", [tmp_path / "missing.json"]), 2),
    ]
    for (cmd, files), want in codes:
        _, got = tally.timed(run, cmd, [str(f) for f in files])
        tally.check(got == want, f"{cmd} {files[0].name}: exit {got}")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"ring": "Z", "module": {"generators": "x", "relations": []}}))
    _, got = run("info", [str(bad)])
    tally.check(got == 2, "schema error exit code")
    finish(tally)
