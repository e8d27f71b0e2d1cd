"""``divkummer`` command-line front end."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable

from . import autseq, duality, hulls, kummer, modfilter, pointed
from .errors import DivKummerError, InputError, PreconditionError, SchemaError
from .exactalg import IntMatrix, ModuleMap, as_matrix, snf, submodule
from .io import Document, digest, parse_filter

COMMANDS: dict[str, Callable] = {}


def command(name: str):
    def wrap(fn):
        COMMANDS[name] = fn
        return fn
    return wrap


def jsonable(x):
    """Integers become decimal strings, rationals ``"a/b"``; booleans and None stay."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return pointed.fmt_fraction(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, IntMatrix):
        return jsonable(x.data)
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


class Context:
    def __init__(self, docs: list[Document], filt, level: int | None):
        self.docs = docs
        self.filter = filt
        self.level = level
        self.warnings: list[str] = []

    def doc(self, i: int = 0) -> Document:
        if len(self.docs) <= i:
            raise InputError(f"this command needs at least {i + 1} input document(s)")
        return self.docs[i]

    def need_filter(self, doc: Document):
        f = doc.filter
        if f is None:
            raise InputError("a filter is required (--filter or the document's filter key)")
        return f


def _module_info(m) -> dict:
    return {
        "describe": m.describe(),
        "factors": list(m.factors),
        "rank": m.rank,
        "order": m.order(),
        "exponent": m.exponent(),
    }


def _submodule_info(inc: ModuleMap) -> dict:
    return {"basis": inc.matrix, "describe": inc.source.describe()}


def _pointed_info(p) -> dict:
    return {
        "module": p.module.describe(),
        "torsion": p.tor.describe(),
        "torsion_basis": p.tor_inc.matrix,
        "torsion_images": [list(v) for v in p.torsion_gen_images()],
    }


def _extension_info(e) -> dict:
    return {"base": e.base.module.describe(), "total": e.total.module.describe(),
            "inclusion": e.inc.matrix}


@command("snf")
def cmd_snf(ctx: Context) -> dict:
    d = ctx.doc()
    n = d.module.ngens
    rows = [[int(c) for c in r] for r in d.raw["module"]["relations"]]
    u, s, v = snf(as_matrix(rows, cols=n))
    diag = [s[i, i] for i in range(min(s.rows, s.cols))]
    return {"U": u, "S": s, "V": v, "diagonal": diag, "factors": list(d.module.factors)}


@command("info")
def cmd_info(ctx: Context) -> dict:
    d = ctx.doc()
    out = _module_info(d.module)
    out["ring"] = str(d.ring)
    if "pointing" in d.raw:
        out["pointing"] = _pointed_info(d.pointed)
    return out


@command("divide")
def cmd_divide(ctx: Context) -> dict:
    d = ctx.doc()
    j = ctx.need_filter(d)
    _, sinc = submodule(d.module, d.submodule())
    _, dinc = modfilter.divide_filter(j, sinc)
    return {"filter": str(j), "division": _submodule_info(dinc)}


@command("torsion")
def cmd_torsion(ctx: Context) -> dict:
    d = ctx.doc()
    j = ctx.need_filter(d)
    _, tinc = modfilter.torsion(j, d.module)
    return {"filter": str(j), "torsion": _submodule_info(tinc)}


@command("jmap")
def cmd_jmap(ctx: Context) -> dict:
    d = ctx.doc()
    j = ctx.need_filter(d)
    return {"filter": str(j), "jmap": modfilter.is_jmap(j, d.map())}


@command("essential")
def cmd_essential(ctx: Context) -> dict:
    d = ctx.doc()
    j = ctx.need_filter(d)
    return {"filter": str(j), "essential": modfilter.is_essential(j, d.map())}


@command("baer")
def cmd_baer(ctx: Context) -> dict:
    d = ctx.doc()
    j = ctx.need_filter(d)
    modulus = ctx.level or modfilter.default_baer_modulus(d.module)
    out = {"filter": str(j), "modulus": modulus,
           "injective": modfilter.baer_check(modulus, j, d.module)}
    if j.kind == "ppower":
        out["p_divisible"] = modfilter.p_divisible(d.module, j.p)
    return out


@command("pure")
def cmd_pure(ctx: Context) -> dict:
    d = ctx.doc()
    f = d.pointed_map() if "map" in d.raw else d.extension().inc
    return {"pure": pointed.is_pure(f)}


@command("pushout")
def cmd_pushout(ctx: Context) -> dict:
    f = ctx.doc(0).pointed_map()
    g = ctx.doc(1).pointed_map() if len(ctx.docs) > 1 else f
    if f.source.module != g.source.module:
        raise PreconditionError("both maps must start at the same pointed module")
    g = pointed.PointedMap(g.underlying, f.source, g.target)
    po = pointed.pushout(f, g)
    return {"module": po.module.module.describe(), "factors": list(po.module.module.factors),
            "i": po.i.matrix, "j": po.j.matrix, "torsion": po.module.tor.describe()}


@command("saturate")
def cmd_saturate(ctx: Context) -> dict:
    d = ctx.doc()
    sat = pointed.saturate(d.pointed)
    out = {"describe": sat.describe(), "free_part": list(sat.free_part.factors),
           "s": sat.target.s, "prime": sat.target.prime}
    if ctx.level:
        w, inc = sat.window(ctx.level)
        out["window"] = {"level": ctx.level, "module": w.module.describe(), "inclusion": inc.matrix}
    return out


@command("pullback")
def cmd_pullback(ctx: Context) -> dict:
    d = ctx.doc()
    out = pointed.pullback(d.pointed_map(), d.extension())
    info = _extension_info(out)
    info["into_original"] = out.into_original.matrix
    return info


@command("pushforward")
def cmd_pushforward(ctx: Context) -> dict:
    phi = ctx.doc(0).pointed_map()
    n = ctx.doc(1).extension()
    if n.base.module != phi.source.module:
        raise PreconditionError("the extension must be over the source of the map")
    n = pointed.JTExtension(phi.source, n.total, pointed.PointedMap(n.inc.underlying, phi.source, n.total))
    out = pointed.pushforward(phi, n)
    info = _extension_info(out)
    info["from_original"] = out.from_original.matrix
    return info


@command("maps")
def cmd_maps(ctx: Context) -> dict:
    a = ctx.doc(0).extension()
    b = ctx.doc(1).extension() if len(ctx.docs) > 1 else a
    if a.base.module != b.base.module:
        raise PreconditionError("extensions must share their base")
    b = pointed.JTExtension(a.base, b.total, pointed.PointedMap(b.inc.underlying, a.base, b.total))
    maps = pointed.extension_maps(a, b)
    return {"count": len(maps), "maps": sorted(f.matrix.data for f in maps),
            "isomorphic": any(f.is_surjective() for f in maps)}


def _hull_level(ctx: Context, d: Document) -> int | None:
    if ctx.level:
        return ctx.level
    if "hull" in d.raw and "level" in d.raw["hull"]:
        return int(d.raw["hull"]["level"])
    return None


def _hull_payload(h, level) -> dict:
    out = {"describe": h.describe(), "shape": h.shape()}
    if level:
        w = h.window(level)
        out["window"] = {"level": level, "module": w.module.describe(), "iota": w.iota.matrix}
    return out


@command("hull")
def cmd_hull(ctx: Context) -> dict:
    d = ctx.doc()
    j = ctx.need_filter(d)
    return _hull_payload(hulls.jhull(j, d.module), _hull_level(ctx, d))


@command("maxext")
def cmd_maxext(ctx: Context) -> dict:
    d = ctx.doc()
    return _hull_payload(hulls.maximal_extension(d.pointed), _hull_level(ctx, d))


def _ext_level(ctx: Context, d: Document, ext, gamma) -> int:
    level = _hull_level(ctx, d)
    if level is None:
        level = max(hulls.min_level(ext, gamma), 1)
        ctx.warnings.append(f"no level given; using the minimal level {level}")
    return level


@command("normal")
def cmd_normal(ctx: Context) -> dict:
    d = ctx.doc()
    ext = d.extension()
    gamma = hulls.maximal_extension(ext.base)
    level = _ext_level(ctx, d, ext, gamma)
    embs = hulls.embeddings_at_level(ext, gamma, level)
    return {"level": level, "embeddings": len(embs), "normal": hulls.is_normal(ext, gamma, level)}


@command("autseq")
def cmd_autseq(ctx: Context) -> dict:
    d = ctx.doc()
    ext = d.extension()
    gamma = hulls.maximal_extension(ext.base)
    level = _ext_level(ctx, d, ext, gamma)
    r = autseq.exact_sequence(ext, gamma, level)
    return {
        "level": level,
        "orders": list(r.orders),
        "kernel_abelian": r.kernel_abelian,
        "order_identity": r.order_identity,
        "restriction_surjective": r.restriction_surjective,
        "phi_bijection": r.phi_bijection,
        "action_by_conjugation": r.action_by_conjugation,
        "exact": r.ok(),
    }


@command("duality")
def cmd_duality(ctx: Context) -> dict:
    d = ctx.doc()
    s = d.param("s", 1)
    target = pointed.TorsionTarget(s, None, d.ring, d.target.action if "pointing" in d.raw else None) \
        if not d.ring.is_integers else pointed.TorsionTarget(s)
    r = duality.duality_lattices(d.module, target)
    return {"s": s, "submodules": len(r.submodules), "end_submodules": len(r.end_submodules),
            "mutually_inverse": r.inverse_ok, "inclusion_reversing": r.reversing_ok,
            "holds": r.holds}


@command("h1")
def cmd_h1(ctx: Context) -> dict:
    d = ctx.doc()
    mats, level = d.galois_matrices()
    data = kummer.h1_data(mats, d.module, level)
    return {"group_order": len(data.group), "h1": data.h1.describe(),
            "factors": list(data.h1.factors), "order": data.h1.order()}


@command("subring-index")
def cmd_subring_index(ctx: Context) -> dict:
    mats, level = ctx.doc().galois_matrices()
    return {"level": level, "m": kummer.subring_index(mats, level)}


@command("div-index")
def cmd_div_index(ctx: Context) -> dict:
    d = ctx.doc()
    s, k = d.param("s", 1), d.param("k", 1)
    return {"s": s, "k": k, "index": kummer.divisibility_index(d.module, s, k)}


@command("kummer-bound")
def cmd_kummer_bound(ctx: Context) -> dict:
    b, level, tors = ctx.doc().bound()
    if ctx.level:
        level = ctx.level
    rep = kummer.kummer_bound(b, tors, level)
    ctx.warnings.extend(n for n in rep.notes if "truncated" in n)
    return {"c": rep.c, "level": level, "dnm": b.dnm,
            "closed_form": kummer.closed_form_bound(b, level),
            "per_level_index": {str(k): v for k, v in sorted(rep.per_level_index.items())},
            "notes": rep.notes}


@command("ses-check")
def cmd_ses_check(ctx: Context) -> dict:
    d = ctx.doc()
    inst = d.galois()
    r = kummer.ses_report(inst, d.points())
    out = {
        "points_order": r.points_order,
        "kernel_order": r.kernel_order,
        "h1_order": r.h1_order,
        "injective": r.injective,
        "exact_middle": r.exact_middle,
        "supplied_points_match": r.supplied_matches,
        "exact": r.ok(),
        "torsion_image_order": len(inst.torsion_image),
        "kummer_image_order": len(inst.kummer_rows),
    }
    if "bound" in d.raw:
        b, _, _ = d.bound()
        out["containment"] = kummer.thm_main_containment_check(inst, b)
    return out


@command("verify")
def cmd_verify(ctx: Context) -> dict:
    from .verify import run_corpus

    r = run_corpus()
    if r.failed:
        ctx.warnings.append(f"{r.failed} property case(s) failed")
    return {"passed": r.passed, "failed": r.failed,
            "counts": {k: {"passed": p, "failed": f} for k, (p, f) in r.counts.items()},
            "failures": r.failures}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="divkummer", description="Division modules, pointed extensions and Kummer bounds.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--filter", help="ideal filter: 0, 1, p^inf or inf")
    p.add_argument("--level", type=int, help="level L for windows, Baer moduli and bounds")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("inputs", nargs="*", help="input JSON documents")
    return p


def _error_payload(e: DivKummerError) -> dict:
    out = {"type": type(e).__name__, "kind": e.kind, "message": str(e)}
    for attr in ("path", "min_level", "condition"):
        if hasattr(e, attr):
            out[attr] = getattr(e, attr)
    return out


def run(command_name: str, inputs: list[str], filt: str | None = None,
        level: int | None = None) -> tuple[dict, int]:
    """Execute one command; returns ``(report, exit_code)``."""
    raws = []
    report = {"command": command_name, "warnings": []}
    code = 0
    try:
        for path in inputs:
            try:
                with open(path) as fh:
                    raws.append(json.load(fh))
            except OSError as e:
                raise InputError(f"cannot read {path}: {e.strerror}") from None
            except json.JSONDecodeError as e:
                raise SchemaError(f"/: {path} is not valid JSON ({e.msg})", "/") from None
        report["input_digest"] = digest({"documents": raws, "filter": filt, "level": level})
        if level is not None and level < 1:
            raise InputError("--level must be positive")
        override = parse_filter(filt) if filt else None
        docs = [Document(r, override) for r in raws]
        ctx = Context(docs, override, level)
        if command_name != "verify" and not docs:
            raise InputError("no input document given")
        report["result"] = jsonable(COMMANDS[command_name](ctx))
        report["warnings"] = ctx.warnings
        if command_name == "verify" and report["result"]["failed"] != "0":
            code = 1
    except DivKummerError as e:
        report["result"] = {"error": jsonable(_error_payload(e))}
        code = e.exit_code
    report.setdefault("input_digest", digest({"documents": raws, "filter": filt, "level": level}))
    return report, code


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    report, code = run(args.command, args.inputs, args.filter, args.level)
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
