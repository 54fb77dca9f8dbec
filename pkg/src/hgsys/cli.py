"""``hgsys run suite.json``: build the requested algebras, run the checks, write a JSON report.

Exit codes: 0 all checks pass, 1 some check fails, 2 no failure but some check
is inconclusive, 3 a completion or oracle budget was exceeded (partial report).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cache import Context, RuleCache, default_cache_dir
from .cartan import BUILTIN_DATA, CartanDatum, CocycleSpec, LieDatum
from .constructions import (GaloisBundle, HopfAlgebra, build_kashiwara, build_Uhat, build_Uprime,
                            build_Uq, check_sridharan_match, classical_limit, embed_uhat,
                            kashiwara_bundle, kashiwara_lie_datum, mutually_reducing, sridharan_bundle)
from .engine import Budget, Presentation
from .errors import BudgetExceeded, ParseError, PoleError, ValidationError
from .maps import TensorElement, Witness
from .parsing import parse_element
from .scalars import Scalar
from .verifier import (FAIL, INCONCLUSIVE_STATUS, MU_OP_CONVENTION, PASS, CheckReport,
                       CheckResult, Options, check_bundle_comodules, check_complete_system,
                       check_galois_system, check_hopf, check_membership_suite, check_torsor,
                       verify_basis)

log = logging.getLogger("hgsys")

SUITES = ("kashiwara", "sridharan", "uq_hopf", "custom")
CHECKS = ("hopf", "torsor", "comodule", "galois", "complete", "membership", "basis", "classical_limit")
ALLOWED = {
    "kashiwara": set(CHECKS),
    "sridharan": set(CHECKS) - {"classical_limit"},
    "uq_hopf": {"hopf", "basis", "classical_limit"},
    "custom": {"basis"},
}
KEYS = {"suite", "cartan", "lie", "cocycle", "presentation", "degree_bound", "checks", "budget",
        "overrides", "samples", "seed", "basis_degree", "name"}

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_BUDGET = 0, 1, 2, 3

CONVENTIONS = [
    "t_i = q_i^{h_i}: t_j X t_j^{-1} = q^{±d_j a_ji} X for X of weight ±alpha_i",
    "antipodes of f-type letters: S(f_i) = -f_i t_i, S'(f'_i) = -t_i^{-1} f'_i",
    "alpha = left coaction, beta = right coaction on both T and Z",
    MU_OP_CONVENTION,
]


@dataclass
class SuiteSpec:
    suite: str
    checks: list
    degree_bound: int = 8
    cartan: CartanDatum | None = None
    lie: LieDatum | None = None
    cocycle: CocycleSpec | None = None
    presentation: Presentation | None = None
    budget: Budget = field(default_factory=Budget)
    overrides: dict = field(default_factory=dict)
    samples: int = 0
    seed: int = 0
    basis_degree: int | None = None
    name: str = ""

    def datum_json(self) -> dict:
        if self.cartan is not None:
            out = self.cartan.to_json()
            if self.cartan.name:
                out["name"] = self.cartan.name
            return out
        if self.lie is not None:
            return {"lie": self.lie.to_json(), "cocycle": self.cocycle.to_json()}
        p = self.presentation
        return {"presentation": p.name, "generators": p.names, "digest": p.digest()}


# ---------------------------------------------------------------------------
# parsing


def parse_spec(path) -> SuiteSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return spec_from_dict(data)


def _need(cond, msg, cls=ValidationError):
    if not cond:
        raise cls(msg)


def _int(data, key, default, lo=None):
    v = data.get(key, default)
    if v is None:
        return None
    _need(isinstance(v, int) and not isinstance(v, bool), f"field '{key}' must be an integer", ParseError)
    if lo is not None:
        _need(v >= lo, f"field '{key}' must be >= {lo}")
    return v


def _fraction(v, where) -> Fraction:
    try:
        if isinstance(v, (int, str)) and not isinstance(v, bool):
            return Fraction(v)
    except ValueError:
        pass
    raise ParseError(f"{where}: expected a rational number, got {v!r}")


def _parse_cartan(v) -> CartanDatum:
    if isinstance(v, str):
        _need(v in BUILTIN_DATA, f"unknown built-in Cartan datum {v!r}; known: {sorted(BUILTIN_DATA)}", ParseError)
        return BUILTIN_DATA[v]
    _need(isinstance(v, dict) and "matrix" in v, "field 'cartan' needs 'matrix'", ParseError)
    m = v["matrix"]
    _need(isinstance(m, list) and all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in m),
          "field 'cartan.matrix' must be a list of integer rows", ParseError)
    d = v.get("symmetrizers", [1] * len(m))
    _need(isinstance(d, list) and all(isinstance(x, int) for x in d),
          "field 'cartan.symmetrizers' must be a list of integers", ParseError)
    return CartanDatum(m, d, v.get("name", ""))


def _parse_lie(v) -> LieDatum:
    _need(isinstance(v, dict) and isinstance(v.get("basis"), list), "field 'lie' needs a 'basis' list", ParseError)
    brackets = []
    for k, item in enumerate(v.get("brackets", [])):
        _need(isinstance(item, list) and len(item) == 3 and isinstance(item[2], dict),
              f"lie.brackets[{k}] must be [x, y, {{z: coeff}}]", ParseError)
        x, y, val = item
        brackets.append(((x, y), {z: _fraction(c, f"lie.brackets[{k}]") for z, c in val.items()}))
    return LieDatum(v["basis"], brackets, v.get("name", "g"))


def _parse_cocycle(v, lie) -> CocycleSpec:
    _need(isinstance(v, list), "field 'cocycle' must be a list of [x, y, value]", ParseError)
    vals = []
    for k, item in enumerate(v):
        _need(isinstance(item, list) and len(item) == 3, f"cocycle[{k}] must be [x, y, value]", ParseError)
        vals.append(((item[0], item[1]), _fraction(item[2], f"cocycle[{k}]")))
    return CocycleSpec(lie, vals)


def _parse_presentation(v) -> Presentation:
    _need(isinstance(v, dict), "field 'presentation' must be an object", ParseError)
    gens = v.get("generators")
    _need(isinstance(gens, list) and gens and all(isinstance(g, str) for g in gens),
          "presentation.generators must be a nonempty list of names", ParseError)
    rels = v.get("relations", [])
    _need(isinstance(rels, list), "presentation.relations must be a list of strings", ParseError)
    elems = [parse_element(r, gens) for r in rels]
    try:
        return Presentation(v.get("name", "custom"), gens, elems, precedence=v.get("precedence"),
                            labels=[f"r{k}: {r}" for k, r in enumerate(rels)])
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def spec_from_dict(data) -> SuiteSpec:
    _need(isinstance(data, dict), "spec must be a JSON object", ParseError)
    extra = set(data) - KEYS
    _need(not extra, f"unknown fields {sorted(extra)}", ParseError)
    suite = data.get("suite")
    _need(suite in SUITES, f"field 'suite' must be one of {list(SUITES)}", ParseError)
    checks = data.get("checks")
    _need(isinstance(checks, list) and checks, "field 'checks' must be a nonempty list", ValidationError)
    for c in checks:
        _need(c in CHECKS, f"unknown check {c!r}", ValidationError)
        _need(c in ALLOWED[suite], f"check {c!r} is not available for suite {suite!r}", ValidationError)
    kinds = [k for k in ("cartan", "lie", "presentation") if k in data]
    _need(len(kinds) == 1, "exactly one datum kind (cartan, lie + cocycle, or presentation) is required")
    want = {"kashiwara": "cartan", "uq_hopf": "cartan", "sridharan": "lie", "custom": "presentation"}[suite]
    _need(kinds[0] == want, f"suite {suite!r} needs a '{want}' datum")
    spec = SuiteSpec(suite, list(checks), name=str(data.get("name", "")))
    spec.degree_bound = _int(data, "degree_bound", 8, lo=1)
    spec.samples = _int(data, "samples", 0, lo=0)
    spec.seed = _int(data, "seed", 0)
    spec.basis_degree = _int(data, "basis_degree", None, lo=0)
    if want == "cartan":
        spec.cartan = _parse_cartan(data["cartan"])
    elif want == "lie":
        _need("cocycle" in data, "sridharan suite needs a 'cocycle'")
        spec.lie = _parse_lie(data["lie"])
        spec.cocycle = _parse_cocycle(data["cocycle"], spec.lie)
    else:
        spec.presentation = _parse_presentation(data["presentation"])
    b = data.get("budget", {})
    _need(isinstance(b, dict), "field 'budget' must be an object", ParseError)
    extra = set(b) - {"max_rules", "max_seconds", "max_words"}
    _need(not extra, f"unknown budget fields {sorted(extra)}", ParseError)
    spec.budget = Budget(**{k: v for k, v in b.items()})
    ov = data.get("overrides", {})
    _need(isinstance(ov, dict), "field 'overrides' must be an object", ParseError)
    _need(not ov or suite in ("kashiwara", "sridharan"), "overrides apply to bundle suites only")
    spec.overrides = ov
    return spec


# ---------------------------------------------------------------------------
# overrides


def _override_image(m, gen, terms) -> TensorElement:
    _need(isinstance(terms, list), f"override for {m.name}({gen}) must be a list of terms", ParseError)
    acc = TensorElement.zero(m.target)
    names = [set(h.presentation.names) for h in m.target]
    for k, t in enumerate(terms):
        _need(isinstance(t, dict) and "legs" in t, f"override term {k} for {gen} needs 'legs'", ParseError)
        legs = t["legs"]
        _need(isinstance(legs, list) and len(legs) == len(m.target),
              f"override term {k} for {m.name}({gen}) needs {len(m.target)} legs", ValidationError)
        words = []
        for li, leg in enumerate(legs):
            w = tuple(leg.split()) if isinstance(leg, str) else tuple(leg)
            bad = [x for x in w if x not in names[li]]
            _need(not bad, f"override term {k} for {m.name}({gen}): unknown letters {bad}", ValidationError)
            words.append(w)
        coeff = Scalar.parse(str(t.get("coeff", "1")))
        acc = acc + TensorElement.pure(m.target, words, coeff)
    return acc


def apply_overrides(bundle: GaloisBundle, overrides: dict) -> GaloisBundle:
    maps = bundle.all_morphisms()
    for key in sorted(overrides):
        _need(key in maps, f"override target {key!r} unknown; known: {sorted(maps)}")
        m = maps[key]
        per = overrides[key]
        _need(isinstance(per, dict), f"override {key!r} must map generators to term lists", ParseError)
        images = dict(m.images)
        for gen in sorted(per):
            _need(gen in images, f"override {key!r}: {gen!r} is not a generator of {m.source_handle.name}")
            images[gen] = _override_image(m, gen, per[gen])
        new = m.with_images(images, name=m.name + "[override]")
        new.certify()
        bundle = bundle.replace_map(key, new)
        maps = bundle.all_morphisms()
    return bundle


# ---------------------------------------------------------------------------
# running


def _basis_degree(spec: SuiteSpec, rank: int = 1) -> int:
    if spec.basis_degree is not None:
        return spec.basis_degree
    return min(spec.degree_bound, 4 if rank == 1 else 3)


def _classical_checks(c: CartanDatum, ctx: Context, suite: str) -> CheckReport:
    anchor = "\"classical limit of Û and the classical limit of U′ coincide\""
    rep = CheckReport("classical_limit", {})
    t0 = time.perf_counter()
    up = classical_limit(build_Uprime(c, ctx).handle, ctx,
                         rename={**{f"ep{i}": f"e{i}" for i in c.indices},
                                 **{f"fp{i}": f"f{i}" for i in c.indices}})
    uh = classical_limit(build_Uhat(c, ctx).handle, ctx, rename={f"eh{i}": f"e{i}" for i in c.indices})
    ok, bad = mutually_reducing(up, uh)
    rep.results.append(CheckResult("classical limits of U′ and Û agree after renaming", anchor,
                                   PASS if ok else FAIL,
                                   None if ok else Witness(bad[0][0], bad[0][1], 0),
                                   (time.perf_counter() - t0) * 1000))
    if suite == "kashiwara":
        anchor = "\"c(e_i, f_j) = δ_{i,j}\""
        for with_h in (False, True):
            t0 = time.perf_counter()
            Bc = classical_limit(build_kashiwara(c, ctx), ctx, with_cartan=with_h)
            d = kashiwara_lie_datum(c, ctx, with_cartan=with_h)
            m = check_sridharan_match(Bc, d.lie, d.cocycle, d.exprs, ctx)
            rep.results.append(CheckResult(
                f"classical limit of B is the Sridharan algebra of {d.lie.name}", anchor,
                PASS if m.ok else FAIL, None if m.ok else Witness(m.failures[0][0], m.failures[0][1], 0),
                (time.perf_counter() - t0) * 1000))
    else:
        t0 = time.perf_counter()
        try:
            classical_limit(build_Uq(c, ctx).handle, ctx)
            st, w = FAIL, Witness("U_q specializes at q = 1", "no pole found", 0)
        except PoleError as exc:
            st, w = PASS, Witness("pole at q = 1", str(exc), 0)
        rep.results.append(CheckResult("U_q has no classical limit in this presentation",
                                       "\"(t_i − t_i^{−1})/(q_i − q_i^{−1})\"", st, w,
                                       (time.perf_counter() - t0) * 1000))
    return rep


def _embedding_report(c: CartanDatum, ctx: Context) -> CheckReport:
    from .verifier import certificate_result
    anchor = "\"sends ê_i, f_i, q^h to (q_i − q_i^{−1}) e_i, f_i, q^h\""
    rep = CheckReport("embedding", {})
    e = embed_uhat(c, ctx)
    rep.results.append(certificate_result(e.morphism, anchor))
    for label, comps in (("Δ∘ι = (ι⊗ι)∘Δ̂", e.coalgebra), ("ε∘ι = ε̂", e.counit)):
        bad = [x for x in comps if not x.equal]
        st = PASS if not bad else FAIL
        rep.results.append(CheckResult(label, anchor, st,
                                       None if not bad else Witness(f"{label} on {bad[0].generator}",
                                                                    str(bad[0].difference), 0)))
    return rep


def _steps(spec: SuiteSpec, ctx: Context, opts: Options):
    """Yield (check name, thunk producing a CheckReport) in declared order."""
    if spec.suite == "custom":
        def basis():
            h = build_custom(spec.presentation, ctx)
            rep = CheckReport("basis", {})
            rep.results.append(verify_basis(h, _basis_degree(spec)))
            return rep
        for c in spec.checks:
            yield c, basis
        return
    if spec.suite == "uq_hopf":
        c = spec.cartan
        for chk in spec.checks:
            if chk == "hopf":
                def run(c=c):
                    rep = CheckReport("hopf", {})
                    for f in (build_Uq, build_Uhat, build_Uprime):
                        rep.extend(check_hopf(f(c, ctx), opts))
                    rep.extend(_embedding_report(c, ctx))
                    return rep
            elif chk == "basis":
                def run(c=c):
                    rep = CheckReport("basis", {})
                    for f in (build_Uq, build_Uhat, build_Uprime):
                        rep.results.append(verify_basis(f(c, ctx).handle, _basis_degree(spec, c.rank)))
                    return rep
            else:
                def run(c=c):
                    return _classical_checks(c, ctx, "uq_hopf")
            yield chk, run
        return
    holder = {}

    def bundle() -> GaloisBundle:
        if "b" not in holder:
            if spec.suite == "kashiwara":
                b = kashiwara_bundle(spec.cartan, ctx)
            else:
                b = sridharan_bundle(spec.lie, spec.cocycle, ctx)
            if spec.overrides:
                b = apply_overrides(b, spec.overrides)
            holder["b"] = b
        return holder["b"]

    for chk in spec.checks:
        if chk == "hopf":
            def run():
                b = bundle()
                rep = CheckReport("hopf", {}).extend(check_hopf(b.A, opts))
                if b.B is not b.A:
                    rep.extend(check_hopf(b.B, opts))
                return rep
        elif chk == "torsor":
            def run():
                return check_torsor(bundle().torsor, opts)
        elif chk == "comodule":
            def run():
                return check_bundle_comodules(bundle(), opts)
        elif chk == "galois":
            def run():
                return check_galois_system(bundle(), opts)
        elif chk == "complete":
            def run():
                return check_complete_system(bundle(), opts)
        elif chk == "membership":
            def run():
                return check_membership_suite(bundle(), opts)
        elif chk == "basis":
            def run():
                rep = CheckReport("basis", {})
                h = bundle().T
                rank = spec.cartan.rank if spec.cartan else 1
                rep.results.append(verify_basis(h, _basis_degree(spec, rank)))
                return rep
        else:
            def run():
                return _classical_checks(spec.cartan, ctx, "kashiwara")
        yield chk, run


def build_custom(pres: Presentation, ctx: Context):
    from .maps import AlgebraHandle
    return AlgebraHandle(pres.name, ctx.complete(pres))


def suite_label(spec: SuiteSpec) -> str:
    if spec.name:
        return spec.name
    if spec.cartan is not None:
        return f"{spec.suite}/{spec.cartan.label()}"
    if spec.lie is not None:
        return f"{spec.suite}/{spec.lie.name}"
    return f"{spec.suite}/{spec.presentation.name}"


def run(spec: SuiteSpec, cache: RuleCache | None = None) -> tuple[CheckReport, int]:
    ctx = Context(degree_bound=spec.degree_bound, budget=spec.budget, cache=cache, strict=False)
    opts = Options(samples=spec.samples, seed=spec.seed)
    report = CheckReport(suite_label(spec), spec.datum_json(), degree_bound=spec.degree_bound,
                         conventions=list(CONVENTIONS))
    try:
        for name, thunk in _steps(spec, ctx, opts):
            log.info("running %s", name)
            sub = thunk()
            for r in sub.results:
                r.label = f"[{name}] {r.label}"
            report.extend(sub)
    except BudgetExceeded as exc:
        log.error("budget exceeded: %s", exc)
        report.results.append(CheckResult(f"budget exceeded: {exc}", "", INCONCLUSIVE_STATUS,
                                          Witness("budget", str(exc), spec.degree_bound)))
        return report, EXIT_BUDGET
    st = report.status
    return report, {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE_STATUS: EXIT_INCONCLUSIVE}[st]


def report_json(report: CheckReport, code: int, timing: bool = True) -> str:
    doc = report.to_json(timing)
    doc["exit_code"] = code
    if code == EXIT_BUDGET:
        doc["status"] = "budget_exceeded"
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hgsys", description="Check Hopf-Galois system identities on presented algebras.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a suite file")
    r.add_argument("spec", help="suite spec JSON file")
    r.add_argument("--report", help="write the JSON report here (default: stdout)")
    r.add_argument("--cache-dir", help="directory for completed rule sets")
    r.add_argument("--degree-bound", type=int, help="override the suite file's degree bound")
    r.add_argument("--no-cache", action="store_true", help="do not read or write the rule cache")
    r.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    r.add_argument("--no-timing", action="store_true", help="zero all timing fields in the report")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = parse_spec(args.spec)
        if args.degree_bound is not None:
            if args.degree_bound < 1:
                raise ValidationError("--degree-bound must be >= 1")
            spec.degree_bound = args.degree_bound
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    cache = None if args.no_cache else RuleCache(args.cache_dir or default_cache_dir())
    report, code = run(spec, cache)
    text = report_json(report, code, timing=not args.no_timing)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    print(report.summary(), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
