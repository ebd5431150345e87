"""Command line front end: builds, verification suites and JSON reports."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from .liedata import (LieDataError, grading_tables, load_spec, parse_alg_arg, spec_to_json,
                      validate_good_grading, validate_spec)
from .ratlin import format_rational, parse_rational
from .walg import DegreeOverflow, WAlgebra

SCHEMA = "finwalg-report/1"
CACHE_ENV = "FINWALG_CACHE_DIR"
SUITES = ("alg", "walg", "lift", "trans", "verma", "brst")


class ConfigError(Exception):
    pass


@dataclass
class JobConfig:
    alg: str
    reps: List[str] = field(default_factory=lambda: ["natural"])
    max_deg: int = 8
    depth: int = 3
    weight: Optional[List[Fraction]] = None
    suites: List[str] = field(default_factory=lambda: list(SUITES))
    out: Optional[str] = None
    cache: bool = True
    seed: int = 0

    def validate(self) -> None:
        if self.max_deg < 4:
            raise ConfigError("--max-deg must be at least 4")
        if self.depth < 0:
            raise ConfigError("--depth must be nonnegative")
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}")
        for r in self.reps:
            if (os.sep in r or r.endswith(".json")) and not Path(r).exists():
                raise ConfigError(f"representation file {r} does not exist")

    def to_json(self) -> dict:
        return {"alg": self.alg, "reps": self.reps, "max_deg": self.max_deg, "depth": self.depth,
                "weight": None if self.weight is None else [format_rational(x) for x in self.weight],
                "suites": self.suites, "seed": self.seed}


class Report:
    """Named checks plus free-form data; serialized deterministically."""

    def __init__(self, name: str, config: JobConfig):
        self.name = name
        self.config = config
        self.checks: List[dict] = []
        self.data: Dict[str, object] = {}

    def check(self, name: str, passed: bool, counterexample=None, **info) -> bool:
        entry = {"name": name, "status": "pass" if passed else "fail"}
        if not passed:
            entry["counterexample"] = counterexample if counterexample is not None else "unspecified"
        entry.update(info)
        self.checks.append(entry)
        return passed

    def run(self, name: str, fn: Callable[[], object]) -> bool:
        """Run fn; a bool/dict result is the verdict, overflows become failures."""
        from .hw import TruncationOverflow
        try:
            res = fn()
        except (DegreeOverflow, TruncationOverflow) as exc:
            return self.check(name, False, {"overflow": str(exc)})
        if isinstance(res, tuple):
            ok, cex = res
            return self.check(name, bool(ok), cex)
        return self.check(name, bool(res))

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "suite": self.name, "config": self.config.to_json(),
                "status": "pass" if self.passed else "fail", "checks": self.checks,
                "data": self.data}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_report(reports: Sequence[Report], out: Optional[str], stream=None) -> Optional[Path]:
    """One JSON per suite plus summary.json when ``out`` is set, else JSON on stdout."""
    summary = {"schema": SCHEMA, "status": "pass" if all(r.passed for r in reports) else "fail",
               "suites": [{"suite": r.name, "status": "pass" if r.passed else "fail",
                           "checks": len(r.checks),
                           "failed": [c["name"] for c in r.checks if c["status"] != "pass"]}
                          for r in reports],
               "total_checks": sum(len(r.checks) for r in reports)}
    if out is None:
        stream = stream or sys.stdout
        payload = {"summary": summary, "reports": [r.to_json() for r in reports]}
        stream.write(dumps(payload))
        return None
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    for r in reports:
        (d / f"{r.name.replace(' ', '_')}.json").write_text(dumps(r.to_json()))
    (d / "summary.json").write_text(dumps(summary))
    return d


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------

def load_algebra(arg: str):
    if Path(arg).is_file():
        return load_spec(arg)
    return parse_alg_arg(arg)


def cache_dir() -> Path:
    base = os.environ.get(CACHE_ENV)
    return Path(base) if base else Path.home() / ".cache" / "finwalg"


class Context:
    """Lazily built objects shared between suites of one run."""

    def __init__(self, cfg: JobConfig):
        self.cfg = cfg
        self.spec = load_algebra(cfg.alg)
        self._W = None
        self._brst = None
        self._reps: Dict[str, object] = {}
        self._trans: Dict[str, object] = {}

    @property
    def working_degree(self) -> int:
        """Guard for intermediate products: D plus the spread of the c-grading
        on the representations plus what depth-bounded Verma words can add."""
        T = grading_tables(self.spec)
        spread = max((max(r.c) - min(r.c) for r in (self.rep(n) for n in self.cfg.reps)),
                     default=0)
        top = max((d + 2 for d in T.ge_degree), default=0)
        return self.cfg.max_deg + int(spread) + self.cfg.depth * top

    @property
    def W(self) -> WAlgebra:
        if self._W is None:
            self._W = build_walgebra(self.spec, self.working_degree, self.cfg.cache)
        return self._W

    def rep(self, name: str):
        from .trans import load_rep_arg
        if name not in self._reps:
            self._reps[name] = load_rep_arg(self.spec, name)
        return self._reps[name]

    def translation(self, name: str):
        from .trans import Translation
        if name not in self._trans:
            self._trans[name] = Translation(self.W, self.rep(name))
        return self._trans[name]

    @property
    def brst(self):
        from .brst import BRST
        if self._brst is None:
            self._brst = BRST(self.W)
        return self._brst


def build_walgebra(spec, max_deg: int, use_cache: bool = True) -> WAlgebra:
    """W-algebra generators, reusing a content-hashed cache file when present."""
    W = WAlgebra(spec, max_degree=max_deg, build=False)
    path = cache_dir() / f"walg-{W.content_hash()}.json"
    if use_cache and path.is_file():
        try:
            W.load_theta(json.loads(path.read_text()))
            return W
        except (ValueError, KeyError, json.JSONDecodeError):
            pass
    W = WAlgebra(spec, max_degree=max_deg, tables=W.T)
    if use_cache:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(dumps(W.to_json()))
            tmp.replace(path)
        except OSError:
            pass
    return W


def elem_json(u) -> dict:
    return {"text": u.alg.format(u), "terms": u.alg.to_json(u)}


def matrix_json(X) -> List[List[str]]:
    return [[a.alg.format(a) for a in r] for r in X]


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_alg(ctx: Context) -> Report:
    rep = Report("alg build", ctx.cfg)
    spec = ctx.spec
    problems = validate_spec(spec)
    rep.check("structure constants", not problems, problems)
    problems = validate_good_grading(spec)
    rep.check("good grading", not problems, problems)
    T = grading_tables(spec)
    rep.data = {"algebra": spec_to_json(spec),
                "dims": {"g": spec.dim, "p": len(T.p_idx), "n": len(T.n_idx), "k": len(T.k_idx),
                         "ge": len(T.ge_basis), "te": len(spec.te_basis)},
                "ge_degrees": list(T.ge_degree)}
    return rep


def suite_walg_gens(ctx: Context) -> Report:
    rep = Report("walg gens", ctx.cfg)
    W = ctx.W
    gens = []
    for k, (x, u) in enumerate(zip(W.ge, W.theta)):
        gens.append({"index": k, "kazhdan": W.ge_kazhdan[k], "x": ctx.spec.label_of(x), **elem_json(u)})
        rep.check(f"Theta_{k} invariant", W.is_invariant(u), elem_json(u))
    rep.data = {"generators": gens, "hash": W.content_hash(), "working_degree": W.D}
    return rep


def suite_walg_dims(ctx: Context) -> Report:
    rep = Report("walg dims", ctx.cfg)
    W = ctx.W
    dims = W.graded_dims(ctx.cfg.max_deg)
    oracle = W.oracle_graded_dims(ctx.cfg.max_deg)
    rep.check("graded dims match invariant solve", dims == oracle, {"theta": dims, "solve": oracle})
    rep.data = {"graded_dims": dims, "oracle": oracle, "max_degree": ctx.cfg.max_deg}
    return rep


def suite_lift(ctx: Context) -> Report:
    from .trans import LiftError, lift_residuals
    rep = Report("lift solve", ctx.cfg)
    out = {}
    for name in ctx.cfg.reps:
        try:
            T = ctx.translation(name)
        except LiftError as exc:
            rep.check(f"{name}: lift", False, str(exc))
            continue
        bad = lift_residuals(ctx.W, T.rep, T.x0)
        rep.check(f"{name}: lift equations", not bad, bad)
        out[name] = {"x0": matrix_json(T.x0), "c": [format_rational(c) for c in T.rep.c]}
    rep.data = {"lifts": out}
    return rep


def suite_trans_act(ctx: Context) -> Report:
    from .trans import action_weight_check
    rep = Report("trans act", ctx.cfg)
    W = ctx.W
    out = {}
    for name in ctx.cfg.reps:
        T = ctx.translation(name)
        mats = []
        for k, u in enumerate(W.theta):
            try:
                U = T.action(u)
            except DegreeOverflow as exc:
                rep.check(f"{name}: Theta_{k} action", False, {"overflow": str(exc)})
                continue
            rep.check(f"{name}: Theta_{k} weights", action_weight_check(T, u, U), matrix_json(U))
            mats.append({"index": k, "matrix": matrix_json(U)})
        out[name] = mats
    rep.data = {"actions": out}
    return rep


def suite_trans_verify(ctx: Context) -> Report:
    from .trans import check_homomorphism, equivariance_check, generator_pairs, loop_character_check
    rep = Report("trans verify", ctx.cfg)
    W = ctx.W
    for name in ctx.cfg.reps:
        T = ctx.translation(name)
        pairs = generator_pairs(W, ctx.cfg.max_deg)

        def hom(T=T, pairs=pairs):
            res = check_homomorphism(T, [(W.theta[i], W.theta[j]) for i, j in pairs])
            return res["passed"], {"pair": res["failure"], "checked": res["checked"]}

        rep.run(f"{name}: homomorphism on {len(pairs)} generator pairs", hom)
        rep.run(f"{name}: equivariance", lambda T=T: equivariance_check(T))
        rep.run(f"{name}: loop compatibility", lambda T=T: loop_character_check(T))
    return rep


def suite_verma(ctx: Context) -> Report:
    from .hw import HighestWeightData, factors_to_json, translate_verma_factors
    rep = Report("verma translate", ctx.cfg)
    W = ctx.W
    if not ctx.spec.te_basis:
        rep.data = {"note": "t^e is zero; every Verma module is the module itself"}
        return rep
    H = HighestWeightData(W)
    r = len(ctx.spec.te_basis)
    lam = ctx.cfg.weight if ctx.cfg.weight is not None else [Fraction(0)] * r
    if len(lam) != r:
        raise ConfigError(f"--weight needs {r} entries")
    L = H.one_dim_module(lam)
    out = {}
    for name in ctx.cfg.reps:
        R = ctx.rep(name)

        def go(R=R, name=name):
            factors, info = translate_verma_factors(H, L, R, ctx.cfg.depth, T=ctx.translation(name))
            out[name] = {"factors": factors_to_json(W, factors),
                         "steps": [{k: v for k, v in s.items() if isinstance(v, (bool, int, str))}
                                   for s in info["steps"]]}
            ok = all(f.certified for f in factors) and info["character_identity"]
            return ok, {"character_identity": info["character_identity"],
                        "uncertified": [i for i, f in enumerate(factors) if not f.certified]}

        rep.run(f"{name}: Verma filtration", go)
    rep.data = {"weight": [format_rational(x) for x in lam], "filtrations": out}
    return rep


def suite_brst(ctx: Context) -> Report:
    from .brst import (boundaries_killed, d_squared_check, duality_action_check, dualize_lift,
                       invlift_check, membership_agreement, mess_identity_check,
                       random_ptilde_element)
    rep = Report("brst verify", ctx.cfg)
    Bs = ctx.brst
    W = ctx.W
    B = Bs.B
    rep.data = {"delta": B.format(Bs.delta)}
    rep.check("delta^2 = 0", (Bs.delta * Bs.delta).is_zero())
    m = d_squared_check(Bs, 6, 3)
    rep.check("d o d = 0 on spanning set", m is None, m and B.format_mono(m))
    m = membership_agreement(Bs, min(6, ctx.cfg.max_deg))
    rep.check("brst membership = invariance", m is None, m and W.A.format_mono(m))
    rep.check("q o phi = id on generators", all(Bs.q(Bs.phi(u)) == u for u in W.theta))
    m = boundaries_killed(Bs, 4, 3)
    rep.check("q kills boundaries", m is None, m and B.format_mono(m))
    dec = Bs.cocycle_decomposition(3, 2, 3)
    rep.check("cocycles split as phi(W) + im d", dec["failures"] == 0, dec, blocks=dec)
    rng = random.Random(ctx.cfg.seed)
    samples = [random_ptilde_element(W, rng, 4) for _ in range(20)]
    bad = mess_identity_check(Bs, samples)
    rep.check("mess identity", bad is None, bad and elem_json(bad))
    for name in ctx.cfg.reps:
        T = ctx.translation(name)

        def dual(T=T, name=name):
            pair = dualize_lift(Bs, T.rep, T.x0)
            rep.data.setdefault("dual_pairs", {})[name] = {"y": matrix_json(pair.y),
                                                         "w": matrix_json(pair.w)}
            return pair.certified, pair.report

        rep.run(f"{name}: dualizable", dual)
        rep.run(f"{name}: inverse lift is a right lift", lambda T=T: invlift_check(W, T.rep, T.x0))

        def act(T=T):
            pair = dualize_lift(Bs, T.rep, T.x0)
            for k, u in enumerate(W.theta):
                if W.ge_kazhdan[k] <= 4 and not duality_action_check(T, pair, u):
                    return False, {"generator": k}
            return True, None

        rep.run(f"{name}: right-handed action", act)
    return rep


COMMANDS: Dict[tuple, Callable[[Context], Report]] = {
    ("alg", "build"): suite_alg,
    ("walg", "gens"): suite_walg_gens,
    ("walg", "dims"): suite_walg_dims,
    ("lift", "solve"): suite_lift,
    ("trans", "act"): suite_trans_act,
    ("trans", "verify"): suite_trans_verify,
    ("verma", "translate"): suite_verma,
    ("brst", "verify"): suite_brst,
}

SUITE_COMMANDS = {
    "alg": [("alg", "build")],
    "walg": [("walg", "gens"), ("walg", "dims")],
    "lift": [("lift", "solve")],
    "trans": [("trans", "act"), ("trans", "verify")],
    "verma": [("verma", "translate")],
    "brst": [("brst", "verify")],
}


def _rationals(text: str) -> List[Fraction]:
    return [parse_rational(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alg", required=True, help="builder string like sl3:[2,1], or a JSON file")
    common.add_argument("--rep", action="append", default=None,
                        help="trivial|natural|dual|adjoint or a JSON file (repeatable)")
    common.add_argument("--max-deg", type=int, default=8, help="Kazhdan degree bound D (>= 4)")
    common.add_argument("--depth", type=int, default=3, help="Verma truncation depth")
    common.add_argument("--weight", type=_rationals, default=None,
                        help="highest weight on the t^e basis, comma separated p/q")
    common.add_argument("--out", default=None, help="output directory (default: JSON on stdout)")
    common.add_argument("--suite", default=None,
                        help="comma separated suites for 'suite all' (" + ",".join(SUITES) + ")")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-cache", action="store_true", help=f"ignore ${CACHE_ENV}")

    p = argparse.ArgumentParser(prog="finwalg", description="Finite W-algebras and translations.")
    groups = p.add_subparsers(dest="group", required=True)
    actions: Dict[str, List[str]] = {}
    for g, a in list(COMMANDS) + [("suite", "all")]:
        actions.setdefault(g, []).append(a)
    for g, acts in actions.items():
        gp = groups.add_parser(g)
        sub = gp.add_subparsers(dest="action", required=True)
        for a in acts:
            sub.add_parser(a, parents=[common])
    return p


def config_from_args(args) -> JobConfig:
    suites = list(SUITES) if args.suite is None else [s.strip() for s in args.suite.split(",") if s.strip()]
    cfg = JobConfig(alg=args.alg, reps=args.rep or ["natural"], max_deg=args.max_deg,
                    depth=args.depth, weight=args.weight, suites=suites, out=args.out,
                    cache=not args.no_cache, seed=args.seed)
    cfg.validate()
    return cfg


def run(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    from .trans import LiftError, RepError
    try:
        cfg = config_from_args(args)
        ctx = Context(cfg)
        if args.group == "suite":
            keys = [k for s in cfg.suites for k in SUITE_COMMANDS[s]]
        else:
            keys = [(args.group, args.action)]
        reports = [COMMANDS[k](ctx) for k in keys]
    except (ConfigError, LieDataError, RepError, FileNotFoundError, ValueError) as exc:
        print(f"finwalg: configuration error: {exc}", file=sys.stderr)
        return 2
    except LiftError as exc:
        print(f"finwalg: lift failed: {exc}", file=sys.stderr)
        return 1
    emit_report(reports, cfg.out, stream)
    for r in reports:
        failed = [c["name"] for c in r.checks if c["status"] != "pass"]
        status = "ok" if not failed else "FAILED: " + "; ".join(failed)
        print(f"{r.name}: {len(r.checks)} checks, {status}", file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
