"""Command-line front end.

Human-readable text goes to stdout; ``--out`` writes a JSON report with
rationals as ``"p/q"`` strings, sorted keys, the seed and a hash of the
configuration. Exit codes: 0 all checks passed, 1 a check failed, 2 bad
input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from ._validation import INFINITY, as_positive, as_rational, format_value
from .core import AxiomReport, MetricFamily, _jsonable, axiom_suite
from .mapping_space import PiecewiseLinearMap, dr_sup, mapping_family, parse_pl, read_pl
from .metrization import ChainMetrizer, verify_level_inclusions, verify_sandwich, verify_triple_inclusion
from .tiling import (
    ball_to_nbhd_witness,
    dr_tiling,
    nbhd_to_ball_witness,
    orbit_metric,
    parse_tiling,
    read_tiling,
    tiling_family,
    translate,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class InputError(Exception):
    pass


# ---------------------------------------------------------------- instances


def _fake_family() -> MetricFamily:
    # deliberately broken: d_r(x, x) = r
    return MetricFamily(lambda x, y, r: abs(x - y) + r, name="fake-offset", triangle="weak")


def load_instance(path):
    """``(kind, base_point, family)`` for a tiling, PL map or ``fake`` file."""
    text = _read(path)
    words = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    heads = {w[0] for w in words if w}
    try:
        if "fake" in heads:
            return "fake", Fraction(0), _fake_family()
        if heads & {"periodic", "substitution"}:
            return "tiling", parse_tiling(text), tiling_family()
        return "mapping", parse_pl(text), mapping_family()
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def sample_points(kind: str, base, n: int, rng: random.Random, spread=Fraction(1, 2), denom: int = 1000) -> list:
    """``n`` distinct seeded perturbations of ``base`` (the base itself first)."""
    pts = [base]
    seen = {base}
    limit = int(spread * denom)
    attempts = 0
    while len(pts) < n:
        attempts += 1
        if attempts > 100 * n + 1000:
            raise InputError("could not draw enough distinct sample points")
        if kind == "tiling":
            p = translate(base, Fraction(rng.randint(-limit, limit), denom))
        elif kind == "mapping":
            p = _perturb(base, rng, limit, denom)
        else:
            p = base + Fraction(rng.randint(-limit, limit), denom)
        if p not in seen:
            seen.add(p)
            pts.append(p)
    return pts


def _perturb(f: PiecewiseLinearMap, rng: random.Random, limit: int, denom: int) -> PiecewiseLinearMap:
    xs = sorted(set(f.xs) | {Fraction(rng.randint(-8 * denom, 8 * denom), denom) for _ in range(3)})
    return PiecewiseLinearMap(tuple(xs), tuple(f(x) + Fraction(rng.randint(-limit, limit), denom) for x in xs))


# ---------------------------------------------------------------- helpers


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _grid(text: str | None, default) -> list[Fraction]:
    if text is None:
        return list(default)
    try:
        return [as_rational(t.strip(), "grid") for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _rational(text, name, positive=False):
    try:
        return as_positive(text, name) if positive else as_rational(text, name)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _config(args: argparse.Namespace, files: list) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out", "dump_relation", "u_csv") and v is not None}
    cfg.update({f"sha256:{k}": hashlib.sha256(_read(p).encode()).hexdigest() for k, p in files})
    for k, _ in files:
        cfg.pop(k, None)  # paths do not affect results, contents do
    return cfg


def _emit(args, payload: dict, files: list) -> None:
    if not getattr(args, "out", None):
        return
    cfg = _config(args, files)
    blob = json.dumps(_jsonable(cfg), sort_keys=True, separators=(",", ":"))
    doc = {
        "command": args.command,
        "config": cfg,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest(),
        "seed": getattr(args, "seed", None),
        **payload,
    }
    Path(args.out).write_text(json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _failed(reports) -> bool:
    return any(r.verdict == "fail" and r.details.get("enforced", True) for r in reports)


# ---------------------------------------------------------------- commands


def cmd_axioms(args) -> int:
    kind, base, fam = load_instance(args.instance)
    rng = random.Random(args.seed)
    sample = sample_points(kind, base, args.n, rng)
    reports = axiom_suite(fam, sample, args.triples, _grid(args.grid, (1, 2, 4, 8)), seed=args.seed)
    print(f"instance: {kind} ({fam.name}), {len(sample)} points, {args.triples} triples, seed {args.seed}")
    for rep in reports:
        print(rep.summary())
    failed = _failed(reports)
    print("RESULT: FAIL" if failed else "RESULT: PASS")
    _emit(args, {"instance": kind, "reports": [r.to_dict() for r in reports], "passed": not failed}, [("instance", args.instance)])
    return 1 if failed else 0


def cmd_metrize(args) -> int:
    if args.nmax < 2:
        raise InputError("g is undefined for n_max < 2 (needs n_max >= 2)")
    kind, base, fam = load_instance(args.instance)
    sample = sample_points(kind, base, args.n, random.Random(args.seed))
    est = ChainMetrizer(fam, n_max=args.nmax).fit(sample)
    reports = [
        verify_sandwich(est.levels_, est.metric_),
        verify_triple_inclusion(est.levels_),
        verify_level_inclusions(est.levels_, est.metric_),
    ]
    dump = est.metric_.dump()
    print(dump, end="")
    for rep in reports:
        print(rep.summary())
    if args.dump_relation:
        Path(args.dump_relation).write_text(est.levels_[args.level].dump(), encoding="utf-8")
    failed = _failed(reports)
    _emit(
        args,
        {"matrix": est.metric_.to_fractions(), "reports": [r.to_dict() for r in reports], "passed": not failed},
        [("instance", args.instance)],
    )
    return 1 if failed else 0


def _load_tiling(path):
    try:
        return read_tiling(path) if Path(path).exists() else parse_tiling(_read(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_tiling_dist(args) -> int:
    A, B = _load_tiling(args.a), _load_tiling(args.b)
    r = _rational(args.r, "r", positive=True)
    rho = None if args.rho is None else _rational(args.rho, "rho", positive=True)
    d = dr_tiling(A, B, r, rho)
    text = "inf (search bounded)" if d == INFINITY else format_value(d)
    print(text)
    _emit(args, {"distance": text, "bounded_search": d == INFINITY}, [("a", args.a), ("b", args.b)])
    return 0


def cmd_orbit_dist(args) -> int:
    A, B = _load_tiling(args.a), _load_tiling(args.b)
    d = orbit_metric(A, B, args.tol)
    print(repr(d) if d else "0")
    _emit(args, {"distance": repr(d)}, [("a", args.a), ("b", args.b)])
    return 0


def cmd_witness(args) -> int:
    T = _load_tiling(args.instance)
    r = _rational(args.r, "r", positive=True)
    eps = _rational(args.eps, "eps", positive=True)
    sample = sample_points("tiling", T, args.n, random.Random(args.seed), spread=Fraction(3, 10))
    reports = [
        ball_to_nbhd_witness(T, r, eps, sample, tol=args.tol),
        nbhd_to_ball_witness(T, eps, sample, tol=args.tol),
    ]
    for rep in reports:
        print(rep.summary())
    failed = _failed(reports)
    _emit(args, {"reports": [r_.to_dict() for r_ in reports], "passed": not failed}, [("instance", args.instance)])
    return 1 if failed else 0


def cmd_mapping_dist(args) -> int:
    try:
        f, g = read_pl(args.f), read_pl(args.g)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    except OSError as exc:
        raise InputError(f"cannot read input: {exc.strerror}") from exc
    d = dr_sup(f, g, _rational(args.r, "r", positive=True))
    print(format_value(d))
    _emit(args, {"distance": d}, [("f", args.f), ("g", args.g)])
    return 0


def _path_from_table(tab: dict):
    from .diffeology import Polynomial

    kind = tab.get("kind", "polynomial")
    if kind == "polynomial":
        return Polynomial(tuple(str(c) for c in tab["coeffs"]))
    if kind == "pl":
        return PiecewiseLinearMap.from_points((str(x), str(y)) for x, y in tab["points"])
    raise InputError(f"unknown path kind {kind!r}")


def load_plot(path):
    """Build a parametrization from a TOML description (see the README)."""
    from .diffeology import mapping_path, tiling_translation

    try:
        cfg = tomllib.loads(_read(path))
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        domain = tuple(str(v) for v in cfg.get("domain", ["-1", "1"]))
        if "tiling" in cfg:
            tab = cfg["tiling"]
            if "file" in tab:
                T = _load_tiling(Path(path).parent / tab["file"])
            else:
                T = parse_tiling(tab["text"])
            return cfg, tiling_translation(T, _path_from_table(cfg["path"]), domain)
        if "mapping" in cfg:
            tab = cfg["mapping"]
            return cfg, mapping_path([str(x) for x in tab["xs"]], [_path_from_table(v) for v in tab["values"]], domain)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    raise InputError(f"{path}: needs a [tiling] or [mapping] table")


def cmd_plot_check(args) -> int:
    from .diffeology import check_plot_at, continuity_witness, recover_u

    cfg, p = load_plot(args.plot)
    t0 = _rational(args.t0, "t0")
    delta = _rational(args.delta or cfg.get("delta", "1/5"), "delta", positive=True)
    r_grid = _grid(args.grid, (1, 5, 20))
    try:
        rep = check_plot_at(p, t0, delta, r_grid)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(rep.summary())
    payload = {"plot_check": rep.to_dict(), "passed": rep.passed}
    if rep.passed and args.eps is not None:
        eps = _rational(args.eps, "eps", positive=True)
        cw = [continuity_witness(p, t0, r, eps) for r in r_grid]
        for c in cw:
            print(c.summary() + f" delta={format_value(c.details.get('delta', 'none'))}")
        payload["continuity_witness"] = [c.to_dict() for c in cw]
    if args.u_csv:
        ts = sorted({t0 + delta * Fraction(k, 8) for k in range(-7, 8)})
        ur = recover_u(p, t0, ts, r_values=r_grid)
        Path(args.u_csv).write_text(ur.to_csv(), encoding="utf-8")
        print(ur.report.summary())
        payload["u_recovery"] = ur.report.to_dict()
    _emit(args, payload, [("plot", args.plot)])
    return 0 if rep.passed else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="drspace", description="Audits and distances for scale-indexed distance families.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write a JSON report here")
        return p

    p = add("axioms", cmd_axioms, "audit the axioms on a seeded sample of an instance")
    p.add_argument("instance")
    p.add_argument("--n", type=int, default=40, help="sample size")
    p.add_argument("--triples", type=int, default=500)
    p.add_argument("--grid", help="comma-separated scales (default 1,2,4,8)")
    p.add_argument("--seed", type=int, default=0)

    p = add("metrize", cmd_metrize, "chain metric on a seeded sample")
    p.add_argument("instance")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-relation", help="write the level relation W_LEVEL here")
    p.add_argument("--level", type=int, default=1)

    p = add("tiling-dist", cmd_tiling_dist, "d_r between two tilings")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--r", required=True)
    p.add_argument("--rho", help="translation search bound")

    p = add("orbit-dist", cmd_orbit_dist, "orbit metric between two tilings")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("witness", cmd_witness, "check both topology witnesses on seeded translates")
    p.add_argument("instance")
    p.add_argument("--r", default="5")
    p.add_argument("--eps", default="1/2")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("plot-check", cmd_plot_check, "plot conditions at a base point")
    p.add_argument("plot", help="TOML plot description")
    p.add_argument("--t0", default="0")
    p.add_argument("--delta")
    p.add_argument("--grid", help="comma-separated scales (default 1,5,20)")
    p.add_argument("--eps", help="also search continuity witnesses for this eps")
    p.add_argument("--u-csv", help="write the recovered u(t) table here (tiling plots)")

    p = add("mapping-dist", cmd_mapping_dist, "d_r between two piecewise-linear maps")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--r", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
