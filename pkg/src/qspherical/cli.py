"""Command-line driver: build modules, solve for spherical vectors and run the verification suites."""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .cartan import AdmissibilityError, CartanError, DiagramConfig, table_instances
from .qsp import parameters_from_config
from .umod import DimensionCapExceeded, UndecidedError, build_simple, check_relations

log = logging.getLogger("qspherical")

SUITES = ("branching", "verify-crystal", "verify-based", "verify-integral")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qspherical", description=__doc__)
    p.add_argument("command", choices=("validate", "build", "spherical") + SUITES + ("all",))
    p.add_argument("--config", type=Path, help="diagram file ([diagram] and optional [parameters] sections)")
    p.add_argument("--type", dest="cartan_type", help="Cartan type such as A3, or a Hermitian type name such as AI or AIV (instead of --config)")
    p.add_argument("--black", default="", help="black nodes, 1-based, comma separated")
    p.add_argument("--tau", default=None, help="diagram involution in cycle notation, e.g. '(1 3)'")
    p.add_argument("--n", type=int, default=None, help="integer parameter of the family B_n")
    p.add_argument("--nmin", type=int, default=-3)
    p.add_argument("--nmax", type=int, default=5)
    p.add_argument("--lmin", type=int, default=-3)
    p.add_argument("--lmax", type=int, default=3)
    p.add_argument("--lambdamax", type=int, default=2, help="largest fundamental-weight coefficient in sweeps")
    p.add_argument("--weight", default=None, help="highest weight for build, comma separated")
    p.add_argument("--dim-cap", type=int, default=3000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--format", choices=("json", "md", "both"), default="md")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


# Hermitian type names resolve to their smallest-rank instance
_ALIASES = dict(reversed(table_instances()))


def load_config(args) -> DiagramConfig:
    if args.config:
        cfg = DiagramConfig.load(args.config)
    elif args.cartan_type in _ALIASES:
        cfg = _ALIASES[args.cartan_type]
    elif args.cartan_type:
        black = tuple(int(x) for x in args.black.replace(",", " ").split())
        cfg = DiagramConfig(args.cartan_type, black=black)
    else:
        raise SystemExit("either --config or --type is required")
    if args.tau is not None:
        cfg = DiagramConfig(cfg.cartan_type, cfg.matrix, cfg.black, args.tau, cfg.n, cfg.order, cfg.overrides)
    if args.n is not None:
        cfg = DiagramConfig(cfg.cartan_type, cfg.matrix, cfg.black, cfg.tau, args.n, cfg.order, cfg.overrides)
    return cfg


# ---------------------------------------------------------------------------
# Cells (top-level so they can run in worker processes)
# ---------------------------------------------------------------------------

def _context(cfg_text: str):
    cfg = DiagramConfig.loads(cfg_text)
    return cfg, cfg.satake()


def cell_branching(cfg_text, n, ls, lam, dim_cap):
    from .spherical import branching_table

    cfg, sd = _context(cfg_text)
    params = parameters_from_config(sd, cfg.overrides, n)
    return [{"lambda": list(c.lam), "l": c.l, "multiplicity": c.multiplicity, "predicted": c.predicted,
             "dim": c.dim, "skipped": c.skipped, "ok": c.ok}
            for c in branching_table(sd, params, [lam], ls, dim_cap)]


def cell_crystal(cfg_text, n, l, dim_cap):
    from .spherical import crystal_grid

    _, sd = _context(cfg_text)
    (c,) = crystal_grid(sd, [n], [l], dim_cap)
    return {"l": l, "n": n, "verdict": c.verdict, "stated": c.stated, "agrees": c.agrees, "reason": c.reason}


def cell_based(cfg_text, n, l, lam, dim_cap):
    from .spherical import certify, rank_one_size, stated_crystal_condition

    cfg, sd = _context(cfg_text)
    params = parameters_from_config(sd, cfg.overrides, n)
    cert = certify(sd, n, l, lam, dim_cap, sd.hermitian.tag, params)
    out = cert.to_dict()
    out["predicted_pass"] = stated_crystal_condition(sd.hermitian.tag, l, n, rank_one_size(sd)) and not params.overridden
    out["unsupported"] = params.overridden
    return out


def cell_integral(cfg_text, n, l, dim_cap):
    from .spherical import bottom_vector, dual_integral_certify, integral_certify

    _, sd = _context(cfg_text)
    bv = bottom_vector(sd, n, l, dim_cap)
    try:
        res = integral_certify(sd, bv)
        passed, wit = res.passed, res.witness
    except UndecidedError as exc:
        passed, wit = None, {"reason": str(exc)}
    dual = dual_integral_certify(bv.module, bv.f)
    return {"l": l, "n": n, "integral": passed, "dual": dual.passed,
            "witness": {k: v for k, v in wit.items()}, "scalar": str(bv.scalar)}


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*tasks)))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def dominant_weights(rank: int, bound: int):
    return [w for w in itertools.product(range(bound + 1), repeat=rank)]


def run_branching(cfg, sd, args):
    text = cfg.dumps()
    ls = list(range(args.lmin, args.lmax + 1))
    tasks = [(text, cfg.n, ls, lam, args.dim_cap) for lam in dominant_weights(sd.rank, args.lambdamax)]
    rows = [r for chunk in _map(cell_branching, tasks, args.jobs) for r in chunk]
    fails = [r for r in rows if not r["ok"]]
    return rows, bool(fails), [r for r in rows if r["skipped"]]


def run_crystal(cfg, sd, args):
    text = cfg.dumps()
    ns = [args.n] if args.n is not None else list(range(args.nmin, args.nmax + 1))
    tasks = [(text, n, l, args.dim_cap) for l in range(args.lmin, args.lmax + 1) for n in ns]
    rows = _map(cell_crystal, tasks, args.jobs)
    return rows, any(not r["agrees"] for r in rows), []


def run_based(cfg, sd, args):
    text = cfg.dumps()
    tasks = []
    for l in range(args.lmin, args.lmax + 1):
        if l == 0:
            continue
        base = sd.mu(l)
        for mu in dominant_weights(sd.rank, args.lambdamax):
            if sd.is_spherical(mu):
                tasks.append((text, cfg.n, l, tuple(a + b for a, b in zip(base, mu)), args.dim_cap))
    rows = _map(cell_based, tasks, args.jobs)
    failed = any(r["status"] == "fail" and r["predicted_pass"] for r in rows)
    return rows, failed, [r for r in rows if r["status"] == "undecided"]


def run_integral(cfg, sd, args):
    text = cfg.dumps()
    tasks = [(text, cfg.n, l, args.dim_cap) for l in range(args.lmin, args.lmax + 1) if l != 0]
    rows = _map(cell_integral, tasks, args.jobs)
    failed = any(r["integral"] is False or r["dual"] is False for r in rows)
    return rows, failed, [r for r in rows if r["integral"] is None]


RUNNERS = {"branching": run_branching, "verify-crystal": run_crystal,
           "verify-based": run_based, "verify-integral": run_integral}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def to_markdown(name: str, rows: list[dict]) -> str:
    lines = [f"## {name}", ""]
    if not rows:
        return "\n".join(lines + ["(no cells)", ""])
    keys = [k for k in rows[0] if k not in ("checks", "witness")]
    lines.append("| " + " | ".join(keys) + " |")
    lines.append("|" + "---|" * len(keys))
    for r in rows:
        lines.append("| " + " | ".join(_cell(r[k]) for k in keys) + " |")
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, list):
        return ", ".join(map(str, v)) if v else "-"
    return str(v)


def emit(results: dict, args, header: str) -> None:
    md = "\n".join([f"# {header}", ""] + [to_markdown(k, v) for k, v in results.items()])
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        if args.format in ("json", "both"):
            (args.out / "report.json").write_text(json.dumps(results, indent=2, sort_keys=True) + "\n")
        if args.format in ("md", "both"):
            (args.out / "report.md").write_text(md)
    if args.format == "json" and not args.out:
        print(json.dumps(results, indent=2, sort_keys=True))
    else:
        print(md)


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        sd = cfg.satake()
    except AdmissibilityError as exc:
        print(f"inadmissible (condition {exc.condition}): {exc}", file=sys.stderr)
        return 2
    except (CartanError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        herm = sd.hermitian
        info = {"diagram": sd.label, "hermitian": herm.tag if herm else None,
                "reduced": sd.is_reduced, "white": [i + 1 for i in sd.white]}
        if herm:
            info["node"] = herm.node + 1
            info["mu_1"] = list(sd.mu(1))
        print(json.dumps(info, indent=2))
        return 0

    if args.command == "build":
        if not args.weight:
            print("build needs --weight", file=sys.stderr)
            return 2
        lam = tuple(int(x) for x in args.weight.split(","))
        try:
            M = build_simple(sd.cartan, lam, args.dim_cap)
        except DimensionCapExceeded as exc:
            print(f"skipped: {exc}", file=sys.stderr)
            return 0
        bad = check_relations(M)
        print(f"L({','.join(map(str, lam))}): dim {M.dim}, relation failures {len(bad)}")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"L_{'_'.join(map(str, lam))}.txt").write_text(M.dumps())
        return 1 if bad else 0

    if sd.hermitian is None:
        print("the pair is not of Hermitian type", file=sys.stderr)
        return 2

    if args.command == "spherical":
        from .spherical import bottom_vector

        rows = []
        for l in range(args.lmin, args.lmax + 1):
            bv = bottom_vector(sd, cfg.n, l, args.dim_cap)
            rows.append({"l": l, "lambda": list(sd.mu(l)), "coefficients": [str(bv.f[k]) for k in sorted(bv.f)],
                         "tensor_scalar": str(bv.scalar)})
        emit({"spherical": rows}, args, sd.label)
        return 0

    names = SUITES if args.command == "all" else (args.command,)
    results, failed, undecided = {}, False, []
    for name in names:
        rows, bad, und = RUNNERS[name](cfg, sd, args)
        results[name] = rows
        failed |= bad
        undecided += und
    emit(results, args, f"{sd.label} n={cfg.n}")
    if undecided:
        log.warning("%d undecided cells", len(undecided))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
