"""Command-line front end: ``fredholm-lab <command> [options]``.

Every command produces a JSON envelope ``{schema_version, command, config,
status, result}``; ``--format csv`` and ``--format text`` render the
command's main table instead.  Exit codes: 0 success, 2 bad input,
3 non-stabilizing, 4 numerical refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, chern, circle, fredholm, schur, snumbers
from .errors import NON_STABILIZING_EXIT, FredholmLabError, InputError, RouteDisagreement
from .groups import FreeHilbertSigns, GroupBall, OrderOracle, free_hilbert, free_hilbert_commutator, get_group
from .groups import group_toeplitz_index
from .linalg_core import PNormContext

SCHEMA_VERSION = "1.0"
THREADS_ENV = "FREDHOLM_LAB_THREADS"


@dataclass
class Outcome:
    result: dict
    table: list[dict]
    exit_code: int = 0
    status: str = "ok"


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    format: str = "json"
    output: str | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return {"command": self.command, "params": self.params, "format": self.format, "seed": self.seed}


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _pmap(fn: Callable, items: list) -> list:
    """Order-preserving map, parallel up to the thread cap."""
    n = thread_cap()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _cnum(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# ------------------------------------------------------------------ commands

_ROUTE_ALIASES = {"winding": "winding", "stabilize": "kernel_stabilization",
                  "kernel_stabilization": "kernel_stabilization"}


def cmd_toeplitz_index(p: dict, seed: int) -> Outcome:
    f = circle.parse_symbol(p["symbol"])
    routes = [r.strip() for r in p["routes"].split(",") if r.strip()]
    unknown = [r for r in routes if r not in _ROUTE_ALIASES]
    if unknown or not routes:
        raise InputError(f"unknown routes {unknown}; choose from winding, stabilize")
    reports = []
    for r in routes:
        if _ROUTE_ALIASES[r] == "winding":
            reports.append(fredholm.index_by_winding(f))
        else:
            margin = p["margin"] if p["margin"] is not None else fredholm.default_margin(f)
            reports.append(fredholm.index_by_kernel_stabilization(
                fredholm.pairing_family(f), _int_list(p["scales"]), margin, p["mass_threshold"],
                rank_tol=p["rank_tol"]))
    indices = {rep.route: rep.index for rep in reports}
    table = [{"route": rep.route, "index": rep.index} for rep in reports]
    for rep in reports:
        if rep.route == "kernel_stabilization":
            table += [{"route": "kernel_stabilization", **row} for row in rep.evidence]
    result = {"symbol": f.format(), "indices": indices, "reports": [r.to_dict() for r in reports]}
    if any(v == fredholm.NON_STABILIZING for v in indices.values()):
        return Outcome(result, table, NON_STABILIZING_EXIT, "non-stabilizing")
    if len(set(indices.values())) > 1:
        return Outcome(result, table, RouteDisagreement.exit_code, "routes-disagree")
    result["index"] = next(iter(indices.values()))
    return Outcome(result, table)


def cmd_chern(p: dict, seed: int) -> Outcome:
    u = circle.parse_symbol(p["u"])
    ev = chern.chern_odd(u, p["n"])
    winding = fredholm.index_by_winding(u).index
    result = {"u": u.format(), "evaluation": ev.to_dict(), "winding_route_index": winding,
              "agrees": ev.index == winding}
    table = [{"n": ev.n, "raw_trace_re": ev.raw_trace.real, "raw_trace_im": ev.raw_trace.imag,
              "predicted_index": ev.index, "winding_route_index": winding}]
    if ev.index != winding:
        return Outcome(result, table, RouteDisagreement.exit_code, "routes-disagree")
    return Outcome(result, table)


def cmd_schur(p: dict, seed: int) -> Outcome:
    n, trials = p["n"], p["trials"]
    if trials < 1:
        raise InputError("trials must be >= 1")
    model = schur.SchurModel(n)
    rng = np.random.default_rng(seed)
    mats = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(trials)]

    def run(a):
        rep = schur.schur_index_pairing(a, p["rank_tol"])
        return {**rep.evidence[0], "index": rep.index}

    rows = [{"trial": i, **row} for i, row in enumerate(_pmap(run, mats))]
    X = rng.standard_normal((n, n))
    f_sq = bool(np.array_equal(schur.f_operator(schur.f_operator(X)), X.astype(complex)))
    result = {"n": n, "trials": trials, "triangular_dimension": model.triangular_dimension,
              "f_squared_is_identity": f_sq, "all_zero": all(r["index"] == 0 for r in rows), "table": rows}
    return Outcome(result, rows)


def cmd_group_index(p: dict, seed: int) -> Outcome:
    oracle = OrderOracle.for_group(p["group"])
    g = oracle.group.parse(p["element"])
    rep = group_toeplitz_index(oracle, g, _int_list(p["radii"]))
    result = {"group": oracle.tag, "element": oracle.group.format(g), "report": rep.to_dict()}
    if not rep.stabilized:
        return Outcome(result, rep.evidence, NON_STABILIZING_EXIT, "non-stabilizing")
    return Outcome(result, rep.evidence)


def _load_matrix(path: str) -> np.ndarray:
    src = Path(path)
    if not src.exists():
        raise InputError(f"matrix file {path!r} not found")
    if src.suffix == ".npy":
        return np.load(src)
    try:
        data = json.loads(src.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"matrix file is not valid JSON: {exc}") from exc
    try:
        rows = [[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row] for row in data]
        A = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError("matrix JSON must be a list of rows of numbers or [re, im] pairs") from exc
    if A.ndim != 2 or A.size == 0:
        raise InputError("matrix must be a nonempty 2-d array")
    return A


def _parse_p(text) -> float:
    if str(text).lower() in ("inf", "infinity"):
        return math.inf
    try:
        val = float(text)
    except ValueError as exc:
        raise InputError(f"p must be a number >= 1 or 'inf', got {text!r}") from exc
    if not val >= 1:
        raise InputError(f"p must be >= 1, got {text!r}")
    return val


def cmd_snumbers(p: dict, seed: int) -> Outcome:
    A = _load_matrix(p["matrix"])
    ctx = PNormContext(p=_parse_p(p["p"]), seed=seed)
    q = p["q"]
    if not q > 0:
        raise InputError("q must be positive")
    seq = snumbers.approx_numbers(A, ctx)
    ideal = snumbers.IdealNorm(q, snumbers.lq_quasinorm(seq.values, q))
    result = {"shape": list(A.shape), "approximation_numbers": seq.to_dict(), "ideal_norm": ideal.to_dict()}
    table = [{"k": k + 1, "a_k": float(v)} for k, v in enumerate(seq.values)]
    return Outcome(result, table)


def cmd_free_hilbert(p: dict, seed: int) -> Outcome:
    signs = FreeHilbertSigns.parse(p["signs"])
    G = get_group(f"F{signs.rank}")
    t = G.normal_form(G.parse(p["t"]))
    ball = GroupBall.build(G, p["radius"])
    H = free_hilbert(signs, ball)
    e = ball.position(())
    off = np.ones(len(ball), dtype=bool)
    off[e] = False
    H2 = H @ H
    squares_ok = bool(np.array_equal(np.diag(H2)[off], np.ones(off.sum())) and H2[e, e] == 0)
    rep = free_hilbert_commutator(signs, ball, t)
    result = {"group": G.tag, "signs": signs.format(), "t": G.format(t), "radius": p["radius"],
              "square_is_identity_off_e": squares_ok, "commutator": rep.to_dict()}
    table = [{"coefficient": k, "count": v} for k, v in sorted(rep.coefficients.items())]
    return Outcome(result, table)


def cmd_selftest(p: dict, seed: int) -> Outcome:
    from .selftest import run_selftest

    checks = run_selftest(seed, _pmap)
    ok = all(c["passed"] for c in checks)
    return Outcome({"checks": checks, "passed": ok}, checks, 0 if ok else 1, "ok" if ok else "failed")


COMMANDS: dict[str, Callable[[dict, int], Outcome]] = {
    "toeplitz-index": cmd_toeplitz_index,
    "chern": cmd_chern,
    "schur": cmd_schur,
    "group-index": cmd_group_index,
    "snumbers": cmd_snumbers,
    "free-hilbert": cmd_free_hilbert,
    "selftest": cmd_selftest,
}


# ------------------------------------------------------------------ parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fredholm-lab", description="Fredholm index computations at matrix scale.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
        sp.add_argument("--output", default=None, help="write to this path instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--config", default=None, help="JSON file with parameter defaults")
        return sp

    sp = common(sub.add_parser("toeplitz-index", help="index of T_f on the circle"))
    sp.add_argument("--symbol", required=False, default=None)
    sp.add_argument("--routes", default="winding,stabilize")
    sp.add_argument("--scales", default="32,64,128")
    sp.add_argument("--margin", type=int, default=None)
    sp.add_argument("--mass-threshold", type=float, default=1e-6)
    sp.add_argument("--rank-tol", type=float, default=1e-8)

    sp = common(sub.add_parser("chern", help="odd Chern character pairing for u on the circle"))
    sp.add_argument("--u", default=None)
    sp.add_argument("--n", type=int, default=1)

    sp = common(sub.add_parser("schur", help="index pairing in the triangular matrix model"))
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--rank-tol", type=float, default=1e-8)

    sp = common(sub.add_parser("group-index", help="combinatorial Toeplitz index on an ordered group"))
    sp.add_argument("--group", default=None)
    sp.add_argument("--element", default=None)
    sp.add_argument("--radii", default="3,4,5,6")

    sp = common(sub.add_parser("snumbers", help="approximation numbers of a matrix"))
    sp.add_argument("--matrix", default=None, help="JSON (rows of numbers or [re, im]) or .npy file")
    sp.add_argument("--p", default="2")
    sp.add_argument("--q", type=float, default=1.0)

    sp = common(sub.add_parser("free-hilbert", help="free Hilbert transform commutator"))
    sp.add_argument("--signs", default=None, help="one '+-' pair per generator, comma separated")
    sp.add_argument("--t", default=None)
    sp.add_argument("--radius", type=int, default=3)

    common(sub.add_parser("selftest", help="run the built-in property suite"))
    return parser


_REQUIRED = {
    "toeplitz-index": ["symbol"],
    "chern": ["u"],
    "group-index": ["group", "element"],
    "snumbers": ["matrix"],
    "free-hilbert": ["signs", "t"],
}
_META = {"command", "format", "output", "seed", "config"}


def make_config(argv: list[str]) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    params = {k: v for k, v in vars(ns).items() if k not in _META}
    if ns.config:
        try:
            overrides = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {ns.config!r}: {exc}") from exc
        unknown = sorted(set(overrides) - set(params) - {"seed", "format"})
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(unknown)}")
        defaults = vars(parser.parse_args([ns.command]))
        for k, v in overrides.items():
            if k in params and params[k] == defaults.get(k):
                params[k] = v
        if "seed" in overrides and ns.seed == 0:
            ns.seed = int(overrides["seed"])
        if "format" in overrides and ns.format == "json":
            ns.format = overrides["format"]
    missing = [k for k in _REQUIRED.get(ns.command, []) if params.get(k) is None]
    if missing:
        raise InputError(f"{ns.command} needs --{missing[0].replace('_', '-')}")
    return RunConfig(ns.command, params, ns.format, ns.output, ns.seed)


# ------------------------------------------------------------------ rendering


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return _cnum(x)
    return x


def envelope(cfg: RunConfig, out: Outcome) -> dict:
    return _jsonable({
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg.to_dict(),
        "status": out.status,
        "exit_code": out.exit_code,
        "result": out.result,
    })


def render(cfg: RunConfig, out: Outcome) -> str:
    if cfg.format == "json":
        return json.dumps(envelope(cfg, out), sort_keys=True, indent=2) + "\n"
    rows = [_jsonable(r) for r in out.table]
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = [f"# {cfg.command}: {out.status}"]
    lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def run(argv: list[str]) -> tuple[int, str, bool]:
    """Parse, execute and render; returns (exit code, rendered output, is_error)."""
    try:
        cfg = make_config(argv)
        out = COMMANDS[cfg.command](cfg.params, cfg.seed)
        text = render(cfg, out)
    except FredholmLabError as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
               "message": str(exc), "exit_code": exc.exit_code}
        return exc.exit_code, json.dumps(err, sort_keys=True) + "\n", True
    if cfg.output:
        Path(cfg.output).write_text(text)
        return out.exit_code, "", False
    return out.exit_code, text, False


def main(argv: list[str] | None = None) -> int:
    code, text, is_error = run(sys.argv[1:] if argv is None else argv)
    (sys.stderr if is_error else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
