"""Command-line front end.

    python -m careercutoff solve --config run.json --out out/ --format both

A config is one JSON document::

    {
      "primitives": {"b": 0.5, "pi": 0.5},       # missing fields take defaults
      "mode": "faithful",                        # or "extended"
      "rho_grid": [0.2, 0.4, 0.6],
      "params": ["b", "pi", "theta", "kappa"],   # statics
      "targets": [0.3, 0.5, 0.7],                # calibrate
      "t_grid": [0, 0.5, 1.0],                   # calibrate (gatekeeping table)
      "n_experts": 200000, "seed": 1             # simulate
    }

Each command writes <command>.csv and/or <command>.json (plus side tables)
into --out. Exit code 0 ok, 1 config error, 2 computation error in any row.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .equilibrium import PayoffMode, SolverError, solve_equilibrium
from .model import Primitives, PrimitivesError
from .policy import (
    CalibrationError,
    RoundtripFailure,
    TargetAtUnity,
    TargetBelowFloor,
    bonus_for_target,
    gatekeeping_sweep,
)
from .simulate import CSV_HEADER as SIM_HEADER
from .simulate import SimConfig, prediction_report, run_sim
from .statics import PARAMS, BoundaryHit, DegenerateError, analytic_derivative, check_rd, conservatism_scan, numeric_derivative

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2

SOLVE_HEADER = ("rho", "cutoff", "eps", "r_success", "r_failure", "r_safe", "iterations", "residual", "status")
SCAN_HEADER = ("rho", "cutoff", "eps", "drift", "rd_verified", "status")
DERIV_HEADER = ("rho", "param", "cutoff", "analytic", "numeric", "agree", "status")
RD_HEADER = ("rho", "drift", "drift_lambda", "drift_beliefs", "rd_verified")
CAL_HEADER = ("rho", "target_eps", "c", "b", "achieved_eps", "roundtrip_gap", "floor_eps", "status")
GATE_HEADER = ("rho", "t", "lambda", "c", "eps", "b", "status")
PRED_HEADER = ("rho_lo", "rho_hi", "applicable", "eps_nonincreasing", "hit_nondecreasing",
               "analytic_eps_nonincreasing", "analytic_hit_nondecreasing", "consistent")

KNOWN_KEYS = {"primitives", "mode", "rho_grid", "params", "targets", "t_grid", "n_experts", "seed"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    primitives: Primitives
    mode: PayoffMode = PayoffMode.FAITHFUL
    rho_grid: tuple[float, ...] = ()
    params: tuple[str, ...] = ("b", "pi", "theta", "kappa")
    targets: tuple[float, ...] = ()
    t_grid: tuple[float, ...] = ()
    n_experts: int = 10_000
    seed: int = 0
    raw: dict = field(default_factory=dict)


def _grid(doc: dict, key: str, lo: float | None = None, hi: float | None = None, open_: bool = True) -> tuple:
    if key not in doc:
        return ()
    vals = doc[key]
    if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        raise ConfigError(f"{key}: expected a list of numbers")
    if not vals:
        raise ConfigError(f"{key}: grid is empty")
    vals = tuple(float(v) for v in vals)
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"{key}: grid must be strictly ascending")
    for v in vals:
        if lo is not None and (v <= lo if open_ else v < lo):
            raise ConfigError(f"{key}: value {v} out of range")
        if hi is not None and (v >= hi if open_ else v > hi):
            raise ConfigError(f"{key}: value {v} out of range")
    return vals


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: invalid JSON ({e.msg})") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    try:
        prim = Primitives.from_dict(doc.get("primitives", {}))
    except PrimitivesError as e:
        raise ConfigError(f"primitives.{e.field}: {e}") from None
    try:
        mode = PayoffMode(doc.get("mode", "faithful"))
    except ValueError:
        raise ConfigError(f"mode: expected 'faithful' or 'extended', got {doc.get('mode')!r}") from None
    params = doc.get("params", ["b", "pi", "theta", "kappa"])
    if not isinstance(params, list) or not params or any(q not in PARAMS for q in params):
        raise ConfigError(f"params: expected a nonempty list drawn from {', '.join(PARAMS)}")
    n = doc.get("n_experts", 10_000)
    seed = doc.get("seed", 0)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("n_experts: expected a positive integer")
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed: expected an integer in [0, 2**64)")
    return RunConfig(
        primitives=prim,
        mode=mode,
        rho_grid=_grid(doc, "rho_grid", 0.0, 1.0),
        params=tuple(params),
        targets=_grid(doc, "targets", 0.0, 1.0),
        t_grid=_grid(doc, "t_grid", 0.0, None, open_=False),
        n_experts=n,
        seed=seed,
        raw=doc,
    )


def _need(cfg: RunConfig, key: str):
    if not getattr(cfg, key):
        raise ConfigError(f"{key}: required for this command")


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_table(out: Path, name: str, header, rows: list[dict], fmt: str, extra: dict | None = None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if fmt in ("csv", "both"):
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(header), lineterminator="\n", extrasaction="ignore")
            w.writeheader()
            for r in rows:
                w.writerow({k: _cell(r.get(k)) for k in header})
    if fmt in ("json", "both"):
        doc = {"columns": list(header), "rows": [{k: _jsonable(r.get(k)) for k in header} for r in rows]}
        if extra:
            doc.update(_jsonable(extra))
        (out / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


# commands -----------------------------------------------------------------

def cmd_solve(cfg: RunConfig, out: Path, fmt: str) -> int:
    _need(cfg, "rho_grid")
    rows, code = [], EXIT_OK
    for rho in cfg.rho_grid:
        try:
            eq = solve_equilibrium(rho, cfg.primitives, cfg.mode)
        except SolverError as e:
            rows.append({"rho": rho, "status": f"error: {type(e).__name__}"})
            code = EXIT_COMPUTE
            continue
        post = eq.posteriors
        rows.append({
            "rho": rho, "cutoff": eq.cutoff, "eps": eq.eps, "r_success": post.r_success,
            "r_failure": post.r_failure, "r_safe": post.r_safe, "iterations": eq.iterations,
            "residual": eq.residual, "status": "ok" if eq.interior else ("always_safe" if eq.cutoff > 0 else "always_risky"),
        })
    write_table(out, "solve", SOLVE_HEADER, rows, fmt)
    return code


def _rd_rows(rd) -> list[dict]:
    return [
        {"rho": r, "drift": d, "drift_lambda": dl, "drift_beliefs": db, "rd_verified": ok}
        for r, d, dl, db, ok in zip(rd.grid, rd.drift, rd.drift_lambda, rd.drift_beliefs, rd.verified)
    ]


def cmd_check_rd(cfg: RunConfig, out: Path, fmt: str) -> int:
    _need(cfg, "rho_grid")
    try:
        rd = check_rd(cfg.rho_grid, cfg.primitives, cfg.mode)
    except SolverError as e:
        print(f"check-rd failed: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    write_table(out, "check_rd", RD_HEADER, _rd_rows(rd), fmt,
                {"rho_bar": rd.rho_bar if rd.rho_bar is not None else "none", "anchor": rd.anchor, "anchor_cutoff": rd.cutoff})
    return EXIT_OK


def cmd_statics(cfg: RunConfig, out: Path, fmt: str) -> int:
    _need(cfg, "rho_grid")
    code = EXIT_OK
    try:
        scan = conservatism_scan(cfg.rho_grid, cfg.primitives, cfg.mode)
    except SolverError as e:
        print(f"statics failed: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    rd = scan.rd
    scan_rows = [
        {"rho": row.rho, "cutoff": row.cutoff, "eps": row.eps, "drift": d, "rd_verified": ok, "status": "ok"}
        for row, d, ok in zip(scan.rows, rd.drift, rd.verified)
    ]
    write_table(out, "statics_scan", SCAN_HEADER, scan_rows, fmt,
                {"rho_bar": rd.rho_bar if rd.rho_bar is not None else "none", "conservatism": scan.verdict})
    deriv_rows = []
    for row in scan.rows:
        if not math.isfinite(row.cutoff):
            for prm in cfg.params:
                deriv_rows.append({"rho": row.rho, "param": prm, "cutoff": row.cutoff, "status": "boundary"})
            continue
        base = solve_equilibrium(row.rho, cfg.primitives, cfg.mode)
        for prm in cfg.params:
            r = {"rho": row.rho, "param": prm, "cutoff": base.cutoff}
            try:
                r["analytic"] = analytic_derivative(prm, row.rho, base, cfg.primitives, cfg.mode)
            except DegenerateError:
                r["status"] = "degenerate"
            try:
                r["numeric"] = numeric_derivative(prm, row.rho, cfg.primitives, mode=cfg.mode, base=base)
            except BoundaryHit:
                r["status"] = "boundary"
            except SolverError as e:
                r["status"] = f"error: {type(e).__name__}"
                code = EXIT_COMPUTE
            except ValueError:
                r["status"] = "no_admissible_step"
            if "analytic" in r and "numeric" in r:
                a, n = r["analytic"], r["numeric"]
                r["agree"] = abs(a - n) <= max(1e-3, 0.05 * abs(n))
            r.setdefault("status", "ok")
            deriv_rows.append(r)
    write_table(out, "statics_derivatives", DERIV_HEADER, deriv_rows, fmt)
    write_table(out, "check_rd", RD_HEADER, _rd_rows(rd), fmt,
                {"rho_bar": rd.rho_bar if rd.rho_bar is not None else "none", "anchor": rd.anchor})
    return code


def cmd_calibrate(cfg: RunConfig, out: Path, fmt: str) -> int:
    _need(cfg, "rho_grid")
    _need(cfg, "targets")
    if cfg.t_grid and cfg.primitives.b <= 0:
        raise ConfigError("t_grid: gatekeeping sweep needs primitives.b > 0")
    rows, code = [], EXIT_OK
    for rho in cfg.rho_grid:
        for tgt in cfg.targets:
            r = {"rho": rho, "target_eps": tgt}
            try:
                res = bonus_for_target(tgt, rho, cfg.primitives, cfg.mode)
                r.update(c=res.cutoff, b=res.bonus, achieved_eps=res.achieved_eps,
                         roundtrip_gap=res.roundtrip_gap, floor_eps=res.floor_eps, status="ok")
            except TargetBelowFloor as e:
                r.update(floor_eps=e.floor, status="below_floor")
            except TargetAtUnity:
                r["status"] = "at_unity"
            except RoundtripFailure as e:
                res = e.result
                r.update(c=res.cutoff, b=res.bonus, achieved_eps=res.achieved_eps,
                         roundtrip_gap=res.roundtrip_gap, floor_eps=res.floor_eps, status="roundtrip_failure")
                code = EXIT_COMPUTE
            except (SolverError, CalibrationError) as e:
                r["status"] = f"error: {type(e).__name__}"
                code = EXIT_COMPUTE
            rows.append(r)
    write_table(out, "calibrate", CAL_HEADER, rows, fmt)
    if cfg.t_grid:
        gate = []
        for rho in cfg.rho_grid:
            try:
                for g in gatekeeping_sweep(cfg.t_grid, rho, cfg.primitives, cfg.mode):
                    gate.append({"rho": rho, "t": g.t, "lambda": g.lam, "c": g.cutoff, "eps": g.eps, "b": g.b, "status": "ok"})
            except SolverError as e:
                gate.append({"rho": rho, "status": f"error: {type(e).__name__}"})
                code = EXIT_COMPUTE
        write_table(out, "gatekeeping", GATE_HEADER, gate, fmt)
    return code


def cmd_simulate(cfg: RunConfig, out: Path, fmt: str) -> int:
    _need(cfg, "rho_grid")
    sim_cfg = SimConfig(cfg.n_experts, cfg.rho_grid, cfg.seed, cfg.primitives, cfg.mode)
    try:
        outcome = run_sim(sim_cfg)
        rd = check_rd(cfg.rho_grid, cfg.primitives, cfg.mode)
    except SolverError as e:
        print(f"simulate failed: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    write_table(out, "simulate", SIM_HEADER, outcome.to_rows(), fmt,
                {"seed": cfg.seed, "n_experts": cfg.n_experts, "mode": cfg.mode.value})
    rep = prediction_report(outcome, rd)
    write_table(out, "predictions", PRED_HEADER, [vars(c) for c in rep.comparisons], fmt,
                {"note": rep.note, "consistent": rep.consistent})
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "statics": cmd_statics,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "check-rd": cmd_check_rd,
}


class _Parser(argparse.ArgumentParser):
    # usage mistakes are config errors here; 2 is reserved for failed computations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="careercutoff", description="Cutoff-equilibrium solver for expert advice with career concerns.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run config")
        sp.add_argument("--out", default="./out", help="output directory (default ./out)")
        sp.add_argument("--format", choices=("csv", "json", "both"), default="both")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, Path(args.out), args.format)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
