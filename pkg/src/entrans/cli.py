"""Command-line front end: ``entrans {ground,evolve,sweep,analyze,magnus}``.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence, 4 I/O.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .entanglement import EntanglementTracker
from .groundstate import ConvergenceError, lanczos_ground_state
from .magnus import compare, fidelity_deficit, min_fidelity, transition_time_agreement
from .model import ContractError, HamiltonianKind
from .propagator import KrylovError
from .run import initial_state, run_evolution
from .scaling import (
    ScalingError,
    ScalingInput,
    collapse,
    curve_from_series,
    exponent_fits,
    optimize_collapse,
    saturation_analysis,
)
from .series import COMPARISON_COLUMNS, SchemaError, TimeSeries, write_csv
from .transitions import SeriesError, detect_events, periodicity_report, smoothness_control

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGENCE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("entrans")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return _jsonable(asdict(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable({"schema_version": SCHEMA_VERSION, **obj}), indent=2, sort_keys=True) + "\n"


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Artifacts:
    """Files written into one output directory; removed again if the run fails."""

    def __init__(self, out):
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def path(self, name) -> Path:
        self.files.append(name)
        return self.dir / name

    def json(self, name, obj):
        self.path(name).write_text(dumps(obj))

    def csv(self, name, columns, rows):
        write_csv(self.path(name), columns, rows)

    def cleanup(self):
        for name in self.files:
            try:
                (self.dir / name).unlink()
            except FileNotFoundError:
                pass
        self.files.clear()

    def manifest(self, command, cfg, started, checks=()):
        hashes = {name: sha256(self.dir / name) for name in sorted(set(self.files))}
        self.json("manifest.json", {
            "tool": "entrans", "version": __version__, "command": command,
            "config": cfg.resolved(), "wall_clock_s": time.time() - started,
            "checks": [asdict(c) for c in checks], "files": hashes,
        })


def verify_manifest(run_dir) -> dict:
    """Re-hash every listed file; returns ``{name: ok}``."""
    run_dir = Path(run_dir)
    m = json.loads((run_dir / "manifest.json").read_text())
    return {name: (run_dir / name).exists() and sha256(run_dir / name) == h for name, h in m["files"].items()}


def _events_payload(series, cfg):
    a = cfg["analysis"]
    events = detect_events(series, a["gap_threshold"], a["parity_confidence"], a["window"])
    return events, {"events": [e.to_dict() for e in events]}


# -- commands ---------------------------------------------------------------

def cmd_ground(cfg, out):
    started = time.time()
    spec = cfg.chain_spec()
    art = Artifacts(out)
    try:
        res = lanczos_ground_state(spec)
        art.json("ground.json", {
            "energy": res.energy, "residual": res.residual, "iterations": res.iterations,
            "chain": cfg.resolved()["chain"],
        })
        if cfg["output"]["dump_state"]:
            np.save(art.path("state.npy"), res.state)
        art.manifest("ground", cfg, started)
    except BaseException:
        art.cleanup()
        raise
    return res


def _evolve_into(cfg, art):
    spec = cfg.chain_spec()
    config = cfg.evolution_config()
    config.check(spec)
    psi0 = initial_state(spec, cfg["initial"]["state"], cfg["initial"]["seed"])
    orders = [o for o in cfg["analysis"]["renyi_orders"]]
    orders = [int(o) if float(o).is_integer() else o for o in orders]
    if 2 not in orders:
        orders.append(2)
    result = run_evolution(spec, config, psi0, renyi_orders=orders)
    result.series.to_csv(art.path("timeseries.csv"))
    if cfg["output"]["dump_state"]:
        np.save(art.path("final_state.npy"), result.log.final_state)
    return result


def cmd_evolve(cfg, out):
    started = time.time()
    cfg.validate()
    art = Artifacts(out)
    try:
        result = _evolve_into(cfg, art)
        art.manifest("evolve", cfg, started, result.checks)
    except BaseException:
        art.cleanup()
        raise
    return result


def point_dir(omega: float, L_A: int) -> str:
    return f"om{omega:g}_la{L_A}"


def _sweep_point(args):
    values, out, omega, L_A = args
    cfg = cfgmod.RunConfig({s: dict(v) for s, v in values.items()})
    cfg["chain"]["omega"] = omega
    cfg["chain"]["L_A"] = L_A
    sw = cfg["sweep"]
    if omega >= sw["high_omega"]:
        cfg["evolution"]["dt"] = min(cfg["evolution"]["dt"], sw["high_omega_dt"])
    name = point_dir(omega, L_A)
    entry = {"omega": omega, "L_A": L_A, "dir": name, "dt": cfg["evolution"]["dt"]}
    try:
        result = cmd_evolve(cfg, Path(out) / name)
        events, _ = _events_payload(result.series, cfg)
        entry.update(status="ok", t_star=events[0].t_c if events else None, n_events=len(events))
    except Exception as exc:  # recorded in the index; the sweep continues
        entry.update(status="error", error=f"{type(exc).__name__}: {exc}", t_star=None)
    return entry


def cmd_sweep(cfg, out, workers=None):
    started = time.time()
    sw = cfg["sweep"]
    omegas = sw["omegas"] or [cfg["chain"]["omega"]]
    las = sw["L_As"] or [cfg["chain"]["L_A"]]
    for w in omegas:
        for la in las:
            cfg.chain_spec(omega=w, L_A=la)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg.values, str(out), float(w), int(la)) for w in omegas for la in las]
    workers = max(1, min(workers or os.cpu_count() or 1, len(jobs)))
    if workers == 1:
        entries = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_sweep_point, jobs))
    art = Artifacts(out)
    art.json("index.json", {"points": entries, "wall_clock_s": time.time() - started})
    return entries


def _load_sweep(path: Path):
    index = json.loads((path / "index.json").read_text())
    return [e for e in index["points"] if e.get("status") == "ok"]


def cmd_analyze(cfg, path, analysis, out=None):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{path} does not exist")
    if path.is_file():
        csv_path, base = path, path.parent
    else:
        csv_path, base = path / "timeseries.csv", path
    art = Artifacts(out or base)
    a = cfg["analysis"]
    try:
        if analysis == "transitions":
            series = TimeSeries.from_csv(csv_path)
            events, payload = _events_payload(series, cfg)
            t_max = float(series.t[-1]) if len(series) else 0.0
            art.json("events.json", payload)
            art.json("periodicity.json", periodicity_report(events, t_max).to_dict())
            art.json("smoothness.json", {"entries": smoothness_control(series, events, a["window"])})
        elif analysis in ("scaling", "collapse"):
            inp = _scaling_input(path, cfg)
            fits = exponent_fits(inp) if len(inp.curves) >= 3 else {}
            payload = {"fits": {k: v for k, v in fits.items() if k != "points"},
                       "critical_points": inp.critical_points()}
            if analysis == "collapse":
                search = optimize_collapse(inp, a["nu_grid"], a["a_grid"])
                best = collapse(inp, search.nu, search.a)
                payload["collapse"] = {
                    "nu": search.nu, "a": search.a, "quality": search.quality, "tie": search.tie,
                    "nu_grid": search.nu_grid.tolist(), "a_grid": search.a_grid.tolist(),
                    "quality_map": search.quality_map.tolist(),
                }
                rows = [(L, x, y) for L, xs, ys in best.curves for x, y in zip(xs, ys)]
                art.csv("collapsed.csv", ("L_A", "x", "y"), rows)
            art.json("fits.json", payload)
        elif analysis == "saturation":
            entries = _load_sweep(path)
            table = {}
            for e in entries:
                if e["t_star"] is not None:
                    table.setdefault(e["L_A"], {})[e["omega"]] = e["t_star"]
            rep = saturation_analysis(table, omega_sat=a["omega_sat"])
            art.json("saturation.json", {"L_A": {str(k): v for k, v in rep.items()}})
        else:
            raise ContractError(f"unknown analysis {analysis!r}")
    except BaseException:
        art.cleanup()
        raise
    return art.files


def _scaling_input(path: Path, cfg) -> ScalingInput:
    """Curves ``s_min(t)`` around the first event of each run in a sweep.

    With several frequencies in the sweep the chain's configured ``omega`` is
    used.
    """
    entries = _load_sweep(path)
    omegas = sorted({e["omega"] for e in entries})
    if len(omegas) > 1:
        entries = [e for e in entries if e["omega"] == cfg["chain"]["omega"]]
    curves = []
    for e in sorted(entries, key=lambda e: e["L_A"]):
        if e["t_star"] is None:
            continue
        s = TimeSeries.from_csv(path / e["dir"] / "timeseries.csv")
        curves.append(curve_from_series(e["L_A"], s.t, s.s_min, e["t_star"]))
    if not curves:
        raise ScalingError("no run in the sweep has a detected transition")
    return ScalingInput(curves)


def cmd_magnus(cfg, out):
    started = time.time()
    cfg.validate()
    spec = cfg.chain_spec()
    exact = cfg.evolution_config(hamiltonian="driven")
    eff = cfg.evolution_config(hamiltonian="effective")
    psi0 = initial_state(spec, cfg["initial"]["state"], cfg["initial"]["seed"])
    art = Artifacts(out)
    try:
        tr_a, tr_b = EntanglementTracker(spec.L_A), EntanglementTracker(spec.L_A)
        records = compare(spec, exact, eff, psi0, observers=(tr_a, tr_b))
        art.csv("comparison.csv", COMPARISON_COLUMNS, (r.row() for r in records))
        a = cfg["analysis"]
        ev_a = detect_events(TimeSeries.from_records(tr_a.records), a["gap_threshold"],
                             a["parity_confidence"], a["window"])
        ev_b = detect_events(TimeSeries.from_records(tr_b.records), a["gap_threshold"],
                             a["parity_confidence"], a["window"])
        payload = {
            "min_fidelity": min_fidelity(records),
            "fidelity_deficit": fidelity_deficit(records),
            "t_c_exact": [e.t_c for e in ev_a],
            "t_c_effective": [e.t_c for e in ev_b],
        }
        if ev_a and ev_b:
            payload["agreement"] = transition_time_agreement(ev_a, ev_b).to_dict()
        art.json("agreement.json", payload)
        art.manifest("magnus", cfg, started)
    except BaseException:
        art.cleanup()
        raise
    return records


# -- entry point ------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="entrans", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="INI run configuration")
        sp.add_argument("--out", help="output directory (env ENTRANS_OUT)")
        sp.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. chain.L=10 (repeatable)")
        return sp

    common(sub.add_parser("ground", help="Lanczos ground state of the static chain"))
    common(sub.add_parser("evolve", help="driven evolution; writes timeseries.csv"))
    sw = common(sub.add_parser("sweep", help="evolve over a grid of omega and L_A"))
    sw.add_argument("--workers", type=int, help="process cap (env ENTRANS_WORKERS)")
    an = common(sub.add_parser("analyze", help="post-process a run or sweep directory"))
    an.add_argument("path")
    an.add_argument("--analysis", default="transitions",
                    choices=("transitions", "scaling", "collapse", "saturation"))
    common(sub.add_parser("magnus", help="exact vs effective Hamiltonian comparison"))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = cfgmod.load(args.config, args.override)
        out = args.out or os.environ.get("ENTRANS_OUT") or cfg["output"]["dir"]
        if args.command == "ground":
            res = cmd_ground(cfg, out)
            print(f"E0 = {res.energy:.15g}  residual = {res.residual:.2e}")
        elif args.command == "evolve":
            res = cmd_evolve(cfg, out)
            failed = [c.name for c in res.checks if c.applicable and not c.passed]
            print(f"{len(res.series)} rows -> {Path(out) / 'timeseries.csv'}"
                  + (f"; invariant checks failed: {failed}" if failed else ""))
        elif args.command == "sweep":
            env = os.environ.get("ENTRANS_WORKERS")
            workers = args.workers or (int(env) if env else None)
            entries = cmd_sweep(cfg, out, workers)
            bad = [e["dir"] for e in entries if e["status"] != "ok"]
            print(f"{len(entries)} points -> {Path(out) / 'index.json'}"
                  + (f"; failed: {bad}" if bad else ""))
        elif args.command == "analyze":
            files = cmd_analyze(cfg, args.path, args.analysis, args.out)
            print("wrote " + ", ".join(files))
        elif args.command == "magnus":
            recs = cmd_magnus(cfg, out)
            print(f"min fidelity {min_fidelity(recs):.10f} -> {Path(out) / 'comparison.csv'}")
    except (ContractError, SchemaError, SeriesError, ScalingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConvergenceError, KrylovError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
