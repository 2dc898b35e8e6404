"""Batch front-end: validated YAML/JSON config in, CSV plus a JSON sidecar out.

Example::

    python3 -m bragg_entanglement --config configs/time_trace.yaml --out trace.csv

Every default is filled in before anything runs, and the resolved config is
written to ``<out>.json`` next to the CSV.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from . import __version__, crosscheck, detection, diagnostics, gaussian
from .condensate import dispersion
from .diagnostics import ModePair, Picture
from .fock_oracle import MemoryCeilingError, TruncationSpec
from .model import ConfigError, SystemConfig, build_dynamical_matrix
from .propagator import evolve

SCENARIOS = ("dispersion", "evolve", "sweep", "oracle-compare", "detect")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_MEMORY = 4

_range = {
    "type": "object",
    "properties": {
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "step": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["stop", "step"],
    "additionalProperties": False,
}
_grid = {"oneOf": [_range, {"type": "array", "items": {"type": "number"}, "minItems": 1}]}
_pair = {"type": "string", "pattern": "^(q|mq)A_(q|mq)B$"}

SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "scenario": {"enum": list(SCENARIOS)},
        "system": {
            "type": "object",
            "properties": {
                "omega_A": {"type": "number", "minimum": 0},
                "omega_B": {"type": ["number", "null"], "minimum": 0},
                "delta": {"type": "number"},
                "eta_A": {"type": "number", "minimum": 0},
                "eta_B": {"type": "number", "minimum": 0},
                "n_probe": {"type": "number", "minimum": 0},
                "probe_phase": {"type": "number"},
                "variant": {"enum": ["full5", "resonant3", "single3"]},
            },
            "additionalProperties": False,
        },
        "times": _grid,
        "ratios": _grid,
        "sweep_time": {"type": "number", "exclusiveMinimum": 0},
        "pairs": {"type": "array", "items": _pair, "minItems": 1},
        "pictures": {"type": "array", "items": {"enum": ["quasi", "particle"]}, "minItems": 1},
        "q_xi": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "output": {"type": "string"},
        "dispersion": {
            "type": "object",
            "properties": {"q_xi": _grid, "mu_over_hbar": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
        "oracle": {
            "type": "object",
            "properties": {
                "quasiparticle_cap": {"type": "integer", "minimum": 1},
                "probe_cap": {"type": "integer", "minimum": 1},
                "leakage_tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_dim": {"type": "integer", "minimum": 1},
                "bump": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "detect": {
            "type": "object",
            "properties": {
                "t": {"type": "number", "exclusiveMinimum": 0},
                "shots": {"type": "integer", "minimum": 2},
                "eta_verify": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "duration": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "required": ["schema_version", "scenario"],
    "additionalProperties": False,
}

DEFAULTS = {
    "system": SystemConfig.working_point().as_dict(),
    "times": {"start": 0.01, "stop": 1.5, "step": 0.01},
    "ratios": {"start": 0.5, "stop": 2.0, "step": 0.05},
    "sweep_time": 0.75,
    "pairs": [p.label for p in diagnostics.ALL_PAIRS],
    "pictures": ["quasi"],
    "q_xi": 2.0,
    "seed": 0,
    "output": "out.csv",
    "dispersion": {"q_xi": {"start": 0.1, "stop": 5.0, "step": 0.1}, "mu_over_hbar": 1.0},
    "oracle": {"quasiparticle_cap": 6, "probe_cap": 12, "leakage_tolerance": 1e-6, "max_dim": 3_000_000, "bump": 0},
    "detect": {"t": 0.75, "shots": 100_000, "eta_verify": None, "duration": detection.DEFAULT_VERIFY_DURATION},
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int, **detail):
        super().__init__(message)
        self.kind, self.code, self.detail = kind, code, detail


def resolve(raw: dict) -> dict:
    """Validate ``raw`` and merge in every default."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path)
        raise CliError("invalid_config", exc.message, EXIT_INVALID, path=where) from None
    cfg = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    if cfg["system"].get("omega_B") is None:
        cfg["system"]["omega_B"] = cfg["system"]["omega_A"]
    try:
        SystemConfig(**cfg["system"])
    except (ConfigError, TypeError) as exc:
        raise CliError("invalid_config", str(exc), EXIT_INVALID, path="system") from None
    return cfg


def grid(spec) -> list[float]:
    """Explicit list, or ``start + k * step`` up to ``stop`` inclusive (start defaults to step)."""
    if isinstance(spec, list):
        return [float(x) for x in spec]
    step = float(spec["step"])
    start = float(spec.get("start", step))
    n = int(math.floor((spec["stop"] - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(max(n, 0))]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _pairs(cfg):
    return [ModePair.parse(p, Picture(pic)) for pic in cfg["pictures"] for p in cfg["pairs"]]


def _uv(cfg, pairs):
    if any(p.picture is Picture.PARTICLE for p in pairs):
        return diagnostics.bogoliubov_uv(cfg["q_xi"])
    return None


def _xi_header(pairs):
    cols = []
    for p in pairs:
        tag = f"{p.label}_{p.picture.value}"
        cols += [f"xi_n_{tag}", f"xi_p_{tag}", f"n1_{tag}", f"n2_{tag}", f"undef_{tag}"]
    return cols


def _xi_cells(reports, k):
    cells = []
    for r in reports:
        cells += [r.xi_n[k], r.xi_p[k], r.occupations[k, 0], r.occupations[k, 1], bool(r.undefined[k])]
    return cells


def run_evolve(cfg):
    system = SystemConfig(**cfg["system"])
    pairs = _pairs(cfg)
    times = grid(cfg["times"])
    reports = diagnostics.time_series(system, times, pairs, _uv(cfg, pairs))
    header = ["t_us"] + _xi_header(pairs)
    return header, [[t] + _xi_cells(reports, k) for k, t in enumerate(times)]


def run_sweep(cfg):
    base = SystemConfig(**cfg["system"])
    pairs = _pairs(cfg)
    ratios = sorted(grid(cfg["ratios"]))
    uv = _uv(cfg, pairs)
    per_pair = [diagnostics.sweep_coupling_ratio(base, ratios, cfg["sweep_time"], p, uv) for p in pairs]
    header = ["ratio"] + _xi_header(pairs)
    rows = []
    for k, ratio in enumerate(ratios):
        rows.append([ratio] + _xi_cells([reps[k] for reps in per_pair], 0))
    return header, rows


def run_dispersion(cfg):
    mu = cfg["dispersion"]["mu_over_hbar"]
    header = ["q_xi", "omega_q", "omega_B", "u_q", "v_q", "f_q"]
    rows = []
    for q in grid(cfg["dispersion"]["q_xi"]):
        p = dispersion(q, mu)
        rows.append([q, p.omega_q, p.omega_B, p.u_q, p.v_q, p.f_q])
    return header, rows


def run_oracle(cfg):
    system = SystemConfig(**cfg["system"])
    o = cfg["oracle"]
    caps = crosscheck.default_caps(system, o["quasiparticle_cap"], o["probe_cap"])
    pairs = _pairs(cfg)
    try:
        spec = TruncationSpec(caps, o["leakage_tolerance"], o["max_dim"])
        rows = crosscheck.compare(system, grid(cfg["times"]), spec, pairs, _uv(cfg, pairs))
        if o["bump"]:
            rows += crosscheck.truncation_bump(system, grid(cfg["times"]), spec, o["bump"], pairs, _uv(cfg, pairs))
    except MemoryCeilingError as exc:
        raise CliError("memory_ceiling", str(exc), EXIT_MEMORY, caps=list(caps)) from None
    header = ["t_us", "quantity", "gaussian", "fock", "abs_error", "rel_error", "tolerance", "relative", "ok",
              "leakage", "trusted"]
    body = [[r.t, r.quantity, r.gaussian, r.fock, r.abs_error, r.rel_error, r.tolerance, r.relative, r.ok,
             r.leakage, r.trusted] for r in rows]
    return header, body


def run_detect(cfg):
    system = SystemConfig(**cfg["system"])
    d = cfg["detect"]
    pairs = _pairs(cfg)
    uv = _uv(cfg, pairs)
    emap = evolve(build_dynamical_matrix(system), d["t"])
    state = gaussian.InitialState.from_config(system)
    seeds = np.random.SeedSequence(cfg["seed"]).generate_state(2 * len(pairs))
    header = ["pair", "quantity", "estimate", "standard_error", "exact", "shots", "seed"]
    rows = []
    for k, pair in enumerate(pairs):
        tag = f"{pair.label}_{pair.picture.value}"
        f1, f2 = diagnostics.pair_forms(pair, emap, uv)
        x, p = diagnostics.quadrature_combinations(f1, f2)
        quads = detection.VerificationQuadratures(x, p, 0.5, 0.0)
        hom = detection.estimate_xi_p_homodyne(quads, state, d["shots"], int(seeds[2 * k]))
        het = detection.estimate_xi_n_heterodyne(f1, f2, state, d["shots"], int(seeds[2 * k + 1]))
        xn = diagnostics.xi_number(pair, state, emap, uv)
        xp = diagnostics.xi_quadrature(pair, state, emap, uv)
        rows.append([tag, "xi_p", hom.estimates["xi_p"], hom.standard_errors["xi_p"], xp, d["shots"], hom.rng_seed])
        rows.append([tag, "xi_n", het.estimates["xi_n"], het.standard_errors["xi_n"],
                     math.nan if xn is None else xn, d["shots"], het.rng_seed])
        rows.append([tag, "xi_n_raw", het.estimates["xi_n_raw"], math.nan, math.nan, d["shots"], het.rng_seed])
    if pairs and pairs[0].label == diagnostics.ENTANGLED_PAIR.label and pairs[0].picture is Picture.QUASIPARTICLE:
        chain = detection.probe_chain_quadratures(system, emap, d["duration"], d["eta_verify"])
        value = gaussian.variance(chain.x) + gaussian.variance(chain.p) - chain.noise
        rows.append([f"{pairs[0].label}_quasi", "xi_p_probe_chain", value, math.nan,
                     diagnostics.xi_quadrature(pairs[0], state, emap), 0, 0])
    return header, rows


RUNNERS = {
    "dispersion": run_dispersion,
    "evolve": run_evolve,
    "sweep": run_sweep,
    "oracle-compare": run_oracle,
    "detect": run_detect,
}


def load_config(path: str | None) -> dict:
    if path is None:
        return {"schema_version": 1}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError("unreadable_config", str(exc), EXIT_IO, path=path) from None
    try:
        data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise CliError("invalid_config", f"cannot parse {path}: {exc}", EXIT_INVALID, path=path) from None
    if not isinstance(data, dict):
        raise CliError("invalid_config", "config must be a mapping", EXIT_INVALID, path=path)
    return data


def write_outputs(out: Path, header, rows, cfg):
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) for c in row])
    sidecar = {"version": __version__, "config": cfg, "columns": header, "rows": len(rows)}
    out.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run(raw: dict, out: str | None = None, seed: int | None = None, scenario: str | None = None) -> tuple[Path, dict]:
    raw = dict(raw)
    if scenario is not None:
        raw["scenario"] = scenario
    if seed is not None:
        raw["seed"] = seed
    if out is not None:
        raw["output"] = str(out)
    cfg = resolve(raw)
    header, rows = RUNNERS[cfg["scenario"]](cfg)
    path = Path(cfg["output"])
    try:
        write_outputs(path, header, rows, cfg)
    except OSError as exc:
        raise CliError("unwritable_output", str(exc), EXIT_IO, path=str(path)) from None
    return path, cfg


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bragg-entanglement", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="YAML or JSON run config")
    ap.add_argument("--out", help="CSV output path (sidecar goes to the same stem with .json)")
    ap.add_argument("--seed", type=int, help="seed for Monte Carlo scenarios")
    ap.add_argument("--scenario", choices=SCENARIOS, help="override the scenario in the config")
    ap.add_argument("--quiet", action="store_true", help="no summary on stdout")
    ap.add_argument("--version", action="version", version=__version__)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_config(args.config)
        path, cfg = run(raw, args.out, args.seed, args.scenario)
    except CliError as exc:
        json.dump({"error": exc.kind, "message": str(exc), **exc.detail}, sys.stderr)
        sys.stderr.write("\n")
        return exc.code
    if not args.quiet:
        print(f"{cfg['scenario']}: wrote {os.fspath(path)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
