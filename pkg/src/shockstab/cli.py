"""Command-line front end: configuration ingestion and report emission.

Every command reads one JSON config, writes JSON reports and CSV tables under
an output prefix, and renders the matching figure next to the data.  All
reductions are fixed-order, so results are byte-identical for a given
(config, seed) regardless of the worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from shockstab import certify, dissipation, figures, models, sim, wave_curves
from shockstab.errors import (
    CertificationFailure,
    NumericalAbort,
    ShockStabError,
    UsageError,
)

COMMANDS = ("models", "curve", "classify", "constants", "certify",
            "entropy-build", "region-map", "simulate")


def _load_config(path):
    if path is None:
        raise UsageError("--config is required for this command")
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise UsageError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON config: {e}")


def _take(cfg: dict, known: dict, required=()):
    """Pull known fields (with defaults) from a config, rejecting unknowns."""
    extra = set(cfg) - set(known)
    if extra:
        raise UsageError(f"unknown config fields: {sorted(extra)}")
    for key in required:
        if key not in cfg:
            raise UsageError(f"missing config field: {key!r}")
    return {k: cfg.get(k, d) for k, d in known.items()}


def _write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    return path


def _fmt(x):
    return format(float(x), ".17g")


def _resolved(config, args):
    return {"config": config, "seed": args.seed, "threads": args.threads}


def _s_values(spec):
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    got = _take(spec, {"min": None, "max": None, "n": 101},
                required=("min", "max"))
    return np.linspace(float(got["min"]), float(got["max"]), int(got["n"]))


def cmd_models(args):
    out = args.out or "models"
    payload = {
        "kinds": [
            {"kind": "scalar_cubic", "n": 1, "fields": ["box", "entropy"]},
            {"kind": "elastodynamics", "n": 2, "fields": ["m", "box", "entropy"]},
            {"kind": "reflected", "fields": ["inner"]},
        ],
        "defaults": {
            "scalar_cubic": models.ScalarCubic().to_json(),
            "elastodynamics": models.Elastodynamics().to_json(),
        },
    }
    _write_json(out + "_report.json", payload)
    return 0


def cmd_curve(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"model": None, "family": 1, "base": None, "s": None},
                required=("model", "base", "s"))
    model = models.parse_model(got["model"])
    s_vals = _s_values(got["s"])
    table = wave_curves.curve_table(model, int(got["family"]), got["base"], s_vals)
    out = args.out or "curve"
    n = table["state"].shape[1]
    header = ["s"] + [f"state_{i}" for i in range(n)] + [
        "sigma", "sigma_prime", "lax_admissible"]
    rows = [
        [_fmt(table["s"][k])] + [_fmt(c) for c in table["state"][k]]
        + [_fmt(table["sigma"][k]), _fmt(table["sigma_prime"][k]),
           int(table["lax_admissible"][k])]
        for k in range(len(s_vals))
    ]
    _write_csv(out + "_curve.csv", header, rows)
    figures.save_curve(table, out + "_curve.png")
    crit = wave_curves.critical_params(model, int(got["family"]), got["base"])
    _write_json(out + "_report.json", {
        "critical_params": {
            "s_natural": crit.s_natural,
            "s_minus_natural": crit.s_minus_natural,
            "orientation": crit.orientation,
        },
        "resolved": _resolved(cfg, args),
    })
    return 0


def cmd_classify(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"model": None, "family": 1, "sample_count": 40},
                required=("model",))
    model = models.parse_model(got["model"])
    fc = models.field_classification(model, int(got["family"]),
                                    int(got["sample_count"]))
    out = args.out or "classify"
    _write_json(out + "_report.json", {
        "classification": fc.to_json(),
        "resolved": _resolved(cfg, args),
    })
    return 0


def _setup_from(got):
    model = models.parse_model(got["model"])
    family = int(got.get("family", 1))
    if family != 1:
        model = models.reflect(model)
    return dissipation.ShockSetup(model, got["u_L"], float(got["s0"]),
                                  float(got["a"]))


def cmd_constants(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"model": None, "family": 1, "u_L": None, "s0": None,
                      "a": None, "grid": {}},
                required=("model", "u_L", "s0", "a"))
    setup = _setup_from(got)
    grid = dissipation.ConstantsGrid(**got["grid"])
    if args.seed is not None:
        grid.seed = args.seed
    report = dissipation.estimate_constants(setup, grid)
    out = args.out or "constants"
    _write_json(out + "_report.json", {
        "constants": report.to_json(),
        "setup": setup.to_json(),
        "resolved": _resolved(cfg, args),
    })
    return 0


def cmd_certify(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"model": None, "family": 1, "u_L": None, "s0": None,
                      "search": {}},
                required=("model", "u_L", "s0"))
    model = models.parse_model(got["model"])
    search_cfg = dict(got["search"])
    grid = certify.CertGrid(**search_cfg.pop("grid", {}))
    spec = certify.SearchSpec(grid=grid, **search_cfg)
    out = args.out or "certify"
    try:
        report = certify.certify_weight(model, int(got["family"]), got["u_L"],
                                        float(got["s0"]), spec)
    except CertificationFailure as e:
        failed = e.args[0]
        if isinstance(failed, certify.CertificationReport):
            _write_json(out + "_report.json", {
                "certification": failed.to_json(),
                "resolved": _resolved(cfg, args),
            })
            figures.save_certification(failed, out + "_certify.png")
        raise
    _write_json(out + "_report.json", {
        "certification": report.to_json(),
        "resolved": _resolved(cfg, args),
    })
    figures.save_certification(report, out + "_certify.png")
    return 0


def cmd_entropy_build(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"u_L": None, "u_R": None, "box": (-6.0, 6.0)},
                required=("u_L", "u_R"))
    spec = certify.build_scalar_entropy(float(got["u_L"]), float(got["u_R"]),
                                        box=tuple(got["box"]))
    out = args.out or "entropy"
    _write_json(out + "_report.json", {
        "entropy": spec.to_json(),
        "resolved": _resolved(cfg, args),
    })
    return 0


def cmd_region_map(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"model": None, "family": 1, "u_base": None, "grid": {},
                      "entropy_policy": "fixed"},
                required=("model", "u_base"))
    model = models.parse_model(got["model"])
    grid = certify.RegionGrid(**got["grid"])
    result = certify.region_map(model, int(got["family"]), got["u_base"], grid,
                                entropy_policy=got["entropy_policy"])
    out = args.out or "region_map"
    n = result["state"].shape[1]
    header = [f"state_{i}" for i in range(n)] + ["class", "s_param",
                                                "covered_reason"]
    rows = [
        [_fmt(c) for c in result["state"][k]]
        + [result["class"][k], _fmt(result["s_param"][k]),
           result["covered_reason"][k]]
        for k in range(len(result["state"]))
    ]
    _write_csv(out + "_region_map.csv", header, rows)
    figures.save_region_map(result, out + "_region_map.png")
    _write_json(out + "_report.json", {
        "epsilon": result["epsilon"],
        "grid": result["grid"],
        "class_counts": {
            c: int(np.sum(result["class"] == c))
            for c in (certify.NOT_ADMISSIBLE, certify.ADMISSIBLE_NOT_COVERED,
                      certify.COVERED_STABLE)
        },
        "resolved": _resolved(cfg, args),
    })
    return 0


def cmd_simulate(args):
    cfg = _load_config(args.config)
    got = _take(cfg, {"model": None, "family": 1, "u_L": None, "s0": None,
                      "a": None, "sim": {}},
                required=("model", "u_L", "s0", "a"))
    setup = _setup_from(got)
    sim_cfg = dict(got["sim"])
    snapshot_every = int(sim_cfg.pop("snapshot_every", 0))
    pert = sim.Perturbation(**sim_cfg.pop("perturbation", {}))
    config = sim.SimConfig(perturbation=pert, **sim_cfg)
    result = sim.run_simulation(setup, config)
    out = args.out or "simulate"
    n_steps = len(result.times)
    dE = np.concatenate([[0.0], np.diff(result.energy)])
    hdot = np.concatenate([[result.shift_velocity[0]], result.shift_velocity])
    diss = np.concatenate([[result.boundary_dissipation[0]],
                           result.boundary_dissipation])
    rows = [
        [_fmt(result.times[k]), _fmt(result.energy[k]), _fmt(dE[k]),
         _fmt(result.shift[k]), _fmt(hdot[k]), _fmt(diss[k])]
        for k in range(n_steps)
    ]
    _write_csv(out + "_series.csv",
               ["t", "E", "dE", "h", "hdot", "diss_boundary"], rows)
    figures.save_simulation(result, out + "_series.png")
    _write_json(out + "_report.json", {
        "summary": result.summary(),
        "setup": setup.to_json(),
        "snapshot_every": snapshot_every,
        "resolved": _resolved(cfg, args),
    })
    return 0


_DISPATCH = {
    "models": cmd_models,
    "curve": cmd_curve,
    "classify": cmd_classify,
    "constants": cmd_constants,
    "certify": cmd_certify,
    "entropy-build": cmd_entropy_build,
    "region-map": cmd_region_map,
    "simulate": cmd_simulate,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="shockstab",
        description="numerical shock-stability analysis and certification",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="path to the JSON configuration")
    p.add_argument("--out", help="output path prefix")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count (reductions are order-fixed)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for all sampled estimates")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (UsageError, ValueError, TypeError, KeyError) as e:
        _emit_error("usage", e)
        return 2
    except CertificationFailure as e:
        _emit_error("certification_failure", e)
        return 3
    except (NumericalAbort, ShockStabError) as e:
        _emit_error("numerical_abort", e)
        return 4


def _emit_error(kind, exc):
    msg = str(exc)
    if not isinstance(exc, (str, UsageError)) and exc.args and not isinstance(
            exc.args[0], str):
        msg = f"{type(exc.args[0]).__name__} payload attached"
    json.dump({"error": kind, "type": type(exc).__name__, "message": msg},
              sys.stderr)
    sys.stderr.write("\n")


if __name__ == "__main__":
    raise SystemExit(main())
