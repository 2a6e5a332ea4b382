"""Command-line experiment runner.

Every subcommand reads a JSON config, runs one batch experiment, and writes
its results plus a run manifest into an output directory.  Configs are
schema-validated up front (unknown keys are errors) so that a bad config
never produces partial output.  Payload files are written deterministically:
the same config and seed list yields byte-identical CSV/JSON artifacts; the
manifest records a hash of the effective config, tool and platform versions,
the RNG algorithm, and every file written.

Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
4 divergence detected.
"""

import argparse
import hashlib
import json
import os
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .causal import causal_graph, classify
from .core import DiscreteSpacetime, random_projector
from .correlation import (
    geometry_diagnostics,
    local_correlations,
    planar_square_family,
    projector_from_correlations,
    tetrahedron_family,
    triangle_projector,
)
from .lattice import (
    LatticeGeometry,
    OccupiedState,
    landscape_scan_2d,
)
from .continuum.lightcone import (
    expansion_product,
    gradient_expansion,
    standard_expansion,
)
from .continuum.seas import GridCoverage, state_stability_check
from .solver import InfeasibleKappa, SolverConfig, landscape_scan, minimize
from .tolerances import DEFAULT, Tolerances

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_DIVERGENCE = 4

RNG_ALGORITHM = "numpy Philox"


class CliError(Exception):
    def __init__(self, exit_code, message):
        super().__init__(message)
        self.exit_code = exit_code


# ---------------------------------------------------------------------------
# config schemas

_SEED_ARRAY = {"type": "array", "items": {"type": "integer", "minimum": 0}}

_TOLERANCE_BLOCK = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        name: {"type": "number", "exclusiveMinimum": 0}
        for name in Tolerances.__dataclass_fields__
    },
}

_SOLVER_PARAMS = {
    "n": {"type": "integer", "minimum": 1},
    "f": {"type": "integer", "minimum": 1},
    "m": {"type": "integer", "minimum": 1},
    "mode": {"enum": ["auxiliary", "constrained"]},
    "mu": {"type": "number"},
    "kappa": {"type": "number"},
    "max_iter": {"type": "integer", "minimum": 1},
    "boost_scale": {"type": "number", "exclusiveMinimum": 0},
    "residual_tol": {"type": "number", "exclusiveMinimum": 0},
}

_RATIONAL_PAIR = {
    "oneOf": [
        {"type": "integer"},
        {
            "type": "array",
            "items": {"type": "integer"},
            "minItems": 2,
            "maxItems": 2,
        },
    ]
}

PARAM_SCHEMAS = {
    "minimize": {
        "type": "object",
        "additionalProperties": False,
        "required": ["n", "f", "m"],
        "properties": _SOLVER_PARAMS,
    },
    "pauli-vectors": {
        "type": "object",
        "additionalProperties": False,
        "required": ["m"],
        "properties": {
            k: v for k, v in _SOLVER_PARAMS.items() if k not in ("n", "f")
        },
    },
    "classify-causal": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "roots": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "array",
                        "items": {"type": "number"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
            },
            "sample": {
                "type": "object",
                "additionalProperties": False,
                "required": ["n", "m", "f"],
                "properties": {
                    "n": {"type": "integer", "minimum": 1},
                    "m": {"type": "integer", "minimum": 1},
                    "f": {"type": "integer", "minimum": 1},
                    "boost_scale": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "oneOf": [{"required": ["roots"]}, {"required": ["sample"]}],
    },
    "landscape": {
        "type": "object",
        "additionalProperties": False,
        "required": ["family", "start", "stop", "num"],
        "properties": {
            "family": {"enum": ["triangle", "tetrahedron", "planar-square"]},
            "start": {"type": "number"},
            "stop": {"type": "number"},
            "num": {"type": "integer", "minimum": 2},
            "mu": {"type": "number"},
            "rho": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "lattice": {
        "type": "object",
        "additionalProperties": False,
        "required": ["n_t", "n_r", "states", "scan"],
        "properties": {
            "n_t": {"type": "integer", "minimum": 1},
            "n_r": {"type": "integer", "minimum": 1},
            "states": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["omega", "k"],
                    "properties": {
                        "omega": {"type": "integer"},
                        "k": {"type": "integer"},
                        "phi": {"type": "number", "exclusiveMinimum": 0},
                        "tau": {"type": "number"},
                    },
                },
            },
            "weights": {
                "oneOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["rho_t", "rho_r"],
                        "properties": {
                            "rho_t": {"type": "array", "items": {"type": "number"}},
                            "rho_r": {"type": "array", "items": {"type": "number"}},
                        },
                    },
                ]
            },
            "scan": {
                "type": "object",
                "additionalProperties": False,
                "required": ["start", "stop", "num"],
                "properties": {
                    "start": {"type": "number"},
                    "stop": {"type": "number"},
                    "num": {"type": "integer", "minimum": 2},
                },
            },
        },
    },
    "lightcone-check": {
        "type": "object",
        "additionalProperties": False,
        "required": ["values"],
        "properties": {
            "values": {
                "type": "object",
                "additionalProperties": False,
                "required": ["C0", "C1", "C2", "C3", "D0", "D1", "D2", "D3"],
                "properties": {
                    name: _RATIONAL_PAIR
                    for name in ("C0", "C1", "C2", "C3", "D0", "D1", "D2", "D3")
                },
            }
        },
    },
    "state-stability": {
        "type": "object",
        "additionalProperties": False,
        "required": ["table", "masses"],
        "properties": {
            "table": {"type": "string"},
            "masses": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "number", "exclusiveMinimum": 0},
            },
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["subcommand", "params"],
    "properties": {
        "subcommand": {"enum": sorted(PARAM_SCHEMAS)},
        "params": {"type": "object"},
        "seeds": _SEED_ARRAY,
        "out": {"type": "string"},
        "tolerances": _TOLERANCE_BLOCK,
    },
}

FIGURES = ("fig1-2", "fig3", "fig5")


# ---------------------------------------------------------------------------
# serialization helpers

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _json_bytes(obj):
    return (json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n").encode()


def _csv_bytes(header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, str):
                cells.append(cell)
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(repr(float(cell)))
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode()


def _config_hash(config):
    payload = {
        "subcommand": config["subcommand"],
        "params": config["params"],
        "seeds": config.get("seeds", []),
        "tolerances": config.get("tolerances", {}),
    }
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _validate(config):
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CliError(EXIT_VALIDATION, f"config invalid at {path}: {exc.message}")
    try:
        jsonschema.validate(config["params"], PARAM_SCHEMAS[config["subcommand"]])
    except jsonschema.ValidationError as exc:
        path = "/".join(("params", *(str(p) for p in exc.absolute_path)))
        raise CliError(EXIT_VALIDATION, f"config invalid at {path}: {exc.message}")


# ---------------------------------------------------------------------------
# subcommand handlers: params -> {filename: bytes}, exit code

def _solver_config(params, seeds, n):
    kwargs = {
        "mode": params.get("mode", "auxiliary"),
        "mu": params.get("mu", 1.0 / (2.0 * n)),
        "seeds": tuple(seeds),
    }
    if "kappa" in params:
        kwargs["kappa"] = params["kappa"]
    for key in ("max_iter", "boost_scale", "residual_tol"):
        if key in params:
            kwargs[key] = params[key]
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc))


def _result_payload(res):
    return {
        "mode": res.mode,
        "action": res.action,
        "constraint": res.constraint,
        "multiplier": res.multiplier,
        "residual": res.residual,
        "gradient_norm": res.gradient_norm,
        "status": res.status,
        "best_seed": res.seed,
        "per_seed": res.per_seed,
    }


def _pauli_csv(corr):
    rows = [
        (x, corr.rho[x], *corr.vectors[x])
        for x in range(corr.m)
    ]
    return _csv_bytes(("x", "rho", "v1", "v2", "v3"), rows)


def _run_minimize(params, seeds, tol):
    if not seeds:
        raise CliError(EXIT_VALIDATION, "minimize needs a nonempty seed list")
    try:
        space = DiscreteSpacetime(params["n"], params["m"])
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc))
    cfg = _solver_config(params, seeds, params["n"])
    res = minimize(space, params["f"], cfg, tol)
    outputs = {"result.json": _json_bytes(_result_payload(res))}
    if params["n"] == 1 and params["f"] == 2:
        corr = local_correlations(res.projector)
        outputs["pauli_vectors.csv"] = _pauli_csv(corr)
        outputs["geometry.json"] = _json_bytes(geometry_diagnostics(corr, tol))
    code = EXIT_DIVERGENCE if res.status == "divergence" else EXIT_OK
    return outputs, code


def _run_pauli_vectors(params, seeds, tol):
    full = dict(params, n=1, f=2)
    return _run_minimize(full, seeds, tol)


def _run_classify_causal(params, seeds, tol):
    if "roots" in params:
        records = []
        for multiset in params["roots"]:
            lam = np.array([complex(re, im) for re, im in multiset])
            records.append(
                {
                    "roots": [complex(z) for z in lam],
                    "class": classify(lam, tol=tol).value,
                }
            )
        counts = {}
        for rec in records:
            counts[rec["class"]] = counts.get(rec["class"], 0) + 1
        payload = {"multisets": records, "counts": counts}
        return {"classifications.json": _json_bytes(payload)}, EXIT_OK

    sample = params["sample"]
    if not seeds:
        raise CliError(EXIT_VALIDATION, "sampled classification needs seeds")
    try:
        space = DiscreteSpacetime(sample["n"], sample["m"])
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc))
    graphs = []
    for seed in seeds:
        proj = random_projector(
            space, sample["f"], seed, sample.get("boost_scale", 1.0), tol
        )
        graph = causal_graph(proj, tol=tol)
        off = graph.off_diagonal_class()
        graphs.append(
            {
                "seed": seed,
                "graph": json.loads(graph.to_json()),
                "off_diagonal": off.value if off is not None else "mixed",
            }
        )
    return {"classifications.json": _json_bytes({"graphs": graphs})}, EXIT_OK


def _landscape_family(params, tol):
    name = params["family"]
    rho = params.get("rho", 0.5)
    if name == "triangle":
        return lambda v: triangle_projector(v, tol)
    space = DiscreteSpacetime(1, 4)
    family = tetrahedron_family if name == "tetrahedron" else planar_square_family

    def build(v):
        return projector_from_correlations(space, family(v, rho), tol)

    return build


def _run_landscape(params, seeds, tol):
    grid = np.linspace(params["start"], params["stop"], params["num"])
    mu = params.get("mu", 0.5)
    records = landscape_scan(_landscape_family(params, tol), grid, mu=mu, tol=tol)
    rows = []
    for rec in records:
        if "error" in rec:
            continue
        lam_minus, lam_plus = rec["roots"][0], rec["roots"][-1]
        rows.append(
            (
                rec["param"],
                lam_plus.real,
                lam_plus.imag,
                lam_minus.real,
                lam_minus.imag,
            )
        )
    outputs = {
        "landscape.csv": _csv_bytes(
            ("v", "re_lam_plus", "im_lam_plus", "re_lam_minus", "im_lam_minus"),
            rows,
        ),
        "landscape.json": _json_bytes({"mu": mu, "records": records}),
    }
    return outputs, EXIT_OK


def _run_lattice(params, seeds, tol):
    # geometry/occupation/weight problems are config mistakes, not numerics
    try:
        geom = LatticeGeometry(params["n_t"], params["n_r"])
        states = [OccupiedState(**s) for s in params["states"]]
        weights = params.get("weights", "sphere")
        if isinstance(weights, dict):
            weights = (weights["rho_t"], weights["rho_r"])
        scan_grid = params["scan"]
        taus = np.linspace(scan_grid["start"], scan_grid["stop"], scan_grid["num"])
        scan = landscape_scan_2d(geom, states[0], states[1], taus, weights=weights)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc))
    rows = [
        (t1, t2, scan.surface[i, j])
        for i, t1 in enumerate(scan.tau_values)
        for j, t2 in enumerate(scan.tau_values)
    ]
    on_grid = bool(np.any(np.abs(taus) < 1e-12))
    origin = {
        "on_grid": on_grid,
        "value": scan.value_at(0.0, 0.0) if on_grid else None,
        "is_local_minimum": any(m[0] == 0.0 and m[1] == 0.0 for m in scan.minima),
        "is_global_minimum": any(
            m[0] == 0.0 and m[1] == 0.0 for m in scan.global_minima
        ),
    }
    minima = {
        "local_minima": [list(m) for m in scan.minima],
        "global_minima": [list(m) for m in scan.global_minima],
        "origin": origin,
    }
    outputs = {
        "surface.csv": _csv_bytes(("tau1", "tau2", "S"), rows),
        "minima.json": _json_bytes(minima),
    }
    return outputs, EXIT_OK


def _run_lightcone_check(params, seeds, tol):
    values = {
        name: tuple(v) if isinstance(v, list) else v
        for name, v in params["values"].items()
    }
    kernel = standard_expansion(values)
    chain = expansion_product(kernel)
    grad = gradient_expansion(chain)
    payload = {
        "kernel": json.loads(kernel.to_json()),
        "closed_chain": json.loads(chain.to_json()),
        "gradient": json.loads(grad.to_json()),
    }
    return {"expansion.json": _json_bytes(payload)}, EXIT_OK


def _run_state_stability(params, seeds, tol, config_dir):
    path = Path(params["table"])
    if not path.is_absolute():
        path = config_dir / path
    if not path.is_file():
        raise CliError(EXIT_VALIDATION, f"table file not found: {path}")
    try:
        table = np.genfromtxt(path, delimiter=",", names=True)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, f"cannot parse table {path}: {exc}")
    names = table.dtype.names
    if names is None or set(names) != {"qsq", "a", "b"}:
        raise CliError(
            EXIT_VALIDATION,
            f"table needs columns qsq,a,b; found {names}",
        )
    report = state_stability_check(
        table["qsq"], table["a"], table["b"],
        params["masses"], tol=params.get("tol", 1e-9),
    )
    report["shell_values"] = [
        {"mass": m, "value": v} for m, v in sorted(report["shell_values"].items())
    ]
    return {"stability.json": _json_bytes(report)}, EXIT_OK


# ---------------------------------------------------------------------------
# reproduce: canned configs for the shipped reference experiments

def _reproduce_plan(figure):
    if figure == "fig3":
        return [
            (
                "fig3_",
                {
                    "subcommand": "landscape",
                    "params": {
                        "family": "triangle",
                        "start": 2.0 / 3.0,
                        "stop": 0.9,
                        "num": 71,
                        "mu": 0.5,
                    },
                    "seeds": [],
                },
            )
        ]
    if figure == "fig5":
        return [
            (
                "fig5_",
                {
                    "subcommand": "lattice",
                    "params": {
                        "n_t": 8,
                        "n_r": 6,
                        "states": [
                            {"omega": -1, "k": 1},
                            {"omega": -2, "k": 2},
                        ],
                        "weights": "sphere",
                        "scan": {"start": -2.5, "stop": 2.5, "num": 61},
                    },
                    "seeds": [],
                },
            )
        ]
    if figure == "fig1-2":
        return [
            (
                f"m{m}_",
                {
                    "subcommand": "pauli-vectors",
                    "params": {"m": m},
                    "seeds": list(range(8)),
                },
            )
            for m in (4, 5, 8, 9)
        ]
    raise CliError(EXIT_VALIDATION, f"unknown figure {figure!r}; have {FIGURES}")


# ---------------------------------------------------------------------------
# orchestration

def _dispatch(config, tol, config_dir):
    sub = config["subcommand"]
    params = config["params"]
    seeds = config.get("seeds", [])
    handlers = {
        "minimize": _run_minimize,
        "pauli-vectors": _run_pauli_vectors,
        "classify-causal": _run_classify_causal,
        "landscape": _run_landscape,
        "lattice": _run_lattice,
        "lightcone-check": _run_lightcone_check,
    }
    if sub == "state-stability":
        return _run_state_stability(params, seeds, tol, config_dir)
    return handlers[sub](params, seeds, tol)


def _resolve_tolerances(config, override_path):
    merged = dict(config.get("tolerances", {}))
    if override_path is not None:
        try:
            with open(override_path) as fh:
                overrides = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_VALIDATION, f"cannot read tolerances: {exc}")
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_VALIDATION, f"tolerances file not valid JSON: {exc}")
        try:
            jsonschema.validate(overrides, _TOLERANCE_BLOCK)
        except jsonschema.ValidationError as exc:
            raise CliError(EXIT_VALIDATION, f"tolerances invalid: {exc.message}")
        merged.update(overrides)
    return DEFAULT.with_(**merged), merged


def _resolve_out(cli_out, config):
    if cli_out is not None:
        return Path(cli_out)
    if "out" in config:
        return Path(config["out"])
    root = os.environ.get("DSTLAB_OUT")
    if root:
        return Path(root) / config["subcommand"]
    return Path("dstlab-out") / config["subcommand"]


def _write_run(outdir, config, outputs, status):
    outdir.mkdir(parents=True, exist_ok=True)
    index = []
    for name in sorted(outputs):
        payload = outputs[name]
        (outdir / name).write_bytes(payload)
        index.append(
            {
                "path": name,
                "sha256": hashlib.sha256(payload).hexdigest(),
                "bytes": len(payload),
            }
        )
    manifest = {
        "config_sha256": _config_hash(config),
        "subcommand": config["subcommand"],
        "seeds": config.get("seeds", []),
        "tool": {"name": "dstlab", "version": __version__},
        "rng": {"algorithm": RNG_ALGORITHM},
        "platform": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "system": platform.platform(),
        },
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "status": status,
        "outputs": index,
    }
    (outdir / "manifest.json").write_bytes(_json_bytes(manifest))


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_VALIDATION, f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_VALIDATION, f"config is not valid JSON: {exc}")


def _run_single(config, args, config_dir):
    _validate(config)
    if args.seed_list is not None:
        config = dict(config, seeds=args.seed_list)
    tol, merged = _resolve_tolerances(config, args.tolerances)
    if merged:
        config = dict(config, tolerances=merged)
    outdir = _resolve_out(args.out, config)
    try:
        outputs, code = _dispatch(config, tol, config_dir)
    except CliError:
        raise
    except (GridCoverage,) as exc:
        raise CliError(EXIT_VALIDATION, str(exc))
    except InfeasibleKappa as exc:
        raise CliError(EXIT_NUMERICAL, str(exc))
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        raise CliError(EXIT_NUMERICAL, str(exc))
    status = "divergence" if code == EXIT_DIVERGENCE else "ok"
    _write_run(outdir, config, outputs, status)
    return code


def _run_reproduce(args):
    plan = _reproduce_plan(args.figure)
    outdir = Path(args.out) if args.out is not None else None
    if outdir is None:
        root = os.environ.get("DSTLAB_OUT")
        outdir = (Path(root) if root else Path("dstlab-out")) / "reproduce" / args.figure
    combined = {}
    worst = EXIT_OK
    for prefix, config in plan:
        _validate(config)
        tol = DEFAULT
        outputs, code = _dispatch(config, tol, Path.cwd())
        worst = max(worst, code)
        for name, payload in outputs.items():
            combined[prefix + name] = payload
    manifest_config = {
        "subcommand": "reproduce",
        "params": {"figure": args.figure},
        "seeds": [],
    }
    # reuse the standard writer; the manifest hashes the canned request
    _write_run(outdir, manifest_config, combined, "ok" if worst == EXIT_OK else "divergence")
    return worst


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dstlab",
        description="batch experiments on discrete fermion systems",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed-list", nargs="+", type=int, default=None,
                       help="override the config's seed list")
        p.add_argument("--tolerances", help="JSON file with tolerance overrides")

    for name in sorted(PARAM_SCHEMAS):
        add_common(sub.add_parser(name))

    rep = sub.add_parser("reproduce", help="run a canned reference experiment")
    rep.add_argument("--figure", required=True,
                     help="one of: " + ", ".join(FIGURES))
    rep.add_argument("--out", help="output directory")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "reproduce":
            return _run_reproduce(args)
        config_path = Path(args.config)
        config = _load_config(config_path)
        if config.get("subcommand") != args.subcommand:
            raise CliError(
                EXIT_VALIDATION,
                f"config is for {config.get('subcommand')!r}, "
                f"invoked as {args.subcommand!r}",
            )
        return _run_single(config, args, config_path.resolve().parent)
    except CliError as exc:
        print(f"dstlab: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
