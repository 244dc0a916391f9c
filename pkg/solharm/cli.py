"""
Command Line Module (:mod:`solharm.cli`)
========================================

Batch front end. A run is described by one JSON document

.. code-block:: json

   {"system": {"kind": "circle", "N": 2},
    "filter": {"name": "haar"},
    "command": "tree",
    "params": {"root": 0.1234477851, "depth": 4},
    "seed": 0,
    "output": {"path": null, "format": "csv"}}

given by ``--config`` (file name or inline JSON) and overridden by per-field
flags. Exit status is ``0`` on success, ``1`` if a check fails and ``2`` on
configuration errors.


Examples
--------
.. code-block:: shell

   solharm tree --root 0.1234477851 --depth 4 --filter haar
   solharm verify --suite all --filter haar --N 2 --seed 7
   solharm decompose --b0 "0,0.45;0.55,1" --samples 20000 --length 32
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import wblog

from . import boundary, decomp, dynsys, filter as filt, harmonic, solenoid, tree
from .dynsys import ArcSet, SystemSpec
from .errors import ConfigError, SolharmError
from .filter import FilterSpec
from .util import enable_debug, worker_count
from .verify import SUITES, CheckResult, build_suites, run_suites

__all__ = [
    "COMMANDS",
    "RunConfig",
    "load_document",
    "parse_args",
    "run",
    "main",
]

logger = wblog.getLogger()

DEFAULT_ROOT = 0.1234477851

COMMANDS: Dict[str, Tuple[str, ...]] = {
    "verify": ("suite",),
    "tree": ("root", "depth"),
    "walk": ("root", "length", "paths"),
    "martin": ("root", "depth"),
    "harmonic": ("root", "depth", "h"),
    "lyapunov": (),
    "decay": ("b0", "m_max", "n0", "b"),
    "decompose": ("b0", "samples", "length"),
}

PARAM_TYPES: Dict[str, type] = {
    "suite": str,
    "root": float,
    "depth": int,
    "length": int,
    "paths": int,
    "h": str,
    "b0": str,
    "m_max": int,
    "n0": int,
    "b": float,
    "samples": int,
}

DEFAULTS: Dict[str, Any] = {
    "suite": "all",
    "root": DEFAULT_ROOT,
    "depth": 4,
    "length": 32,
    "paths": 1,
    "h": "solve",
    "b0": "0,0.4;0.6,1",
    "m_max": 10,
    "n0": 3,
    "b": None,
    "samples": 20000,
}

TOP_KEYS = ("system", "filter", "command", "params", "seed", "output")
SYSTEM_KEYS = ("kind", "N", "panels", "nodes", "tree")
FILTER_KEYS = ("name", "coeffs_re", "coeffs_im")
OUTPUT_KEYS = ("path", "format")
FORMATS = ("csv", "json")
H_CHOICES = ("solve", "one", "cos")


def _reject_unknown(section: str, doc: Mapping, allowed: Sequence[str]):
    if not isinstance(doc, Mapping):
        raise ConfigError(section or "config", "must be a JSON object")
    for k in doc:
        if k not in allowed:
            raise ConfigError(f"{section}.{k}" if section else k, "unknown key")


def _typed(key: str, value: Any, kind: type) -> Any:
    if value is None:
        return None
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(key, f"must be integer, but {value!r}")
    if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise ConfigError(key, f"must be number, but {value!r}")
    if kind is str and not isinstance(value, str):
        raise ConfigError(key, f"must be string, but {value!r}")
    return kind(value)


@dataclass
class RunConfig:
    """
    Validated run configuration

    Attributes
    ----------
    system : solharm.dynsys.SystemSpec
        System
    filter : solharm.filter.FilterSpec
        Filter
    command : str
        Command name
    params : dict
        Command parameters with defaults filled in
    seed : int
        Random seed
    path : str, optional
        Output file. Standard output if ``None``.
    format : {"csv", "json"}
        Output format of tables
    """
    system: SystemSpec
    filter: FilterSpec
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    path: Optional[str] = None
    format: str = "csv"

    @classmethod
    def from_dict(cls, doc: Mapping) -> RunConfig:
        """
        Validate a configuration document

        Parameters
        ----------
        doc : mapping
            Parsed JSON document

        Returns
        -------
        solharm.cli.RunConfig
            Configuration

        Raises
        ------
        solharm.errors.ConfigError
            If a key is unknown, missing or invalid. The error names the key.
        """
        _reject_unknown("", doc, TOP_KEYS)

        command = doc.get("command")
        if command is None:
            raise ConfigError("command", "is required")
        if command not in COMMANDS:
            raise ConfigError("command", f"must be one of {sorted(COMMANDS)}, but {command!r}")

        sys_doc = doc.get("system", {})
        _reject_unknown("system", sys_doc, SYSTEM_KEYS)
        try:
            system = SystemSpec.from_config(sys_doc)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError("system", str(e))

        f_doc = doc.get("filter", {"name": "haar"})
        _reject_unknown("filter", f_doc, FILTER_KEYS)
        try:
            f = FilterSpec.from_config(f_doc, system.N)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError("filter", str(e))

        p_doc = doc.get("params", {})
        _reject_unknown("params", p_doc, COMMANDS[command])
        params = {k: DEFAULTS[k] for k in COMMANDS[command]}
        for k, v in p_doc.items():
            params[k] = _typed(f"params.{k}", v, PARAM_TYPES[k])
        _check_params(command, params)

        seed = _typed("seed", doc.get("seed", 0), int)

        out = doc.get("output", {})
        _reject_unknown("output", out, OUTPUT_KEYS)
        path = out.get("path")
        if path is not None and not isinstance(path, str):
            raise ConfigError("output.path", f"must be string, but {path!r}")
        fmt = out.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError("output.format", f"must be one of {FORMATS}, but {fmt!r}")

        logger.debug(f"RunConfig(command={command}, params={params}, seed={seed})")
        return cls(system, f, command, params, seed, path, fmt)


def _check_params(command: str, params: Dict[str, Any]):
    for k in ("depth", "length", "paths", "samples", "m_max", "n0"):
        if k in params and params[k] is not None:
            low = 0 if k == "depth" else 1
            if params[k] < low:
                raise ConfigError(f"params.{k}", f"must be at least {low}, but {params[k]}")
    if "b0" in params:
        try:
            params["b0"] = ArcSet.parse(params["b0"])
        except ValueError as e:
            raise ConfigError("params.b0", str(e))
    if command == "decay" and params["m_max"] <= params["n0"]:
        raise ConfigError("params.m_max", f"must exceed n0={params['n0']}, " +
                          f"but {params['m_max']}")
    if "b" in params and params["b"] is not None and not (0 < params["b"] < 1):
        raise ConfigError("params.b", f"must be in (0, 1), but {params['b']}")
    if "h" in params and params["h"] not in H_CHOICES:
        raise ConfigError("params.h", f"must be one of {H_CHOICES}, but {params['h']!r}")
    if command == "verify":
        names = params["suite"].split(",")
        unknown = [n for n in names if n != "all" and n not in SUITES]
        if unknown:
            raise ConfigError("params.suite", f"unknown suite(s) {unknown}")


def load_document(text: str) -> Dict[str, Any]:
    """
    Load a configuration document

    Parameters
    ----------
    text : str
        File name or inline JSON

    Returns
    -------
    dict
        Parsed document

    Raises
    ------
    solharm.errors.ConfigError
        If the document can't be read or parsed.
    """
    try:
        if os.path.isfile(text):
            with open(text, encoding="utf-8") as fp:
                return json.load(fp)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("config", f"cannot load {text!r}: {e}")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser("solharm", description="Wavelet representations on solenoids")
    p.add_argument("command", nargs="?", choices=sorted(COMMANDS), help="command")
    p.add_argument("--config", help="JSON file or inline JSON document")
    p.add_argument("--filter", help="bundled filter name")
    p.add_argument("--N", type=int, help="branching of r(t) = N t mod 1")
    p.add_argument("--root", type=float, help="tree or walk root")
    p.add_argument("--depth", type=int, help="tree depth")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--samples", type=int, help="# of Monte Carlo samples")
    p.add_argument("--length", type=int, help="walk / solenoid window length")
    p.add_argument("--paths", type=int, help="# of walks")
    p.add_argument("--suite", help="verify suite(s), comma separated or 'all'")
    p.add_argument("--b0", help="arc list such as '0,0.45;0.55,1'")
    p.add_argument("--m-max", type=int, dest="m_max", help="largest m of decay sweep")
    p.add_argument("--out", help="output file")
    p.add_argument("--format", choices=FORMATS, help="table format")
    p.add_argument("--debug", action="store_true")
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> Tuple[RunConfig, bool]:
    """
    Build a configuration from command line arguments

    Returns
    -------
    config : solharm.cli.RunConfig
        Validated configuration
    debug : bool
        Whether ``--debug`` was given

    Raises
    ------
    solharm.errors.ConfigError
        If the configuration is invalid.
    """
    a = _parser().parse_args(argv)
    doc: Dict[str, Any] = load_document(a.config) if a.config else {}
    if not isinstance(doc, dict):
        raise ConfigError("config", "must be a JSON object")

    if a.command is not None:
        doc["command"] = a.command
    if a.filter is not None:
        doc["filter"] = {"name": a.filter}
    if a.N is not None:
        doc["system"] = {**doc.get("system", {}), "N": a.N}
    if a.seed is not None:
        doc["seed"] = a.seed

    out = dict(doc.get("output", {}))
    if a.out is not None:
        out["path"] = a.out
    if a.format is not None:
        out["format"] = a.format
    if out:
        doc["output"] = out

    allowed = COMMANDS.get(doc.get("command", ""), ())
    params = dict(doc.get("params", {}))
    for k in ("root", "depth", "samples", "length", "paths", "suite", "b0", "m_max"):
        v = getattr(a, k)
        if v is None:
            continue
        if k not in allowed:
            logger.warning(f"--{k.replace('_', '-')} is ignored by {doc.get('command')!r}")
            continue
        params[k] = v
    if params:
        doc["params"] = params

    return RunConfig.from_dict(doc), a.debug


Table = Tuple[Sequence[str], List[Sequence[Any]]]


def _cell(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v if isinstance(v, str) else str(v)


def _render(cfg: RunConfig, table: Optional[Table], doc: Optional[Dict]) -> str:
    buf = io.StringIO()
    if table is not None and (cfg.format == "csv" or doc is None):
        header, rows = table
        if cfg.format == "csv":
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows([[_cell(c) for c in r] for r in rows])
        else:
            for r in rows:
                buf.write(json.dumps(dict(zip(header, (_cell(c) for c in r))),
                                     sort_keys=True) + "\n")
    else:
        buf.write(json.dumps(doc, sort_keys=True) + "\n")
    return buf.getvalue()


def _root(cfg: RunConfig):
    if cfg.system.is_circle:
        return cfg.params["root"]
    return cfg.system.source.root  # type: ignore


def _cmd_verify(cfg: RunConfig) -> Tuple[int, str]:
    suites = build_suites(cfg.params["suite"].split(","), cfg.system, cfg.filter, cfg.seed)
    results = run_suites(suites)
    failed = [r.check for r in results if not r.passed]
    for name in failed:
        sys.stderr.write(f"FAILED: {name}\n")
    return (1 if failed else 0), "".join(r.to_json() + "\n" for r in results)


def _cmd_tree(cfg: RunConfig) -> Tuple[int, Table]:
    T = tree.build_tree(cfg.system, cfg.filter, _root(cfg), cfg.params["depth"])
    return 0, (("id", "parent", "depth", "point", "W", "Wn", "D"), T.to_rows())


def _cmd_walk(cfg: RunConfig) -> Tuple[int, Table]:
    s, f = cfg.system, cfg.filter
    paths = boundary.sample_paths(s, f, _root(cfg), cfg.params["length"],
                                  cfg.params["paths"], cfg.seed)
    rows = []
    for p in paths:
        cum = 1.0
        for k, x in enumerate(p):
            w = filt.eval_w(f if s.is_circle else None, s, x)
            if k > 0:
                cum *= float(w)
            rows.append((k, x, w, cum))
    return 0, (("step", "point", "W", "cumulative_product"), rows)


def _cmd_martin(cfg: RunConfig) -> Tuple[int, Table]:
    T = tree.build_tree(cfg.system, cfg.filter, _root(cfg), cfg.params["depth"])
    G = tree.green_matrix(T)
    K = tree.martin_matrix(T)
    rows = []
    for x in range(len(T)):
        for y in range(len(T)):
            rho, tail = tree.martin_metric(T, x, y)
            rows.append((x, y, G[x, y], K[x, y], rho, tail))
    return 0, (("x", "y", "green", "K", "rho", "tail"), rows)


def _harmonic_h(cfg: RunConfig):
    h = cfg.params["h"]
    if h == "one":
        return lambda t: np.ones(np.shape(t))
    if h == "cos":
        return lambda t: np.cos(2 * np.pi * np.asarray(t))
    basis = filt.rw_harmonic_solve(cfg.filter, cfg.system, max(8, cfg.filter.K))
    if not basis:
        raise SolharmError(f"No R_W-harmonic polynomial for filter {cfg.filter.name}")
    return basis[0]


def _cmd_harmonic(cfg: RunConfig) -> Tuple[int, Table]:
    cfg.system.require_circle("harmonic")
    rep = harmonic.rw_harmonic_family(cfg.system, cfg.filter, _harmonic_h(cfg),
                                      [_root(cfg)], cfg.params["depth"])
    T = rep.trees[0]
    nu = harmonic.NodeFunction(T, rep.nus[0].values, "additive")
    u = harmonic.NodeFunction(T, nu.values / T.Wn, "p-harmonic")
    rows = []
    for g in (nu, u):
        res = g.residuals()
        for i in range(len(T)):
            rows.append((i, T.points[i], int(T.level[i]), g.values[i], g.role, res[i]))
    worst = max(float(nu.residuals().max()), float(u.residuals().max()))
    return (0 if worst < 1e-9 else 1), (("id", "point", "depth", "value", "role", "residual"),
                                        rows)


def _cmd_lyapunov(cfg: RunConfig) -> Tuple[int, Table, Dict]:
    rep = filt.lyapunov(cfg.filter, cfg.system)
    doc = {"filter": cfg.filter.name, "value": rep.value, "error": rep.error,
           "jensen": rep.jensen}
    table = (("filter", "value", "error", "jensen"),
             [(cfg.filter.name, rep.value, rep.error, rep.jensen)])
    return (0 if rep.jensen else 1), table, doc


def _cmd_decay(cfg: RunConfig) -> Tuple[int, Table, Dict]:
    A0 = cfg.params["b0"].complement()
    m_max, n0 = cfg.params["m_max"], cfg.params["n0"]
    ms = list(range(1, m_max + 1))
    p = [decomp.visit_probability(cfg.system, cfg.filter, A0, m) for m in ms]
    fit = decomp.fit_decay_rate(ms[n0 - 1:], p[n0 - 1:])
    b = cfg.params["b"] if cfg.params["b"] is not None else fit.b
    audit = decomp.audit_threshold(cfg.system, cfg.filter, A0, n0, b, m_max)
    rows = [(m, pm, fit.C * fit.b ** m) for m, pm in zip(ms, p)]
    doc = {"A0": str(A0),
           "probabilities": [float(x) for x in p],
           "fit": {"b": fit.b, "C": fit.C, "slope": fit.slope},
           "audit": {"b": float(b), "n0": n0, "violations": audit.violations,
                     "total": audit.total, "fraction": audit.fraction}}
    return 0, (("m", "probability", "fitted"), rows), doc


def _cmd_decompose(cfg: RunConfig) -> Tuple[int, Dict]:
    s, f = cfg.system, cfg.filter
    B0: ArcSet = cfg.params["b0"]
    n, L = cfg.params["samples"], cfg.params["length"]
    hist = decomp.domain_shift_stat(s, f, B0, n, L, cfg.seed)
    xi = solenoid.ArcCylinder([ArcSet([(0.05, 0.2)]), ArcSet([(0.02, 0.3)])])
    psi = decomp.psi_isometry_check(s, f, xi, B0, range(-2, 3), n, cfg.seed + 1, length=L)

    Z = solenoid.sample_mu_inf_batch(s, f, min(n, 100), length=L, seed=cfg.seed + 2)
    periodic = [decomp.non_periodic(Z[i]) for i in range(len(Z))]
    npf = sum(r.non_periodic for r in periodic) / len(periodic)

    z = abs(psi.diff.mean) / max(psi.diff.stderr, 1e-300)
    checks = [CheckResult("decompose.psi_isometry", float(z), 4.0, psi.passed),
              CheckResult("decompose.non_periodic", float(npf), 1.0, npf == 1.0)]
    doc = {"histogram": hist.to_dict(),
           "psi": {"lhs": psi.lhs.mean.real, "rhs": psi.rhs.mean.real,
                   "diff": psi.diff.mean.real, "stderr": psi.diff.stderr,
                   "undecided": psi.undecided},
           "checks": [c.to_dict() for c in checks]}
    for c in checks:
        if not c.passed:
            sys.stderr.write(f"FAILED: {c.check}\n")
    return (0 if all(c.passed for c in checks) else 1), doc


def run(config: RunConfig) -> int:
    """
    Execute a run

    Parameters
    ----------
    config : solharm.cli.RunConfig
        Validated configuration

    Returns
    -------
    int
        Exit status, ``0`` on success, ``1`` on failed checks
        or library errors and ``2`` on an invalid environment.
    """
    cmd = config.command
    logger.debug(f"run: {cmd}")
    try:
        logger.debug(f"run: {worker_count()} workers")
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return 2

    try:
        if cmd == "verify":
            status, text = _cmd_verify(config)
        elif cmd in ("tree", "walk", "martin", "harmonic"):
            status, table = {"tree": _cmd_tree, "walk": _cmd_walk,
                             "martin": _cmd_martin, "harmonic": _cmd_harmonic}[cmd](config)
            text = _render(config, table, None)
        elif cmd in ("lyapunov", "decay"):
            status, table, doc = {"lyapunov": _cmd_lyapunov, "decay": _cmd_decay}[cmd](config)
            text = _render(config, table, doc if config.format == "json" else None)
        else:
            status, doc = _cmd_decompose(config)
            text = _render(config, None, doc)
    except SolharmError as e:
        sys.stderr.write(f"{cmd}: {type(e).__name__}: {e}\n")
        return 1

    if config.path is None:
        sys.stdout.write(text)
    else:
        with open(config.path, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Console entry point

    Returns
    -------
    int
        Exit status
    """
    try:
        cfg, debug = parse_args(argv)
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return 2
    if debug:
        enable_debug()
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
