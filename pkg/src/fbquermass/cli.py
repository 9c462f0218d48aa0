"""Command-line harness.

Every subcommand takes an optional JSON config document (``--config``); flags
given on the command line override its entries. Exit status: 0 all checks
pass, 1 a mathematical check failed, 2 configuration or input error,
3 the flow did not converge.
"""
import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .capref import cap_monotonicity_table
from .errors import GeometryError, MonotonicityViolation, NotStrictlyConvex
from .flow import FlowConfig, run
from .harness import CorpusSpec, identity_corpus, verify_corpus
from .identities import heintze_karcher, minkowski_residual
from .quermass import gauss_bonnet_check, quermass_vector
from .surface import AxisymmetricSurface, geometry_eval

log = logging.getLogger("fbquermass")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 2
    M: int = 256
    seed: int = 0
    corpus: int = 1
    R_grid: list = None
    R_min: float = 0.5
    R_max: float = 2.0
    amplitude: float = 0.2
    modes: int = 4
    surface: str = None
    out: str = None
    summary: str = None
    with_flow: bool = False
    workers: int = 1
    tol_gap: float = 1e-8
    tol_identity: float = 1e-4
    tol_cap: float = 1e-4
    tol_Wn: float = 1e-3
    t_max: float = 50.0
    dt_safety: float = 0.5
    method: str = "bdf"
    record_every: int = 10

    def validate(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.M < 6 or self.M % 2:
            raise ConfigError("M (--grid-size) must be an even integer >= 6")
        if self.corpus < 1:
            raise ConfigError("corpus size must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.R_grid is not None:
            if len(self.R_grid) == 0:
                raise ConfigError("R_grid is empty")
            grid = np.asarray(self.R_grid, dtype=float)
            if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
                raise ConfigError("R_grid must be positive and strictly increasing")
        if not 0 < self.R_min < self.R_max:
            raise ConfigError("need 0 < R_min < R_max")
        if not 0 <= self.amplitude < 1:
            raise ConfigError("amplitude must lie in [0, 1)")
        return self

    def corpus_spec(self):
        return CorpusSpec(self.n, self.M, self.R_min, self.R_max, self.amplitude, self.modes)

    def flow_config(self):
        try:
            return FlowConfig(t_max=self.t_max, dt_safety=self.dt_safety, tol_cap=self.tol_cap,
                              tol_Wn=self.tol_Wn, method=self.method,
                              record_every=self.record_every)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def seeds(self):
        return list(range(self.seed, self.seed + self.corpus))


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_config(path, overrides):
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise ConfigError(str(exc)) from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(data) - set(_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig()
    for key, value in data.items():
        kind = _TYPES[key]
        try:
            if kind is int and not isinstance(value, bool):
                if float(value) != int(value):
                    raise ValueError
                value = int(value)
            elif kind is float:
                value = float(value)
            elif kind is bool and not isinstance(value, bool):
                raise ValueError
            elif kind is list and value is not None and not isinstance(value, list):
                raise ValueError
            elif kind is str and value is not None:
                value = str(value)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r} has invalid value {value!r}") from None
        setattr(cfg, key, value)
    return cfg.validate()


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else str(float(obj))
    return obj


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(fmt(v) if not isinstance(v, str) else v for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def load_surface(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        return AxisymmetricSurface.from_json(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def cmd_caps(cfg):
    grid = cfg.R_grid if cfg.R_grid is not None else list(np.geomspace(0.1, 10.0, 21))
    n = cfg.n
    columns = []
    status = EXIT_OK
    for k in range(n + 2):
        try:
            columns.append(cap_monotonicity_table(n, k, grid))
        except MonotonicityViolation as exc:
            log.error("%s", exc)
            status = EXIT_CHECK
            columns.append(cap_monotonicity_table(n, k, grid, strict=False)
                           if k > n else np.full(len(grid), np.nan))
    rows = [[R] + [col[i] for col in columns] for i, R in enumerate(grid)]
    _emit(_csv(["R"] + [f"f_{k}" for k in range(n + 2)], rows), cfg.out)
    return status


def evaluate_document(surface, tol_identity=1e-4):
    fld = geometry_eval(surface)
    qv = quermass_vector(fld)
    gb = gauss_bonnet_check(fld)
    doc = {"quermass": qv.to_dict(), "gauss_bonnet": asdict(gb),
           "minkowski": [minkowski_residual(fld, k, tol_identity).row()
                         for k in range(1, surface.n + 1)]}
    if np.all(fld.mean_curvature > 0):
        doc["heintze_karcher"] = heintze_karcher(fld).row()
    else:
        doc["heintze_karcher"] = None
    return doc


def cmd_evaluate(cfg):
    if not cfg.surface:
        raise ConfigError("evaluate needs a surface file")
    surface = load_surface(cfg.surface)
    doc = evaluate_document(surface, cfg.tol_identity)
    _emit(json.dumps(_jsonable(doc), indent=2) + "\n", cfg.out)
    ok = all(m["passed"] for m in doc["minkowski"])
    if doc["heintze_karcher"] is not None:
        ok = ok and doc["heintze_karcher"]["passed"]
    return EXIT_OK if ok else EXIT_CHECK


def cmd_flow(cfg):
    surface = load_surface(cfg.surface) if cfg.surface else cfg.corpus_spec().surface(cfg.seed)
    fld = geometry_eval(surface)
    if not fld.is_strictly_convex:
        raise NotStrictlyConvex("initial surface is not strictly convex")
    trace = run(surface, cfg.flow_config())
    _emit(trace.to_csv(), cfg.out)
    summary = trace.summary(None if cfg.surface else cfg.seed)
    text = json.dumps(_jsonable(summary), indent=2) + "\n"
    if cfg.summary:
        _emit(text, cfg.summary)
    else:
        sys.stderr.write(text)
    if trace.aborted:
        return EXIT_CHECK
    if not trace.converged:
        log.error("no convergence by t = %g; best cap fit R = %g, residual %g",
                  trace.times[-1], trace.terminal_R, trace.terminal_residual)
        return EXIT_NONCONVERGED
    return EXIT_OK if all(trace.checks.values()) else EXIT_CHECK


def cmd_verify(cfg):
    reports = verify_corpus(cfg.corpus_spec(), cfg.seeds, cfg.tol_gap, cfg.with_flow,
                            cfg.flow_config() if cfg.with_flow else None, cfg.workers)
    n = cfg.n
    header = (["n", "seed"] + [f"W_{k}" for k in range(n + 2)] + [f"gap_{k}" for k in range(n)]
              + [f"unc_{k}" for k in range(n)] + ["deficit", "gb_residual"])
    if cfg.with_flow:
        header += ["terminal_R", "chain_ok"]
    header += ["verdict", "error"]
    rows = []
    for r in reports:
        row = [n, r.seed, *r.W, *r.gaps, *r.uncertainty, r.deficit, r.gb_residual]
        if cfg.with_flow:
            row += [r.flow.get("terminal_R", np.nan), bool(r.flow.get("chain_ok", False))]
        row += ["pass" if r.passed else "fail", r.error.replace(",", ";")]
        rows.append(row)
    _emit(_csv(header, rows), cfg.out)
    failed = [r.seed for r in reports if not r.passed]
    if failed:
        log.error("inequality check failed for seeds %s", failed)
        return EXIT_CHECK
    return EXIT_OK


def cmd_identities(cfg):
    results = identity_corpus(cfg.corpus_spec(), cfg.seeds, cfg.tol_identity, cfg.workers)
    rows = []
    for seed, reports in results:
        for rep in reports:
            rows.append([cfg.n, seed, rep.name, rep.lhs, rep.rhs, rep.residual, rep.tol, rep.passed])
    _emit(_csv(["n", "seed", "name", "lhs", "rhs", "residual", "tol", "passed"], rows), cfg.out)
    worst = {}
    for row in rows:
        worst[row[2]] = max(worst.get(row[2], 0.0), row[5])
    fails = sum(not row[7] for row in rows)
    for name, value in sorted(worst.items()):
        sys.stderr.write(f"{name:>16}: worst residual {value:.3e}\n")
    sys.stderr.write(f"{len(rows) - fails}/{len(rows)} identity checks passed\n")
    return EXIT_CHECK if fails else EXIT_OK


COMMANDS = {"caps": cmd_caps, "evaluate": cmd_evaluate, "flow": cmd_flow,
            "verify": cmd_verify, "identities": cmd_identities}


def build_parser():
    parser = argparse.ArgumentParser(prog="fbquermass", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--n", type=int)
        p.add_argument("--grid-size", dest="M", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--corpus", type=int, help="number of consecutive seeds")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--workers", type=int)
        p.add_argument("--tol-gap", dest="tol_gap", type=float)
        p.add_argument("--tol-identity", dest="tol_identity", type=float)
        p.add_argument("--tol-cap", dest="tol_cap", type=float)
        p.add_argument("--tol-wn", dest="tol_Wn", type=float)
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "caps":
            p.add_argument("--r-grid", dest="R_grid", type=float, nargs="*")
        if name == "evaluate":
            p.add_argument("surface", nargs="?")
        if name == "flow":
            p.add_argument("--surface")
            p.add_argument("--summary", help="summary JSON path (default: stderr)")
            p.add_argument("--t-max", dest="t_max", type=float)
            p.add_argument("--method", choices=["bdf", "rk2"])
        if name == "verify":
            p.add_argument("--with-flow", dest="with_flow", action="store_true", default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "verbose")}
    try:
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except GeometryError as exc:
        log.error("input error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
