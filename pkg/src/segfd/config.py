"""Flat ``key = value`` run configuration.

Recognised keys::

    benchmark, m, a, N, ladder, strategy, tol, max_iters, out, format
    dynamics.<l>.kind      zero | constant | spatial | affine
    dynamics.<l>.c         source constant
    dynamics.<l>.lambda    rate in s (affine only)
    dynamics.<l>.file      i,j,value CSV with the nodal source
    boundary.<l>.file      side,k,value CSV with the boundary trace

``<l>`` counts components from 1. Lines starting with ``#`` are comments.
Unknown keys are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from segfd.benchmarks import BENCHMARKS, get_benchmark
from segfd.dynamics import (
    KINDS,
    BoundarySpec,
    DynamicsSpec,
    ProblemSpec,
    load_boundary_table,
    load_nodal_table,
    zero_trace,
)
from segfd.solver import SolverConfig, Strategy

FORMATS = ("csv", "json", "pgm")
SCALAR_KEYS = ("benchmark", "m", "a", "N", "ladder", "strategy", "tol", "max_iters", "out", "format")
_COMPONENT_KEY = re.compile(r"^(dynamics)\.(\d+)\.(kind|c|lambda|file)$|^(boundary)\.(\d+)\.(file)$")


class ConfigError(ValueError):
    """Invalid run configuration; ``problems`` lists every issue found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class RunConfig:
    benchmark: str | None = None
    m: int | None = None
    a: float = 1.0
    N: int | None = None
    ladder: list | None = None
    strategy: Strategy = Strategy.GAUSS_SEIDEL
    tol: float = 1e-10
    max_iters: int | None = None
    out: str = "out"
    formats: tuple = ("csv", "json")
    dynamics: dict = field(default_factory=dict)
    boundary_files: dict = field(default_factory=dict)
    base_dir: Path = Path(".")
    problem: ProblemSpec | None = None

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(strategy=self.strategy, tol=self.tol, max_iters=self.max_iters)


def _split(document: str) -> tuple[dict, list]:
    raw, problems = {}, []
    for lineno, line in enumerate(document.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            problems.append(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw, problems


def _ints(text: str) -> list:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def parse_config(document: str, overrides: dict | None = None, base_dir=".", require_resolution: bool = True) -> RunConfig:
    """Parse and validate a configuration document.

    ``overrides`` holds command-line values keyed like the document; giving
    ``N`` there drops any ``ladder`` from the document and vice versa.
    """
    raw, problems = _split(document)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "N":
            raw.pop("ladder", None)
        if key == "ladder":
            raw.pop("N", None)
        raw[key] = str(value)

    cfg = RunConfig(base_dir=Path(base_dir))
    for key, value in raw.items():
        try:
            if key in SCALAR_KEYS:
                _set_scalar(cfg, key, value)
                continue
            match = _COMPONENT_KEY.match(key)
            if not match:
                problems.append(f"unknown key {key!r}")
                continue
            if match.group(1):
                l, attr = int(match.group(2)), match.group(3)
                cfg.dynamics.setdefault(l, {})[attr] = value
            else:
                cfg.boundary_files[int(match.group(5))] = value
        except ValueError as exc:
            problems.append(f"{key}: {exc}")

    if cfg.N is not None and cfg.ladder is not None:
        problems.append("both N and ladder given; use exactly one")
    if require_resolution and cfg.N is None and cfg.ladder is None:
        problems.append("missing key: N or ladder")

    missing = []
    if cfg.benchmark is None:
        if cfg.m is None:
            missing.append("m")
        else:
            missing += [f"dynamics.{l}.kind" for l in range(1, cfg.m + 1) if "kind" not in cfg.dynamics.get(l, {})]
    elif cfg.benchmark not in BENCHMARKS:
        problems.append(f"no such benchmark: {cfg.benchmark!r}")
    if missing:
        problems.append("missing keys: " + ", ".join(missing))
    if cfg.m is not None:
        extra = sorted(l for l in list(cfg.dynamics) + list(cfg.boundary_files) if not 1 <= l <= cfg.m)
        if extra:
            problems.append(f"component index out of range 1..{cfg.m}: {extra}")
    if problems:
        raise ConfigError(problems)

    try:
        cfg.problem = build_problem(cfg)
    except (ValueError, KeyError, OSError) as exc:
        raise ConfigError([str(exc)]) from exc
    return cfg


def _set_scalar(cfg: RunConfig, key: str, value: str):
    if key == "benchmark":
        cfg.benchmark = value
    elif key == "m":
        cfg.m = int(value)
        if cfg.m < 1:
            raise ValueError("m must be >= 1")
    elif key == "a":
        cfg.a = float(value)
        if not cfg.a > 0:
            raise ValueError("invalid domain")
    elif key == "N":
        cfg.N = int(value)
        if cfg.N < 2:
            raise ValueError("degenerate mesh")
    elif key == "ladder":
        cfg.ladder = _ints(value)
    elif key == "strategy":
        cfg.strategy = Strategy.parse(value)
    elif key == "tol":
        cfg.tol = float(value)
        if not cfg.tol > 0:
            raise ValueError("tolerance must be positive")
    elif key == "max_iters":
        cfg.max_iters = int(value)
        if cfg.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
    elif key == "out":
        cfg.out = value
    elif key == "format":
        formats = tuple(f.strip().lower() for f in value.split(",") if f.strip())
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise ValueError(f"unknown formats {bad}; choose from {list(FORMATS)}")
        cfg.formats = formats


def _dynamics_from(spec: dict, l: int, a: float, base: Path) -> DynamicsSpec:
    kind = spec.get("kind", "").lower()
    if kind not in KINDS:
        raise ValueError(f"dynamics.{l}.kind must be one of {list(KINDS)}, got {kind!r}")
    source = float(spec["c"]) if "c" in spec else 0.0
    if "file" in spec:
        source = load_nodal_table(base / spec["file"], a)
    lam = float(spec.get("lambda", 0.0))
    if kind == "zero":
        return DynamicsSpec("zero", lam=lam)
    if kind == "constant":
        return DynamicsSpec("constant", source, lam)
    if kind == "spatial":
        if not callable(source):
            raise ValueError(f"dynamics.{l}: spatial dynamics needs dynamics.{l}.file")
        return DynamicsSpec("spatial", source, lam, label=spec["file"])
    return DynamicsSpec("affine", source, lam)


def build_problem(cfg: RunConfig) -> ProblemSpec:
    """Materialise the problem described by ``cfg``.

    Dynamics or boundary keys on top of a benchmark replace those
    components and discard the benchmark's exact solution.
    """
    base = cfg.base_dir
    if cfg.benchmark is not None:
        p = get_benchmark(cfg.benchmark, cfg.m)
        if cfg.a != p.a:
            raise ValueError(f"benchmark {cfg.benchmark!r} is defined on a={p.a}")
        if not cfg.dynamics and not cfg.boundary_files:
            return p
        dyn = list(p.dynamics)
        traces = list(p.boundary.traces)
        name = f"{p.name}+overrides"
    else:
        dyn = [None] * cfg.m
        traces = [zero_trace] * cfg.m
        name = "inline"
    for l, spec in cfg.dynamics.items():
        dyn[l - 1] = _dynamics_from(spec, l, cfg.a, base)
    for l, path in cfg.boundary_files.items():
        traces[l - 1] = load_boundary_table(base / path, cfg.a)
    p = ProblemSpec(dynamics=dyn, boundary=BoundarySpec(traces), a=cfg.a, name=name)
    return p if cfg.benchmark is None else replace(p, description=f"{cfg.benchmark} with overrides")


def load_config(path, overrides: dict | None = None, require_resolution: bool = True) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), overrides, path.parent, require_resolution)
