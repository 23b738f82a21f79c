"""Run configuration (strict YAML tree) and layout JSON persistence.

Config schema (version 1):

    version: 1
    seed: 0                      # optional; GDLAYOUT_SEED overrides this default
    graph:
      generator: grid            # grid | tree | dodecahedron ...
      args: [6, 10]
      # or instead of generator/args:
      # file: path.edgelist      # or .mtx for Matrix Market
    criteria:                    # non-empty list
      - kind: ST                 # ST IL NP CR CAM AR ANR VR GB
        weight: 1.0              # constant, or
        # schedule: [[t0, t1, w0, w1], ...]   smooth-step segments
        sample_size: 32          # optional, criterion default otherwise
        ideal_length: 1.0        # IL only, optional
        angular_sensitivity: 1.0 # ANR only, optional
        target_ratio: 1.0        # AR only, optional
        target_resolution: null  # VR only; null -> 1/sqrt(n)
    optimizer:                   # all optional
      maxiter: 20000
      eta: 0.5                   # constant, or smooth-step segments like a
                                 # weight schedule (values must stay > 0)
      method: plain-sgd          # momentum | adaptive-moments | rms-adaptive
      lr_decay: 0.7
      patience: null
      safe_update: null          # "crossings" to guard the crossing count
      quality_every: null
    output:                      # optional
      layout: out/layout.json
      svg: out/drawing.svg
      trace_csv: out/trace.csv
      trace_json: out/trace.json

Unknown keys anywhere are rejected. Layout JSON files look like
{"nodes": [[x, y], ...], "graph": "<name>", "seed": 0, "version": 1} and
round-trip coordinates exactly (shortest round-trip decimal, <= 17
significant digits).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .criteria import KINDS, CriterionConfig
from .graphs import GENERATORS, Graph, load_edge_list, load_matrix_market
from .optimizer import METHODS, OptimizerConfig
from .schedules import Schedule

CONFIG_VERSION = 1
LAYOUT_VERSION = 1


class ConfigError(ValueError):
    """Invalid run configuration."""


def _check_keys(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


@dataclass
class RunConfig:
    graph_spec: dict
    criteria: list = field(default_factory=list)  # raw criterion dicts
    optimizer: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_yaml(cls, text: str) -> "RunConfig":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        _check_keys(
            data, {"version", "seed", "graph", "criteria", "optimizer", "output"}, "config"
        )
        if data.get("version") != CONFIG_VERSION:
            raise ConfigError(f"config version must be {CONFIG_VERSION}")
        graph = data.get("graph")
        if not isinstance(graph, dict):
            raise ConfigError("config needs a graph section")
        _check_keys(graph, {"generator", "args", "file"}, "graph")
        if ("generator" in graph) == ("file" in graph):
            raise ConfigError("graph needs exactly one of generator/file")
        criteria = data.get("criteria")
        if not isinstance(criteria, list) or not criteria:
            raise ConfigError("config needs a non-empty criteria list")
        crit_keys = {
            "kind",
            "weight",
            "schedule",
            "sample_size",
            "ideal_length",
            "angular_sensitivity",
            "target_ratio",
            "target_resolution",
            "extra_fraction",
        }
        for c in criteria:
            if not isinstance(c, dict):
                raise ConfigError("each criterion must be a mapping")
            _check_keys(c, crit_keys, "criterion")
            if c.get("kind") not in KINDS:
                raise ConfigError(f"unknown criterion kind {c.get('kind')!r}")
            if "weight" in c and "schedule" in c:
                raise ConfigError("criterion takes weight or schedule, not both")
        optimizer = data.get("optimizer", {}) or {}
        _check_keys(
            optimizer,
            {
                "maxiter",
                "eta",
                "method",
                "lr_decay",
                "patience",
                "safe_update",
                "quality_every",
                "ema_factor",
                "momentum",
                "crossing_refresh",
            },
            "optimizer",
        )
        if "method" in optimizer and optimizer["method"] not in METHODS:
            raise ConfigError(f"unknown optimizer method {optimizer['method']!r}")
        output = data.get("output", {}) or {}
        _check_keys(output, {"layout", "svg", "trace_csv", "trace_json"}, "output")
        seed = data.get("seed", _default_seed())
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer")
        return cls(
            graph_spec=graph,
            criteria=criteria,
            optimizer=optimizer,
            output=output,
            seed=seed,
        )

    def to_yaml(self) -> str:
        data = {
            "version": CONFIG_VERSION,
            "seed": self.seed,
            "graph": self.graph_spec,
            "criteria": self.criteria,
            "optimizer": self.optimizer,
            "output": self.output,
        }
        return yaml.safe_dump(data, sort_keys=True)

    # ---- materialization -------------------------------------------------

    def build_graph(self) -> Graph:
        spec = self.graph_spec
        if "generator" in spec:
            name = spec["generator"]
            if name not in GENERATORS:
                raise ConfigError(
                    f"unknown generator {name!r}; available: {', '.join(sorted(GENERATORS))}"
                )
            args = spec.get("args", []) or []
            return GENERATORS[name](*args)
        path = Path(spec["file"])
        if not path.exists():
            raise ConfigError(f"graph file not found: {path}")
        text = path.read_text()
        if path.suffix in (".mtx", ".mm"):
            return load_matrix_market(text, name=path.stem)
        return load_edge_list(text, name=path.stem)

    def build_criteria(self) -> list[CriterionConfig]:
        out = []
        for c in self.criteria:
            kwargs = {k: v for k, v in c.items() if k not in ("kind", "weight", "schedule")}
            if "schedule" in c:
                sched = Schedule([tuple(seg) for seg in c["schedule"]])
            else:
                sched = Schedule.constant(float(c.get("weight", 1.0)))
            out.append(CriterionConfig(kind=c["kind"], weight_schedule=sched, **kwargs))
        return out

    def build_optimizer(self) -> OptimizerConfig:
        kwargs = dict(self.optimizer)
        eta = kwargs.get("eta")
        if isinstance(eta, list):
            kwargs["eta"] = Schedule([tuple(seg) for seg in eta])
        return OptimizerConfig(seed=self.seed, **kwargs)


def _default_seed() -> int:
    env = os.environ.get("GDLAYOUT_SEED")
    return int(env) if env else 0


def save_layout_json(layout: np.ndarray, graph_name: str, seed: int) -> str:
    nodes = [[repr(float(x)), repr(float(y))] for x, y in layout]
    # repr gives shortest round-trip decimals; emit them unquoted
    rows = ",".join("[" + x + "," + y + "]" for x, y in nodes)
    return (
        '{"nodes":[' + rows + '],"graph":' + json.dumps(graph_name) + ","
        '"seed":' + str(seed) + ',"version":' + str(LAYOUT_VERSION) + "}"
    )


def load_layout_json(text: str):
    data = json.loads(text)
    if data.get("version") != LAYOUT_VERSION:
        raise ConfigError(f"layout version must be {LAYOUT_VERSION}")
    nodes = np.asarray(data["nodes"], dtype=np.float64)
    if nodes.ndim != 2 or nodes.shape[1] != 2:
        raise ConfigError("layout nodes must be a list of [x, y] pairs")
    return nodes, data.get("graph", "graph"), data.get("seed", 0)
