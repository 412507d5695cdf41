"""The parsed form of one command-line invocation.

An ExperimentSpec is what every command runs from. It is echoed into the
JSON ``meta`` header and printed by ``--dump-spec``; ``ExperimentSpec.from_json``
on that text gives back an equal spec.
"""
import json
from argparse import Namespace
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .common.config import DEFAULT_CI_LEVEL, DEFAULT_MASTER_SEED, DEFAULT_REPS, DEFAULT_STEP_CAP
from .common.errors import ConfigError, InvalidSizeError
from .graphs import Graph, graph_from_family, read_edge_list

# Flags that are neither part of the experiment nor of its options
_CONTROL_FLAGS = {"command", "dump_spec", "quiet", "handler"}
_GRAPH_FLAGS = {"family", "n", "leaves", "p", "graph_seed", "edge_list"}
_CORE_FLAGS = {"scenario", "targets", "total", "y_sites", "reps", "seed", "step_cap", "ci_level",
               "workers", "format", "out"}


@dataclass(frozen=True)
class GraphDescriptor:
    """A graph family with its parameters, or an edge-list path."""

    family: Optional[str] = None
    n: Optional[int] = None
    leaves: Optional[int] = None
    p: Optional[float] = None
    seed: Optional[int] = None
    edge_list: Optional[str] = None

    @property
    def given(self) -> bool:
        return self.family is not None or self.edge_list is not None

    def build(self) -> Graph:
        """Construct the described graph.

        Raises:
            InvalidSizeError: If neither a family nor an edge list is given
            EdgeListParseError: If the edge-list file is malformed
        """
        if self.edge_list is not None:
            return read_edge_list(Path(self.edge_list))
        if self.family is None:
            raise InvalidSizeError("a graph needs --family or --edge-list")
        return graph_from_family(self.family, n=self.n, leaves=self.leaves, p=self.p, seed=self.seed)


@dataclass(frozen=True)
class ExperimentSpec:
    """Command, graph, scenario, stop targets, estimator settings and output.

    Attributes:
        command: Subcommand name
        graph: Graph source
        scenario: Scenario name ("distinct" or "duplicated")
        targets: Information subsets H whose tau_H is wanted
        want_total: Observe tau_V
        y_sites: Sites whose Y_x is wanted
        reps, seed: Replications and master seed; None means the command default
        step_cap, ci_level, workers: Estimator settings
        format: "csv" or "json"
        out: Output path, None for stdout
        options: Command-specific options (JSON-native values)
    """

    command: str
    graph: GraphDescriptor = field(default_factory=GraphDescriptor)
    scenario: str = "distinct"
    targets: tuple = ()
    want_total: bool = False
    y_sites: tuple = ()
    reps: Optional[int] = None
    seed: Optional[int] = None
    step_cap: int = DEFAULT_STEP_CAP
    ci_level: float = DEFAULT_CI_LEVEL
    workers: int = 1
    format: str = "csv"
    out: Optional[str] = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: Namespace) -> "ExperimentSpec":
        values = vars(args)
        graph = GraphDescriptor(
            family=values.get("family"),
            n=values.get("n") if isinstance(values.get("n"), int) else None,
            leaves=values.get("leaves") if isinstance(values.get("leaves"), int) else None,
            p=values.get("p"),
            seed=values.get("graph_seed"),
            edge_list=values.get("edge_list"),
        )
        # Size lists (ratio-sweep --n 16,64) are options rather than graph parameters
        options = {}
        for key, value in sorted(values.items()):
            if value is None or key in _CONTROL_FLAGS or key in _CORE_FLAGS:
                continue
            if key in _GRAPH_FLAGS and not isinstance(value, (list, tuple)):
                continue
            options[key] = list(value) if isinstance(value, (list, tuple)) else value
        return cls(
            command=args.command,
            graph=graph,
            scenario=values.get("scenario") or "distinct",
            targets=tuple(tuple(sorted(h)) for h in values.get("targets") or ()),
            want_total=bool(values.get("total")),
            y_sites=tuple(values.get("y_sites") or ()),
            reps=values.get("reps"),
            seed=values.get("seed"),
            step_cap=values.get("step_cap") or DEFAULT_STEP_CAP,
            ci_level=values.get("ci_level") or DEFAULT_CI_LEVEL,
            workers=values.get("workers") or 1,
            format=values.get("format") or "csv",
            out=values.get("out"),
            options=options,
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["targets"] = [list(h) for h in self.targets]
        data["y_sites"] = list(self.y_sites)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        """Rebuild a spec from ``to_dict`` output.

        Raises:
            ConfigError: If keys are missing or unknown
        """
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown experiment spec keys: {sorted(unknown)}")
        if "command" not in data:
            raise ConfigError("experiment spec has no command")
        values = dict(data)
        values["graph"] = GraphDescriptor(**(data.get("graph") or {}))
        values["targets"] = tuple(tuple(h) for h in data.get("targets", ()))
        values["y_sites"] = tuple(data.get("y_sites", ()))
        values["options"] = dict(data.get("options") or {})
        return cls(**values)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        return cls.from_dict(json.loads(text))

    @property
    def master_seed(self) -> int:
        return self.seed if self.seed is not None else DEFAULT_MASTER_SEED

    @property
    def replications(self) -> int:
        return self.reps if self.reps is not None else DEFAULT_REPS
