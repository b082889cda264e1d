"""Scenario files: a JSON description of one simulation run.

Schema (``schema_version`` 1)::

    {
      "schema_version": 1,
      "name": "optional label",
      "n": 2,
      "channels": [
        {"rate": 1.0, "generator": {"n": 2, "re": [[...]], "im": [[...]]}},
        {"rate": 0.5, "random": {"seed": 7, "scale": 1.0}}
      ],
      "initial_state": {"kind": "vacuum"}
                     | {"kind": "basis", "index": 3}
                     | {"kind": "pure", "re": [...], "im": [...]}
                     | {"kind": "mixed", "re": [[...]], "im": [[...]]}
                     | {"kind": "random_pure", "seed": 4},
      "order": 2,
      "times": [0.5, [0.3, 0.9]]  |  {"t_max": 3.0, "steps": 30},
      "tasks": ["moments", "correlate", "oracle-compare", "sample", "validate"],
      "tolerance": 1e-8,
      "sampling": {"trajectories": 1000, "seed": 0}
    }

A ``times`` entry is either a single time or a nondecreasing list of
``order`` times ``[t_1, ..., t_M]``. A grid expands to the ``steps + 1``
points ``linspace(0, t_max, steps + 1)``.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import states
from .car import MAX_MODES, QuadraticGenerator, random_generator
from .channels import ChannelSet, JumpChannel
from .errors import ConstraintError, FermiPoissonError, OrderingError, ScenarioError
from .moments import validate_times

SCHEMA_VERSION = 1
TASKS = ("moments", "correlate", "oracle-compare", "sample", "validate")
STATE_KINDS = ("vacuum", "basis", "pure", "mixed", "random_pure")
DEFAULT_TOLERANCE = 1e-8


def _require(data, key, path, types=None):
    if not isinstance(data, dict):
        raise ScenarioError("expected an object", path)
    if key not in data:
        raise ScenarioError("missing required field", f"{path}.{key}" if path else key)
    value = data[key]
    if types is not None and (not isinstance(value, types) or isinstance(value, bool)):
        raise ScenarioError(f"expected {types}, got {type(value).__name__}",
                            f"{path}.{key}" if path else key)
    return value


def _complex_array(data, path, ndim):
    try:
        re = np.asarray(_require(data, "re", path), dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"non-numeric matrix data ({exc})", path) from None
    if re.ndim != ndim or re.shape != im.shape:
        raise ScenarioError(f"expected matching {ndim}-D 're'/'im' arrays", path)
    return re + 1j * im


@dataclass(frozen=True)
class ChannelSpec:
    rate: float
    generator: QuadraticGenerator | None = None
    random: dict | None = None

    def build(self, n: int) -> JumpChannel:
        if self.generator is not None:
            return JumpChannel(self.rate, self.generator)
        return JumpChannel(self.rate, random_generator(n, self.random["seed"], self.random["scale"]))

    def to_dict(self) -> dict:
        if self.generator is not None:
            return {"rate": self.rate, "generator": self.generator.to_dict()}
        return {"rate": self.rate, "random": dict(self.random)}


@dataclass(frozen=True, eq=False)
class Scenario:
    n: int
    channels: tuple
    initial_state: dict
    order: int
    times: object
    tasks: tuple
    tolerance: float = DEFAULT_TOLERANCE
    sampling: dict = field(default_factory=lambda: {"trajectories": 1000, "seed": 0})
    name: str = ""
    schema_version: int = SCHEMA_VERSION

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None

    def channel_set(self) -> ChannelSet:
        return ChannelSet(self.n, tuple(spec.build(self.n) for spec in self.channels))

    def state(self) -> states.DensityState:
        spec = self.initial_state
        kind = spec["kind"]
        if kind == "vacuum":
            return states.vacuum(self.n)
        if kind == "basis":
            return states.basis(self.n, spec["index"])
        if kind == "random_pure":
            return states.random_pure(self.n, spec["seed"])
        if kind == "pure":
            return states.pure(np.asarray(spec["re"]) + 1j * np.asarray(spec["im"]))
        return states.DensityState(np.asarray(spec["re"]) + 1j * np.asarray(spec["im"]))

    def time_entries(self) -> list:
        """Entries as floats or tuples, grid expanded."""
        if isinstance(self.times, dict):
            return [float(t) for t in np.linspace(0.0, self.times["t_max"], self.times["steps"] + 1)]
        return [t if isinstance(t, float) else tuple(t) for t in self.times]

    def moment_times(self) -> list:
        """Every distinct time that appears in ``times``, sorted."""
        found = set()
        for entry in self.time_entries():
            found.update(entry if isinstance(entry, tuple) else (entry,))
        return sorted(found)

    def correlation_times(self) -> list:
        """Order-``M`` time tuples; a single time ``t`` becomes ``(t, ..., t)``."""
        return [
            entry if isinstance(entry, tuple) else (entry,) * self.order
            for entry in self.time_entries()
        ]

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "name": self.name,
            "n": self.n,
            "channels": [c.to_dict() for c in self.channels],
            "initial_state": json.loads(json.dumps(self.initial_state)),
            "order": self.order,
            "times": dict(self.times) if isinstance(self.times, dict)
            else [t if isinstance(t, float) else list(t) for t in self.times],
            "tasks": list(self.tasks),
            "tolerance": self.tolerance,
            "sampling": dict(self.sampling),
        }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _parse_channel(raw, n, index) -> ChannelSpec:
    path = f"channels[{index}]"
    label = f"channel {index + 1} ({path})"
    rate = _require(raw, "rate", path, (int, float))
    if not rate > 0:
        raise ConstraintError(f"{label}: rate must be positive, got {rate}")
    if "generator" in raw:
        gpath = f"{path}.generator"
        h = _complex_array(raw["generator"], gpath, 2)
        if int(raw["generator"].get("n", n)) != n or h.shape != (2 * n, 2 * n):
            raise ScenarioError(f"generator must be {2 * n}x{2 * n} for n={n}", gpath)
        try:
            gen = QuadraticGenerator(n=n, h=h)
        except ConstraintError as exc:
            raise ConstraintError(f"{label}: {exc}") from None
        return ChannelSpec(rate=float(rate), generator=gen)
    if "random" in raw:
        rpath = f"{path}.random"
        seed = _require(raw["random"], "seed", rpath, int)
        scale = raw["random"].get("scale", 1.0)
        if not isinstance(scale, (int, float)) or scale < 0:
            raise ScenarioError("scale must be a nonnegative number", f"{rpath}.scale")
        return ChannelSpec(rate=float(rate), random={"seed": seed, "scale": float(scale)})
    raise ScenarioError("channel needs a 'generator' or 'random' field", path)


def _parse_state(raw, n) -> dict:
    path = "initial_state"
    kind = _require(raw, "kind", path, str)
    if kind not in STATE_KINDS:
        raise ScenarioError(f"unknown kind {kind!r}; expected one of {STATE_KINDS}", f"{path}.kind")
    dim = 2**n
    if kind == "vacuum":
        spec = {"kind": kind}
    elif kind == "basis":
        index = _require(raw, "index", path, int)
        if not 0 <= index < dim:
            raise ScenarioError(f"index out of range for n={n}", f"{path}.index")
        spec = {"kind": kind, "index": index}
    elif kind == "random_pure":
        spec = {"kind": kind, "seed": _require(raw, "seed", path, int)}
    else:
        ndim = 1 if kind == "pure" else 2
        arr = _complex_array(raw, path, ndim)
        if arr.shape != (dim,) * ndim:
            raise ScenarioError(f"expected shape {(dim,) * ndim}, got {arr.shape}", path)
        spec = {"kind": kind, "re": arr.real.tolist(), "im": arr.imag.tolist()}
    return spec


def _parse_times(raw, order):
    if isinstance(raw, dict):
        t_max = _require(raw, "t_max", "times", (int, float))
        steps = _require(raw, "steps", "times", int)
        if t_max < 0 or steps < 1:
            raise ScenarioError("grid needs t_max >= 0 and steps >= 1", "times")
        return {"t_max": float(t_max), "steps": steps}
    if not isinstance(raw, list) or not raw:
        raise ScenarioError("expected a nonempty list or a {t_max, steps} grid", "times")
    entries = []
    for i, entry in enumerate(raw):
        path = f"times[{i}]"
        try:
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                entries.append(validate_times([entry])[0])
            elif isinstance(entry, list):
                entries.append(list(validate_times(entry, order)))
            else:
                raise ScenarioError("expected a number or a list of numbers", path)
        except OrderingError as exc:
            raise ScenarioError(str(exc), path) from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"bad time value ({exc})", path) from None
    return entries


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema version {version}", "schema_version")
    n = _require(data, "n", "", int)
    if not 1 <= n <= MAX_MODES:
        raise ScenarioError(f"must be in [1, {MAX_MODES}]", "n")
    raw_channels = _require(data, "channels", "", list)
    if not raw_channels:
        raise ScenarioError("at least one channel is required", "channels")
    channels = tuple(_parse_channel(c, n, i) for i, c in enumerate(raw_channels))
    order = _require(data, "order", "", int)
    if order < 1:
        raise ScenarioError("must be at least 1", "order")
    tasks = data.get("tasks", ["moments"])
    if not isinstance(tasks, list) or not tasks:
        raise ScenarioError("expected a nonempty list", "tasks")
    for i, task in enumerate(tasks):
        if task not in TASKS:
            raise ScenarioError(f"unknown task {task!r}; expected one of {TASKS}", f"tasks[{i}]")
    tolerance = data.get("tolerance", DEFAULT_TOLERANCE)
    if not isinstance(tolerance, (int, float)) or not tolerance > 0:
        raise ScenarioError("must be a positive number", "tolerance")
    sampling = data.get("sampling", {})
    if not isinstance(sampling, dict):
        raise ScenarioError("expected an object", "sampling")
    trajectories = sampling.get("trajectories", 1000)
    seed = sampling.get("seed", 0)
    if not isinstance(trajectories, int) or trajectories < 1:
        raise ScenarioError("must be a positive integer", "sampling.trajectories")
    if not isinstance(seed, int) or seed < 0:
        raise ScenarioError("must be a nonnegative integer", "sampling.seed")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ScenarioError("must be a string", "name")
    scenario = Scenario(
        n=n,
        channels=channels,
        initial_state=_parse_state(_require(data, "initial_state", "", dict), n),
        order=order,
        times=_parse_times(_require(data, "times", ""), order),
        tasks=tuple(tasks),
        tolerance=float(tolerance),
        sampling={"trajectories": trajectories, "seed": seed},
        name=name,
    )
    try:
        scenario.state()
    except FermiPoissonError as exc:
        raise ScenarioError(str(exc), "initial_state") from None
    return scenario


def bundled_scenarios() -> list:
    """Names of the scenarios shipped with the package."""
    root = resources.files("fermipoisson") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_text(source) -> str:
    """Read scenario text from a path, ``-`` for stdin, or a bundled scenario name."""
    if source == "-":
        return sys.stdin.read()
    path = Path(source)
    if path.exists():
        return path.read_text()
    bundled = resources.files("fermipoisson") / "scenarios" / f"{source}.json"
    if bundled.is_file():
        return bundled.read_text()
    raise ScenarioError(f"no such file or bundled scenario: {source}")


def parse_scenario(source) -> Scenario:
    text = load_text(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(data)


def loads(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))
