"""Regenerate the JSON scenarios bundled under src/fermipoisson/scenarios/."""

import json
import math
from pathlib import Path

from fermipoisson.states import random_mixed

OUT = Path(__file__).resolve().parents[1] / "src" / "fermipoisson" / "scenarios"


def mixed(n, seed):
    rho = random_mixed(n, seed).rho
    return {"kind": "mixed", "re": rho.real.tolist(), "im": rho.imag.tolist()}


def random_channels(*specs):
    return [{"rate": rate, "random": {"seed": seed, "scale": scale}} for rate, seed, scale in specs]


SCENARIOS = {
    "single_time_n3_pure": {
        "n": 3,
        "channels": random_channels((1.0, 11, 1.0), (0.6, 12, 0.8)),
        "initial_state": {"kind": "random_pure", "seed": 5},
        "order": 2,
        "times": [0.1, 1.0, 3.0],
        "tasks": ["oracle-compare", "moments"],
    },
    "single_time_n3_mixed_m1": {
        "n": 3,
        "channels": random_channels((0.8, 13, 1.0), (1.3, 14, 0.5)),
        "initial_state": mixed(3, 4),
        "order": 1,
        "times": [0.1, 1.0, 3.0],
        "tasks": ["oracle-compare", "moments"],
    },
    "single_time_n2_mixed": {
        "n": 2,
        "channels": random_channels((1.0, 21, 1.0), (0.5, 22, 1.2)),
        "initial_state": mixed(2, 9),
        "order": 2,
        "times": [0.1, 1.0, 3.0],
        "tasks": ["oracle-compare", "moments"],
    },
    "m2_k2_compare": {
        "n": 2,
        "channels": random_channels((1.0, 31, 1.0), (0.7, 32, 1.0)),
        "initial_state": {"kind": "random_pure", "seed": 7},
        "order": 2,
        "times": [[0.3, 0.9], [0.5, 0.5]],
        "tasks": ["oracle-compare", "correlate"],
    },
    "m3_n1_compare": {
        "n": 1,
        "channels": random_channels((1.0, 41, 1.0), (0.4, 42, 2.0)),
        "initial_state": mixed(1, 3),
        "order": 3,
        "times": [[0.3, 0.6, 0.9], [0.5, 0.5, 0.5]],
        "tasks": ["oracle-compare", "correlate"],
    },
    "phase_n1": {
        "n": 1,
        "channels": [{"rate": 1.0, "generator": {"n": 1, "re": [[0.0, 0.7], [-0.7, 0.0]],
                                                  "im": [[0.0, 0.0], [0.0, 0.0]]}}],
        "initial_state": {"kind": "pure", "re": [1 / math.sqrt(2), 1 / math.sqrt(2)], "im": [0.0, 0.0]},
        "order": 1,
        "times": {"t_max": 3.0, "steps": 30},
        "tasks": ["moments", "oracle-compare", "sample", "validate"],
        "sampling": {"trajectories": 4000, "seed": 1},
    },
    "vacuum_zero_channel": {
        "n": 1,
        "channels": [{"rate": 1.0, "generator": {"n": 1, "re": [[0.0, 0.0], [0.0, 0.0]],
                                                  "im": [[0.0, 0.0], [0.0, 0.0]]}}],
        "initial_state": {"kind": "vacuum"},
        "order": 2,
        "times": {"t_max": 2.0, "steps": 4},
        "tasks": ["moments", "validate"],
    },
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, body in SCENARIOS.items():
        data = {"schema_version": 1, "name": name, **body}
        (OUT / f"{name}.json").write_text(json.dumps(data, indent=2) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
