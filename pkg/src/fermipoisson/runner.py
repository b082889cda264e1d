"""Task execution for a parsed scenario."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, linalg, oracle
from .car import build_rep, car_residual
from .channels import channel_residuals
from .moments import initial_moments, multitime_correlations, propagate_moments
from .scenario import Scenario
from .states import density_defects
from .trajectories import TrajectoryConfig, estimate_evolution

log = logging.getLogger(__name__)

SAMPLER_SIGMAS = 4.0


def _map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def comparison(label: str, a, b, tol: float, **extra) -> dict:
    a = np.asarray(a)
    b = np.asarray(b)
    max_abs = float(np.max(np.abs(a - b)))
    return {
        "label": label,
        **extra,
        "max_abs": max_abs,
        "frobenius": linalg.frob_dist(a, b),
        "tolerance": tol,
        "passed": max_abs <= tol,
    }


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _tensor_rows(prefix, tensor):
    for idx, v in zip(tensor.indices(), tensor.data):
        yield [*prefix, *idx, _fmt(v.real), _fmt(v.imag)]


class Runner:
    """Runs tasks for one scenario and collects a JSON-serialisable report."""

    def __init__(self, scenario: Scenario, out_dir=None, tol=None, threads=1):
        self.scenario = scenario
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.tol = scenario.tolerance if tol is None else float(tol)
        self.threads = max(1, int(threads))
        self.rep = build_rep(scenario.n)
        self.cs = scenario.channel_set()
        self.rho0 = scenario.state()
        self._m0 = None

    @property
    def m0(self):
        if self._m0 is None:
            self._m0 = initial_moments(self.rho0, self.rep, self.scenario.order)
        return self._m0

    def _index_header(self):
        return [f"i_{k + 1}" for k in range(self.scenario.order)]

    def _write(self, name, header, rows):
        if self.out_dir is None:
            return None
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        write_csv(path, header, rows)
        return str(path)

    def task_moments(self) -> dict:
        times = self.scenario.moment_times()
        tensors = _map(lambda t: propagate_moments(self.m0, self.cs, t), times, self.threads)
        rows = itertools.chain.from_iterable(
            _tensor_rows([_fmt(t)], m) for t, m in zip(times, tensors)
        )
        path = self._write("moments.csv", ["t", *self._index_header(), "re", "im"], rows)
        return {"times": len(times), "csv": path, "passed": True}

    def task_correlate(self) -> dict:
        tuples = self.scenario.correlation_times()
        tensors = _map(lambda ts: multitime_correlations(self.m0, self.cs, ts), tuples, self.threads)
        rows = itertools.chain.from_iterable(
            _tensor_rows([_fmt(t) for t in ts], m) for ts, m in zip(tuples, tensors)
        )
        header = [f"t_{k + 1}" for k in range(self.scenario.order)] + self._index_header() + ["re", "im"]
        path = self._write("correlations.csv", header, rows)
        return {"time_tuples": len(tuples), "csv": path, "passed": True}

    def task_oracle_compare(self) -> dict:
        order = self.scenario.order
        checks = []

        def single(t):
            closed = propagate_moments(self.m0, self.cs, t)
            ref = oracle.oracle_moments(self.rho0, self.cs, t, order, self.rep)
            return comparison("moments", closed.data, ref.data, self.tol, times=[t])

        checks += _map(single, self.scenario.moment_times(), self.threads)

        if self.scenario.n <= oracle.MAX_CORRELATION_MODES:
            def multi(ts):
                closed = multitime_correlations(self.m0, self.cs, ts)
                ref = oracle.oracle_multitime(self.rho0, self.cs, ts, self.rep)
                out = [comparison("correlations", closed.data, ref.data, self.tol, times=list(ts))]
                if all(t == ts[0] for t in ts):
                    single_time = propagate_moments(self.m0, self.cs, ts[0])
                    out.append(comparison("equal_time", closed.data, single_time.data, self.tol,
                                          times=list(ts)))
                return out

            for group in _map(multi, self.scenario.correlation_times(), self.threads):
                checks += group
        else:
            log.warning("skipping multi-time oracle: n=%d exceeds oracle envelope", self.scenario.n)

        return {
            "checks": checks,
            "max_residual": max(c["max_abs"] for c in checks),
            "passed": all(c["passed"] for c in checks),
        }

    def task_sample(self) -> dict:
        sampling = self.scenario.sampling
        runs = []
        for t in self.scenario.moment_times():
            cfg = TrajectoryConfig(horizon=t, trajectories=sampling["trajectories"],
                                   seed=sampling["seed"])
            est = estimate_evolution(self.rho0, self.cs, cfg, threads=self.threads)
            exact = oracle.evolve_density(self.rho0, self.cs, t, self.rep).rho
            err = linalg.frob_dist(est.mean, exact)
            bound = max(SAMPLER_SIGMAS * est.aggregated_stderr, self.tol)
            runs.append({
                "t": t,
                "error": err,
                "aggregated_stderr": est.aggregated_stderr,
                "bound": bound,
                "passed": err <= bound,
                "metadata": est.metadata,
            })
        return {"runs": runs, "passed": all(r["passed"] for r in runs)}

    def task_validate(self) -> dict:
        tol = self.tol
        residuals = {"car": car_residual(self.rep)}
        for k, ch in enumerate(self.cs):
            for key, value in channel_residuals(ch, self.rep).items():
                residuals[f"channel[{k}].{key}"] = value
        for m in range(1, min(self.scenario.order, 2) + 1):
            residuals[f"heisenberg_order_{m}"] = oracle.heisenberg_residual(self.cs, m, self.rep)
        gen = oracle.liouvillian(self.cs, self.rep)
        residuals["trace_preservation"] = gen.trace_defect()
        residuals["gksl_form"] = linalg.frob_dist(gen.matrix,
                                                  oracle.gksl_liouvillian(self.cs, self.rep).matrix)
        ident = np.eye(self.rep.dim)
        residuals["adjoint_unitality"] = linalg.frob_dist(oracle.adjoint_apply(ident, self.cs), 0 * ident)
        t_last = self.scenario.moment_times()[-1]
        defects = density_defects(oracle.evolve_density(self.rho0, self.cs, t_last, self.rep).rho)
        residuals["evolved_trace"] = defects["trace"]
        residuals["evolved_hermiticity"] = defects["hermiticity"]
        residuals["evolved_negativity"] = max(0.0, -defects["min_eigenvalue"])
        failed = sorted(k for k, v in residuals.items() if v > tol)
        return {"residuals": residuals, "tolerance": tol, "failed": failed, "passed": not failed}

    def run(self, tasks=None) -> dict:
        tasks = list(tasks or self.scenario.tasks)
        report = {
            "tool": "fermipoisson",
            "version": __version__,
            "scenario": self.scenario.name,
            "tolerance": self.tol,
            "tasks": {},
            "timing": {},
        }
        for task in tasks:
            start = time.perf_counter()
            log.info("running task %s", task)
            report["tasks"][task] = getattr(self, "task_" + task.replace("-", "_"))()
            report["timing"][task] = time.perf_counter() - start
        report["passed"] = all(r["passed"] for r in report["tasks"].values())
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            with open(self.out_dir / "report.json", "w") as fh:
                json.dump(report, fh, indent=2)
        return report


def run(scenario: Scenario, tasks=None, out_dir=None, tol=None, threads=1) -> dict:
    return Runner(scenario, out_dir=out_dir, tol=tol, threads=threads).run(tasks)
