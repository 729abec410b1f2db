"""Derivative-free constrained minimizer in the mesh-adaptive direct-search
family: orthogonal poll directions from a seeded generator, mesh halving on
failed polls and doubling on successes, extreme-barrier constraint handling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleFitError, InputDataError


@dataclass
class SearchConfig:
    initial_point: np.ndarray
    initial_mesh: np.ndarray  # per-parameter step at mesh multiplier 1
    budget: int = 5000
    min_mesh: float = 1e-5
    lower_bounds: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        self.initial_point = np.asarray(self.initial_point, dtype=float)
        self.initial_mesh = np.asarray(self.initial_mesh, dtype=float)
        if self.budget < 1:
            raise InputDataError("budget must be >= 1")
        if not self.min_mesh > 0:
            raise InputDataError("min_mesh must be > 0")
        if np.any(self.initial_mesh <= self.min_mesh):
            raise InputDataError("initial_mesh must exceed min_mesh")
        if self.lower_bounds is not None:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)


@dataclass
class Evaluation:
    iteration: int
    point: np.ndarray
    value: float
    feasible: bool
    mesh: float


@dataclass
class MinimizeResult:
    point: np.ndarray
    value: float
    trace: list[Evaluation]
    evaluations: int
    stop_reason: str  # "mesh" | "budget"

    def trace_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            dim = len(self.point)
            w.writerow(["iteration"] + [f"x{i}" for i in range(dim)] + ["value", "feasible", "mesh"])
            for ev in self.trace:
                w.writerow(
                    [ev.iteration]
                    + [repr(float(v)) for v in ev.point]
                    + [repr(float(ev.value)), int(ev.feasible), repr(float(ev.mesh))]
                )


def _poll_directions(rng: np.random.Generator, dim: int) -> np.ndarray:
    """2*dim orthogonal directions: a random rotation of +/- the identity."""
    if dim == 1:
        q = np.array([[1.0]])
    else:
        a = rng.standard_normal((dim, dim))
        q, r = np.linalg.qr(a)
        q = q * np.sign(np.diag(r))
    return np.vstack([q.T, -q.T])


def minimize(objective, feasible, config: SearchConfig) -> MinimizeResult:
    """Minimize objective(point) subject to feasible(point) == True.

    Infeasible points get value +inf (extreme barrier). Deterministic for a
    fixed config.seed. The trace records every evaluation.
    """
    rng = np.random.default_rng(config.seed)
    x = config.initial_point.copy()
    if config.lower_bounds is not None:
        x = np.maximum(x, config.lower_bounds)
    dim = x.size
    mesh = 1.0  # multiplier on initial_mesh
    trace: list[Evaluation] = []
    n_eval = 0
    iteration = 0

    def mesh_size(m: float) -> float:
        return float(m * config.initial_mesh.max())

    def evaluate(pt: np.ndarray, m: float) -> tuple[float, bool]:
        nonlocal n_eval
        ok = bool(feasible(pt))
        val = float(objective(pt)) if ok else float("inf")
        trace.append(Evaluation(iteration, pt.copy(), val, ok, mesh_size(m)))
        n_eval += 1
        return val, ok

    f_x, ok = evaluate(x, mesh)
    if not ok:
        # feasibility restoration: poll outward with geometrically growing mesh
        grow = 1.0
        restored = False
        while n_eval < config.budget:
            for d in _poll_directions(rng, dim):
                cand = x + grow * config.initial_mesh * d
                if config.lower_bounds is not None:
                    cand = np.maximum(cand, config.lower_bounds)
                val, ok = evaluate(cand, grow)
                if ok:
                    x, f_x, restored = cand, val, True
                    break
                if n_eval >= config.budget:
                    break
            if restored:
                break
            grow *= 2.0
        if not restored:
            raise InfeasibleFitError(
                f"no feasible point found within {config.budget} evaluations"
            )

    stop_reason = "budget"
    while n_eval < config.budget:
        iteration += 1
        if mesh_size(mesh) < config.min_mesh:
            stop_reason = "mesh"
            break
        success = False
        for d in _poll_directions(rng, dim):
            if n_eval >= config.budget:
                break
            cand = x + mesh * config.initial_mesh * d
            if config.lower_bounds is not None:
                cand = np.maximum(cand, config.lower_bounds)
            val, ok = evaluate(cand, mesh)
            if ok and val < f_x:
                x, f_x = cand, val
                success = True
                break
        if success:
            mesh *= 2.0
        else:
            mesh *= 0.5
    else:
        stop_reason = "budget"
    if mesh_size(mesh) < config.min_mesh:
        stop_reason = "mesh"

    return MinimizeResult(point=x, value=f_x, trace=trace, evaluations=n_eval, stop_reason=stop_reason)
