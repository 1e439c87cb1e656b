"""Fixed-step RK4 integration of PWL systems.

The discontinuous field is integrated exactly as written: every RK4 stage
dispatches independently and switching surfaces are not located. Region
labels and transitions are recorded at sample resolution.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import Divergence, NoMatchingRegion
from .pwl_core import PWLSystem, as_vec3, vector_field_at

DEFAULT_BOUND = 1e6


@dataclass(frozen=True)
class IntegrationConfig:
    initial_state: np.ndarray
    duration: float
    step: float = 0.01
    sample_every: int = 1
    bound: float = DEFAULT_BOUND

    def __post_init__(self):
        object.__setattr__(self, "initial_state", as_vec3(self.initial_state, "initial_state"))
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.duration >= self.step:
            raise ValueError("duration must be at least one step")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError("sample_every must be a positive integer")
        if not self.bound > 0:
            raise ValueError("bound must be positive")
        object.__setattr__(self, "sample_every", int(self.sample_every))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))

    @property
    def sample_interval(self) -> float:
        return self.step * self.sample_every


@dataclass(frozen=True)
class Transition:
    time: float
    from_label: str
    to_label: str


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    regions: np.ndarray
    transitions: list[Transition] = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.states))) if len(self) else 0.0


def rk4_step(sys: PWLSystem, x, h: float) -> np.ndarray:
    """One classical RK4 step; each stage dispatches to its own piece."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    k1 = vector_field_at(sys, x)
    k2 = vector_field_at(sys, x + h / 2.0 * k1)
    k3 = vector_field_at(sys, x + h / 2.0 * k2)
    k4 = vector_field_at(sys, x + h * k3)
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _no_labels(states):
    return np.full(len(states), "0")


def _python_path(sys, cfg):
    x = np.array(cfg.initial_state)
    samples = [x]
    for step in range(1, cfg.n_steps + 1):
        x = rk4_step(sys, x, cfg.step)
        if not np.all(np.abs(x) <= cfg.bound):
            raise Divergence(step * cfg.step, x, cfg.bound)
        if step % cfg.sample_every == 0:
            samples.append(x)
    return np.array(samples)


def integrate_states(sys: PWLSystem, cfg: IntegrationConfig, backend: str = "numba") -> np.ndarray:
    """Sampled states only, shape ``(n_steps // sample_every + 1, 3)``."""
    if backend == "python":
        return _python_path(sys, cfg)
    if backend != "numba":
        raise ValueError(f"unknown backend {backend!r}")
    samples, status, step, bad = _kernels.integrate(
        np.array(cfg.initial_state), cfg.n_steps, cfg.step, cfg.sample_every, cfg.bound, sys.compiled
    )
    if status == _kernels.NO_REGION:
        raise NoMatchingRegion(bad)
    if status == _kernels.DIVERGED:
        raise Divergence(step * cfg.step, bad, cfg.bound)
    return samples


def find_transitions(times, labels) -> list[Transition]:
    labels = np.asarray(labels)
    idx = np.flatnonzero(labels[1:] != labels[:-1]) + 1
    return [Transition(float(times[i]), str(labels[i - 1]), str(labels[i])) for i in idx]


def integrate(
    sys: PWLSystem,
    cfg: IntegrationConfig,
    region_labeler: Callable | None = None,
    backend: str = "numba",
) -> Trajectory:
    """Integrate and label every sample.

    ``region_labeler`` maps an ``(n, 3)`` state array to ``n`` string labels;
    it defaults to the system's own scroll regions.
    """
    states = integrate_states(sys, cfg, backend)
    times = np.arange(len(states)) * cfg.sample_interval
    labeler = region_labeler or sys.regions or _no_labels
    regions = np.asarray(labeler(states)).astype(str)
    return Trajectory(times, states, regions, find_transitions(times, regions))


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x1", "x2", "x3", "region"])
        for t, x, r in zip(traj.times, traj.states, traj.regions):
            w.writerow([f"{t:.17g}", f"{x[0]:.17g}", f"{x[1]:.17g}", f"{x[2]:.17g}", r])


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    times = np.array([float(r["t"]) for r in rows])
    states = np.array([[float(r["x1"]), float(r["x2"]), float(r["x3"])] for r in rows]).reshape(-1, 3)
    regions = np.array([r["region"] for r in rows], dtype=str)
    return Trajectory(times, states, regions, find_transitions(times, regions))


def write_transitions_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "from", "to"])
        for tr in traj.transitions:
            w.writerow([f"{tr.time:.17g}", tr.from_label, tr.to_label])
