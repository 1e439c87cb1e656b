"""Chaos diagnostics: 0-1 test, largest Lyapunov exponent, symbolic itineraries."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateSeries, Divergence, EmptyTrajectory, NoMatchingRegion
from .integrator import IntegrationConfig, Trajectory
from .pwl_core import PWLSystem

DEFAULT_C_RANGE = (math.pi / 5, 4 * math.pi / 5)


def sample_c_values(count: int = 100, seed: int = 0, low: float = DEFAULT_C_RANGE[0],
                    high: float = DEFAULT_C_RANGE[1]) -> np.ndarray:
    """Seeded uniform draws of the 0-1 test frequency, sorted."""
    if not 0 < low < high < 2 * math.pi:
        raise ValueError("c range must lie inside (0, 2*pi)")
    return np.sort(np.random.default_rng(seed).uniform(low, high, count))


@dataclass(frozen=True)
class Chaos01Config:
    """Settings of the correlation-method 0-1 test.

    ``oscillation_correction`` subtracts the bounded term
    ``E[phi]^2 (1 - cos nc) / (1 - cos c)`` from the mean-square displacement
    before correlating with ``n``. Without it a nonzero mean of the
    observable leaks an oscillation into M_c(n) and biases K_c low.
    """

    c_values: tuple[float, ...] = field(default_factory=lambda: tuple(sample_c_values()))
    series_length: int = 2000
    msd_cutoff: float = 0.1
    oscillation_correction: bool = True

    def __post_init__(self):
        c = np.asarray(self.c_values, dtype=float)
        if c.size == 0 or np.any(c <= 0) or np.any(c >= 2 * math.pi):
            raise ValueError("every c must lie in (0, 2*pi)")
        if self.series_length < 100:
            raise ValueError("series_length must be at least 100")
        if not 0 < self.msd_cutoff < 1:
            raise ValueError("msd_cutoff must be a fraction in (0, 1)")
        object.__setattr__(self, "c_values", tuple(float(v) for v in c))

    @classmethod
    def seeded(cls, seed: int, count: int = 100, **kwargs) -> "Chaos01Config":
        return cls(c_values=tuple(sample_c_values(count, seed)), **kwargs)

    @property
    def n_cut(self) -> int:
        return max(2, int(self.msd_cutoff * self.series_length))


def translation_series(phi, c: float) -> tuple[np.ndarray, np.ndarray]:
    """p_c(n) = sum_{j<=n} phi(j) cos(jc), q_c likewise with sin (j from 1)."""
    phi = np.asarray(phi, dtype=float)
    j = np.arange(1, len(phi) + 1)
    return np.cumsum(phi * np.cos(j * c)), np.cumsum(phi * np.sin(j * c))


def mean_square_displacement(p, q, n_cut: int) -> np.ndarray:
    """M(n) for n = 1..n_cut, averaged over all available start indices."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.array([
        np.mean((p[n:] - p[:-n]) ** 2 + (q[n:] - q[:-n]) ** 2) for n in range(1, n_cut + 1)
    ])


def growth_rate_Kc(p, q, cfg: Chaos01Config, c: float | None = None, phi_mean: float = 0.0) -> float:
    """Correlation of the mean-square displacement with n.

    ``c`` and ``phi_mean`` are needed only for the oscillation correction.
    """
    if len(p) != len(q):
        raise ValueError("p and q must have equal length")
    n_cut = min(cfg.n_cut, len(p) - 1)
    msd = mean_square_displacement(p, q, n_cut)
    n = np.arange(1, n_cut + 1, dtype=float)
    if cfg.oscillation_correction and c is not None:
        msd = msd - phi_mean**2 * (1 - np.cos(n * c)) / (1 - np.cos(c))
    scale = max(float(np.max(np.abs(msd))), phi_mean**2, 1e-300)
    if np.ptp(msd) <= 1e-10 * scale:
        raise DegenerateSeries("mean-square displacement is constant; K_c undefined")
    return float(np.corrcoef(n, msd)[0, 1])


def chaos01_series(phi, cfg: Chaos01Config) -> tuple[float, list[tuple[float, float]]]:
    """Median K and the per-c values (sorted by c) for a scalar series."""
    phi = np.asarray(phi, dtype=float)
    if len(phi) < cfg.series_length:
        raise ValueError(f"series has {len(phi)} samples, need {cfg.series_length}")
    phi = phi[: cfg.series_length]
    mean = float(np.mean(phi))
    k_per_c = []
    for c in sorted(cfg.c_values):
        p, q = translation_series(phi, c)
        k_per_c.append((c, growth_rate_Kc(p, q, cfg, c, mean)))
    return float(np.median([k for _, k in k_per_c])), k_per_c


def chaos01_K(traj: Trajectory, cfg: Chaos01Config, observable: int = 2):
    """0-1 test on one coordinate (default x3) of a uniformly sampled trajectory."""
    return chaos01_series(traj.states[:, observable], cfg)


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    times: np.ndarray
    running: np.ndarray


def lle_benettin(
    sys: PWLSystem,
    cfg: IntegrationConfig,
    d0: float = 2e-3,
    renorm_every: int = 1,
    transient: float = 50.0,
    direction=None,
    return_curve: bool = False,
):
    """Largest Lyapunov exponent (nats per unit time) from two nearby orbits.

    After ``transient`` time units from ``cfg.initial_state`` a copy offset by
    ``d0`` along ``direction`` (default ``(1, 1, 1)/sqrt 3``) is evolved for
    ``cfg.duration``; the separation is rescaled to ``d0`` every
    ``renorm_every`` steps and the logarithmic growth is averaged.

    ``d0`` is a finite separation on purpose. Under fixed-step RK4 a switching
    surface only pulls two orbits apart when they straddle it within a step,
    so the estimate depends on ``d0``: as ``d0 -> 0`` it tends to the
    expansion rate of the smooth pieces (``m`` for the rotating systems).
    """
    if not d0 > 0:
        raise ValueError("d0 must be positive")
    if int(renorm_every) != renorm_every or renorm_every < 1:
        raise ValueError("renorm_every must be a positive integer")
    if transient < 0:
        raise ValueError("transient must be nonnegative")
    u = np.ones(3) if direction is None else np.asarray(direction, dtype=float)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("direction must be nonzero")
    u = u / norm
    h = cfg.step
    n_transient = int(round(transient / h))
    log_sum, running, status, step = _kernels.benettin(
        np.array(cfg.initial_state), n_transient, cfg.n_steps, h, d0, int(renorm_every), u,
        cfg.bound, sys.compiled,
    )
    if status == _kernels.NO_REGION:
        raise NoMatchingRegion(np.full(3, np.nan))
    if status == _kernels.DIVERGED:
        raise Divergence(step * h, np.full(3, np.nan), cfg.bound)
    if len(running) == 0:
        raise ValueError("duration shorter than one renormalisation interval")
    value = float(running[-1])
    if return_curve:
        times = (np.arange(1, len(running) + 1) * renorm_every) * h
        return LyapunovEstimate(value, times, running)
    return value


def symbol_sequence(traj: Trajectory, scheme=None) -> str:
    """Itinerary of region labels: one symbol per region entry.

    Empty labels (outside every neighbourhood of a neighbourhood scheme) are
    skipped, and consecutive repeats collapse.
    """
    labels = traj.regions if scheme is None else np.asarray(scheme(traj.states)).astype(str)
    out = []
    for lab in labels:
        if lab and (not out or out[-1] != lab):
            out.append(str(lab))
    return "".join(out)


def occupancy(traj: Trajectory) -> dict[str, float]:
    """Fraction of samples carrying each label."""
    if len(traj.regions) == 0:
        raise EmptyTrajectory("trajectory has no samples")
    labels, counts = np.unique(traj.regions, return_counts=True)
    total = counts.sum()
    return {str(lab): float(cnt / total) for lab, cnt in zip(labels, counts)}


def adjacent_only(symbols: str, order: str) -> bool:
    """True when consecutive symbols are neighbours in ``order`` (e.g. "135")."""
    pos = {s: i for i, s in enumerate(order)}
    return all(abs(pos[a] - pos[b]) == 1 for a, b in zip(symbols, symbols[1:]))


@dataclass
class ChaosReport:
    lle: float | None = None
    k_median: float | None = None
    k_per_c: list[tuple[float, float]] = field(default_factory=list)
    symbols: str = ""
    region_occupancy: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc: dict = {}
        if self.lle is not None:
            doc["lle"] = self.lle
        if self.k_median is not None:
            doc["k_median"] = self.k_median
            doc["k_per_c"] = [[c, k] for c, k in self.k_per_c]
        doc["symbols"] = self.symbols
        doc["occupancy"] = self.region_occupancy
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write_kc_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["c", "Kc"])
            for c, k in self.k_per_c:
                w.writerow([f"{c:.17g}", f"{k:.17g}"])
