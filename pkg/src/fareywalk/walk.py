"""Monte Carlo random products of SL(2, R) matrices acting on the punctured plane.

Each walk keeps a unit vector and a running log-norm, so long products never
overflow.  Randomness comes from ``rng.walk_stream`` keyed by (seed, walk
index); walks are processed in fixed-size chunks, so the worker count only
changes scheduling and never the numbers produced.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ResourceCapError, ValidationError
from .group import GENERATOR_MATRICES
from .minkowski import mbar_array, question_mark_array
from .rng import walk_stream

DET_TOLERANCE = 1e-9
WALK_CAP = 10_000_000
CHUNK = 8192


@dataclass(frozen=True)
class WalkMeasure:
    """Finitely supported probability measure on SL(2, R)."""

    matrices: np.ndarray  # (K, 2, 2) float64
    probs: tuple  # exact Fractions summing to 1

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=np.float64)
        if mats.ndim != 3 or mats.shape[1:] != (2, 2) or mats.shape[0] == 0:
            raise ValidationError("a measure needs at least one 2x2 matrix")
        probs = tuple(Fraction(p) for p in self.probs)
        if len(probs) != mats.shape[0]:
            raise ValidationError("one probability per matrix is required")
        if any(p <= 0 for p in probs):
            raise ValidationError("probabilities must be positive")
        if sum(probs) != 1:
            raise ValidationError(f"probabilities sum to {sum(probs)}, not 1")
        dets = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
        bad = np.flatnonzero(np.abs(dets - 1.0) > DET_TOLERANCE)
        if bad.size:
            raise ValidationError(f"atom {int(bad[0])} has determinant {dets[bad[0]]!r}, not 1")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def farey(cls) -> "WalkMeasure":
        """Uniform measure on the three Farey-group generators."""
        mats = [np.array(GENERATOR_MATRICES[s].rows(), dtype=np.float64) for s in "abc"]
        return cls(np.stack(mats), (Fraction(1, 3),) * 3)

    @classmethod
    def from_dict(cls, spec: dict) -> "WalkMeasure":
        try:
            atoms = spec["atoms"]
            mats = np.array([a["matrix"] for a in atoms], dtype=np.float64)
            probs = [Fraction(str(a["prob"])) for a in atoms]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"malformed measure spec: {exc}") from exc
        return cls(mats, tuple(probs))

    @classmethod
    def from_json(cls, text: str) -> "WalkMeasure":
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"measure file is not JSON: {exc}") from exc
        return cls.from_dict(spec)

    def to_dict(self) -> dict:
        return {
            "atoms": [
                {"matrix": m.tolist(), "prob": f"{p.numerator}/{p.denominator}"}
                for m, p in zip(self.matrices, self.probs)
            ]
        }

    def thresholds(self) -> np.ndarray:
        """Cumulative cut points on [0, 2**64) selecting each atom."""
        cuts = []
        acc = Fraction(0)
        for p in self.probs[:-1]:
            acc += p
            cuts.append(int(acc * (1 << 64)))
        return np.array(cuts, dtype=np.uint64)


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    walks: int
    seed: int = 0
    x0: tuple = (1.0, 0.0)
    walk_cap: int = WALK_CAP

    def __post_init__(self):
        if self.steps < 1 or self.walks < 1:
            raise ValidationError("steps and walks must both be at least 1")
        if self.walks > self.walk_cap:
            raise ResourceCapError("walks", self.walks, self.walk_cap)
        x, y = (float(v) for v in self.x0)
        if x == 0.0 and y == 0.0:
            raise ValidationError("base vector x0 must be nonzero")
        object.__setattr__(self, "x0", (x, y))


@dataclass
class EnsembleStats:
    """Per-walk end states: ``log_radius = log|g x0|`` and ``direction = x / y``."""

    config: WalkConfig
    log_radius: np.ndarray
    direction: np.ndarray
    steps: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.steps is None:
            self.steps = np.full(self.log_radius.shape, self.config.steps, dtype=np.int64)

    def __len__(self):
        return self.log_radius.size

    @property
    def lyapunov(self) -> tuple[float, float]:
        return estimate_lyapunov(self)

    def to_csv(self, header: Optional[str] = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(header.rstrip("\n") + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["walk_id", "log_radius", "direction", "steps"])
        for i, (lr, d, n) in enumerate(zip(self.log_radius.tolist(), self.direction.tolist(), self.steps.tolist())):
            w.writerow([i, repr(lr), repr(d), n])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, config: Optional[WalkConfig] = None) -> "EnsembleStats":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        rows = list(csv.DictReader(lines))
        if not rows:
            raise ValidationError("stats file has no rows")
        lr = np.array([float(r["log_radius"]) for r in rows])
        dr = np.array([float(r["direction"]) for r in rows])
        st = np.array([int(r["steps"]) for r in rows], dtype=np.int64)
        if config is None:
            config = WalkConfig(steps=int(st[0]), walks=len(rows), walk_cap=max(len(rows), WALK_CAP))
        return cls(config, lr, dr, st)


def _run_chunk(measure: WalkMeasure, config: WalkConfig, start: int, stop: int):
    ids = np.arange(start, stop, dtype=np.uint64)
    draws = walk_stream(config.seed, ids, config.steps)
    if len(measure.probs) == 1:
        choice = np.zeros(draws.shape, dtype=np.intp)
    else:
        choice = np.searchsorted(measure.thresholds(), draws, side="right")
    mats = measure.matrices
    m00, m01, m10, m11 = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    x0, y0 = config.x0
    r0 = math.hypot(x0, y0)
    x = np.full(ids.size, x0 / r0)
    y = np.full(ids.size, y0 / r0)
    log_r = np.full(ids.size, math.log(r0))
    for k in range(config.steps):
        idx = choice[:, k]
        nx = m00[idx] * x + m01[idx] * y
        ny = m10[idx] * x + m11[idx] * y
        r = np.hypot(nx, ny)
        log_r += np.log(r)
        x = nx / r
        y = ny / r
    with np.errstate(divide="ignore", invalid="ignore"):
        direction = np.where(y == 0.0, np.inf, x / np.where(y == 0.0, 1.0, y))
    return log_r, direction


def run_ensemble(measure: WalkMeasure, config: WalkConfig, workers: int = 1, chunk: int = CHUNK) -> EnsembleStats:
    """Simulate ``config.walks`` independent walks of ``config.steps`` steps each.

    Results are bit-identical for any ``workers`` value given the same chunk size.
    """
    bounds = [(s, min(s + chunk, config.walks)) for s in range(0, config.walks, chunk)]
    if workers <= 1:
        parts = [_run_chunk(measure, config, s, e) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_chunk(measure, config, *b), bounds))
    log_r = np.concatenate([p[0] for p in parts])
    direction = np.concatenate([p[1] for p in parts])
    return EnsembleStats(config, log_r, direction)


def estimate_lyapunov(stats: EnsembleStats) -> tuple[float, float]:
    """``(mean(log_radius) / n, stdev(log_radius) / sqrt(n))``."""
    if len(stats) < 2:
        raise ValidationError("need at least two walks")
    n = stats.config.steps
    lam = float(np.mean(stats.log_radius)) / n
    s = float(np.std(stats.log_radius, ddof=1)) / math.sqrt(n)
    return lam, s


@dataclass(frozen=True)
class RadialProfile:
    alpha: float
    edges: np.ndarray
    counts: np.ndarray
    mass: np.ndarray
    slope: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def radial_profile(stats: EnsembleStats, alpha: float, window: tuple = (-1.5, 1.5, 3)) -> RadialProfile:
    """Histogram of ``log_radius - alpha * n`` on ``[lo, hi]`` with ``bins`` bins.

    ``mass`` is the fraction of all walks per bin; ``slope`` is the
    least-squares slope of log-mass against bin centre over non-empty bins.
    """
    lo, hi, bins = window
    bins = int(bins)
    if bins < 1:
        raise ValidationError("bins must be at least 1")
    if not hi > lo:
        raise ValidationError(f"empty window [{lo}, {hi}]")
    shifted = stats.log_radius - alpha * stats.config.steps
    counts, edges = np.histogram(shifted, bins=bins, range=(lo, hi))
    mass = counts / len(stats)
    if counts.sum() == 0:
        warnings.warn(f"no walks fall in [{lo}, {hi}] after shifting by alpha * n", RuntimeWarning)
    centers = 0.5 * (edges[1:] + edges[:-1])
    keep = counts > 0
    if keep.sum() >= 2:
        slope = float(np.polyfit(centers[keep], np.log(mass[keep]), 1)[0])
    else:
        slope = float("nan")
    return RadialProfile(alpha, edges, counts, mass, slope)


class ECDF:
    """Empirical CDF of directions on the real line cut at infinity.

    Samples equal to infinity count in the total but lie below no finite t.
    """

    def __init__(self, samples):
        self.samples = np.sort(np.asarray(samples, dtype=np.float64))
        if np.isnan(self.samples).any():
            raise ValidationError("samples contain NaN")

    def __len__(self):
        return self.samples.size

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        k = np.searchsorted(self.samples, t, side="right")
        # +inf samples sit at the end and only t=+inf reaches them
        return k / self.samples.size


def angular_ecdf(
    stats: EnsembleStats,
    window: Optional[tuple] = None,
    support: Optional[tuple] = None,
    min_samples: int = 100,
) -> ECDF:
    """ECDF of the end directions.

    ``window=(lo, hi)`` keeps walks whose raw radius ``|g x0|`` lies in
    ``[lo, hi]``; ``support=(lo, hi)`` keeps directions in ``[lo, hi]``,
    giving the conditional law on that interval.
    """
    keep = np.ones(len(stats), dtype=bool)
    if window is not None:
        lo, hi = window
        with np.errstate(divide="ignore"):
            keep &= (stats.log_radius >= math.log(lo) if lo > 0 else True) & (stats.log_radius <= math.log(hi))
    if support is not None:
        lo, hi = support
        keep &= (stats.direction >= lo) & (stats.direction <= hi)
    count = int(keep.sum())
    if count < min_samples:
        raise ValidationError(f"only {count} samples survive conditioning; need at least {min_samples}")
    return ECDF(stats.direction[keep])


def ks_distance(ecdf: ECDF, reference: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided Kolmogorov-Smirnov distance, taken on both sides of every jump."""
    x = ecdf.samples
    n = x.size
    F = np.asarray(reference(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    upper = np.max(i / n - F)
    lower = np.max(F - (i - 1) / n)
    return float(max(upper, lower, 0.0))


REFERENCES = {
    "mink": question_mark_array,
    "mbar": mbar_array,
}


@dataclass(frozen=True)
class CLTReport:
    degenerate: bool
    ks: float
    deciles: tuple  # (level, empirical quantile, normal quantile)
    message: str = ""

    @property
    def decile_errors(self) -> tuple:
        return tuple(emp - ref for _, emp, ref in self.deciles)


def clt_check(stats: EnsembleStats, min_walks: int = 1000) -> CLTReport:
    """Compare standardised log radii with the standard normal."""
    if len(stats) < min_walks:
        raise ValidationError(f"clt check needs at least {min_walks} walks, got {len(stats)}")
    lam, s = estimate_lyapunov(stats)
    n = stats.config.steps
    if s == 0.0 or s * math.sqrt(n) < 1e-12 * max(1.0, abs(lam) * n):
        return CLTReport(True, float("nan"), (), "degenerate (deterministic radial growth)")
    z = (stats.log_radius - lam * n) / (s * math.sqrt(n))
    ks = ks_distance(ECDF(z), ndtr)
    levels = np.arange(1, 10) / 10
    emp = np.quantile(z, levels)
    ref = ndtri(levels)
    return CLTReport(False, ks, tuple(zip(levels.tolist(), emp.tolist(), ref.tolist())))
