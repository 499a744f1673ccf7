"""Capacity of the unconstrained-power AWGN channel and threshold search.

Capacity is the largest noise variance a dense enough lattice can
tolerate, |det(G)|^(2/n) / (2*pi*e); gaps are reported in dB against it.
The noise threshold of a configuration is located by log-domain
bisection of the density-evolution convergence boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BracketError, ParameterError
from .mcde import DeConfig, run_de
from .params import dimension_ratio

TWO_PI_E = 2.0 * math.pi * math.e


@dataclass(frozen=True)
class CapacityModel:
    det_g_abs: float = 1.0   # |det(G)|, the Voronoi volume
    n: int = 1

    def __post_init__(self):
        if self.det_g_abs <= 0:
            raise ParameterError(f"|det(G)| must be positive, got {self.det_g_abs}")
        if self.n < 1:
            raise ParameterError(f"dimension must be at least 1, got {self.n}")


def capacity_sigma2(model: CapacityModel = CapacityModel()) -> float:
    """Largest decodable noise variance, |det(G)|^(2/n) / (2 pi e)."""
    return model.det_g_abs ** (2.0 / model.n) / TWO_PI_E


def gap_db(sigma2: float, model: CapacityModel = CapacityModel()) -> float:
    """Distance from capacity in dB; positive below capacity."""
    if sigma2 <= 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    return 10.0 * math.log10(capacity_sigma2(model) / sigma2)


@dataclass
class ThresholdResult:
    sigma2_threshold: float
    gap_db: float
    bracket: tuple[float, float]
    evaluations: list[dict] = field(default_factory=list)
    config: DeConfig | None = None

    def report(self) -> dict:
        cfg = self.config
        out = {
            "alpha": cfg.params.alpha if cfg else None,
            "d": cfg.params.d if cfg else None,
            "L": cfg.coupling.L if cfg else None,
            "K": cfg.coupling.K if cfg else None,
            "n_samples": cfg.n_samples if cfg else None,
            "i_max": cfg.i_max if cfg else None,
            "sigma2_threshold": self.sigma2_threshold,
            "gap_db": self.gap_db,
            "dimension_ratio": (float(dimension_ratio(cfg.coupling, cfg.params))
                                if cfg else None),
            "bracket": list(self.bracket),
            "evaluations": self.evaluations,
        }
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.report(), indent=2, **kwargs)


def _eval_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([int(master), index]).generate_state(1)[0])


def find_threshold(config: DeConfig, bracket: tuple[float, float],
                   resolution_db: float = 0.01,
                   model: CapacityModel = CapacityModel(),
                   max_widen: int = 4) -> ThresholdResult:
    """Bisect the DE convergence boundary in log-sigma2.

    `bracket` is (sigma2_lo, sigma2_hi) with lo expected to converge and
    hi expected to fail; invalid endpoints are widened by factors of two
    up to `max_widen` times.  Every DE evaluation uses a fresh seed
    derived from the master seed and the evaluation index, and is logged.
    Returns the largest sigma2 observed to converge.
    """
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ParameterError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    if resolution_db <= 0:
        raise ParameterError(f"resolution must be positive, got {resolution_db}")
    evaluations: list[dict] = []
    cache: dict[float, bool] = {}

    def evaluate(sigma2: float) -> bool:
        if sigma2 in cache:
            return cache[sigma2]
        cfg = replace(config, sigma2=sigma2,
                      seed=_eval_seed(config.seed, len(evaluations)))
        trace = run_de(cfg)
        evaluations.append({"sigma2": sigma2, "converged": trace.converged,
                            "iterations": trace.iterations})
        cache[sigma2] = trace.converged
        return trace.converged

    for _ in range(max_widen + 1):
        if evaluate(lo):
            break
        lo /= 2.0
    else:
        raise BracketError(
            f"no converging lower endpoint after widening; evaluations: {evaluations}")
    for _ in range(max_widen + 1):
        if not evaluate(hi):
            break
        hi *= 2.0
    else:
        raise BracketError(
            f"no failing upper endpoint after widening; evaluations: {evaluations}")

    while 10.0 * math.log10(hi / lo) > resolution_db:
        mid = math.sqrt(lo * hi)
        if evaluate(mid):
            lo = mid
        else:
            hi = mid

    return ThresholdResult(sigma2_threshold=lo, gap_db=gap_db(lo, model),
                           bracket=(lo, hi), evaluations=evaluations,
                           config=config)
