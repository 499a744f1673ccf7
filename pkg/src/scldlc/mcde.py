"""Monte Carlo density evolution over sampled message pools.

The evolution state is a pool of N_s (mean, variance) samples per
position and per label class (unit or w), in each direction.  A check
half-iteration resamples the check-to-variable pools by drawing d-1
variable messages from the K-window behind each position; a variable
half-iteration folds d-1 check messages from the K-window ahead into a
freshly drawn channel output.  Convergence is declared when the mean
variance of the w-class variable-to-check pools drops below the
tolerance (strictly).

All randomness is drawn from per-(iteration, phase) numpy streams before
the compiled fold kernel runs, so results are bit-identical at any
thread count.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .kernels import q_fold_batch
from .params import CouplingParams, LdlcParams

CLS_UNIT = 0
CLS_W = 1


@dataclass(frozen=True)
class DeConfig:
    params: LdlcParams
    coupling: CouplingParams
    sigma2: float
    n_samples: int = 1000
    i_max: int = 5000
    tol: float = 1e-3
    eta: float = 4.0
    b_max: int = 10
    seed: int = 0
    # optional early stop: give up when the convergence statistic has not
    # improved by a relative stall_rel for stall_window iterations
    stall_window: Optional[int] = None
    stall_rel: float = 1e-3

    def __post_init__(self):
        if self.coupling.mode == "standard":
            raise ParameterError("density evolution runs in conventional or randomized mode")
        if self.sigma2 <= 0:
            raise ParameterError(f"sigma2 must be positive, got {self.sigma2}")
        if self.n_samples < 1 or self.i_max < 1:
            raise ParameterError("n_samples and i_max must be at least 1")
        if self.tol <= 0:
            raise ParameterError(f"tolerance must be positive, got {self.tol}")


@dataclass
class PoolBank:
    """pm/pv: variable-to-check pools, qm/qv: check-to-variable pools.

    All arrays are (L, 2, N_s); axis 1 indexes the label class
    (0 = unit, 1 = w).  qm/qv stay None until the first check
    half-iteration.
    """
    pm: np.ndarray
    pv: np.ndarray
    qm: Optional[np.ndarray] = None
    qv: Optional[np.ndarray] = None


@dataclass
class DeTrace:
    sigma2: float
    variance_profile: np.ndarray   # (iterations, L) mean of v_w per position
    converged: bool
    iterations: int
    stalled: bool = False

    def write_csv(self, fh: io.TextIOBase, extra_header: str = "") -> None:
        if extra_header:
            fh.write(f"# {extra_header}\n")
        fh.write(f"#converged={self.converged} iterations={self.iterations} "
                 f"sigma2={self.sigma2!r}\n")
        fh.write("iteration,position,mean_var_w\n")
        for it, row in enumerate(self.variance_profile, start=1):
            for pos, v in enumerate(row, start=1):
                fh.write(f"{it},{pos},{v:.10g}\n")


def _rng(seed: int, iteration: int, phase: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), iteration, phase]))


def _edge_signs(rng: np.random.Generator, shape) -> np.ndarray:
    """Random +-1 edge signs; message means are drawn through them just as
    realized edges carry the sign-change matrices' signs."""
    return np.where(rng.random(shape) < 0.5, -1.0, 1.0)


def _input_classes(d: int) -> np.ndarray:
    """Label classes of the d-1 inputs feeding each outgoing class.

    A unit-label output consumes d-1 w-class inputs; a w-label output
    consumes the node's single unit-class message plus d-2 w-class ones.
    """
    cls = np.ones((2, d - 1), dtype=np.int64)
    cls[CLS_W, 0] = CLS_UNIT
    return cls


def initialize(config: DeConfig) -> PoolBank:
    """All-zero-codeword start: means drawn from N(0, sigma2), variances sigma2."""
    L, ns = config.coupling.L, config.n_samples
    rng = _rng(config.seed, 0, 0)
    pm = rng.normal(0.0, np.sqrt(config.sigma2), size=(L, 2, ns))
    pv = np.full((L, 2, ns), config.sigma2)
    return PoolBank(pm=pm, pv=pv)


def check_half_iteration(bank: PoolBank, config: DeConfig,
                         rng: np.random.Generator) -> PoolBank:
    L, K = config.coupling.L, config.coupling.K
    d, w, ns = config.params.d, config.params.w, config.n_samples
    shape = (L, 2, ns, d - 1)
    off = rng.integers(0, K, size=shape)
    pos = (np.arange(L)[:, None, None, None] - off) % L
    idx = rng.integers(0, ns, size=shape)
    cls = np.broadcast_to(_input_classes(d)[None, :, None, :], shape)
    hj = np.where(cls == CLS_UNIT, 1.0, w)
    mm = bank.pm[pos, cls, idx]
    vv = bank.pv[pos, cls, idx]
    # random edge signs of the construction's sign-change matrices; without
    # them the sampled pools have a coherently amplified mean mode
    mm = mm * _edge_signs(rng, shape)
    h_out = np.array([1.0, w])[None, :, None]
    qm = (hj * mm).sum(axis=-1) / h_out
    qv = (hj ** 2 * vv).sum(axis=-1) / h_out ** 2
    return PoolBank(pm=bank.pm, pv=bank.pv, qm=qm, qv=qv)


def variable_half_iteration(bank: PoolBank, config: DeConfig,
                            rng: np.random.Generator) -> PoolBank:
    if bank.qm is None:
        raise ParameterError("check-to-variable pools are empty; run a check half-iteration first")
    L, K = config.coupling.L, config.coupling.K
    d, w, ns = config.params.d, config.params.w, config.n_samples
    shape = (L, 2, ns, d - 1)
    off = rng.integers(0, K, size=shape)
    pos = (np.arange(L)[:, None, None, None] + off) % L
    idx = rng.integers(0, ns, size=shape)
    cls = np.broadcast_to(_input_classes(d)[None, :, None, :], shape)
    cm = bank.qm[pos, cls, idx] * _edge_signs(rng, shape)
    cv = bank.qv[pos, cls, idx]
    hj = np.where(cls == CLS_UNIT, 1.0, w)
    # integer forced to zero at terminated positions (1-based l > L-K+1)
    nul = pos >= L - K + 1
    mu = rng.normal(0.0, np.sqrt(config.sigma2), size=(L, 2, ns))
    rows = L * 2 * ns
    out_m = np.empty(rows)
    out_v = np.empty(rows)
    q_fold_batch(mu.reshape(rows),
                 np.full(rows, config.sigma2),
                 np.ascontiguousarray(cm.reshape(rows, d - 1)),
                 np.ascontiguousarray(cv.reshape(rows, d - 1)),
                 np.ascontiguousarray(hj.reshape(rows, d - 1)),
                 np.ascontiguousarray(nul.reshape(rows, d - 1)),
                 config.eta, config.b_max, out_m, out_v)
    return PoolBank(pm=out_m.reshape(L, 2, ns), pv=out_v.reshape(L, 2, ns),
                    qm=bank.qm, qv=bank.qv)


def w_variance_profile(bank: PoolBank) -> np.ndarray:
    """Per-position mean variance of the w-class variable-to-check pool."""
    return bank.pv[:, CLS_W, :].mean(axis=1)


def converged(bank: PoolBank, tol: float) -> bool:
    return bool(bank.pv[:, CLS_W, :].mean() < tol)


def run_de(config: DeConfig) -> DeTrace:
    """Alternate check/variable half-iterations until convergence, i_max, or
    (when configured) a stall of the convergence statistic."""
    bank = initialize(config)
    profile = []
    best = np.inf
    best_iter = 0
    done = False
    stalled = False
    it = 0
    for it in range(1, config.i_max + 1):
        bank = check_half_iteration(bank, config, _rng(config.seed, it, 1))
        bank = variable_half_iteration(bank, config, _rng(config.seed, it, 2))
        prof = w_variance_profile(bank)
        profile.append(prof)
        stat = prof.mean()
        if stat < config.tol:
            done = True
            break
        if config.stall_window is not None:
            if stat < best * (1.0 - config.stall_rel):
                best = stat
                best_iter = it
            elif it - best_iter >= config.stall_window:
                stalled = True
                break
    return DeTrace(sigma2=config.sigma2,
                   variance_profile=np.array(profile),
                   converged=done, iterations=it, stalled=stalled)
