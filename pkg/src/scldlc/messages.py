"""Single-Gaussian message algebra.

Belief-propagation messages are approximated by a mean/variance pair.
A check node emits a linear combination of its inputs scaled by the
outgoing edge label.  A variable node folds check messages into the
channel prior one at a time: each fold forms the periodic-extension
mixture over candidate integers b and moment-matches it back to a single
Gaussian (the Q recursion).  The fold order follows the reliability
metric, least reliable first, to limit the approximation error.

These are the scalar reference implementations; `kernels` holds the
batched equivalents used by the density-evolution engine and decoder.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import ParameterError

DEFAULT_ETA = 4.0
DEFAULT_B_MAX = 10


class GaussianMsg(NamedTuple):
    mean: float
    var: float


class LabeledMsg(NamedTuple):
    msg: GaussianMsg
    label: float


def check_combine(out_label: float, inputs: Sequence[LabeledMsg],
                  negate: bool = False) -> GaussianMsg:
    """Combine d-1 incoming messages into the message on the `out_label` edge.

    mean = (1/h) sum h_j m_j, var = (sum h_j^2 v_j) / h^2.  With `negate`
    the mean is negated (the solved-for-x convention); the default follows
    the plain linear-combination convention, whose sign is absorbed by the
    integer-offset term of the Q recursion.
    """
    if out_label == 0:
        raise ParameterError("outgoing edge label must be nonzero")
    s = sum(lm.label * lm.msg.mean for lm in inputs)
    v = sum(lm.label ** 2 * lm.msg.var for lm in inputs)
    mean = -s / out_label if negate else s / out_label
    return GaussianMsg(mean, v / out_label ** 2)


def ordering_metric(check_msg: GaussianMsg, partial: GaussianMsg) -> float:
    """Reliability metric (m + m_hat)^2 / (v + v_hat); folds proceed from the
    smallest value."""
    return (check_msg.mean + partial.mean) ** 2 / (check_msg.var + partial.var)


def integer_window(check_msg: LabeledMsg, partial: GaussianMsg,
                   eta: float = DEFAULT_ETA, b_max: int = DEFAULT_B_MAX) -> range:
    """Candidate integers b with |b/h - m - m_hat| <= eta * sqrt(v + v_hat),
    clamped to at most 2*b_max+1 values around the nearest integer to
    h*(m + m_hat).  Never empty: the center integer is always kept.
    """
    if eta <= 0:
        raise ParameterError(f"eta must be positive, got {eta}")
    if b_max < 0:
        raise ParameterError(f"b_max must be nonnegative, got {b_max}")
    (mbar, vbar), h = check_msg
    s = mbar + partial.mean
    halfw = eta * math.sqrt(vbar + partial.var) * abs(h)
    center = math.floor(h * s + 0.5)
    lo = max(math.ceil(h * s - halfw), center - b_max)
    hi = min(math.floor(h * s + halfw), center + b_max)
    if lo > hi:
        lo = hi = center
    return range(lo, hi + 1)


def q_step(check_msg: LabeledMsg, partial: GaussianMsg,
           b_set: Iterable[int]) -> GaussianMsg:
    """One fold of the Q recursion: moment-match the integer mixture formed
    by the check message and the current partial message.

    For each b the component has mean m'(b) = v'(b/(v h) - m/v + m_hat/v_hat)
    and variance v' = v*v_hat/(v+v_hat); the weights are the normalized
    Gaussian scores of b/h against m + m_hat.  Exponents are max-shifted, so
    the heaviest integer always keeps weight 1 even when all raw scores
    underflow.
    """
    (mbar, vbar), h = check_msg
    mhat, vhat = partial
    bs = list(b_set)
    if not bs:
        raise ParameterError("integer set must be nonempty")
    vsum = vbar + vhat
    vprime = vbar * vhat / vsum
    s = mbar + mhat
    exps = [-((b / h - s) ** 2) / (2.0 * vsum) for b in bs]
    emax = max(exps)
    z = 0.0
    m1 = 0.0
    m2 = 0.0
    for b, e in zip(bs, exps):
        wgt = math.exp(e - emax)
        mb = vprime * (b / (vbar * h) - mbar / vbar + mhat / vhat)
        z += wgt
        m1 += wgt * mb
        m2 += wgt * mb * mb
    mean = m1 / z
    spread = m2 / z - mean * mean
    if spread < 0.0:  # roundoff guard; mixture variance is >= v'
        spread = 0.0
    return GaussianMsg(mean, vprime + spread)


def _fold_key(lm: LabeledMsg) -> tuple[float, float, float]:
    return (lm.msg.mean, lm.msg.var, lm.label)


def variable_combine(channel: GaussianMsg,
                     checks: Sequence[tuple[LabeledMsg, Optional[Iterable[int]]]],
                     eta: float = DEFAULT_ETA,
                     b_max: int = DEFAULT_B_MAX) -> GaussianMsg:
    """Fold d-1 check messages into the channel prior.

    Each entry pairs a labeled message with its integer set; None requests
    the truncated window evaluated against the partial message at fold
    time.  The not-yet-consumed message with the smallest ordering metric
    is folded next, rescoring as the partial evolves; ties fall back to a
    fixed (mean, var, label) order so the result is independent of input
    order.
    """
    partial = channel
    remaining = [(lm, None if bs is None else tuple(bs)) for lm, bs in checks]
    while remaining:
        best = min(range(len(remaining)),
                   key=lambda i: (ordering_metric(remaining[i][0].msg, partial),
                                  _fold_key(remaining[i][0])))
        lm, bs = remaining.pop(best)
        if bs is None:
            bs = integer_window(lm, partial, eta=eta, b_max=b_max)
        partial = q_step(lm, partial, bs)
    return partial
