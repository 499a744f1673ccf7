"""End-to-end AWGN decoding on concrete graph instances.

The all-zero lattice point is transmitted; the decoder runs flooding
message passing with single-Gaussian messages on the realized edges.
Check nodes emit label-weighted linear combinations; variable nodes fold
the extrinsic check messages into the channel prior with the Q
recursion, pinning the integer to 0 for messages from terminated check
positions.  Hard decisions round the label-weighted check sums of the
posterior means.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graphs import SparseLabeledGraph
from .kernels import var_update_batch
from .threshold import CapacityModel, gap_db


@dataclass
class ChannelRealization:
    y: np.ndarray
    sigma2: float


@dataclass
class DecodeResult:
    x_hat: np.ndarray
    b_hat: np.ndarray
    iterations: int
    converged: bool
    posterior_var: np.ndarray


@dataclass
class ErrorReport:
    sigma2: float
    gap_db: float
    words: int
    word_errors: int
    symbol_errors: int
    symbols_per_word: int

    @property
    def wer(self) -> float:
        return self.word_errors / self.words

    @property
    def ser(self) -> float:
        return self.symbol_errors / (self.words * self.symbols_per_word)

    def wer_interval(self) -> tuple[float, float]:
        return wilson_interval(self.word_errors, self.words)

    def write_csv(self, fh: io.TextIOBase, extra_header: str = "") -> None:
        if extra_header:
            fh.write(f"# {extra_header}\n")
        fh.write("sigma2,gap_db,words,word_errors,symbol_errors,"
                 "wer,ser,wer_ci_lo,wer_ci_hi\n")
        lo, hi = self.wer_interval()
        fh.write(f"{self.sigma2!r},{self.gap_db:.4f},{self.words},"
                 f"{self.word_errors},{self.symbol_errors},"
                 f"{self.wer:.6g},{self.ser:.6g},{lo:.6g},{hi:.6g}\n")


def wilson_interval(successes: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials < 1:
        raise ParameterError("need at least one trial")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def transmit_all_zero(graph: SparseLabeledGraph, sigma2: float, seed: int) -> ChannelRealization:
    """Received word for the all-zero lattice point: pure noise of variance sigma2."""
    if sigma2 <= 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 17]))
    y = rng.normal(0.0, math.sqrt(sigma2), size=graph.num_nodes)
    return ChannelRealization(y=y, sigma2=sigma2)


def _adjacency(graph: SparseLabeledGraph) -> tuple[np.ndarray, np.ndarray]:
    """(nv, d) and (nc, d) arrays of incident edge indices, or raise."""
    n = graph.num_nodes
    d = graph.d
    if graph.num_edges != n * d:
        raise ParameterError(f"graph has {graph.num_edges} edges, expected {n * d}")
    var_edges = np.argsort(graph.var_ids, kind="stable").reshape(n, d)
    check_edges = np.argsort(graph.check_ids, kind="stable").reshape(n, d)
    if not (graph.var_ids[var_edges] == np.arange(n)[:, None]).all():
        raise ParameterError("variable degrees are not uniform; validate the graph")
    if not (graph.check_ids[check_edges] == np.arange(n)[:, None]).all():
        raise ParameterError("check degrees are not uniform; validate the graph")
    return var_edges, check_edges


def decode(graph: SparseLabeledGraph, realization: ChannelRealization,
           i_max: int, tol: float = 1e-3, eta: float = 4.0, b_max: int = 10,
           negate_check_means: bool = False) -> DecodeResult:
    """Flooding-schedule single-Gaussian BP followed by hard decisions."""
    if i_max < 1:
        raise ParameterError(f"i_max must be at least 1, got {i_max}")
    y = np.asarray(realization.y, dtype=float)
    if len(y) != graph.num_nodes:
        raise ParameterError(
            f"received word has {len(y)} symbols, graph has {graph.num_nodes} variables")
    sigma2 = realization.sigma2
    var_edges, check_edges = _adjacency(graph)
    h = graph.labels
    null_edge = graph.null_check_nodes()[graph.check_ids]
    nv = graph.num_nodes
    d = graph.d

    # per-variable gather tables
    h_in = np.ascontiguousarray(h[var_edges])
    nul_in = np.ascontiguousarray(null_edge[var_edges])

    # variable-to-check messages start as the channel prior
    vm = y[graph.var_ids].copy()
    vv = np.full(graph.num_edges, sigma2)
    out_m = np.empty((nv, d))
    out_v = np.empty((nv, d))
    post_m = np.empty(nv)
    post_v = np.empty(nv)
    sign = -1.0 if negate_check_means else 1.0

    done = False
    it = 0
    for it in range(1, i_max + 1):
        # check update: linear combination of the other d-1 edges
        tm = np.bincount(graph.check_ids, weights=h * vm, minlength=nv)
        tv = np.bincount(graph.check_ids, weights=h * h * vv, minlength=nv)
        cm_e = sign * (tm[graph.check_ids] - h * vm) / h
        cv_e = (tv[graph.check_ids] - h * h * vv) / (h * h)
        var_update_batch(y, sigma2,
                         np.ascontiguousarray(cm_e[var_edges]),
                         np.ascontiguousarray(cv_e[var_edges]),
                         h_in, nul_in, eta, b_max,
                         out_m, out_v, post_m, post_v)
        vm[var_edges.reshape(-1)] = out_m.reshape(-1)
        vv[var_edges.reshape(-1)] = out_v.reshape(-1)
        if post_v.max() < tol:
            done = True
            break

    x_hat = post_m.copy()
    check_sums = np.bincount(graph.check_ids, weights=h * x_hat[graph.var_ids],
                             minlength=nv)
    b_hat = np.floor(check_sums + 0.5).astype(np.int64)
    return DecodeResult(x_hat=x_hat, b_hat=b_hat, iterations=it,
                        converged=done, posterior_var=post_v.copy())


def run_error_sim(graph: SparseLabeledGraph, sigma2: float, num_words: int,
                  i_max: int, seed: int, tol: float = 1e-3, eta: float = 4.0,
                  b_max: int = 10, model: CapacityModel = CapacityModel()) -> ErrorReport:
    """Repeated all-zero transmissions; a word errs when any rounded integer
    is nonzero."""
    if num_words < 1:
        raise ParameterError(f"need at least one word, got {num_words}")
    word_errors = 0
    symbol_errors = 0
    for word in range(num_words):
        word_seed = int(np.random.SeedSequence([int(seed), word]).generate_state(1)[0])
        realization = transmit_all_zero(graph, sigma2, word_seed)
        result = decode(graph, realization, i_max=i_max, tol=tol,
                        eta=eta, b_max=b_max)
        wrong = int(np.count_nonzero(result.b_hat))
        symbol_errors += wrong
        if wrong:
            word_errors += 1
    return ErrorReport(sigma2=sigma2, gap_db=gap_db(sigma2, model),
                       words=num_words, word_errors=word_errors,
                       symbol_errors=symbol_errors,
                       symbols_per_word=graph.num_nodes)


def encode_integers(graph: SparseLabeledGraph, b: np.ndarray) -> np.ndarray:
    """Dense solve of H x = b-tilde for small instances (n*L <= 64).

    `b` supplies the integers of the non-terminated check nodes; the
    terminated ones are fixed to zero.  Cross-check utility only; large
    instances transmit the all-zero point instead.
    """
    n = graph.num_nodes
    if n > 64:
        raise ParameterError(f"dense encoding is limited to n*L <= 64 nodes, got {n}")
    null_mask = graph.null_check_nodes()
    b = np.asarray(b)
    info = int(n - null_mask.sum())
    if len(b) != info:
        raise ParameterError(f"expected {info} information integers, got {len(b)}")
    b_tilde = np.zeros(n)
    b_tilde[~null_mask] = b
    return np.linalg.solve(graph.to_dense(), b_tilde)
