"""Shared test helpers: an independent quadrature oracle for the
moment-matching fold and small random-instance generators."""

import numpy as np
import pytest


def mixture_moments_quadrature(mbar, vbar, h, mhat, vhat, b_set):
    """Mean/variance of the normalized product density

        p(x) ∝ N(x; mhat, vhat) * sum_b N(x; b/h - mbar, vbar)

    computed by dense trapezoid integration.  This is the distribution the
    single fold step moment-matches, evaluated without any of the
    closed-form component algebra, so it serves as an independent oracle.
    """
    b_set = np.asarray(list(b_set), dtype=float)
    centers = np.concatenate([b_set / h - mbar, [mhat]])
    smax = np.sqrt(max(vbar, vhat))
    smin = np.sqrt(min(vbar, vhat))
    lo = centers.min() - 12.0 * smax
    hi = centers.max() + 12.0 * smax
    step = smin / 20.0
    npts = min(int(np.ceil((hi - lo) / step)) + 1, 400_000)
    x = np.linspace(lo, hi, npts)
    comp = np.exp(-((x[None, :] - (b_set / h - mbar)[:, None]) ** 2) / (2.0 * vbar))
    p = np.exp(-((x - mhat) ** 2) / (2.0 * vhat)) * comp.sum(axis=0)
    trapezoid = getattr(np, "trapezoid", np.trapz)
    z = trapezoid(p, x)
    mean = trapezoid(x * p, x) / z
    var = trapezoid((x - mean) ** 2 * p, x) / z
    return mean, var


def random_fold_instance(rng, w=0.36514837167011076, max_window=7):
    """One random q-fold instance: labeled check message, partial message,
    and a contiguous integer window of size <= max_window around the center."""
    h = rng.choice([1.0, -1.0, w, -w])
    mbar = rng.uniform(-3.0, 3.0)
    mhat = rng.uniform(-3.0, 3.0)
    vbar = rng.uniform(0.01, 1.0)
    vhat = rng.uniform(0.01, 1.0)
    center = int(np.floor(h * (mbar + mhat) + 0.5))
    half = int(rng.integers(0, (max_window - 1) // 2 + 1))
    b_set = range(center - half, center + half + 1)
    return mbar, vbar, h, mhat, vhat, b_set


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ------------------------------------------------------- acceptance reporting

ACCEPTANCE_RESULTS = []


def check_acceptance(name, ok, detail):
    """Record one acceptance criterion and fail the test when not met."""
    ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"acceptance criterion {name} failed: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(
                f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
