"""Fairness and performance evaluation over run traces.

Argmax/argmin attainment probabilities (equal opportunity / equalized odds),
satisfaction summaries, fixed-bin histograms with Jensen-Shannon divergence,
Gaussian fits, time-weighted per-human utilities of the weight trace, and
their coefficient of variation.
"""

from dataclasses import dataclass

import numpy as np

# shared histogram conventions: 20 equal bins per quantity
SATISFACTION_RANGE = (0.0, 1.0)
PMV_RANGE = (-3.0, 3.0)
BR_RANGE = (0.0, 2.0)
DEFAULT_BINS = 20
JSD_SMOOTHING = 1e-9


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    smoothing: float = 0.0  # additive mass per bin, applied when comparing

    def probabilities(self):
        mass = self.counts.astype(float) + self.smoothing
        total = mass.sum()
        if total <= 0.0:
            raise ValueError("histogram has zero total mass")
        return mass / total


def histogram(samples, lo, hi, bins=DEFAULT_BINS, smoothing=0.0):
    """Fixed-range histogram so compared series always share edges."""
    counts, edges = np.histogram(np.asarray(samples, dtype=float), bins=bins, range=(lo, hi))
    return Histogram(edges=edges, counts=counts, smoothing=smoothing)


def _entropy_bits(p):
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def jsd(h1, h2):
    """Jensen-Shannon divergence in bits: 0 iff identical, at most 1."""
    if not np.array_equal(h1.edges, h2.edges):
        raise ValueError("histograms must share bin edges")
    p = h1.probabilities()
    q = h2.probabilities()
    m = 0.5 * (p + q)
    value = _entropy_bits(m) - 0.5 * (_entropy_bits(p) + _entropy_bits(q))
    return float(min(max(value, 0.0), 1.0))


def _attainment_probs(l_trace, window, pick_max):
    trace = np.asarray(l_trace, dtype=float)
    if trace.ndim != 2:
        raise ValueError("expected a (ticks, humans) trace of L vectors")
    if window < 1:
        raise ValueError("window must be positive")
    trace = trace[-window:]
    if trace.size == 0:
        raise ValueError("empty evaluation window")
    extreme = trace.max(axis=1) if pick_max else trace.min(axis=1)
    hits = trace == extreme[:, None]
    # ties split their mass equally
    shares = hits / hits.sum(axis=1, keepdims=True)
    return shares.sum(axis=0) / trace.shape[0]


def opportunity_probs(l_trace, window):
    """Per-human frequency of attaining the maximum L over the window."""
    return _attainment_probs(l_trace, window, pick_max=True)


def odds_probs(l_trace, window):
    """Per-human frequency of attaining the minimum L over the window."""
    return _attainment_probs(l_trace, window, pick_max=False)


def avg_abs_pairwise_diff(probs):
    """Mean |p_i - p_j| over unordered pairs."""
    p = np.asarray(probs, dtype=float)
    n = p.size
    total = sum(abs(p[i] - p[j]) for i in range(n) for j in range(i + 1, n))
    return float(total / (n * (n - 1) / 2))


def gaussian_fit(samples):
    """Sample mean and population variance."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples to fit")
    return float(x.mean()), float(x.var())


def satisfaction_metric(record):
    """v / (u + v) for one (u, v) record."""
    u, v = float(record[0]), float(record[1])
    total = u + v
    if total <= 0.0:
        raise ValueError("record has zero mass")
    return v / total


def fairiot_utility(weight_trace):
    """Time-weighted utility u = (1/t) * sum_j (j/t) * w_j over w_0..w_t."""
    w = np.asarray(weight_trace, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ValueError("need a weight series of at least 2 samples")
    t = w.size - 1
    j = np.arange(w.size)
    return float((j / t * w).sum() / t)


def coefficient_of_variation(utilities):
    """sqrt((1/(n-1)) * sum((u_h - mean)^2 / mean^2)); scale invariant."""
    u = np.asarray(utilities, dtype=float)
    if u.size < 2:
        raise ValueError("need at least 2 utilities")
    mean = u.mean()
    if mean == 0.0:
        raise ValueError("mean utility is zero")
    return float(np.sqrt(((u - mean) ** 2).sum() / (u.size - 1) / mean ** 2))
