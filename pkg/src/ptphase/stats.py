"""Jackknife and summary statistics for ensemble estimates."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def jackknife(values: np.ndarray, estimator) -> tuple[float, float]:
    """Leave-one-out jackknife of an estimator over axis 0.

    ``estimator`` maps an (k, ...) array to a scalar.  Returns the full-sample
    estimate and the jackknife standard error; zero error for k == 1 or
    constant data.
    """
    values = np.asarray(values)
    k = values.shape[0]
    if k < 1:
        raise ValidationError("jackknife needs at least one sample")
    full = float(estimator(values))
    if k == 1:
        return full, 0.0
    reps = np.array([estimator(np.delete(values, i, axis=0)) for i in range(k)], dtype=float)
    center = reps.mean()
    var = (k - 1) / k * np.sum((reps - center) ** 2)
    return full, math.sqrt(max(var, 0.0))


def ratio_of_means(p2: np.ndarray, p3: np.ndarray, p4: np.ndarray) -> tuple[float, float]:
    """mean(p2) mean(p3) / mean(p4) with a leave-one-state-out jackknife error.

    Uses running sums so the replicates cost O(K).
    """
    p2, p3, p4 = (np.asarray(x, dtype=float) for x in (p2, p3, p4))
    k = p2.size
    if not (p3.size == k and p4.size == k):
        raise ValidationError("moment arrays must have equal length")
    s2, s3, s4 = p2.sum(), p3.sum(), p4.sum()
    if s4 == 0:
        raise ValidationError("mean p4 vanishes; ratio undefined")
    full = (s2 / k) * (s3 / k) / (s4 / k)
    if k == 1:
        return float(full), 0.0
    loo = ((s2 - p2) * (s3 - p3)) / ((s4 - p4) * (k - 1))
    center = loo.mean()
    var = (k - 1) / k * np.sum((loo - center) ** 2)
    return float(full), math.sqrt(max(var, 0.0))


@dataclass
class EnsembleStats:
    """Per-quantity summary of an ensemble run."""

    n_samples: int
    seed: int
    means: dict[str, float]
    variances: dict[str, float]
    std_errors: dict[str, float]
    quantity_names: list[str]
    covariance: np.ndarray
    r2_tilde: float | None = None
    r2_tilde_err: float | None = None

    @property
    def r2_mean(self) -> float | None:
        return self.means.get("r2")

    @property
    def r2_mean_err(self) -> float | None:
        return self.std_errors.get("r2")


def summarize(samples: list[dict[str, float]], seed: int) -> EnsembleStats:
    """Means, variances, standard errors, covariance, and the ratio-of-means.

    The ratio estimate and its jackknife error are filled in when the moment
    keys p2, p3, p4 are present in every sample.
    """
    if not samples:
        raise ValidationError("no samples to summarize")
    names = sorted(set.intersection(*(set(s) for s in samples)))
    k = len(samples)
    table = np.array([[float(s[name]) for name in names] for s in samples], dtype=float)
    means = table.mean(axis=0)
    if k > 1:
        variances = table.var(axis=0, ddof=1)
        cov = np.cov(table, rowvar=False).reshape(len(names), len(names))
    else:
        variances = np.zeros(len(names))
        cov = np.zeros((len(names), len(names)))
    std_errors = np.sqrt(variances / k)
    stats = EnsembleStats(
        n_samples=k,
        seed=seed,
        means=dict(zip(names, means.tolist())),
        variances=dict(zip(names, variances.tolist())),
        std_errors=dict(zip(names, std_errors.tolist())),
        quantity_names=names,
        covariance=cov,
    )
    if all(key in names for key in ("p2", "p3", "p4")):
        cols = {name: table[:, i] for i, name in enumerate(names)}
        stats.r2_tilde, stats.r2_tilde_err = ratio_of_means(cols["p2"], cols["p3"], cols["p4"])
    return stats
