"""Seeded sampling of random-state ensembles and grid scans.

Every sample owns an independent counter-based random stream derived from
(master seed, sample index), so results are bit-identical no matter how the
work is scheduled.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dense
from .errors import ValidationError
from .stats import EnsembleStats, summarize
from .tripartition import Tripartition


def sample_rng(seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for one sample of one grid point."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(indices)))


@dataclass
class EnsembleSpec:
    """What to sample: family tag, partition, sample count, seed, family knobs."""

    family: str
    partition: Tripartition
    count: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError(f"sample count must be >= 1, got {self.count}")


def sample_haar_state(partition: Tripartition, rng: np.random.Generator) -> dense.PureState:
    """Haar-random pure state on the full register."""
    return dense.PureState(dense.haar_state_vector(partition.n, rng), partition)


def state_quantities(rho: dense.DensityMatrix) -> dict[str, float]:
    """The standard per-state scalars: moments, ratio, negativity, e3."""
    spec = dense.negativity_spectrum(rho)
    return _spectrum_quantities(spec)


def _spectrum_quantities(spec: dense.NegativitySpectrum) -> dict[str, float]:
    m = spec.moments(4)
    out = {"p2": float(m[2]), "p3": float(m[3]), "p4": float(m[4])}
    den = m[4] * m[1]
    if den != 0:
        out["r2"] = float(m[2] * m[3] / den)
    out["negativity"] = spec.negativity
    from .moments import p3_negativity

    out["e3"] = p3_negativity(m)
    return out


def _haar_sampler(spec: EnsembleSpec):
    def draw(rng):
        state = sample_haar_state(spec.partition, rng)
        return state_quantities(dense.reduce_to_ab(state))

    return draw


def _noisy_haar_sampler(spec: EnsembleSpec):
    epsilon = spec.params.get("epsilon")
    if epsilon is None:
        raise ValidationError("noisy-haar needs params['epsilon']")

    def draw(rng):
        state = sample_haar_state(spec.partition, rng)
        rho = dense.depolarize(dense.reduce_to_ab(state), epsilon)
        return state_quantities(rho)

    return draw


def _stabilizer_sampler(spec: EnsembleSpec):
    from . import stabilizer

    max_qubits = spec.params.get("max_qubits", 10)

    def draw(rng):
        triple = stabilizer.random_triple(rng, max_qubits=max_qubits)
        return stabilizer.triple_quantities(triple)

    return draw


def _rmps_sampler(spec: EnsembleSpec):
    from . import mps

    chi = spec.params.get("chi")
    if chi is None:
        raise ValidationError("rmps needs params['chi']")
    t = spec.partition

    def draw(rng):
        state = mps.sample_rmps(t.n, chi, rng)
        rho = mps.reduced_density_matrix(state, t.n_a, t.n_b)
        return state_quantities(rho)

    return draw


def _fermion_sampler(spec: EnsembleSpec):
    from . import fermion

    t = spec.partition

    def draw(rng):
        return fermion.sample_gaussian_quantities(t, rng)

    return draw


def _doped_sampler(spec: EnsembleSpec):
    from . import fermion

    n_swap = spec.params.get("n_swap", 0)
    t = spec.partition

    def draw(rng):
        return fermion.doped_circuit_quantities(t, n_swap, rng)

    return draw


_FAMILIES = {
    "haar": _haar_sampler,
    "noisy-haar": _noisy_haar_sampler,
    "stabilizer": _stabilizer_sampler,
    "rmps": _rmps_sampler,
    "fermion": _fermion_sampler,
    "doped-mg": _doped_sampler,
}


def family_sampler(spec: EnsembleSpec):
    try:
        builder = _FAMILIES[spec.family]
    except KeyError:
        raise ValidationError(
            f"unknown family {spec.family!r}; known: {sorted(_FAMILIES)}"
        )
    return builder(spec)


def run_ensemble(spec: EnsembleSpec, quantities: list[str] | None = None,
                 jobs: int = 1, point_index: int = 0) -> EnsembleStats:
    """Sample ``spec.count`` states and summarize the requested quantities.

    The ratio-of-means estimate of the averaged-moment ratio and its
    leave-one-state-out jackknife error are always included when the moments
    are among the computed quantities.
    """
    draw = family_sampler(spec)

    def one(index: int) -> dict[str, float]:
        sample = draw(sample_rng(spec.seed, point_index, index))
        if quantities is not None:
            missing = [q for q in quantities if q not in sample]
            if missing:
                raise ValidationError(f"family {spec.family!r} does not provide {missing}")
            sample = {q: sample[q] for q in quantities}
        return sample

    indices = range(spec.count)
    if jobs == 1:
        samples = [one(i) for i in indices]
    else:
        workers = jobs if jobs and jobs > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(one, indices))
    return summarize(samples, seed=spec.seed)


def phase_diagram_scan(family: str, n_ab: int, n_a_values, n_c_values, count: int,
                       seed: int, params: dict | None = None, jobs: int = 1) -> list[dict]:
    """One summarized ensemble per (N_A, N_C) grid point at fixed N_AB.

    Returns rows with the partition, the ratio estimate with its error, and
    the per-quantity means.  ``family='haar-analytic'`` short-circuits to the
    exact sampling-free values (count is ignored there).
    """
    from . import haar

    params = dict(params or {})
    rows = []
    point = 0
    for n_a in n_a_values:
        if not 0 <= n_a <= n_ab:
            raise ValidationError(f"n_a={n_a} outside [0, {n_ab}]")
        for n_c in n_c_values:
            t = Tripartition(n_a, n_ab - n_a, n_c)
            if family == "haar-analytic":
                rows.append(
                    {
                        "n_a": n_a,
                        "n_b": t.n_b,
                        "n_c": n_c,
                        "r2_tilde": float(haar.mean_moment_ratio(t)),
                        "r2_tilde_err": 0.0,
                        "n_samples": 0,
                    }
                )
            else:
                spec = EnsembleSpec(family, t, count, seed, params)
                stats = run_ensemble(spec, jobs=jobs, point_index=point)
                row = {
                    "n_a": n_a,
                    "n_b": t.n_b,
                    "n_c": n_c,
                    "r2_tilde": stats.r2_tilde,
                    "r2_tilde_err": stats.r2_tilde_err,
                    "n_samples": stats.n_samples,
                }
                for name in stats.quantity_names:
                    row[f"mean_{name}"] = stats.means[name]
                    row[f"se_{name}"] = stats.std_errors[name]
                rows.append(row)
            point += 1
    return rows
