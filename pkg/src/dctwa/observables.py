"""Named observables estimated over trajectory ensembles.

Every trajectory engine works with per-spin Cartesian vectors s_n (phase-space
points scaled to |s| = sqrt(3) for the Wigner engines, plain expectation
values for mean-field).  An observable name expands into one or more *base
estimators* -- per-trajectory scalars such as (1/N) sum_n s_n^z or the pair
product (1+s_i^z)(1+s_j^z)/4 -- whose ensemble means and standard errors are
accumulated during the run; a finalizer combines them into the reported
quantity (e.g. connected correlators, whose standard error is propagated to
first order and therefore approximate).

Name grammar:

* ``Sx`` / ``Sy`` / ``Sz``         collective moments (1/N) sum_n sigma_n^mu
* ``sx_site:3`` (sy_, sz_)         single-site Pauli expectation
* ``rr_site:2``                    Rydberg population (1 + sigma^z)/2
* ``rr_corr:0,4``                  connected projector correlator C_{04}
* ``rr_corr_nn`` / ``rr_corr_nnn`` translation-averaged connected correlator
                                   at distance 1 / 2 (indices wrap around)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def evaluate_base(key: tuple, s: np.ndarray) -> np.ndarray:
    """Per-trajectory value of a base estimator; s has shape (..., n, 3)."""
    kind = key[0]
    if kind == "coll":
        return s[..., :, _AXIS_INDEX[key[1]]].mean(axis=-1)
    if kind == "site":
        return s[..., key[2], _AXIS_INDEX[key[1]]]
    if kind == "rr":
        return 0.5 * (1.0 + s[..., key[1], 2])
    if kind == "rrpair":
        return 0.25 * (1.0 + s[..., key[1], 2]) * (1.0 + s[..., key[2], 2])
    raise ValueError(f"unknown estimator key {key}")


def _connected(means, ses, i, j):
    """Connected correlator mean and first-order-propagated standard error."""
    p, sp_ = means[("rrpair", i, j)], ses[("rrpair", i, j)]
    ri, si = means[("rr", i)], ses[("rr", i)]
    rj, sj = means[("rr", j)], ses[("rr", j)]
    mean = p - ri * rj
    err = np.sqrt(sp_ ** 2 + (rj * si) ** 2 + (ri * sj) ** 2)
    return mean, err


@dataclass(frozen=True)
class ParsedObservable:
    name: str
    base_keys: tuple
    pairs: tuple = ()  # connected-correlator site pairs to average over

    def finalize(self, means: dict, ses: dict):
        if not self.pairs:
            key = self.base_keys[0]
            return np.asarray(means[key]), np.asarray(ses[key])
        total = 0.0
        var = 0.0
        for i, j in self.pairs:
            mean, err = _connected(means, ses, i, j)
            total = total + mean
            var = var + err ** 2
        k = len(self.pairs)
        return np.asarray(total) / k, np.sqrt(np.asarray(var)) / k


def _corr_pairs(n_spins: int, distance: int) -> tuple:
    return tuple(sorted({tuple(sorted((n, (n + distance) % n_spins)))
                         for n in range(n_spins)}))


def parse_observable(name: str, n_spins: int) -> ParsedObservable:
    if name in ("Sx", "Sy", "Sz"):
        return ParsedObservable(name, (("coll", name[1].lower()),))
    if ":" in name:
        head, _, arg = name.partition(":")
        if head in ("sx_site", "sy_site", "sz_site"):
            site = int(arg)
            _check_site(site, n_spins, name)
            return ParsedObservable(name, (("site", head[1], site),))
        if head == "rr_site":
            site = int(arg)
            _check_site(site, n_spins, name)
            return ParsedObservable(name, (("rr", site),))
        if head == "rr_corr":
            i, j = (int(x) for x in arg.split(","))
            _check_site(i, n_spins, name)
            _check_site(j, n_spins, name)
            if i == j:
                raise ValueError(f"{name}: need two distinct sites")
            i, j = sorted((i, j))
            return ParsedObservable(
                name, (("rr", i), ("rr", j), ("rrpair", i, j)), ((i, j),)
            )
    if name in ("rr_corr_nn", "rr_corr_nnn"):
        distance = 1 if name == "rr_corr_nn" else 2
        pairs = _corr_pairs(n_spins, distance)
        keys = []
        for i, j in pairs:
            keys.extend([("rr", i), ("rr", j), ("rrpair", i, j)])
        return ParsedObservable(name, tuple(dict.fromkeys(keys)), pairs)
    raise ValueError(f"unknown observable {name!r}")


def _check_site(site, n_spins, name):
    if not 0 <= site < n_spins:
        raise ValueError(f"{name}: site {site} outside chain of {n_spins}")


def parse_observables(names, n_spins: int) -> list[ParsedObservable]:
    return [parse_observable(name, n_spins) for name in names]


@dataclass
class ObservableSeries:
    """Time series of observable means with Monte Carlo standard errors."""

    times: np.ndarray
    means: dict
    std_errors: dict
    n_traj: int
    engine: str = ""

    def __post_init__(self):
        for name, err in self.std_errors.items():
            if np.any(np.asarray(err) < 0):
                raise ValueError(f"negative standard error for {name}")

    @property
    def names(self) -> list[str]:
        return list(self.means)


class EnsembleAccumulator:
    """Streaming sums for base estimators over trajectory blocks.

    Blocks are reduced in a fixed order so the result does not depend on any
    execution parallelism.
    """

    def __init__(self, base_keys, n_times: int):
        self.base_keys = list(base_keys)
        self.sums = {k: np.zeros(n_times) for k in self.base_keys}
        self.sumsqs = {k: np.zeros(n_times) for k in self.base_keys}
        self.count = 0

    def add_block(self, block_sums: dict, block_sumsqs: dict, block_count: int):
        for k in self.base_keys:
            self.sums[k] += block_sums[k]
            self.sumsqs[k] += block_sumsqs[k]
        self.count += block_count

    def statistics(self):
        """Means and standard errors (sample std / sqrt(n)) per base key."""
        n = self.count
        means, ses = {}, {}
        for k in self.base_keys:
            mean = self.sums[k] / n
            if n > 1:
                var = np.maximum(self.sumsqs[k] - n * mean ** 2, 0.0) / (n - 1)
                ses[k] = np.sqrt(var / n)
            else:
                ses[k] = np.zeros_like(mean)
            means[k] = mean
        return means, ses


def assemble_series(parsed, accumulator, times, engine: str) -> ObservableSeries:
    means, ses = accumulator.statistics()
    out_means, out_errors = {}, {}
    for p in parsed:
        mean, err = p.finalize(means, ses)
        out_means[p.name] = mean
        out_errors[p.name] = err
    return ObservableSeries(times=np.asarray(times), means=out_means,
                            std_errors=out_errors, n_traj=accumulator.count,
                            engine=engine)
