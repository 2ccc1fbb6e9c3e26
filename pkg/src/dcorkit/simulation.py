"""Monte-Carlo studies: rejection-rate scenarios and the variable-filtering study.

Six scenario shapes are supported. Cases 1 to 5 estimate rejection rates for
three tests run on each replication: the permutation distance-correlation
test (P), its asymptotic counterpart (A), and the Fisher-transform Pearson
test (Pear). Cases 2 to 5 are conditional: the partial versions of all three
tests are used, given z.

- Case 1: x and y drawn independently (size and level study).
- Case 2: as case 1 plus an irrelevant z drawn independently of both.
- Case 3: one shared z added into both coordinates: (x + z, y + z, z).
- Case 4: both coordinates driven by z: x = ln|z| + z^2 + e,
  y = sin(z) + log10|z| + e', with independent standard normal noises.
- Case 5: z collides the pair: z = ln|x| + sin(y) + e.
- Case 6 (run_filtering): 400 standardized predictors in 8 family blocks of
  50; y = exp(sum of the first 10 columns + 5) + e. Each predictor is tested
  marginally against y by all three methods at level alpha; reported numbers
  are mean counts of true/false selections and pairwise selection overlaps.

Reproducibility: replication rep at sample size n of a scenario with base
seed s derives b = derive_seed(s, n), then uses RngStream(b, 2*rep) for data
and RngStream(b, 2*rep + 1) for permutations. Results are therefore identical
for any thread count, and any subset of the grid reproduces the corresponding
cells of a larger run.

The permutation loops in these studies stop early once the exceedance count
already forces p >= alpha; the rejection indicator is unchanged because
permutations are pre-generated from the stream before the loop.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.stats import chi2, t as t_dist

from .dcor import _abs_row_sums, _as_sample, _self_aggregates, _unbiased_from
from .distributions import (DistributionSpec, FILTER_FAMILY_ORDER, X_LABELS, Y_LABELS,
                            Z_ROSTER, as_spec, default_distribution, label_for, sample)
from .exceptions import ConfigError, DataError
from .inference import (_identity_perm, _perm_chunks, _PairParts, _tie_tol_cov,
                        _tie_tol_stat, _TripleParts, dcor_test_asymptotic,
                        pdcor_test_asymptotic)
from .pearson import fisher_transform, partial_pearson, pearson_corr, pearson_test
from .rng import RngStream, as_generator, derive_seed

__all__ = [
    "ScenarioSpec",
    "RateReport",
    "FilterReport",
    "METHODS",
    "FILTER_KEYS",
    "gen_case4",
    "gen_case5",
    "gen_case6",
    "scenarios_for_case",
    "run_case",
    "run_filtering",
]

METHODS = ("P", "A", "Pear")

# Smallest magnitude fed to the logarithms in the derived-pair generators.
_LOG_FLOOR = 1e-300


def gen_case4(z, rng, noise_scale: float = 1.0):
    """Derived pair x = ln|z| + z^2 + e, y = sin(z) + log10|z| + e'.

    The two noises are independent standard normals scaled by
    ``noise_scale`` (x's noise is drawn first). |z| is floored at 1e-300
    before the logarithms.
    """
    za = _as_sample(z, "z")
    g = as_generator(rng)
    az = np.maximum(np.abs(za), _LOG_FLOOR)
    x = np.log(az) + za * za + noise_scale * g.standard_normal(za.size)
    y = np.sin(za) + np.log10(az) + noise_scale * g.standard_normal(za.size)
    return x, y


def gen_case5(x, y, rng, noise_scale: float = 1.0):
    """Collider z = ln|x| + sin(y) + e with standard normal e."""
    xa = _as_sample(x, "x")
    ya = _as_sample(y, "y")
    if xa.size != ya.size:
        raise DataError(f"samples differ in length: {xa.size} vs {ya.size}")
    g = as_generator(rng)
    ax = np.maximum(np.abs(xa), _LOG_FLOOR)
    return np.log(ax) + np.sin(ya) + noise_scale * g.standard_normal(xa.size)


def gen_case6(n: int, rng, active_coefficients: int = 10, noise_scale: float = 1.0):
    """Design matrix, response, and true support for the filtering study.

    Returns (X, y, support): X is n x 400 with 50 iid columns per family in
    FILTER_FAMILY_ORDER, each column standardized to zero mean and unit
    variance; y = exp(row sums of the first ``active_coefficients`` columns
    + 5) + e. ``support`` holds the active column indices.
    """
    if n < 2:
        raise ConfigError(f"filter design needs n >= 2, got {n}")
    if not 0 <= active_coefficients <= 400:
        raise ConfigError("active_coefficients must lie in [0, 400]")
    g = as_generator(rng)
    cols = []
    for lbl in FILTER_FAMILY_ORDER:
        spec = default_distribution(lbl)
        for _ in range(50):
            col = sample(spec, n, g)
            sd = col.std()
            if sd <= 0.0:
                raise DataError(f"degenerate predictor column from {lbl}")
            cols.append((col - col.mean()) / sd)
    x_mat = np.column_stack(cols)
    linpred = x_mat[:, :active_coefficients].sum(axis=1) if active_coefficients else np.zeros(n)
    y = np.exp(linpred + 5.0) + noise_scale * g.standard_normal(n)
    return x_mat, y, np.arange(active_coefficients)


@dataclass(frozen=True)
class ScenarioSpec:
    """One rejection-rate study: a case shape, its distributions, and run sizes."""

    case: int
    x_dist: DistributionSpec | None = None
    y_dist: DistributionSpec | None = None
    z_dist: DistributionSpec | None = None
    n_grid: tuple[int, ...] = (100,)
    replications: int = 1000
    alpha: float = 0.05
    permutations: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        for name in ("x_dist", "y_dist", "z_dist"):
            val = getattr(self, name)
            if val is not None and not isinstance(val, DistributionSpec):
                object.__setattr__(self, name, as_spec(val))

    def validate(self) -> None:
        if self.case not in (1, 2, 3, 4, 5):
            raise ConfigError(f"case must be 1..5, got {self.case}")
        if self.case == 4:
            if self.z_dist is None:
                raise ConfigError("case 4 needs z_dist (the driving distribution)")
        else:
            if self.x_dist is None or self.y_dist is None:
                raise ConfigError(f"case {self.case} needs x_dist and y_dist")
        if self.case in (2, 3) and self.z_dist is None:
            raise ConfigError(f"case {self.case} needs z_dist")
        if not self.n_grid:
            raise ConfigError("n_grid must be nonempty")
        min_n = 4 if self.case == 1 else 5
        if min(self.n_grid) < min_n:
            raise ConfigError(f"case {self.case} needs every n >= {min_n}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.permutations < 1:
            raise ConfigError("permutations must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")

    @property
    def x_label(self) -> str:
        if self.case == 4:
            return label_for(self.z_dist)
        return label_for(self.x_dist)

    @property
    def y_label(self) -> str:
        if self.case == 4:
            return label_for(self.z_dist)
        return label_for(self.y_dist)

    @property
    def label(self) -> str:
        if self.case == 4:
            return f"case4:{label_for(self.z_dist)}"
        return f"case{self.case}:{self.x_label}-{self.y_label}"


def scenarios_for_case(case: int, n_grid, replications: int, alpha: float = 0.05,
                       permutations: int = 500, seed: int = 0,
                       pairs=None) -> list[ScenarioSpec]:
    """Default scenario roster for a case.

    Cases 1, 2, 3 and 5 pair every X-roster distribution with every Y-roster
    mixture (15 scenarios); case 4 yields one scenario per driver in
    Z_ROSTER. ``pairs`` restricts the roster: labels like "Be-M2N" (or bare
    driver labels for case 4).
    """
    if case == 4:
        drivers = list(Z_ROSTER) if pairs is None else [str(p) for p in pairs]
        return [ScenarioSpec(case=4, z_dist=default_distribution(d), n_grid=tuple(n_grid),
                             replications=replications, alpha=alpha,
                             permutations=permutations, seed=seed)
                for d in drivers]
    if case not in (1, 2, 3, 5):
        raise ConfigError(f"case must be 1..5, got {case}")
    if pairs is None:
        combos = [(x, y) for x in X_LABELS for y in Y_LABELS]
    else:
        combos = []
        for p in pairs:
            halves = str(p).split("-", 1)
            if len(halves) != 2:
                raise ConfigError(f"pair {p!r} must look like 'Be-M2N'")
            combos.append((halves[0], halves[1]))
    z_dist = default_distribution("ExpW") if case in (2, 3) else None
    return [ScenarioSpec(case=case, x_dist=default_distribution(x),
                         y_dist=default_distribution(y), z_dist=z_dist,
                         n_grid=tuple(n_grid), replications=replications,
                         alpha=alpha, permutations=permutations, seed=seed)
            for x, y in combos]


@dataclass(frozen=True)
class RateReport:
    """Rejection counts for one scenario across the sample-size grid."""

    scenario: str
    case: int
    x_label: str
    y_label: str
    n_grid: tuple[int, ...]
    replications: int
    alpha: float
    permutations: int
    seed: int
    counts: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def rate(self, method: str, n: int) -> float:
        return self.counts[method][self.n_grid.index(n)] / self.replications

    def se(self, method: str, n: int) -> float:
        p = self.rate(method, n)
        return sqrt(p * (1.0 - p) / self.replications)


@dataclass(frozen=True)
class FilterReport:
    """Mean selection counts for the 400-predictor filtering study."""

    n_grid: tuple[int, ...]
    replications: int
    alpha: float
    permutations: int
    seed: int
    mean_counts: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def mean(self, key: str, n: int) -> float:
        return self.mean_counts[key][self.n_grid.index(n)]


FILTER_KEYS = ("P_true", "P_false", "A_true", "A_false", "Pear_true", "Pear_false",
               "P_and_A", "P_and_Pear", "A_and_Pear")


def _stop_count(alpha: float, r_total: int) -> int:
    # Smallest exceedance count that already forces p >= alpha.
    c = 0
    while (1.0 + c) / (r_total + 1.0) < alpha:
        c += 1
    return c


def _dcor_perm_reject(xa, ya, r_total: int, alpha: float, perm_rng: RngStream,
                      parts: _PairParts | None = None,
                      vx: float | None = None, vy: float | None = None) -> bool:
    stop = _stop_count(alpha, r_total)
    if stop == 0:
        return False
    if vx is None:
        vx = _unbiased_from(_self_aggregates(xa))
    if vy is None:
        vy = _unbiased_from(_self_aggregates(ya))
    if vx <= 0.0 or vy <= 0.0:
        return False
    if parts is None:
        parts = _PairParts(xa, ya)
    cov0 = float(parts.cov_batch(_identity_perm(xa.size))[0])
    threshold = cov0 - _tie_tol_cov(vx, vy)
    count = 0
    g = perm_rng.generator()
    for perms in _perm_chunks(g, xa.size, r_total):
        count += parts.exceed_count(perms, threshold, stop - count)
        if count >= stop:
            return False
    return (1.0 + count) / (r_total + 1.0) < alpha


def _pdcor_perm_reject(xa, ya, za, r_total: int, alpha: float,
                       perm_rng: RngStream) -> bool:
    stop = _stop_count(alpha, r_total)
    if stop == 0:
        return False
    parts = _TripleParts(xa, ya, za)
    pd0 = float(parts.stat_batch(_identity_perm(xa.size))[0])
    threshold = pd0 - _tie_tol_stat(pd0)
    count = 0
    g = perm_rng.generator()
    for perms in _perm_chunks(g, xa.size, r_total):
        count += parts.exceed_count(perms, threshold, stop - count)
        if count >= stop:
            return False
    return (1.0 + count) / (r_total + 1.0) < alpha


def _generate(spec: ScenarioSpec, n: int, g: np.random.Generator):
    if spec.case == 1:
        return sample(spec.x_dist, n, g), sample(spec.y_dist, n, g), None
    if spec.case == 2:
        x = sample(spec.x_dist, n, g)
        y = sample(spec.y_dist, n, g)
        return x, y, sample(spec.z_dist, n, g)
    if spec.case == 3:
        x = sample(spec.x_dist, n, g)
        y = sample(spec.y_dist, n, g)
        z = sample(spec.z_dist, n, g)
        return x + z, y + z, z
    if spec.case == 4:
        z = sample(spec.z_dist, n, g)
        x, y = gen_case4(z, g)
        return x, y, z
    x = sample(spec.x_dist, n, g)
    y = sample(spec.y_dist, n, g)
    return x, y, gen_case5(x, y, g)


def _run_replication(spec: ScenarioSpec, n: int, data_rng: RngStream,
                     perm_rng: RngStream) -> dict[str, bool]:
    """One replication: generate data, run the three tests, return rejections."""
    g = data_rng.generator()
    x, y, z = _generate(spec, n, g)
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    alpha = spec.alpha
    out: dict[str, bool] = {}
    if z is None:
        out["P"] = _dcor_perm_reject(x, y, spec.permutations, alpha, perm_rng)
        out["A"] = dcor_test_asymptotic(x, y).p_value < alpha
        out["Pear"] = pearson_test(pearson_corr(x, y)).p_value < alpha
    else:
        z = np.ascontiguousarray(z, dtype=np.float64)
        out["P"] = _pdcor_perm_reject(x, y, z, spec.permutations, alpha, perm_rng)
        out["A"] = pdcor_test_asymptotic(x, y, z).p_value < alpha
        out["Pear"] = pearson_test(partial_pearson(x, y, z)).p_value < alpha
    return out


def run_case(spec: ScenarioSpec, threads: int = 1) -> RateReport:
    """Estimate rejection rates for one scenario across its sample-size grid.

    ``threads`` parallelizes replications; every thread count produces
    identical counts because each replication owns pre-assigned RNG streams.
    """
    spec.validate()
    grid = spec.n_grid
    reps = spec.replications
    counts = np.zeros((len(METHODS), len(grid)), dtype=np.int64)

    cell_seeds = [derive_seed(spec.seed, n) for n in grid]

    def task(n_idx: int, rep: int) -> tuple[int, dict[str, bool]]:
        rejected = _run_replication(spec, grid[n_idx],
                                    RngStream(cell_seeds[n_idx], 2 * rep),
                                    RngStream(cell_seeds[n_idx], 2 * rep + 1))
        return n_idx, rejected

    cells = [(ni, rep) for ni in range(len(grid)) for rep in range(reps)]
    if threads <= 1:
        results = (task(ni, rep) for ni, rep in cells)
        for n_idx, rejected in results:
            for m_idx, m in enumerate(METHODS):
                counts[m_idx, n_idx] += rejected[m]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            futures = [pool.submit(task, ni, rep) for ni, rep in cells]
            for fut in futures:
                n_idx, rejected = fut.result()
                for m_idx, m in enumerate(METHODS):
                    counts[m_idx, n_idx] += rejected[m]

    return RateReport(
        scenario=spec.label, case=spec.case, x_label=spec.x_label,
        y_label=spec.y_label, n_grid=grid, replications=reps, alpha=spec.alpha,
        permutations=spec.permutations, seed=spec.seed,
        counts={m: tuple(int(c) for c in counts[i]) for i, m in enumerate(METHODS)},
    )


def _filter_replicate(n: int, rep: int, seed: int, alpha: float,
                      r_total: int) -> np.ndarray:
    cell_seed = derive_seed(seed, n)
    data_rng = RngStream(cell_seed, 2 * rep)
    perm_rng = RngStream(cell_seed, 2 * rep + 1)
    g = data_rng.generator()
    x_mat, y, support = gen_case6(n, g)
    n_cols = x_mat.shape[1]
    true_mask = np.zeros(n_cols, dtype=bool)
    true_mask[support] = True

    stop = _stop_count(alpha, r_total)
    # One permutation matrix serves every column's test in this replication;
    # each column still sees exactly the marginal permutation distribution.
    base = np.arange(n, dtype=np.int64)
    perms = np.tile(base, (r_total, 1))
    perm_rng.generator().permuted(perms, axis=1, out=perms)

    b_row = _abs_row_sums(y)
    sy = float(y.sum())
    vy = _unbiased_from(_self_aggregates(y))
    yc = y - y.mean()
    syy = float(yc @ yc)
    df = n - 3
    identity = _identity_perm(n)

    sel_p = np.zeros(n_cols, dtype=bool)
    s_stat = np.empty(n_cols)
    t_stat = np.empty(n_cols)
    for j in range(n_cols):
        x = np.ascontiguousarray(x_mat[:, j])
        vx = _unbiased_from(_self_aggregates(x))
        if vx <= 0.0 or vy <= 0.0:
            sel_p[j] = False
            s_stat[j] = 1.0
        else:
            parts = _PairParts(x, y, b_row=b_row, sy=sy)
            cov0 = float(parts.cov_batch(identity)[0])
            s_stat[j] = n * (cov0 / sqrt(vx * vy)) + 1.0
            if stop == 0:
                sel_p[j] = False
            else:
                threshold = cov0 - _tie_tol_cov(vx, vy)
                count = parts.exceed_count(perms, threshold, stop)
                sel_p[j] = (count < stop
                            and (1.0 + count) / (r_total + 1.0) < alpha)
        xc = x - x.mean()
        sxx = float(xc @ xc)
        r = float(xc @ yc) / sqrt(sxx * syy) if sxx > 0.0 and syy > 0.0 else 0.0
        t_stat[j] = fisher_transform(r) * sqrt(df)

    sel_a = chi2.sf(s_stat, 1) < alpha
    sel_pear = 2.0 * t_dist.sf(np.abs(t_stat), df) < alpha

    return np.array([
        int((sel_p & true_mask).sum()), int((sel_p & ~true_mask).sum()),
        int((sel_a & true_mask).sum()), int((sel_a & ~true_mask).sum()),
        int((sel_pear & true_mask).sum()), int((sel_pear & ~true_mask).sum()),
        int((sel_p & sel_a).sum()), int((sel_p & sel_pear).sum()),
        int((sel_a & sel_pear).sum()),
    ], dtype=np.int64)


def run_filtering(n_grid=(100, 200, 300, 500, 1000), replications: int = 50,
                  alpha: float = 0.05, permutations: int = 500, seed: int = 0,
                  threads: int = 1) -> FilterReport:
    """Run the 400-predictor filtering study over a sample-size grid.

    For every replication each predictor is tested marginally against the
    response by the three methods at level alpha; reported values are mean
    counts over replications of true selections, false selections, and
    pairwise overlaps between the methods' selection sets.
    """
    grid = tuple(int(n) for n in n_grid)
    if not grid or min(grid) < 4:
        raise ConfigError("filtering needs a nonempty grid with every n >= 4")
    if replications < 1:
        raise ConfigError("replications must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if permutations < 1:
        raise ConfigError("permutations must be >= 1")
    if seed < 0:
        raise ConfigError("seed must be nonnegative")

    sums = np.zeros((len(grid), len(FILTER_KEYS)), dtype=np.int64)
    cells = [(ni, rep) for ni in range(len(grid)) for rep in range(replications)]

    def task(n_idx: int, rep: int):
        return n_idx, _filter_replicate(grid[n_idx], rep, seed, alpha, permutations)

    if threads <= 1:
        for ni, rep in cells:
            n_idx, row = task(ni, rep)
            sums[n_idx] += row
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            futures = [pool.submit(task, ni, rep) for ni, rep in cells]
            for fut in futures:
                n_idx, row = fut.result()
                sums[n_idx] += row

    means = sums / float(replications)
    return FilterReport(
        n_grid=grid, replications=replications, alpha=alpha,
        permutations=permutations, seed=seed,
        mean_counts={k: tuple(float(v) for v in means[:, i])
                     for i, k in enumerate(FILTER_KEYS)},
    )
