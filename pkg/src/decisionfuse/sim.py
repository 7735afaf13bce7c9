"""Seeded Monte Carlo harness for the six simulation scenarios.

Each repetition draws a truth vector and per-hypothesis means from the
mixture 0.8*point-mass(0) + 0.1*N(3,1) + 0.1*N(-3,1) (nulls are exact
zeros so that study-level z-tests are calibrated), generates study data
per the scenario, forms two-sided p-values, runs BH at each study's own
level to obtain its decision sequence, and then evaluates every requested
fusion method, recording FDP and true-positive counts.

One Philox stream per repetition (stream_id = repetition index) makes
repetitions order-independent and reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .aggregate import AGG, AGG_STAR, aggregate_evidence, coverage
from .baselines import fisher_pool, hm_pool, naive_vote
from .calibrate import PValueStudy, PValueTable, p2e_pipeline
from .core import StudyTriplet, TruthVector
from .evidence import build_evidence
from .mtp import bh, ebh, fdp_etp
from .statdist import RngStream, rng_stream, sample_kronecker_normal, two_sided_p

IRT = "irt"
IRT_STAR = "irt_star"
P2E = "p2e"
P2E_STAR = "p2e_star"
NAIVE = "naive"
FISHER = "fisher"
HM = "hm"
ALL_METHODS = (IRT, IRT_STAR, P2E, P2E_STAR, NAIVE, FISHER, HM)

_DEFAULT_METHODS = {
    1: (IRT, P2E, NAIVE, FISHER),
    2: (IRT, P2E, NAIVE, FISHER, HM),
    3: (IRT, P2E, NAIVE, FISHER, HM),
    4: (IRT, P2E, NAIVE, FISHER),
    5: (IRT, IRT_STAR, P2E, P2E_STAR, NAIVE, FISHER),
    6: (IRT, IRT_STAR, P2E, P2E_STAR, NAIVE, FISHER),
}

GRID_KEYS = {1: "d", 2: "rho", 3: "d", 4: "K", 5: "eta", 6: "eta"}


@dataclass(frozen=True)
class ScenarioConfig:
    """Full parameterization of one simulation grid point."""

    scenario: int
    reps: int
    seed: int
    m: int = 1000
    d: int = 10
    alpha: float = 0.1
    alpha_study: float = 0.01
    methods: tuple[str, ...] = ()
    # scenario-specific knobs
    sigma_low: float = 0.75
    sigma_high: float = 2.0
    rho: float | None = None            # scenario 2
    rho_study: float = 0.7              # scenario 3
    rho_hyp: float = 0.5                # scenario 3
    k_signal: int | None = None         # scenario 4
    coverage_max: int = 20              # scenario 5 (the paper's n)
    eta: float | None = None            # scenarios 5 and 6
    m_top: int = 900                    # scenario 6 (m_(1))

    def __post_init__(self):
        if self.scenario not in range(1, 7):
            raise ValueError(f"scenario must be 1..6, got {self.scenario}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.m < 1 or self.d < 1:
            raise ValueError("m and d must be positive")
        if not (0 < self.alpha < 1):
            raise ValueError("alpha must lie in (0, 1)")
        if not self.methods:
            object.__setattr__(self, "methods", _DEFAULT_METHODS[self.scenario])
        unknown = set(self.methods) - set(ALL_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if self.scenario == 2 and self.rho is None:
            raise ValueError("scenario 2 requires rho")
        if self.scenario == 4 and (self.k_signal is None
                                   or not 0 <= self.k_signal <= self.d):
            raise ValueError("scenario 4 requires K in [0, d]")
        if self.scenario in (5, 6) and (self.eta is None or not 0 < self.eta <= 1):
            raise ValueError(f"scenario {self.scenario} requires eta in (0, 1]")
        if self.scenario == 6 and not 1 <= self.m_top <= self.m:
            raise ValueError("scenario 6 requires 1 <= m_top <= m")

    def needs_pvalues(self) -> bool:
        return bool({P2E, P2E_STAR, FISHER, HM} & set(self.methods))


def scenario_config(scenario: int, **kwargs) -> ScenarioConfig:
    """Build a config with the scenario's published defaults filled in."""
    defaults: dict = {"reps": 500, "seed": 0}
    if scenario == 2:
        defaults["d"] = 5
    elif scenario == 4:
        defaults["d"] = 30
    elif scenario == 5:
        defaults["d"] = 30
    elif scenario == 6:
        defaults["alpha"] = 0.15
    defaults.update(kwargs)
    return ScenarioConfig(scenario=scenario, **defaults)


@dataclass(frozen=True)
class RepMetrics:
    rep: int
    method: str
    fdp: float
    etp: int
    rejections: int


@dataclass(frozen=True)
class MethodSummary:
    method: str
    mean_fdp: float
    mean_etp: float
    se_fdp: float
    se_etp: float


@dataclass(frozen=True)
class RepData:
    """Everything one repetition generated, before any fusion method runs."""

    truth: TruthVector
    means: np.ndarray
    studies: tuple[StudyTriplet, ...]
    pvalues: PValueTable | None


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    metrics: tuple[RepMetrics, ...]
    summary: tuple[MethodSummary, ...]


def draw_truth_and_means(m: int, stream: RngStream) -> tuple[TruthVector, np.ndarray]:
    """Truth bits and means: 80% exact null, 10% N(3,1), 10% N(-3,1)."""
    u = stream.uniform(m)
    z = stream.standard_normal(m)
    means = np.zeros(m, dtype=np.float64)
    pos = (u >= 0.8) & (u < 0.9)
    neg = u >= 0.9
    means[pos] = 3.0 + z[pos]
    means[neg] = -3.0 + z[neg]
    theta = (pos | neg).astype(np.int64)
    return TruthVector(theta), means


def _study_alpha_s6(m_j: int) -> float:
    if m_j <= 600:
        return 0.05
    if m_j <= 800:
        return 0.03
    return 0.01


def generate_rep(config: ScenarioConfig, rep: int) -> RepData:
    """Generate one repetition's truth, study data, and BH decisions."""
    stream = rng_stream(config.seed, rep)
    m, d = config.m, config.d
    truth, means = draw_truth_and_means(m, stream)
    sc = config.scenario

    sigma = np.ones(d, dtype=np.float64)
    if sc in (1, 4):
        sigma = config.sigma_low + (config.sigma_high - config.sigma_low) * stream.uniform(d)

    if sc == 2:
        x = sample_kronecker_normal(m, d, config.rho, 0.0, means, stream)
    elif sc == 3:
        x = sample_kronecker_normal(m, d, config.rho_study, config.rho_hyp, means, stream)
    elif sc == 4:
        # Signal reaches exactly K randomly chosen studies per non-null.
        z = stream.standard_normal((m, d))
        present = np.zeros((m, d), dtype=np.float64)
        nonnull = np.nonzero(truth.theta)[0]
        for i in nonnull:
            chosen = stream.generator.choice(d, size=config.k_signal, replace=False)
            present[i, chosen] = 1.0
        x = present * means[:, None] + z * sigma[None, :]
    else:
        z = stream.standard_normal((m, d))
        x = means[:, None] + z * sigma[None, :]

    # Tested sets
    if sc == 5:
        n_max = config.coverage_max
        lo = math.ceil(n_max * config.eta)
        n_i = stream.generator.integers(lo, n_max + 1, size=m)
        member = np.zeros((m, d), dtype=bool)
        for i in range(m):
            member[i, stream.generator.choice(d, size=int(n_i[i]), replace=False)] = True
        tested = [np.nonzero(member[:, j])[0] for j in range(d)]
        study_alphas = [config.alpha_study] * d
    elif sc == 6:
        lo = math.ceil(config.m_top * config.eta)
        m_js = stream.generator.integers(lo, config.m_top + 1, size=d)
        tested = [np.sort(stream.generator.choice(m, size=int(m_js[j]), replace=False))
                  for j in range(d)]
        study_alphas = [_study_alpha_s6(int(m_js[j])) for j in range(d)]
    else:
        tested = [np.arange(m)] * d
        study_alphas = [config.alpha_study] * d

    studies: list[StudyTriplet] = []
    pstudies: list[PValueStudy] = []
    for j in range(d):
        ids = tested[j]
        p_j = two_sided_p(x[ids, j], sigma[j])
        rs = bh(p_j, study_alphas[j])
        bits = np.zeros(ids.size, dtype=np.int64)
        bits[rs.rejected] = 1
        studies.append(StudyTriplet(f"study-{j + 1}", study_alphas[j], ids, bits))
        if config.needs_pvalues():
            pstudies.append(PValueStudy(f"study-{j + 1}", study_alphas[j], ids, p_j))

    pvals = PValueTable(tuple(pstudies)) if config.needs_pvalues() else None
    return RepData(truth=truth, means=means, studies=tuple(studies), pvalues=pvals)


def evaluate_rep(config: ScenarioConfig, rep: int, data: RepData) -> list[RepMetrics]:
    """Run every requested method on one repetition's data."""
    cov = coverage(data.studies, config.m)
    vectors = [build_evidence(s) for s in data.studies]
    out: list[RepMetrics] = []

    def record(method: str, rs) -> None:
        fdp, etp = fdp_etp(rs, data.truth)
        out.append(RepMetrics(rep=rep, method=method, fdp=fdp, etp=etp,
                              rejections=rs.size))

    for method in config.methods:
        if method == IRT:
            agg = aggregate_evidence(vectors, cov, AGG)
            record(method, ebh(agg.values, config.alpha))
        elif method == IRT_STAR:
            agg = aggregate_evidence(vectors, cov, AGG_STAR)
            record(method, ebh(agg.values, config.alpha))
        elif method == P2E:
            record(method, p2e_pipeline(data.pvalues, cov, AGG, config.alpha))
        elif method == P2E_STAR:
            record(method, p2e_pipeline(data.pvalues, cov, AGG_STAR, config.alpha))
        elif method == NAIVE:
            record(method, naive_vote(data.studies, config.m))
        elif method == FISHER:
            record(method, fisher_pool(data.pvalues, cov, config.alpha))
        elif method == HM:
            record(method, hm_pool(data.pvalues, cov, config.alpha))
    return out


def null_evidence_total(data: RepData, m: int, mode: str = AGG) -> float:
    """Sum of aggregated evidence over the true nulls of one repetition."""
    cov = coverage(data.studies, m)
    agg = aggregate_evidence([build_evidence(s) for s in data.studies], cov, mode)
    return float(agg.values[data.truth.theta == 0].sum())


def summarize(metrics: list[RepMetrics], methods) -> tuple[MethodSummary, ...]:
    rows = []
    for method in methods:
        fdps = np.array([r.fdp for r in metrics if r.method == method])
        etps = np.array([r.etp for r in metrics if r.method == method], dtype=np.float64)
        k = fdps.size
        se = lambda a: float(a.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
        rows.append(MethodSummary(method=method,
                                  mean_fdp=float(fdps.mean()),
                                  mean_etp=float(etps.mean()),
                                  se_fdp=se(fdps),
                                  se_etp=se(etps)))
    return tuple(rows)


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Run every repetition of one grid point and summarize per method."""
    metrics: list[RepMetrics] = []
    for rep in range(config.reps):
        data = generate_rep(config, rep)
        metrics.extend(evaluate_rep(config, rep, data))
    return ScenarioResult(config=config,
                          metrics=tuple(metrics),
                          summary=summarize(metrics, config.methods))


def apply_grid_value(config: ScenarioConfig, value) -> ScenarioConfig:
    """Return a copy of ``config`` with the scenario's swept knob set."""
    key = GRID_KEYS[config.scenario]
    if key == "d":
        return replace(config, d=int(value))
    if key == "rho":
        return replace(config, rho=float(value))
    if key == "K":
        return replace(config, k_signal=int(value))
    return replace(config, eta=float(value))
