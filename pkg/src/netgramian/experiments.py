"""Seeded ensemble experiments over random-walk networks.

Every realization is keyed by ``(master_seed, n, realization_index)``; its
64-bit seed (written to the CSV) regenerates the same matrices with
``build_pipeline(GraphModelConfig(..., seed=seed))``. Records are produced in
a fixed order regardless of worker count, so the CSV output depends only on
the configuration (the ``runtime_ms`` column aside).
"""
from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import NetGramianError, PreconditionError
from .gramian import ControlSystem, energy_bound, gramian, log_energy_bound
from .graph_models import GraphModelConfig, build_pipeline, make_rng
from .spectral import SpectralData, leading_eigenpair

log = logging.getLogger(__name__)

__all__ = [
    "SCHEMA_VERSION",
    "PRESETS",
    "ExperimentConfig",
    "EnsembleRecord",
    "EnsembleResult",
    "ScalingRow",
    "place_controls",
    "schedule_m",
    "run_ensemble",
    "scaling_study",
    "write_records",
    "write_summary",
    "strictly_decreasing",
    "default_threads",
]

SCHEMA_VERSION = 1
THREADS_ENV = "NETGRAMIAN_THREADS"
MAX_FAILURE_RATE = 0.05
AUDIT_EVERY = 20  # spot-audit lambda_min(2T) >= lambda_min(T) on 5% of realizations
STRATEGIES = ("HCN", "LCN", "RN")
SCHEDULES = ("const", "sqrt", "n_over_logn", "n13_over_logn", "linear_fraction")

_FIG4 = dict(weight_mode="asymmetric", weight_range=(0.5, 4.0), alpha=0.5, strategies=("none",))
_FIG5 = dict(weight_mode="symmetric", weight_range=(0.5, 2.0), alpha=0.5, strategies=STRATEGIES,
             placement_fraction=1 / 3, horizon_rule="n", n_grid=(30, 60, 90))
_SCALING = dict(weight_mode="symmetric", weight_range=(0.5, 2.0), alpha=0.25, strategies=("none",))

PRESETS = {
    "fig4_er": dict(model="ER", c=4.0, n_grid=(100, 200, 400), **_FIG4),
    "fig4_ba": dict(model="BA", d=2, n_grid=(100, 200, 400), **_FIG4),
    "fig5_er": dict(model="ER", c=4.0, **_FIG5),
    "fig5_ba": dict(model="BA", d=2, **_FIG5),
    "scaling_ba": dict(model="BA", d=2, n_grid=(50, 100, 200, 400), schedule="sqrt", **_SCALING),
    "scaling_er": dict(model="ER", c=4.0, n_grid=(50, 100, 200, 400), schedule="sqrt", **_SCALING),
    "scaling_cube": dict(model="KARY", dim=3, n_grid=tuple(k**3 for k in range(2, 9)),
                         schedule="n13_over_logn", **_SCALING),
    "custom": dict(model="BA"),
}


def default_threads() -> int:
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "custom"
    model: str = "BA"
    n_grid: tuple = (50,)
    realizations: int = 50
    d: int = 2
    c: float = 4.0
    dim: int = 3
    weight_range: tuple = (0.5, 2.0)
    weight_mode: str = "symmetric"
    alpha: float = 0.5
    strategies: tuple = ("none",)
    placement_fraction: float = 1 / 3
    horizon_rule: object = "n"  # "n", "converged" or a positive int
    schedule: str | None = None
    schedule_const: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.realizations < 1:
            raise PreconditionError("realizations must be positive")
        if not 0 < self.placement_fraction <= 1:
            raise PreconditionError("placement_fraction must lie in (0, 1]")
        for s in self.strategies:
            if s not in STRATEGIES + ("none",):
                raise PreconditionError(f"unknown strategy {s!r}")
        if self.schedule is not None and self.schedule not in SCHEDULES:
            raise PreconditionError(f"unknown schedule {self.schedule!r}")
        if not (self.horizon_rule in ("n", "converged")
                or (isinstance(self.horizon_rule, int) and self.horizon_rule >= 1)):
            raise PreconditionError(f"bad horizon rule {self.horizon_rule!r}")
        if self.model.upper() == "KARY":
            for n in self.n_grid:
                _cube_side(n, self.dim)

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "ExperimentConfig":
        if name not in PRESETS:
            raise PreconditionError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        params = dict(PRESETS[name])
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(preset=name, **params)

    def graph_config(self, n: int, seed: int) -> GraphModelConfig:
        if self.model.upper() == "KARY":
            return GraphModelConfig("KARY", k=_cube_side(n, self.dim), dim=self.dim,
                                    weight_range=tuple(self.weight_range),
                                    weight_mode=self.weight_mode, alpha=self.alpha, seed=seed)
        return GraphModelConfig(self.model, n=n, d=self.d, c=self.c,
                                weight_range=tuple(self.weight_range),
                                weight_mode=self.weight_mode, alpha=self.alpha, seed=seed)


def _cube_side(n, dim):
    k = round(n ** (1.0 / dim))
    if k**dim != n:
        raise PreconditionError(f"n = {n} is not a perfect power k**{dim}")
    return k


@dataclass(frozen=True)
class EnsembleRecord:
    preset: str
    model: str
    n: int
    realization_index: int
    seed: int
    sigma2: float
    heterogeneity: float
    strategy: str
    m: int
    T: int
    lambda_min: float
    bound: float
    log_bound: float
    runtime_ms: float
    error: str = ""
    warning: str = ""


CSV_FIELDS = ["schema_version"] + [f.name for f in fields(EnsembleRecord)]


def schedule_m(schedule: str, n: int, fraction: float = 1 / 3, const: int = 1):
    """Control-set size for ``n`` under ``schedule``; returns ``(m, clamped)``."""
    if schedule == "const":
        raw = float(const)
    elif schedule == "sqrt":
        raw = math.sqrt(n)
    elif schedule == "n_over_logn":
        raw = n / math.log(n)
    elif schedule == "n13_over_logn":
        raw = n ** (1.0 / 3.0) / math.log(n)
    elif schedule == "linear_fraction":
        raw = fraction * n
    else:
        raise PreconditionError(f"unknown schedule {schedule!r}")
    m = math.ceil(raw - 1e-9)
    if m < 1:
        return 1, True
    return min(m, n), False


def place_controls(v, m: int, strategy: str, rng: np.random.Generator | None = None) -> tuple:
    """Control nodes by centrality ``v``: largest (HCN), smallest (LCN) or random (RN).

    Ties go to the lower index. Returned indices are sorted.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    if not 1 <= m <= n:
        raise PreconditionError(f"need 1 <= m <= n, got m = {m}")
    if strategy == "HCN":
        order = sorted(range(n), key=lambda i: (-v[i], i))
    elif strategy == "LCN":
        order = sorted(range(n), key=lambda i: (v[i], i))
    elif strategy == "RN":
        if rng is None:
            raise PreconditionError("RN placement needs a random generator")
        order = [int(i) for i in rng.choice(n, m, replace=False)]
    else:
        raise PreconditionError(f"unknown strategy {strategy!r}")
    return tuple(sorted(order[:m]))


def _horizon(rule, n):
    if rule == "n":
        return n
    if rule == "converged":
        return None
    return int(rule)


def _lambda_min_converged(A, K, v, T_max, tol=1e-10, patience=5):
    sys = ControlSystem(A, K)
    BBt = sys.B @ sys.B.T
    W = np.zeros_like(sys.A)
    prev = -math.inf
    calm = 0
    for T in range(1, T_max + 1):
        W = sys.A @ W @ sys.A.T + BBt
        lam = float(np.linalg.eigvalsh(0.5 * (W + W.T))[0])
        calm = calm + 1 if lam - prev < tol else 0
        prev = lam
        if calm >= patience:
            break
    return lam, T


def _bounds(S: SpectralData, n, m):
    try:
        return energy_bound(S.heterogeneity, S.sigma2, n, m), log_energy_bound(S.heterogeneity, S.sigma2, n, m)
    except NetGramianError:
        return math.nan, math.nan


def realization_seed(master_seed: int, n: int, index: int) -> int:
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(n), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_realization(cfg: ExperimentConfig, n: int, index: int) -> list:
    t0 = time.perf_counter()
    seed = realization_seed(cfg.master_seed, n, index)
    base = dict(preset=cfg.preset, model=cfg.model.upper(), n=n, realization_index=index, seed=seed)
    rng = make_rng(seed)
    try:
        pipe = build_pipeline(cfg.graph_config(n, seed), rng)
        S = leading_eigenpair(pipe.A_alpha)
    except NetGramianError as exc:
        nan = math.nan
        return [EnsembleRecord(**base, sigma2=nan, heterogeneity=nan, strategy=s, m=0, T=0,
                               lambda_min=nan, bound=nan, log_bound=nan,
                               runtime_ms=1e3 * (time.perf_counter() - t0),
                               error=type(exc).__name__) for s in cfg.strategies]
    shared_ms = 1e3 * (time.perf_counter() - t0)
    records = []
    for strategy in cfg.strategies:
        t1 = time.perf_counter()
        warning = ""
        if cfg.schedule is not None:
            m, clamped = schedule_m(cfg.schedule, n, cfg.placement_fraction, cfg.schedule_const)
            warning = "m_clamped_to_1" if clamped else ""
        elif strategy == "none":
            m = 0
        else:
            m = max(1, round(cfg.placement_fraction * n))
        bound, log_bound = _bounds(S, n, m) if m else (math.nan, math.nan)
        lam, T = math.nan, 0
        if strategy != "none":
            K = place_controls(S.v, m, strategy, rng)
            T = _horizon(cfg.horizon_rule, n)
            if T is None:
                lam, T = _lambda_min_converged(pipe.A_alpha, K, S.v, 50 * n)
            else:
                lam = gramian(ControlSystem(pipe.A_alpha, K), T, v=S.v).lambda_min
                if index % AUDIT_EVERY == 0:
                    lam2 = gramian(ControlSystem(pipe.A_alpha, K), 2 * T, v=S.v).lambda_min
                    if lam2 < lam - 1e-12 * max(1.0, abs(lam)):
                        log.warning("lambda_min decreased from T=%d to T=%d (n=%d, index=%d, %s)",
                                    T, 2 * T, n, index, strategy)
                        warning = "monotonicity_audit_failed"
        records.append(EnsembleRecord(
            **base, sigma2=S.sigma2, heterogeneity=S.heterogeneity, strategy=strategy, m=m, T=T,
            lambda_min=lam, bound=bound, log_bound=log_bound,
            runtime_ms=shared_ms + 1e3 * (time.perf_counter() - t1), warning=warning,
        ))
    return records


def _run_task(args):
    return _run_realization(*args)


@dataclass
class EnsembleResult:
    config: ExperimentConfig
    records: list
    summary: list = field(default_factory=list)

    def ok(self):
        return [r for r in self.records if not r.error]


def _mean_stderr(values):
    arr = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else math.nan
    return float(arr.mean()), se


SUMMARY_STATS = ("sigma2", "heterogeneity", "lambda_min", "bound", "log_bound")


def summarize(records) -> list:
    """Per ``(preset, model, n, strategy)`` means and standard errors."""
    groups = {}
    for r in records:
        groups.setdefault((r.preset, r.model, r.n, r.strategy), []).append(r)
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], _strategy_rank(k[3]))):
        group = groups[key]
        good = [r for r in group if not r.error]
        row = dict(preset=key[0], model=key[1], n=key[2], strategy=key[3],
                   count=len(good), failed=len(group) - len(good),
                   m=good[0].m if good else 0)
        for stat in SUMMARY_STATS:
            row[f"mean_{stat}"], row[f"stderr_{stat}"] = _mean_stderr(getattr(r, stat) for r in good)
        rows.append(row)
    return rows


def _strategy_rank(s):
    order = ("none",) + STRATEGIES
    return order.index(s) if s in order else len(order)


def run_ensemble(cfg: ExperimentConfig, out=None, threads: int | None = None,
                 timing: bool = True) -> EnsembleResult:
    """Run every ``(n, realization)`` of ``cfg`` and optionally write CSVs.

    With ``out`` given, records go to ``out`` and group means to
    ``<out>.summary.csv``. ``timing=False`` writes ``runtime_ms`` as 0 so the
    record file is byte-reproducible.
    """
    threads = default_threads() if threads is None else max(1, int(threads))
    tasks = [(cfg, n, i) for n in cfg.n_grid for i in range(cfg.realizations)]
    if threads == 1:
        batches = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    records = [r for batch in batches for r in batch]
    if not timing:
        records = [replace(r, runtime_ms=0.0) for r in records]
    result = EnsembleResult(cfg, records, summarize(records))
    if out is not None:
        write_records(out, records)
        write_summary(f"{out}.summary.csv", result.summary)
    failed = {(r.n, r.realization_index) for r in records if r.error}
    if len(failed) > MAX_FAILURE_RATE * len(tasks):
        raise NetGramianError(f"{len(failed)} of {len(tasks)} realizations failed")
    return result


def _fmt(x):
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.12g}"
    return str(x)


def write_records(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow([SCHEMA_VERSION] + [_fmt(v) for v in asdict(r).values()])


def write_summary(path, rows) -> None:
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(["schema_version"] + header)
        for row in rows:
            writer.writerow([SCHEMA_VERSION] + [_fmt(row[h]) for h in header])


@dataclass(frozen=True)
class ScalingRow:
    model: str
    n: int
    m: int
    schedule: str
    mean_log_bound: float
    stderr_log_bound: float
    mean_sigma2: float
    mean_heterogeneity: float
    count: int
    warning: str = ""


SCALING_FIELDS = [f.name for f in fields(ScalingRow)]


def scaling_study(cfg: ExperimentConfig, out=None, threads: int | None = None) -> list:
    """Ensemble-mean log energy bound per ``n`` along ``cfg.schedule``."""
    if cfg.schedule is None:
        raise PreconditionError("scaling_study needs an m(n) schedule")
    cfg = replace(cfg, strategies=("none",))
    result = run_ensemble(cfg, threads=threads, timing=False)
    rows = []
    for n in cfg.n_grid:
        good = [r for r in result.ok() if r.n == n]
        m, clamped = schedule_m(cfg.schedule, n, cfg.placement_fraction, cfg.schedule_const)
        mean, se = _mean_stderr(r.log_bound for r in good)
        rows.append(ScalingRow(
            model=cfg.model.upper(), n=n, m=m, schedule=cfg.schedule,
            mean_log_bound=mean, stderr_log_bound=se,
            mean_sigma2=_mean_stderr(r.sigma2 for r in good)[0],
            mean_heterogeneity=_mean_stderr(r.heterogeneity for r in good)[0],
            count=len(good), warning="m_clamped_to_1" if clamped else "",
        ))
    if out is not None:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["schema_version"] + SCALING_FIELDS)
            for row in rows:
                writer.writerow([SCHEMA_VERSION] + [_fmt(v) for v in asdict(row).values()])
    return rows


def strictly_decreasing(values) -> bool:
    values = list(values)
    return all(b < a for a, b in zip(values, values[1:]))
