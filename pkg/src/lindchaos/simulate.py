"""Simulation and N-sweep drivers that write trajectory CSVs and JSON summaries."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as bd
from . import tensor as ta
from .config import SimConfig
from .dynamics import MeanFieldGenerator, NBodyGenerator, Trajectory, integrate
from .entropy import normalized_entropy, relative_entropy
from .errors import ConfigError
from .meanfield import exp_moment, interaction_observables

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "t",
    "h_n",
    "bound_rhs_log",
    "lambda_min_m",
    "floor",
    "trace_dist_k1",
    "trace_dist_k2",
    "exp_moment",
)

# H_N at or below this level is compared against the bound as log 0 = -inf
H_ZERO_TOL = 1e-10


@dataclass
class EntropyRecord:
    t: float
    h_n: float
    bound_rhs_log: float
    lambda_min_m: float
    floor: float
    trace_dist_k1: float
    trace_dist_k2: float | None
    exp_moment: float | None = None

    def violations(self) -> list[str]:
        out = []
        if self.h_n < -1e-10:
            out.append(f"t={self.t:.6g}: h_n={self.h_n:.3e} is negative")
        if self.lambda_min_m < self.floor - 1e-8:
            out.append(f"t={self.t:.6g}: lambda_min(m)={self.lambda_min_m:.6g} below floor {self.floor:.6g}")
        h = self.h_n if self.h_n > H_ZERO_TOL else 0.0
        if bd.log_entropy(h) > self.bound_rhs_log:
            out.append(f"t={self.t:.6g}: log h_n exceeds the entropy bound")
        return out


@dataclass
class RunResult:
    n: int
    records: list[EntropyRecord]
    bound: bd.BoundParams | None
    # D(rho^{N:(k)} || m^{⊗k}) per record, keyed by k; diagnostics only
    marginal_entropy: dict[int, list[float]] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    warned: bool = False
    csv_path: Path | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    @property
    def h_n(self) -> np.ndarray:
        return np.array([r.h_n for r in self.records])


def bound_params_for(cfg: SimConfig) -> bd.BoundParams:
    params = cfg.params
    k = bd.k_constant(ta.lambda_min(cfg.m0), params.l_norm, cfg.t_end)
    a_norm = params.a_norm
    q = cfg.q
    if q is None and a_norm * k == 0:
        # every q > 0 is admissible; the bound does not depend on q then
        q = 1.0
    return bd.bound_constants(q, a_norm, k)


def meanfield_trajectory(cfg: SimConfig) -> Trajectory:
    return integrate(
        MeanFieldGenerator(cfg.params),
        cfg.m0,
        cfg.t_end,
        cfg.dt,
        record_stride=cfg.record_stride,
        tol=cfg.tolerances,
        n=1,
        params=cfg.params,
    )


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def _row(r: EntropyRecord) -> list[str]:
    return [_fmt(getattr(r, c)) for c in CSV_COLUMNS]


def write_records(path: Path, records: list[EntropyRecord]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        w.writerows(_row(r) for r in records)


def read_records(path: Path) -> list[dict]:
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


def run_simulation(
    cfg: SimConfig,
    n: int | None = None,
    out_dir: Path | None = None,
    mf_traj: Trajectory | None = None,
    write_summary: bool = True,
) -> RunResult:
    """Integrate the N-body and mean-field flows from m0^{⊗N} and record entropy diagnostics."""
    n = n if n is not None else cfg.n
    if n is None:
        raise ConfigError("a single particle number is required")
    cfg.validate([n])
    params = cfg.params
    tol = cfg.tolerances
    d = cfg.d
    bp = bound_params_for(cfg)
    lmin0 = ta.lambda_min(cfg.m0)
    l_norm = params.l_norm

    mf = mf_traj if mf_traj is not None else meanfield_trajectory(cfg)
    log.info("integrating N=%d (dimension %d)", n, d**n)
    nb = integrate(
        NBodyGenerator(params, n, assume_hermitian=True),
        ta.kron_power(cfg.m0, n),
        cfg.t_end,
        cfg.dt,
        record_stride=cfg.record_stride,
        tol=tol,
        n=n,
        params=params,
    )
    if len(nb.times) != len(mf.times) or np.max(np.abs(nb.times - mf.times)) > 1e-12:
        raise RuntimeError("N-body and mean-field grids differ")

    records: list[EntropyRecord] = []
    marg: dict[int, list[float]] = {1: [], 2: []}
    h0 = None
    want_moment = cfg.exp_moment and d**n <= ta.MAX_DIM
    for t, rho, m in zip(nb.times, nb.states, mf.states):
        h = normalized_entropy(rho, m, n, tol)
        if h0 is None:
            h0 = max(h, 0.0)
        rho1 = ta.partial_trace(rho, [1], n, d)
        td1 = ta.trace_norm(rho1 - m)
        marg[1].append(relative_entropy(rho1, m, tol).value)
        td2 = None
        if n >= 2:
            rho2 = ta.partial_trace(rho, [1, 2], n, d)
            mm = np.kron(m, m)
            td2 = ta.trace_norm(rho2 - mm)
            marg[2].append(relative_entropy(rho2, mm, tol).value)
        em = None
        if want_moment:
            a_hat = interaction_observables(params.a_int, m, tol).a_hat
            em = exp_moment(m, a_hat, n, bp.q)
        records.append(
            EntropyRecord(
                t=float(t),
                h_n=h,
                bound_rhs_log=bd.theorem_rhs_log(float(t), h0, n, bp),
                lambda_min_m=ta.lambda_min(m),
                floor=bd.faithfulness_floor(float(t), lmin0, l_norm),
                trace_dist_k1=td1,
                trace_dist_k2=td2,
                exp_moment=em,
            )
        )
    violations = [v for r in records for v in r.violations()]
    res = RunResult(
        n=n,
        records=records,
        bound=bp,
        marginal_entropy={k: v for k, v in marg.items() if v},
        violations=violations,
        warned=nb.warned or mf.warned,
    )
    out = Path(out_dir) if out_dir is not None else cfg.out_dir
    res.csv_path = out / f"trajectory_N{n}.csv"
    write_records(res.csv_path, records)
    if write_summary:
        summary = {
            "tool": "lindchaos",
            "version": __version__,
            "n": n,
            "final_h_n": records[-1].h_n,
            "all_invariants_hold": res.ok,
            "violations": violations,
            "sanitize_warning": res.warned,
            "bound": asdict(bp),
            "config": cfg.echo(),
        }
        write_json(out / "summary.json", summary)
    return res


def _jsonable(x):
    """Plain JSON: numpy scalars unwrapped, non-finite floats as the strings "inf", "-inf", "nan"."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n")


def fit_slope(ns, hs) -> tuple[float | None, float | None]:
    """Least-squares slope and intercept of log H against log N; None when undefined.

    Entropies at round-off level (<= H_ZERO_TOL) carry no scaling information and are dropped.
    """
    pts = [(math.log(n), math.log(h)) for n, h in zip(ns, hs) if h > H_ZERO_TOL]
    if len({p[0] for p in pts}) < 2:
        return None, None
    x, y = np.array(pts).T
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


@dataclass
class SweepResult:
    runs: dict[int, RunResult]
    slope: float | None
    intercept: float | None
    slopes_by_time: list[dict]

    @property
    def final_entropy(self) -> dict[int, float]:
        return {n: r.records[-1].h_n for n, r in sorted(self.runs.items())}

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.runs.values())


def run_sweep(
    cfg: SimConfig,
    n_list: list[int] | None = None,
    out_dir: Path | None = None,
    workers: int = 1,
) -> SweepResult:
    """run_simulation for every N, then fit log H_N(T) against log N."""
    ns = sorted(set(n_list if n_list is not None else (cfg.n_list or [])))
    if not ns:
        raise ConfigError("n_list is empty")
    cfg.validate(ns)
    out = Path(out_dir) if out_dir is not None else cfg.out_dir
    mf = meanfield_trajectory(cfg)

    def one(n: int) -> RunResult:
        return run_simulation(cfg, n, out, mf_traj=mf, write_summary=False)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(zip(ns, pool.map(one, ns)))
    else:
        results = {n: one(n) for n in ns}

    finals = [results[n].records[-1].h_n for n in ns]
    slope, intercept = fit_slope(ns, finals)
    by_time = []
    for i, r0 in enumerate(results[ns[0]].records):
        s, c = fit_slope(ns, [results[n].records[i].h_n for n in ns])
        by_time.append({"t": r0.t, "slope": s, "intercept": c})

    out.mkdir(parents=True, exist_ok=True)
    with (out / "sweep.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n",) + CSV_COLUMNS)
        for n in ns:
            w.writerows([str(n)] + _row(r) for r in results[n].records)

    summary = {
        "tool": "lindchaos",
        "version": __version__,
        "per_N_final_entropy": {str(n): h for n, h in zip(ns, finals)},
        "slope": slope,
        "intercept": intercept,
        "slopes_by_time": by_time,
        "all_invariants_hold": all(results[n].ok for n in ns),
        "violations": {str(n): results[n].violations for n in ns if results[n].violations},
        "config": cfg.echo(),
    }
    write_json(out / "summary.json", summary)
    return SweepResult(results, slope, intercept, by_time)
