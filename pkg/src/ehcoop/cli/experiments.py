"""Analytic-versus-simulation experiments and their CSV/JSON outputs."""

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .. import __version__
from .._accel import USE_NUMBA
from ..analytic import (
    cluster_access_approx,
    cluster_access_series,
    link_ccdf_prop1,
    link_ccdf_theorem1,
    link_ccdf_theorem2,
    overall_success_theorem3,
)
from ..energy import EnergyProfile, simulate_buffer, transmission_probability
from ..geometry import ClusterGeometry
from ..mcsim import (
    simulate_cluster_access,
    simulate_link_ccdf,
    simulate_overall_success,
    wilson_interval,
)
from .config import THETA_ZERO, ExperimentSpec, load_preset

CSV_COLUMNS = ("theta", "analytic", "empirical", "ci_low", "ci_high")
SIG_DIGITS = 9
# fraction of grid points whose analytic value must fall in the CI (exact formulas)
MIN_CI_COVERAGE = 0.95
# K=1 series oracle against the access simulation
SERIES_TOLERANCE = 0.02
ARGMAX_ALLOWED = (1, 2, 3)
ARGMAX_BETA_STEP = 0.1


@dataclass
class Curve:
    label: str
    x_name: str
    x: np.ndarray
    analytic: np.ndarray
    empirical: Optional[np.ndarray] = None
    ci_low: Optional[np.ndarray] = None
    ci_high: Optional[np.ndarray] = None
    file: Optional[str] = None

    @property
    def sup_gap(self) -> float:
        if self.empirical is None:
            return float("nan")
        return float(np.max(np.abs(self.analytic - self.empirical)))

    @property
    def in_ci_fraction(self) -> float:
        if self.empirical is None:
            return float("nan")
        inside = (self.analytic >= self.ci_low) & (self.analytic <= self.ci_high)
        return float(np.mean(inside))

    def rows(self):
        for i in range(self.x.size):
            emp = (None, None, None) if self.empirical is None else (self.empirical[i], self.ci_low[i], self.ci_high[i])
            yield (self.x[i], self.analytic[i]) + emp


@dataclass
class ComparisonReport:
    name: str
    kind: str
    curves: List[Curve]
    tolerance: float
    seed: int
    trials: int
    cluster_source: str
    parameters: dict
    checks: dict = field(default_factory=dict)
    wall_time: float = 0.0
    files: List[str] = field(default_factory=list)

    @property
    def sup_gap(self) -> float:
        gaps = [c.sup_gap for c in self.curves if c.empirical is not None]
        return max(gaps) if gaps else float("nan")

    @property
    def in_ci_fraction(self) -> float:
        inside = [c.in_ci_fraction * c.x.size for c in self.curves if c.empirical is not None]
        total = sum(c.x.size for c in self.curves if c.empirical is not None)
        return sum(inside) / total if total else float("nan")

    @property
    def gap_ok(self) -> bool:
        gap = self.sup_gap
        return math.isnan(gap) or gap <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.gap_ok and all(c["pass"] for c in self.checks.values())

    def summary(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "seed": self.seed,
            "trials": self.trials,
            "cluster_source": self.cluster_source,
            "tolerance": self.tolerance,
            "sup_gap": _json_float(self.sup_gap),
            "in_ci_fraction": _json_float(self.in_ci_fraction),
            "pass": self.passed,
            "wall_time_s": round(self.wall_time, 3),
            "numba": USE_NUMBA,
            "version": __version__,
            "curves": [
                {
                    "label": c.label,
                    "file": c.file,
                    "x": c.x_name,
                    "sup_gap": _json_float(c.sup_gap),
                    "in_ci_fraction": _json_float(c.in_ci_fraction),
                }
                for c in self.curves
            ],
            "checks": self.checks,
            "parameters": self.parameters,
        }

    def text(self) -> str:
        lines = [f"{self.name} ({self.kind}) seed={self.seed} trials={self.trials} tolerance={self.tolerance:g}"]
        for c in self.curves:
            if c.empirical is None:
                lines.append(f"  {c.label:<12} analytic only")
            else:
                lines.append(f"  {c.label:<12} sup_gap={c.sup_gap:.4f} in_ci={c.in_ci_fraction:.3f}")
        for key, chk in self.checks.items():
            lines.append(f"  check {key}: {'PASS' if chk['pass'] else 'FAIL'} {chk.get('detail', '')}".rstrip())
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'} (sup_gap={self.sup_gap:.4f}, wall {self.wall_time:.1f}s)")
        return "\n".join(lines)


def _json_float(x: float):
    return None if math.isnan(x) else float(x)


# -- CSV ----------------------------------------------------------------------


def format_value(x) -> str:
    return "" if x is None else format(float(x), f".{SIG_DIGITS}g")


def csv_text(rows, header=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, rows, header=CSV_COLUMNS) -> None:
    Path(path).write_text(csv_text(rows, header), encoding="utf-8")


def read_csv(path):
    """``(header, rows)`` with empty cells as ``None``."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        rows = [tuple(None if v == "" else float(v) for v in row) for row in r]
    return header, rows


# -- experiment kinds ---------------------------------------------------------


def _from_estimate(est):
    return est.success_freq, est.ci_low, est.ci_high


def _link_fixed(spec: ExperimentSpec):
    fn = link_ccdf_theorem1 if spec.kind == "link_thm1" else link_ccdf_prop1
    thetas = spec.thetas
    sim = replace(spec.sim, theta_grid=tuple(thetas))
    curves = []
    for K in spec.cluster_sizes:
        model = spec.model_for(K)
        geom = ClusterGeometry(spec.distances[:K], model.eta)
        analytic = np.array([fn(model, geom, t) for t in thetas])
        profiles = spec.in_cluster_profiles(K)
        est = simulate_link_ccdf(model, geom, sim, profiles=profiles or None)
        curves.append(Curve(f"K{K}", "theta", np.asarray(spec.theta_db), analytic, *_from_estimate(est)))
    checks = {}
    if spec.kind == "link_prop1":
        cov = min(c.in_ci_fraction for c in curves)
        checks["ci_coverage"] = {"pass": cov >= MIN_CI_COVERAGE, "value": cov, "detail": f"min coverage {cov:.3f} >= {MIN_CI_COVERAGE}"}
    return curves, checks


def _q_tr(spec: ExperimentSpec) -> float:
    return 1.0 - transmission_probability(spec.tx_energy)


def _link_thm2(spec: ExperimentSpec):
    thetas = spec.thetas
    sim = replace(spec.sim, theta_grid=tuple(thetas))
    q = _q_tr(spec)
    curves = []
    for K in spec.cluster_sizes:
        model = spec.model_for(K)
        omega = spec.omega[K]
        analytic = np.array([link_ccdf_theorem2(model, omega, K, q, t) for t in thetas])
        est = simulate_link_ccdf(model, omega, sim, profiles=spec.in_cluster_profiles(K))
        curves.append(Curve(f"K{K}", "theta", np.asarray(spec.theta_db), analytic, *_from_estimate(est)))
    return curves, {}


def _with_beta(spec: ExperimentSpec, model, beta: float):
    return replace(model, rx_intensity=model.out_cluster_tx_prob * model.tx_intensity / beta)


def _overall(spec: ExperimentSpec):
    thetas = spec.thetas
    sim = replace(spec.sim, theta_grid=tuple(thetas))
    q = _q_tr(spec)
    curves = []
    for K in spec.cluster_sizes:
        model = spec.model_for(K)
        if spec.beta is not None:
            model = _with_beta(spec, model, spec.beta)
        omega = spec.omega[K]
        beta = model.density_ratio
        analytic = np.array([overall_success_theorem3(model, omega, K, q, t, beta=beta) for t in thetas])
        est = simulate_overall_success(model, K, sim, omega=omega, profiles=spec.in_cluster_profiles(K))
        curves.append(Curve(f"K{K}", "theta", np.asarray(spec.theta_db), analytic, *_from_estimate(est)))
    return curves, {}


def _access(spec: ExperimentSpec):
    grid = np.asarray(spec.sweep_grid, float)
    curves, checks = [], {}
    for K in spec.cluster_sizes:
        analytic = np.array([cluster_access_approx(K, b) for b in grid])
        emp, lo, hi = (np.empty(grid.size) for _ in range(3))
        for i, b in enumerate(grid):
            est = simulate_cluster_access(_with_beta(spec, spec.model, b), K, spec.sim)
            emp[i], lo[i], hi[i] = est.success_freq[0], est.ci_low[0], est.ci_high[0]
        curves.append(Curve(f"K{K}", "beta", grid, analytic, emp, lo, hi))
        if K == 1:
            series = np.array([cluster_access_series(b) for b in grid])
            gap = float(np.max(np.abs(series - emp)))
            checks["series_K1"] = {"pass": gap <= SERIES_TOLERANCE, "value": gap, "detail": f"series gap {gap:.4f} <= {SERIES_TOLERANCE}"}
    return curves, checks


def _outage_curves(spec: ExperimentSpec, profiles, x_name, x, label_prefix=""):
    """Asymptotic outage ``q**K`` per profile, with buffer-chain estimates of ``q``."""
    slots = spec.sim.trials
    ptr = np.array([transmission_probability(p) for p in profiles])
    tx = np.array([round(simulate_buffer(p, slots, spec.sim.master_seed).tx_freq * slots) for p in profiles])
    f_lo, f_hi = wilson_interval(tx, slots)
    curves = []
    for K in spec.cluster_sizes:
        analytic = (1.0 - ptr) ** K
        emp = (1.0 - tx / slots) ** K
        curves.append(Curve(f"{label_prefix}K{K}", x_name, np.asarray(x, float), analytic, emp, (1.0 - f_hi) ** K, (1.0 - f_lo) ** K))
    return curves


def _buffer_sweep(spec: ExperimentSpec):
    e = spec.tx_energy
    profiles = [EnergyProfile(e.rho, int(S), e.p_ch) for S in spec.sweep_grid]
    curves = _outage_curves(spec, profiles, "buffer_size", spec.sweep_grid)
    checks = {}
    if e.rho < e.p_ch:
        floors = {f"K{K}": (1.0 - e.rho) ** K for K in spec.cluster_sizes}
        # q**K decreases toward the large-buffer floor (1 - rho)**K
        ok = all(np.all(np.diff(c.analytic) <= 1e-12) and c.analytic[-1] >= floors[c.label] - 1e-12 for c in curves)
        checks["floor"] = {"pass": bool(ok), "value": floors, "detail": "outage nonincreasing in S and above (1-rho)^K"}
    return curves, checks


def _rate_sweep(spec: ExperimentSpec):
    e = spec.tx_energy
    curves = []
    for S in spec.buffer_sizes:
        profiles = [EnergyProfile(r, int(S), e.p_ch) for r in spec.sweep_grid]
        curves += _outage_curves(spec, profiles, "rho", spec.sweep_grid, label_prefix=f"S{S}_")
    return curves, {}


def argmax_table(spec: ExperimentSpec, betas) -> np.ndarray:
    """Cluster size maximizing the theta -> 0 overall success at each ``beta``."""
    q = _q_tr(spec)
    sizes = np.asarray(spec.cluster_sizes)
    vals = np.array([[overall_success_theorem3(spec.model, _spread_omega(K), K, q, THETA_ZERO, beta=b) for K in sizes] for b in betas])
    return sizes[np.argmax(vals, axis=1)]


def _spread_omega(K: int):
    # theta -> 0 limit does not depend on the normalized geometry
    return [(i + 1) / K for i in range(K)]


def _beta_sweep(spec: ExperimentSpec):
    grid = np.asarray(spec.sweep_grid, float)
    q = _q_tr(spec)
    sim = replace(spec.sim, theta_grid=(THETA_ZERO,))
    curves = []
    for K in spec.cluster_sizes:
        model = spec.model_for(K)
        omega = spec.omega.get(K, _spread_omega(K))
        analytic = np.array([overall_success_theorem3(model, omega, K, q, THETA_ZERO, beta=b) for b in grid])
        emp, lo, hi = (np.empty(grid.size) for _ in range(3))
        for i, b in enumerate(grid):
            est = simulate_overall_success(_with_beta(spec, model, b), K, sim, profiles=spec.in_cluster_profiles(K))
            emp[i], lo[i], hi[i] = est.success_freq[0], est.ci_low[0], est.ci_high[0]
        curves.append(Curve(f"K{K}", "beta", grid, analytic, emp, lo, hi))
    lo_b, hi_b = float(grid.min()), float(grid.max())
    dense = np.round(np.arange(lo_b, hi_b + ARGMAX_BETA_STEP / 2, ARGMAX_BETA_STEP), 10)
    best = argmax_table(spec, dense)
    allowed = bool(np.all(np.isin(best, ARGMAX_ALLOWED)))
    monotone = bool(np.all(np.diff(best) >= 0))
    changes = {f"{b:g}": int(k) for b, k, prev in zip(dense, best, np.r_[-1, best[:-1]]) if k != prev}
    checks = {
        "argmax_in_1_3": {"pass": allowed, "value": changes, "detail": f"argmax K by first beta: {changes}"},
        "argmax_nondecreasing": {"pass": monotone, "value": changes},
    }
    return curves, checks, (dense, best)


_RUNNERS = {
    "link_thm1": _link_fixed,
    "link_prop1": _link_fixed,
    "link_thm2": _link_thm2,
    "overall_success": _overall,
    "cluster_access": _access,
    "buffer_sweep": _buffer_sweep,
    "rate_sweep": _rate_sweep,
}


def run_experiment(spec: ExperimentSpec, out_dir=".") -> ComparisonReport:
    """Evaluate both sides of one experiment and write its CSV files and JSON summary."""
    t0 = time.perf_counter()
    extra = None
    if spec.kind == "beta_sweep":
        curves, checks, extra = _beta_sweep(spec)
    else:
        curves, checks = _RUNNERS[spec.kind](spec)
    report = ComparisonReport(
        name=spec.name,
        kind=spec.kind,
        curves=curves,
        tolerance=spec.tolerance,
        seed=spec.sim.master_seed,
        trials=spec.sim.trials,
        cluster_source=spec.sim.cluster_source,
        parameters=spec.echo,
        checks=checks,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for c in curves:
        header = (c.x_name,) + CSV_COLUMNS[1:]
        c.file = f"{spec.name}_{c.label}.csv"
        write_csv(out / c.file, c.rows(), header)
        report.files.append(str(out / c.file))
    if extra is not None:
        path = out / f"{spec.name}_argmax.csv"
        write_csv(path, zip(*extra), ("beta", "argmax_K"))
        report.files.append(str(path))
    report.wall_time = time.perf_counter() - t0
    path = out / f"{spec.name}_summary.json"
    path.write_text(json.dumps(report.summary(), indent=2) + "\n", encoding="utf-8")
    report.files.append(str(path))
    return report


def reproduce_figure(figure_id: str, seed: Optional[int] = None, trials: Optional[int] = None, out_dir=".", cluster_source=None, tolerance=None) -> ComparisonReport:
    """Regenerate the data behind one figure and print the comparison summary."""
    spec = load_preset(figure_id).with_overrides(seed=seed, trials=trials, cluster_source=cluster_source, tolerance=tolerance)
    report = run_experiment(spec, out_dir)
    print(report.text())
    return report
