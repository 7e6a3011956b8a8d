"""Experiment configuration: JSON files and the shipped figure presets.

Schema (all keys optional unless noted)::

    {
      "kind": "link_thm2",                 # required
      "name": "fig3a",
      "model": {                           # required except for figure_repro
        "tx_intensity": 0.01,              # required
        "rx_intensity": 0.01,
        "eta": 4,                          # required
        "noise_dbm": -114,                 # or "noise_linear": 3.98e-15 (wins)
        "tx_energy": {"rho": 0.75, "buffer_size": 2, "p_ch": 0.8},
        "in_cluster_energy": [{"rho": 0.4, "buffer_size": 2, "p_ch": 0.7}],
        "out_cluster_tx_prob": 0.5,        # overrides tx_energy for out-of-cluster TXs
        "tiers": [{"intensity": 0.01, "tx_prob": 0.53, "power": 2}]
      },
      "geometry": {"distances": [5, 10]} | {"omega": {"1": [1.0], "2": [0.5, 1.0]}},
      "cluster_sizes": [1, 2],
      "theta_db": [-20, -10, 0] | {"start": -20, "stop": 20, "step": 2},
      "sweep": {"parameter": "beta", "grid": [1, 2, 5]},
      "buffer_sizes": [1, 2, 10, 100],
      "beta": 5.0,
      "sim": {"trials": 100000, "seed": 0, "cluster_source": "thinned",
              "steady_state_indicators": true, "block_size": 500,
              "workers": 1, "window_radius": null},
      "tolerance": 0.015,
      "figure": "fig3a"                    # figure_repro only
    }
"""

import json
import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from ..analytic.model import NetworkModel, TierConfig, dbm_to_linear
from ..energy import EnergyProfile, transmission_probability
from ..geometry import InClusterAvailability
from ..mcsim.stats import SimConfig

KINDS = (
    "link_thm1",
    "link_prop1",
    "link_thm2",
    "cluster_access",
    "overall_success",
    "buffer_sweep",
    "rate_sweep",
    "beta_sweep",
    "figure_repro",
)
FIGURES = ("fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig6")
SWEEP_PARAMETERS = {"beta_sweep": "beta", "cluster_access": "beta", "buffer_sweep": "buffer_size", "rate_sweep": "rho"}
DEFAULT_TOLERANCE = {
    "link_thm1": 0.02,
    "link_prop1": 0.02,
    "link_thm2": 0.015,
    "cluster_access": 0.03,
    "overall_success": 0.03,
    "buffer_sweep": 0.01,
    "rate_sweep": 0.01,
    "beta_sweep": 0.03,
}
DEFAULT_THETA_DB = tuple(float(x) for x in np.arange(-20.0, 20.0 + 1e-9, 2.0))
# stand-in for theta -> 0
THETA_ZERO = 1e-12
SOURCE_ALIASES = {"full": "full_process", "thinned": "thinned_process", "full_process": "full_process", "thinned_process": "thinned_process"}

_TOP_KEYS = {"kind", "name", "model", "geometry", "cluster_sizes", "theta_db", "sweep", "buffer_sizes", "beta", "sim", "tolerance", "figure"}
_MODEL_KEYS = {"tx_intensity", "rx_intensity", "eta", "noise_dbm", "noise_linear", "tx_energy", "in_cluster_energy", "out_cluster_tx_prob", "tiers"}
_ENERGY_KEYS = {"rho", "buffer_size", "p_ch"}
_TIER_KEYS = {"intensity", "tx_prob", "power"}
_SIM_KEYS = {"trials", "seed", "cluster_source", "steady_state_indicators", "block_size", "workers", "window_radius"}
_GEOMETRY_KEYS = {"distances", "omega"}
_SWEEP_KEYS = {"parameter", "grid"}
_RANGE_KEYS = {"start", "stop", "step"}


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, source: str = "<config>", line: Optional[int] = None):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    name: str
    model: NetworkModel
    tx_energy: Optional[EnergyProfile]
    in_cluster_energy: Tuple[EnergyProfile, ...]
    distances: Optional[Tuple[float, ...]]
    omega: Dict[int, Tuple[float, ...]]
    cluster_sizes: Tuple[int, ...]
    theta_db: Tuple[float, ...]
    sweep_parameter: Optional[str]
    sweep_grid: Tuple[float, ...]
    buffer_sizes: Tuple[int, ...]
    beta: Optional[float]
    sim: SimConfig
    tolerance: float
    echo: dict = field(default_factory=dict, compare=False)

    @property
    def thetas(self) -> np.ndarray:
        return 10.0 ** (np.asarray(self.theta_db) / 10.0)

    def model_for(self, K: int) -> NetworkModel:
        """Network model with the in-cluster availability of the first ``K`` transmitters."""
        profiles = self.in_cluster_profiles(K)
        if not profiles:
            return self.model
        q = [1.0 - transmission_probability(p) for p in profiles]
        return replace(self.model, in_cluster=InClusterAvailability(q))

    def in_cluster_profiles(self, K: int):
        if self.in_cluster_energy:
            if len(self.in_cluster_energy) < K:
                raise ValueError(f"in_cluster_energy lists {len(self.in_cluster_energy)} transmitters, K={K} needed")
            return list(self.in_cluster_energy[:K])
        if self.tx_energy is not None:
            return [self.tx_energy] * K
        return []

    def with_overrides(self, seed=None, trials=None, cluster_source=None, tolerance=None) -> "ExperimentSpec":
        sim = self.sim
        changes = {}
        if seed is not None:
            changes["master_seed"] = int(seed)
        if trials is not None:
            changes["trials"] = int(trials)
        if cluster_source is not None:
            changes["cluster_source"] = SOURCE_ALIASES[cluster_source]
        if changes:
            sim = replace(sim, **changes)
        echo = json.loads(json.dumps(self.echo))
        s = echo.setdefault("sim", {})
        s.update({"trials": sim.trials, "seed": sim.master_seed, "cluster_source": sim.cluster_source})
        tol = self.tolerance if tolerance is None else float(tolerance)
        echo["tolerance"] = tol
        return replace(self, sim=sim, tolerance=tol, echo=echo)


# -- line lookup --------------------------------------------------------------


def _line_of(text: str, path) -> Optional[int]:
    """Line of the last key in ``path``, found by scanning keys in order."""
    pos = 0
    for key in path:
        if isinstance(key, int):
            # step to the key-th object of an array of objects
            for _ in range(key + 1):
                nxt = text.find("{", pos + 1)
                if nxt < 0:
                    break
                pos = nxt
            continue
        m = re.compile(r'"%s"\s*:' % re.escape(str(key))).search(text, pos)
        if m is None:
            return None
        pos = m.start()
    return text.count("\n", 0, pos) + 1 if path else None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, path, message):
        raise ConfigError(message, self.source, _line_of(self.text, path))

    def obj(self, value, path, allowed, required=()):
        if not isinstance(value, dict):
            self.fail(path, f"{_dotted(path) or 'config'} must be an object")
        for key in value:
            if key not in allowed:
                self.fail(path + [key], f"unknown key '{_dotted(path + [key])}' (allowed: {', '.join(sorted(allowed))})")
        for key in required:
            if key not in value:
                self.fail(path, f"missing required key '{_dotted(path + [key])}'")
        return value

    def number(self, value, path, *, positive=False, nonneg=False, integer=False, lo=None, hi=None):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.fail(path, f"{_dotted(path)} must be a finite number")
        if integer and int(value) != value:
            self.fail(path, f"{_dotted(path)} must be an integer")
        if positive and not value > 0:
            self.fail(path, f"{_dotted(path)} must be > 0")
        if nonneg and value < 0:
            self.fail(path, f"{_dotted(path)} must be >= 0")
        if lo is not None and value < lo:
            self.fail(path, f"{_dotted(path)} must be >= {lo}")
        if hi is not None and value > hi:
            self.fail(path, f"{_dotted(path)} must be <= {hi}")
        return int(value) if integer else float(value)

    def numbers(self, value, path, **kw):
        if not isinstance(value, list) or not value:
            self.fail(path, f"{_dotted(path)} must be a non-empty list")
        return tuple(self.number(v, path, **kw) for v in value)


def _dotted(path) -> str:
    return ".".join(str(p) for p in path)


# -- parsing ------------------------------------------------------------------


def _energy(r: _Reader, raw, path) -> EnergyProfile:
    r.obj(raw, path, _ENERGY_KEYS, required=_ENERGY_KEYS)
    rho = r.number(raw["rho"], path + ["rho"], lo=0.0, hi=1.0)
    S = r.number(raw["buffer_size"], path + ["buffer_size"], integer=True, positive=True)
    p_ch = r.number(raw["p_ch"], path + ["p_ch"], positive=True, hi=1.0)
    return EnergyProfile(rho, S, p_ch)


def _model(r: _Reader, raw, path):
    r.obj(raw, path, _MODEL_KEYS, required=("tx_intensity", "eta"))
    lam = r.number(raw["tx_intensity"], path + ["tx_intensity"], positive=True)
    lam_u = r.number(raw.get("rx_intensity", lam), path + ["rx_intensity"], positive=True)
    eta = r.number(raw["eta"], path + ["eta"])
    if not eta > 2:
        r.fail(path + ["eta"], f"eta must exceed 2 (pathloss exponent), got {eta:g}")
    noise = 0.0
    if "noise_dbm" in raw:
        noise = dbm_to_linear(r.number(raw["noise_dbm"], path + ["noise_dbm"]))
    if "noise_linear" in raw:
        noise = r.number(raw["noise_linear"], path + ["noise_linear"], nonneg=True)
    tx_energy = _energy(r, raw["tx_energy"], path + ["tx_energy"]) if "tx_energy" in raw else None
    in_cluster = ()
    if "in_cluster_energy" in raw:
        items = raw["in_cluster_energy"]
        if not isinstance(items, list) or not items:
            r.fail(path + ["in_cluster_energy"], "model.in_cluster_energy must be a non-empty list")
        in_cluster = tuple(_energy(r, e, path + ["in_cluster_energy", i]) for i, e in enumerate(items))
    if "out_cluster_tx_prob" in raw:
        p_o = r.number(raw["out_cluster_tx_prob"], path + ["out_cluster_tx_prob"], positive=True, hi=1.0)
    elif tx_energy is not None:
        p_o = transmission_probability(tx_energy)
    else:
        p_o = 1.0
    if not p_o > 0:
        r.fail(path + ["tx_energy"], "out-of-cluster transmission probability must be > 0 (rho = 0 never transmits)")
    tiers = []
    for i, t in enumerate(raw.get("tiers", [])):
        tp = path + ["tiers", i]
        r.obj(t, tp, _TIER_KEYS, required=_TIER_KEYS)
        tiers.append(
            TierConfig(
                r.number(t["intensity"], tp + ["intensity"], nonneg=True),
                r.number(t["tx_prob"], tp + ["tx_prob"], positive=True, hi=1.0),
                r.number(t["power"], tp + ["power"], positive=True),
            )
        )
    model = NetworkModel(lam, lam_u, eta, noise=noise, out_cluster_tx_prob=p_o, tiers=tuple(tiers))
    return model, tx_energy, in_cluster


def _sim(r: _Reader, raw, path) -> SimConfig:
    r.obj(raw, path, _SIM_KEYS)
    source = raw.get("cluster_source", "thinned")
    if source not in SOURCE_ALIASES:
        r.fail(path + ["cluster_source"], "sim.cluster_source must be 'full' or 'thinned'")
    steady = raw.get("steady_state_indicators", True)
    if not isinstance(steady, bool):
        r.fail(path + ["steady_state_indicators"], "sim.steady_state_indicators must be true or false")
    window = raw.get("window_radius")
    return SimConfig(
        trials=r.number(raw.get("trials", 100_000), path + ["trials"], integer=True, lo=1),
        master_seed=r.number(raw.get("seed", 0), path + ["seed"], integer=True, nonneg=True),
        window_radius=None if window is None else r.number(window, path + ["window_radius"], positive=True),
        cluster_source=SOURCE_ALIASES[source],
        steady_state_indicators=steady,
        block_size=r.number(raw.get("block_size", 500), path + ["block_size"], integer=True, lo=1),
        workers=r.number(raw.get("workers", 1), path + ["workers"], integer=True, lo=1),
    )


def _theta_db(r: _Reader, raw, path) -> Tuple[float, ...]:
    if isinstance(raw, dict):
        r.obj(raw, path, _RANGE_KEYS, required=_RANGE_KEYS)
        start = r.number(raw["start"], path + ["start"])
        stop = r.number(raw["stop"], path + ["stop"])
        step = r.number(raw["step"], path + ["step"], positive=True)
        if stop < start:
            r.fail(path, "theta_db.stop must be >= theta_db.start")
        return tuple(float(x) for x in np.round(np.arange(start, stop + step * 1e-9, step), 12))
    return r.numbers(raw, path)


def parse_config(data: dict, text: str = "", source: str = "<config>") -> ExperimentSpec:
    r = _Reader(text, source)
    r.obj(data, [], _TOP_KEYS, required=("kind",))
    kind = data["kind"]
    if kind not in KINDS:
        r.fail(["kind"], f"kind must be one of {', '.join(KINDS)}, got {kind!r}")
    if kind == "figure_repro":
        fig = data.get("figure")
        if fig not in FIGURES:
            r.fail(["figure"], f"figure must be one of {', '.join(FIGURES)}, got {fig!r}")
        base = load_preset(fig)
        sim_raw = data.get("sim", {})
        r.obj(sim_raw, ["sim"], _SIM_KEYS)
        spec = base.with_overrides(seed=sim_raw.get("seed"), trials=sim_raw.get("trials"), tolerance=data.get("tolerance"))
        return spec
    if "figure" in data:
        r.fail(["figure"], "figure is only valid with kind 'figure_repro'")
    if "model" not in data:
        r.fail([], "missing required key 'model'")
    model, tx_energy, in_cluster = _model(r, data["model"], ["model"])
    sim = _sim(r, data.get("sim", {}), ["sim"])

    distances, omega = None, {}
    geo = data.get("geometry")
    if geo is not None:
        r.obj(geo, ["geometry"], _GEOMETRY_KEYS)
        if "distances" in geo:
            distances = r.numbers(geo["distances"], ["geometry", "distances"], positive=True)
        if "omega" in geo:
            om = geo["omega"]
            if not isinstance(om, dict) or not om:
                r.fail(["geometry", "omega"], "geometry.omega must map cluster sizes to normalized distances")
            for k, v in om.items():
                if not str(k).isdigit() or int(k) < 1:
                    r.fail(["geometry", "omega", k], f"geometry.omega key {k!r} must be a positive integer")
                w = r.numbers(v, ["geometry", "omega", k], positive=True, hi=1.0)
                if len(w) != int(k) or abs(max(w) - 1.0) > 1e-12:
                    r.fail(["geometry", "omega", k], f"geometry.omega[{k}] needs {k} values with maximum 1")
                omega[int(k)] = tuple(sorted(w))

    sizes = r.numbers(data.get("cluster_sizes", [1]), ["cluster_sizes"], integer=True, lo=1)
    theta_db = _theta_db(r, data["theta_db"], ["theta_db"]) if "theta_db" in data else DEFAULT_THETA_DB

    sweep_param, sweep_grid = None, ()
    expected = SWEEP_PARAMETERS.get(kind)
    if "sweep" in data:
        sw = r.obj(data["sweep"], ["sweep"], _SWEEP_KEYS, required=_SWEEP_KEYS)
        sweep_param = sw["parameter"]
        if sweep_param != expected:
            r.fail(["sweep", "parameter"], f"kind {kind} sweeps {expected!r}, got {sweep_param!r}" if expected else f"kind {kind} takes no sweep")
        pos = {"beta": dict(positive=True), "buffer_size": dict(integer=True, lo=1), "rho": dict(lo=0.0, hi=1.0)}[sweep_param]
        sweep_grid = r.numbers(sw["grid"], ["sweep", "grid"], **pos)
    elif expected is not None:
        r.fail([], f"kind {kind} needs a 'sweep' over {expected!r}")

    buffer_sizes = ()
    if "buffer_sizes" in data:
        buffer_sizes = r.numbers(data["buffer_sizes"], ["buffer_sizes"], integer=True, lo=1)
    beta = r.number(data["beta"], ["beta"], positive=True) if "beta" in data else None
    tolerance = r.number(data.get("tolerance", DEFAULT_TOLERANCE[kind]), ["tolerance"], positive=True)

    # kind-specific requirements
    if kind in ("link_thm1", "link_prop1"):
        if distances is None:
            r.fail(["geometry"], f"kind {kind} needs geometry.distances")
        if max(sizes) > len(distances):
            r.fail(["cluster_sizes"], f"cluster_sizes exceed the {len(distances)} listed distances")
        if not in_cluster and tx_energy is None:
            r.fail(["model"], f"kind {kind} needs model.in_cluster_energy or model.tx_energy")
        if in_cluster and len(in_cluster) < max(sizes):
            r.fail(["model", "in_cluster_energy"], "in_cluster_energy must list one profile per in-cluster transmitter")
    if kind in ("link_thm2", "overall_success"):
        if tx_energy is None:
            r.fail(["model"], f"kind {kind} needs model.tx_energy (identical transmitters)")
        for K in sizes:
            if K not in omega:
                r.fail(["geometry"], f"kind {kind} needs geometry.omega for K={K}")
    if kind in ("buffer_sweep", "rate_sweep", "beta_sweep") and tx_energy is None:
        r.fail(["model"], f"kind {kind} needs model.tx_energy")
    if kind == "rate_sweep" and not buffer_sizes:
        r.fail([], "kind rate_sweep needs buffer_sizes")

    name = data.get("name") or (Path(source).stem if source != "<config>" else kind)
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        r.fail(["name"], "name must use letters, digits, '.', '_' or '-'")
    echo = json.loads(json.dumps(data))
    echo.setdefault("sim", {})
    echo["sim"].update({"trials": sim.trials, "seed": sim.master_seed, "cluster_source": sim.cluster_source})
    echo["tolerance"] = tolerance
    echo["name"] = name
    return ExperimentSpec(
        kind=kind,
        name=name,
        model=model,
        tx_energy=tx_energy,
        in_cluster_energy=in_cluster,
        distances=distances,
        omega=omega,
        cluster_sizes=tuple(sizes),
        theta_db=tuple(theta_db),
        sweep_parameter=sweep_param,
        sweep_grid=tuple(sweep_grid),
        buffer_sizes=tuple(buffer_sizes),
        beta=beta,
        sim=sim,
        tolerance=tolerance,
        echo=echo,
    )


def parse_text(text: str, source: str = "<config>") -> ExperimentSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error: {exc.msg} (column {exc.colno})", source, exc.lineno) from None
    try:
        return parse_config(data, text, source)
    except ConfigError:
        raise
    except ValueError as exc:
        # invariant of a nested type not covered by the field checks above
        raise ConfigError(str(exc), source) from None


def load_config(path) -> ExperimentSpec:
    """Read, validate and default-fill a JSON experiment file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(p)) from None
    return parse_text(text, str(p))


def preset_text(figure_id: str) -> str:
    if figure_id not in FIGURES:
        raise ConfigError(f"unknown figure id {figure_id!r}; expected one of {', '.join(FIGURES)}")
    return resources.files("ehcoop.presets").joinpath(f"{figure_id}.json").read_text(encoding="utf-8")


def load_preset(figure_id: str) -> ExperimentSpec:
    return parse_text(preset_text(figure_id), f"{figure_id}.json")
