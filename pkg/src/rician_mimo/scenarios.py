"""Scenario specification, parsing and construction of link profiles.

A `ScenarioSpec` is a flat, typed key-value description of one experiment
(see README for the file grammar).  `build_scenario` turns it into concrete
per-link statistics: user drop, pathloss, per-user Rician factors, one-ring
correlation matrices and LoS directions.

Large-scale gains are normalized to the cell edge (beta = (x/radius)^-alpha)
so that `snr_data` is the data SNR of a cell-edge user.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    ScenarioGeometry,
    UserLinkProfile,
    build_profile,
    dft_steering,
    drop_users,
    exponential_correlation,
    los_steering,
    one_ring_correlation,
    pathloss,
)
from .config import ConfigError, SystemConfig

LAYOUTS = ("single_cell", "three_cell_edge")
CORRELATIONS = ("one_ring", "exponential", "identity")
LOS_MODES = ("steering", "dft")
PLACEMENTS = ("uniform_disk", "cell_edge")
TAU_MODES = ("minimum", "optimal", "fixed")

# arrival angles too close to zero give a degenerate one-ring window
MIN_ANGULAR_SPREAD = 1e-3


@dataclass(frozen=True)
class ScenarioSpec:
    layout: str = "single_cell"
    n: int = 150
    k: int = 20
    l: int = 1
    t: int = 500
    radius_m: float = 150.0
    alpha: float = 2.5
    kappa_max: float = 1.0
    correlation: str = "one_ring"
    corr_rho: float = 0.5
    los: str = "steering"
    placement: str = "uniform_disk"
    seed: int = 0
    trials: int = 1000
    snr_grid_db: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    snr_training_db: float | None = None
    tau_mode: str = "minimum"
    tau: int = 0
    log_base: str = "natural"
    scenario_id: str = "scenario"

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ConfigError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if self.correlation not in CORRELATIONS:
            raise ConfigError(f"correlation must be one of {CORRELATIONS}, got {self.correlation!r}")
        if self.los not in LOS_MODES:
            raise ConfigError(f"los must be one of {LOS_MODES}, got {self.los!r}")
        if self.placement not in PLACEMENTS:
            raise ConfigError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")
        if self.tau_mode not in TAU_MODES:
            raise ConfigError(f"tau_mode must be one of {TAU_MODES}, got {self.tau_mode!r}")
        for name in ("n", "k", "t"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.layout == "single_cell" and self.l != 1:
            raise ConfigError("layout single_cell requires l = 1")
        if self.layout == "three_cell_edge" and self.l != 3:
            raise ConfigError("layout three_cell_edge requires l = 3")
        if self.kappa_max < 0:
            raise ConfigError("kappa_max must be non-negative")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.tau_mode == "fixed":
            if not (self.k <= self.tau < self.t):
                raise ConfigError(
                    f"tau violates K <= tau < T: tau={self.tau}, K={self.k}, T={self.t}"
                )
        if self.k >= self.t:
            raise ConfigError("coherence length t must exceed the user count k")

    def resolve_tau(self) -> int:
        """Training length for the non-optimal modes (optimal is solved later)."""
        return self.tau if self.tau_mode == "fixed" else self.k

    def system_config(self, snr_db: float, tau: int | None = None) -> SystemConfig:
        rho_d = 10.0 ** (snr_db / 10.0)
        tr_db = self.snr_training_db if self.snr_training_db is not None else snr_db
        return SystemConfig(
            n_antennas=self.n,
            n_users=self.k,
            n_cells=self.l,
            coherence_len=self.t,
            training_len=self.resolve_tau() if tau is None else tau,
            snr_data=rho_d,
            snr_training=10.0 ** (tr_db / 10.0),
            log_base=self.log_base,
        )


@dataclass
class Scenario:
    """Concrete link statistics for one spec: profiles[bs][cell][user]."""

    spec: ScenarioSpec
    geometry: ScenarioGeometry
    profiles: list[list[list[UserLinkProfile]]]
    kappas: np.ndarray  # (L, K) local Rician factors

    @property
    def n_cells(self) -> int:
        return len(self.profiles)

    @property
    def n_users(self) -> int:
        return len(self.profiles[0][0])

    def local_profiles(self, bs: int) -> list[UserLinkProfile]:
        return self.profiles[bs][bs]

    def single_cell_view(self, bs: int = 0) -> "Scenario":
        """Cell `bs` in isolation: same local statistics, no other cells."""
        spec = dataclasses.replace(
            self.spec, layout="single_cell", l=1, scenario_id=self.spec.scenario_id + f"-cell{bs}"
        )
        geometry = ScenarioGeometry(
            cell_centers=self.geometry.cell_centers[bs : bs + 1],
            cell_radius=self.geometry.cell_radius,
            pathloss_exponent=self.geometry.pathloss_exponent,
            user_positions=self.geometry.user_positions[bs : bs + 1],
        )
        return Scenario(
            spec=spec,
            geometry=geometry,
            profiles=[[self.profiles[bs][bs]]],
            kappas=self.kappas[bs : bs + 1],
        )


def _cell_centers(spec: ScenarioSpec) -> np.ndarray:
    if spec.layout == "single_cell":
        return np.zeros((1, 2))
    # three touching cells: equilateral triangle of side 2*radius
    circum = 2.0 * spec.radius_m / math.sqrt(3.0)
    angles = np.deg2rad([90.0, 210.0, 330.0])
    return circum * np.column_stack([np.cos(angles), np.sin(angles)])


def _one_ring_for_angle(theta_k: float, n: int) -> np.ndarray:
    """One-ring matrix for the window [-pi, theta_k - pi], endpoints ordered."""
    if abs(theta_k) < MIN_ANGULAR_SPREAD:
        theta_k = MIN_ANGULAR_SPREAD if theta_k >= 0 else -MIN_ANGULAR_SPREAD
    lo, hi = -math.pi, theta_k - math.pi
    if hi < lo:
        lo, hi = hi, lo
    return one_ring_correlation(lo, hi, n)


def _correlation(spec: ScenarioSpec, theta_k: float) -> np.ndarray:
    if spec.correlation == "one_ring":
        return _one_ring_for_angle(theta_k, spec.n)
    if spec.correlation == "exponential":
        return exponential_correlation(spec.corr_rho, spec.n)
    return np.eye(spec.n, dtype=complex)


def build_scenario(spec: ScenarioSpec) -> Scenario:
    """Deterministic scenario construction from the spec seed.

    The Rician factors are drawn once per scenario (kappa ~ U[0, kappa_max]
    via fixed uniforms scaled by kappa_max), so sweeping kappa_max keeps the
    rest of the scenario identical.
    """
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    centers = _cell_centers(spec)
    geometry = drop_users(centers, spec.radius_m, spec.k, spec.placement, rng, spec.alpha)
    kappa_u = rng.uniform(0.0, 1.0, size=(spec.l, spec.k))
    kappas = kappa_u * spec.kappa_max
    edge_loss = pathloss(spec.radius_m, spec.alpha)
    profiles: list[list[list[UserLinkProfile]]] = []
    for j in range(spec.l):
        per_bs = []
        for ell in range(spec.l):
            per_cell = []
            for k in range(spec.k):
                dist = geometry.distance(j, ell, k)
                beta = pathloss(dist, spec.alpha) / edge_loss
                theta_k = geometry.arrival_angle(j, ell, k)
                corr = _correlation(spec, theta_k)
                if spec.los == "dft":
                    los = dft_steering(k, spec.n)
                else:
                    los = los_steering(theta_k, spec.n)
                per_cell.append(
                    build_profile(beta, kappas[ell, k], corr, los, is_local=(j == ell))
                )
            per_bs.append(per_cell)
        profiles.append(per_bs)
    return Scenario(spec=spec, geometry=geometry, profiles=profiles, kappas=kappas)


# ---------------------------------------------------------------------------
# flat key-value config files

_FIELD_TYPES = {f.name: f for f in dataclasses.fields(ScenarioSpec)}


def _parse_value(name: str, raw: str):
    raw = raw.strip()
    if name == "snr_grid_db":
        if ":" in raw:
            parts = raw.split(":")
            if len(parts) != 3:
                raise ConfigError(f"field snr_grid_db: expected lo:hi:step, got {raw!r}")
            lo, hi, step = (float(p) for p in parts)
            if step <= 0 or hi < lo:
                raise ConfigError("field snr_grid_db: need step > 0 and hi >= lo")
            count = int(round((hi - lo) / step))
            return tuple(lo + i * step for i in range(count + 1))
        return tuple(float(p) for p in raw.split(","))
    if name == "snr_training_db":
        return None if raw.lower() == "none" else float(raw)
    ftype = _FIELD_TYPES[name].type
    try:
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"field {name}: cannot parse {raw!r} as {ftype}") from exc


def parse_scenario(text: str) -> ScenarioSpec:
    """Parse a flat key = value scenario file; errors name the offending field."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)
    return ScenarioSpec(**values)


def serialize_scenario(spec: ScenarioSpec) -> str:
    lines = []
    for f in dataclasses.fields(ScenarioSpec):
        value = getattr(spec, f.name)
        if f.name == "snr_grid_db":
            value = ",".join(repr(v) for v in value)
        elif value is None:
            value = "none"
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
