"""Planning entities for a hybrid ac/dc microgrid and their validation.

Units used throughout: power in MW, energy in MWh, operating prices in
$/MWh, investment costs annualized in $/MW per year.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

DISPATCHABLE = "dispatchable"
RENEWABLE = "renewable"
STORAGE = "storage"
DER_KINDS = (DISPATCHABLE, RENEWABLE, STORAGE)
BUSES = ("ac", "dc")
HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class DerSpec:
    id: str
    kind: str
    native_bus: str
    annualized_capital_cost: float
    capacity_max: float
    capacity_group: str | None = None
    cost_segments: tuple[tuple[float, float], ...] = ()
    profile_id: str | None = None


@dataclass(frozen=True)
class StorageSpec:
    id: str
    native_bus: str
    annualized_capital_cost: float
    power_max: float
    energy_per_power: float
    charge_efficiency: float
    discharge_efficiency: float
    soc_min: float = 0.0
    soc_max: float = 1.0


@dataclass(frozen=True)
class FeederSpec:
    id: str
    dc_load_share: float
    ac_load_share: float


@dataclass(frozen=True)
class ConverterCatalog:
    """Converter prices and efficiencies.

    ``rectifier_unit_cost`` / ``inverter_unit_cost`` price the load-side
    converters of a feeder whose type differs from its loads. DER-side
    converters use ``der_rectifier_unit_cost`` / ``der_inverter_unit_cost``
    when given and fall back to the load-side prices otherwise.
    ``dc_dc_unit_cost`` is carried as catalog data; no cost term uses it.
    """

    rectifier_unit_cost: float
    inverter_unit_cost: float
    eta_rec: float
    eta_inv: float
    dc_dc_unit_cost: float = 0.0
    grid_interface_unit_cost: float = 0.0
    der_rectifier_unit_cost: float | None = None
    der_inverter_unit_cost: float | None = None

    @property
    def der_rectifier_cost(self) -> float:
        if self.der_rectifier_unit_cost is None:
            return self.rectifier_unit_cost
        return self.der_rectifier_unit_cost

    @property
    def der_inverter_cost(self) -> float:
        if self.der_inverter_unit_cost is None:
            return self.inverter_unit_cost
        return self.der_inverter_unit_cost


@dataclass(frozen=True)
class LoadModel:
    demand_profile: tuple[float, ...]
    dc_ratio: float
    critical_ratio: float
    voll: float

    @property
    def peak(self) -> float:
        return max(self.demand_profile) if self.demand_profile else 0.0


@dataclass(frozen=True)
class MarketModel:
    price_profile: tuple[float, ...]
    exchange_limit: float


@dataclass(frozen=True)
class Horizon:
    """``hour_weights[t]`` is the number of hours per year that
    representative hour ``t`` stands for. ``period_hours`` splits the
    representative hours into consecutive cyclic periods (representative
    days) for storage; ``None`` makes the whole set one period.
    """

    years: int
    representative_hours: int
    hour_weights: tuple[float, ...]
    period_hours: int | None = None

    def periods(self) -> list[range]:
        size = self.period_hours or self.representative_hours
        return [range(s, min(s + size, self.representative_hours))
                for s in range(0, self.representative_hours, size)]


@dataclass(frozen=True)
class IslandingModel:
    islanded_hours: tuple[int, ...] = ()


@dataclass(frozen=True)
class Scenario:
    ders: tuple[DerSpec, ...]
    storages: tuple[StorageSpec, ...]
    feeders: tuple[FeederSpec, ...]
    converters: ConverterCatalog
    load: LoadModel
    market: MarketModel
    horizon: Horizon
    islanding: IslandingModel = IslandingModel()
    profiles: dict[str, tuple[float, ...]] = field(default_factory=dict)
    capacity_groups: dict[str, float] = field(default_factory=dict)

    @property
    def num_hours(self) -> int:
        return self.horizon.representative_hours

    @property
    def unit_ids(self) -> list[str]:
        return [d.id for d in self.ders] + [s.id for s in self.storages]


class Violation(NamedTuple):
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


class DemandSplit(NamedTuple):
    ac: float
    dc: float
    critical: float


def _finite(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _fraction(value, *, open_low=False) -> bool:
    if not _finite(value):
        return False
    return (0.0 < value <= 1.0) if open_low else (0.0 <= value <= 1.0)


def _series(out, path, series, length, low=None, high=None):
    if len(series) != length:
        out.append(Violation(path, f"length {len(series)} != {length} representative hours"))
    for t, v in enumerate(series):
        if not _finite(v):
            out.append(Violation(f"{path}[{t}]", f"non-finite value {v!r}"))
        elif (low is not None and v < low) or (high is not None and v > high):
            out.append(Violation(f"{path}[{t}]", f"value {v} outside [{low}, {high}]"))


def validate(scenario: Scenario) -> list[Violation]:
    """Every invariant violation in ``scenario``, each with a field path.

    An empty list means the scenario is valid. Nothing is raised and
    nothing is mutated.
    """
    out: list[Violation] = []
    H = scenario.horizon.representative_hours
    hz = scenario.horizon

    if not isinstance(hz.years, int) or hz.years < 1:
        out.append(Violation("horizon.years", "must be an integer >= 1"))
    if H < 1:
        out.append(Violation("horizon.representative_hours", "must be >= 1"))
    if len(hz.hour_weights) != H:
        out.append(Violation("horizon.hour_weights", f"length {len(hz.hour_weights)} != {H}"))
    elif any(not _finite(w) or w < 0 for w in hz.hour_weights):
        out.append(Violation("horizon.hour_weights", "weights must be finite and >= 0"))
    elif abs(sum(hz.hour_weights) - HOURS_PER_YEAR) > 1e-6:
        out.append(Violation("horizon.hour_weights",
                             f"weights sum to {sum(hz.hour_weights)}, expected 8760"))
    if hz.period_hours is not None and (hz.period_hours < 1 or (H >= 1 and H % hz.period_hours)):
        out.append(Violation("horizon.period_hours", "must be >= 1 and divide representative_hours"))

    ids = scenario.unit_ids
    seen = set()
    for uid in ids:
        if uid in seen:
            out.append(Violation("ders", f"duplicate unit id {uid!r}"))
        seen.add(uid)
        if not uid or any(ch.isspace() or ch in "[],:" for ch in uid):
            out.append(Violation("ders", f"unit id {uid!r} must be non-empty without spaces or []:,"))

    for i, d in enumerate(scenario.ders):
        p = f"ders[{i}]"
        if d.kind not in (DISPATCHABLE, RENEWABLE):
            out.append(Violation(f"{p}.kind", f"{d.kind!r} not allowed here (storage goes in storages)"))
        if d.native_bus not in BUSES:
            out.append(Violation(f"{p}.native_bus", f"{d.native_bus!r} not in {BUSES}"))
        if not _finite(d.annualized_capital_cost) or d.annualized_capital_cost < 0:
            out.append(Violation(f"{p}.annualized_capital_cost", "must be finite and >= 0"))
        if not _finite(d.capacity_max) or d.capacity_max < 0:
            out.append(Violation(f"{p}.capacity_max", "must be finite and >= 0"))
        if d.capacity_group is not None and d.capacity_group not in scenario.capacity_groups:
            out.append(Violation(f"{p}.capacity_group", f"unknown group {d.capacity_group!r}"))
        if d.kind == DISPATCHABLE:
            if not d.cost_segments:
                out.append(Violation(f"{p}.cost_segments", "dispatchable unit needs >= 1 segment"))
            last = -math.inf
            for s, seg in enumerate(d.cost_segments):
                width, price = seg
                if not _finite(width) or width <= 0:
                    out.append(Violation(f"{p}.cost_segments[{s}]", "width must be > 0"))
                if not _finite(price):
                    out.append(Violation(f"{p}.cost_segments[{s}]", "marginal cost must be finite"))
                elif price < last:
                    out.append(Violation(f"{p}.cost_segments[{s}]", "marginal costs must be nondecreasing"))
                else:
                    last = price
            if d.profile_id is not None:
                out.append(Violation(f"{p}.profile_id", "dispatchable units take no profile"))
        elif d.kind == RENEWABLE:
            if d.cost_segments:
                out.append(Violation(f"{p}.cost_segments", "renewable units take no cost segments"))
            if d.profile_id is None:
                out.append(Violation(f"{p}.profile_id", "renewable unit needs a profile"))
            elif d.profile_id not in scenario.profiles:
                out.append(Violation(f"{p}.profile_id", f"unknown profile {d.profile_id!r}"))

    for i, s in enumerate(scenario.storages):
        p = f"storages[{i}]"
        if s.native_bus not in BUSES:
            out.append(Violation(f"{p}.native_bus", f"{s.native_bus!r} not in {BUSES}"))
        for name in ("annualized_capital_cost", "power_max", "energy_per_power"):
            v = getattr(s, name)
            if not _finite(v) or v < 0:
                out.append(Violation(f"{p}.{name}", "must be finite and >= 0"))
        for name in ("charge_efficiency", "discharge_efficiency"):
            if not _fraction(getattr(s, name), open_low=True):
                out.append(Violation(f"{p}.{name}", "must lie in (0, 1]"))
        if not (_fraction(s.soc_min) and _fraction(s.soc_max) and s.soc_min < s.soc_max):
            out.append(Violation(f"{p}.soc_min", "need 0 <= soc_min < soc_max <= 1"))

    for name, limit in scenario.capacity_groups.items():
        if not _finite(limit) or limit < 0:
            out.append(Violation(f"capacity_groups.{name}", "limit must be finite and >= 0"))

    if not scenario.feeders:
        out.append(Violation("feeders", "at least one feeder required"))
    fids = [f.id for f in scenario.feeders]
    if len(set(fids)) != len(fids):
        out.append(Violation("feeders", "duplicate feeder id"))
    for i, f in enumerate(scenario.feeders):
        for name in ("dc_load_share", "ac_load_share"):
            if not _fraction(getattr(f, name)):
                out.append(Violation(f"feeders[{i}].{name}", "must lie in [0, 1]"))
        if not f.id or any(ch.isspace() or ch in "[],:" for ch in f.id):
            out.append(Violation(f"feeders[{i}].id", f"feeder id {f.id!r} must be non-empty without spaces or []:,"))
    if scenario.feeders:
        for name in ("dc_load_share", "ac_load_share"):
            total = sum(getattr(f, name) for f in scenario.feeders)
            if _finite(total) and abs(total - 1.0) > 1e-9:
                out.append(Violation(f"feeders.{name}", f"shares sum to {total}, expected 1"))

    c = scenario.converters
    for name in ("rectifier_unit_cost", "inverter_unit_cost", "dc_dc_unit_cost",
                 "grid_interface_unit_cost", "der_rectifier_unit_cost", "der_inverter_unit_cost"):
        v = getattr(c, name)
        if v is None and name.startswith("der_"):
            continue
        if not _finite(v) or v < 0:
            out.append(Violation(f"converters.{name}", "must be finite and >= 0"))
    for name in ("eta_rec", "eta_inv"):
        if not _fraction(getattr(c, name), open_low=True):
            out.append(Violation(f"converters.{name}", "must lie in (0, 1]"))

    ld = scenario.load
    _series(out, "load.demand_profile", ld.demand_profile, H, low=0.0)
    if not _fraction(ld.dc_ratio):
        out.append(Violation("load.dc_ratio", f"{ld.dc_ratio} outside [0, 1]"))
    if not _fraction(ld.critical_ratio):
        out.append(Violation("load.critical_ratio", f"{ld.critical_ratio} outside [0, 1]"))

    mk = scenario.market
    _series(out, "market.price_profile", mk.price_profile, H)
    if not _finite(mk.exchange_limit) or mk.exchange_limit < 0:
        out.append(Violation("market.exchange_limit", "must be finite and >= 0"))
    prices = [p for p in mk.price_profile if _finite(p)]
    if not _finite(ld.voll):
        out.append(Violation("load.voll", "must be finite"))
    elif prices and ld.voll <= max(prices):
        out.append(Violation("load.voll", f"{ld.voll} must exceed the highest price {max(prices)}"))

    for t in scenario.islanding.islanded_hours:
        if not isinstance(t, int) or not 0 <= t < H:
            out.append(Violation("islanding.islanded_hours", f"hour {t!r} outside [0, {H})"))

    for name, series in scenario.profiles.items():
        _series(out, f"profiles.{name}", series, H, low=0.0, high=1.0)
    return out


def effective_demand(load: LoadModel, hour: int) -> DemandSplit:
    """Split the hour's demand into ac, dc and critical parts."""
    if not 0 <= hour < len(load.demand_profile):
        raise IndexError(f"hour {hour} outside [0, {len(load.demand_profile)})")
    total = load.demand_profile[hour]
    ac = total - total * load.dc_ratio
    dc = total - ac  # makes ac + dc round back to total
    return DemandSplit(ac, dc, total * load.critical_ratio)
