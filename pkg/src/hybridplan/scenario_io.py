"""Scenario files, profile CSVs and result dumps.

Scenario file (YAML). Units: power in MW, energy prices in $/MWh, capital and
converter costs in $/MW per year. Every series (``hour_weights``,
``demand_profile``, ``price_profile`` and each entry of ``profiles``) is
either an inline list of numbers or the path of a single-column CSV,
resolved relative to the scenario file::

    horizon:     {years: 20, representative_hours: 48, period_hours: 24,
                  hour_weights: profiles/weights.csv}
    load:        {demand_profile: profiles/demand.csv, dc_ratio: 0.4,
                  critical_ratio: 0.5, voll: 1000}
    market:      {price_profile: profiles/price.csv, exchange_limit: 10}
    islanding:   {islanded_hours: [43]}
    converters:  {rectifier_unit_cost: ..., inverter_unit_cost: ..., eta_rec: ...,
                  eta_inv: ..., dc_dc_unit_cost: 0, grid_interface_unit_cost: 0,
                  der_rectifier_unit_cost: ..., der_inverter_unit_cost: ...}
    feeders:     [{id: F1, dc_load_share: 0.39, ac_load_share: 0.28}, ...]
    ders:        [{id: G1, kind: dispatchable, native_bus: ac,
                   annualized_capital_cost: ..., capacity_max: ...,
                   capacity_group: G12, cost_segments: [[2, 85], ...]},
                  {id: WIND, kind: renewable, ..., profile_id: wind}, ...]
    storages:    [{id: DES, native_bus: dc, annualized_capital_cost: ...,
                   power_max: 0.5, energy_per_power: 2, charge_efficiency: 0.95,
                   discharge_efficiency: 0.95, soc_min: 0.1, soc_max: 1}]
    profiles:    {wind: profiles/wind.csv, solar: profiles/solar.csv}
    capacity_groups: {G12: 5}

Unknown keys anywhere are rejected. Numbers use a decimal point and no
thousands separators.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import re
from pathlib import Path

import yaml

from . import domain
from .domain import (ConverterCatalog, DerSpec, FeederSpec, Horizon, IslandingModel, LoadModel,
                     MarketModel, Scenario, StorageSpec)
from .formulation import CostBreakdown, HourDispatch, Placement, PlanResult, SolverStats

FORMATS = ("machine", "csv")
RESULT_VERSION = 1


class ScenarioError(ValueError):
    """Base class for every input problem this module reports."""


class ScenarioFileError(ScenarioError):
    """Missing or unreadable file."""


class ScenarioParseError(ScenarioError):
    def __init__(self, path, line: int | None, column: int | None, message: str):
        where = f"{path}" + (f":{line}:{column}" if line is not None else "")
        super().__init__(f"{where}: {message}")
        self.path, self.line, self.column = str(path), line, column


class ScenarioValidationError(ScenarioError):
    def __init__(self, path, violations):
        lines = "; ".join(f"{v.path}: {v.message}" for v in violations)
        super().__init__(f"{path}: invalid scenario: {lines}")
        self.path = str(path)
        self.violations = list(violations)


class ProfileError(ScenarioError):
    def __init__(self, path, row: int | None, message: str):
        where = f"{path}" + (f" row {row}" if row is not None else "")
        super().__init__(f"{where}: {message}")
        self.path, self.row = str(path), row


class ProfileLengthError(ProfileError):
    pass


class ResultFormatError(ValueError):
    pass


# -- YAML plumbing ----------------------------------------------------------------

class _Mapping(dict):
    """dict that remembers where each key was written."""

    marks: dict
    mark: object


class _Loader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = _Mapping()
    out.marks = {}
    out.mark = node.start_mark
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if key in out:
            m = key_node.start_mark
            raise ScenarioParseError(loader.name, m.line + 1, m.column + 1,
                                     f"duplicate key {key!r}")
        out[key] = loader.construct_object(value_node, deep=True)
        out.marks[key] = key_node.start_mark
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)

_REQUIRED = object()
_NUMBER = re.compile(r"[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?")


class _Reader:
    """Walks the parsed document, converting fields and reporting positions."""

    def __init__(self, path: Path):
        self.path = path
        self.base = path.parent

    def fail(self, mapping, key, message):
        mark = None
        if isinstance(mapping, _Mapping):
            mark = mapping.marks.get(key, mapping.mark)
        line, col = (mark.line + 1, mark.column + 1) if mark is not None else (None, None)
        raise ScenarioParseError(self.path, line, col, message)

    def table(self, parent, key, where, required, optional=()):
        value = parent.get(key) if isinstance(parent, dict) else None
        if not isinstance(value, dict):
            self.fail(parent, key, f"{where} must be a mapping")
        return self.check_keys(value, where, required, optional)

    def check_keys(self, value, where, required, optional=()):
        if not isinstance(value, dict):
            raise ScenarioParseError(self.path, None, None, f"{where} must be a mapping")
        allowed = set(required) | set(optional)
        for k in value:
            if k not in allowed:
                self.fail(value, k, f"unknown key {where}.{k}")
        for k in required:
            if k not in value:
                self.fail(value, None, f"missing key {where}.{k}")
        return value

    def number(self, m, key, where, default=_REQUIRED, integer=False):
        if key not in m or m[key] is None:
            if default is _REQUIRED:
                self.fail(m, key, f"{where}.{key} must be a number")
            return default
        v = m[key]
        if isinstance(v, bool):
            self.fail(m, key, f"{where}.{key} must be a number")
        if isinstance(v, str) and _NUMBER.fullmatch(v.strip()):
            v = float(v)
        if not isinstance(v, (int, float)):
            self.fail(m, key, f"{where}.{key} must be a number, got {v!r}")
        if isinstance(v, float) and math.isnan(v):
            self.fail(m, key, f"{where}.{key} is NaN")
        if integer:
            if not math.isfinite(v) or float(v) != int(v):
                self.fail(m, key, f"{where}.{key} must be an integer")
            return int(v)
        return float(v)

    def text(self, m, key, where, optional=False):
        if key not in m or m[key] is None:
            if optional:
                return None
            self.fail(m, key, f"missing key {where}.{key}")
        v = m[key]
        if isinstance(v, bool) or not isinstance(v, (str, int, float)):
            self.fail(m, key, f"{where}.{key} must be a string")
        return str(v)

    def series(self, m, key, where):
        v = m[key]
        if isinstance(v, str):
            return load_profile_csv(self.base / v)
        if isinstance(v, list):
            out = []
            for i, item in enumerate(v):
                if isinstance(item, bool) or not isinstance(item, (int, float)) \
                        or not math.isfinite(item):
                    self.fail(m, key, f"{where}.{key}[{i}] must be a finite number")
                out.append(float(item))
            return tuple(out)
        self.fail(m, key, f"{where}.{key} must be a CSV path or a list of numbers")

    def items(self, doc, key):
        v = doc.get(key, [])
        if v is None:
            return []
        if not isinstance(v, list):
            self.fail(doc, key, f"{key} must be a list")
        return v


_TOP = ("horizon", "load", "market", "converters", "feeders", "ders")
_TOP_OPTIONAL = ("storages", "islanding", "profiles", "capacity_groups")


def _parse(doc, path: Path) -> Scenario:
    r = _Reader(path)
    if not isinstance(doc, dict):
        raise ScenarioParseError(path, 1, 1, "scenario file must contain a mapping")
    r.check_keys(doc, "scenario", _TOP, _TOP_OPTIONAL)

    h = r.table(doc, "horizon", "horizon", ("years", "representative_hours", "hour_weights"),
                ("period_hours",))
    horizon = Horizon(r.number(h, "years", "horizon", integer=True),
                      r.number(h, "representative_hours", "horizon", integer=True),
                      r.series(h, "hour_weights", "horizon"),
                      r.number(h, "period_hours", "horizon", integer=True, default=None))

    lm = r.table(doc, "load", "load", ("demand_profile", "dc_ratio", "critical_ratio", "voll"))
    load = LoadModel(r.series(lm, "demand_profile", "load"), r.number(lm, "dc_ratio", "load"),
                     r.number(lm, "critical_ratio", "load"), r.number(lm, "voll", "load"))

    mm = r.table(doc, "market", "market", ("price_profile", "exchange_limit"))
    market = MarketModel(r.series(mm, "price_profile", "market"),
                         r.number(mm, "exchange_limit", "market"))

    islanded = ()
    if "islanding" in doc:
        im = r.table(doc, "islanding", "islanding", (), ("islanded_hours",))
        hours = im.get("islanded_hours") or []
        if not isinstance(hours, list) or any(isinstance(x, bool) or not isinstance(x, int)
                                              for x in hours):
            r.fail(im, "islanded_hours", "islanding.islanded_hours must be a list of integers")
        islanded = tuple(hours)

    c = r.table(doc, "converters", "converters",
                ("rectifier_unit_cost", "inverter_unit_cost", "eta_rec", "eta_inv"),
                ("dc_dc_unit_cost", "grid_interface_unit_cost", "der_rectifier_unit_cost",
                 "der_inverter_unit_cost"))
    conv = ConverterCatalog(
        r.number(c, "rectifier_unit_cost", "converters"),
        r.number(c, "inverter_unit_cost", "converters"),
        r.number(c, "eta_rec", "converters"), r.number(c, "eta_inv", "converters"),
        r.number(c, "dc_dc_unit_cost", "converters", default=0.0),
        r.number(c, "grid_interface_unit_cost", "converters", default=0.0),
        r.number(c, "der_rectifier_unit_cost", "converters", default=None),
        r.number(c, "der_inverter_unit_cost", "converters", default=None))

    feeders = []
    for i, f in enumerate(r.items(doc, "feeders")):
        where = f"feeders[{i}]"
        r.check_keys(f, where, ("id", "dc_load_share", "ac_load_share"))
        feeders.append(FeederSpec(r.text(f, "id", where), r.number(f, "dc_load_share", where),
                                  r.number(f, "ac_load_share", where)))

    ders = []
    for i, d in enumerate(r.items(doc, "ders")):
        where = f"ders[{i}]"
        r.check_keys(d, where, ("id", "kind", "native_bus", "annualized_capital_cost",
                                "capacity_max"),
                     ("capacity_group", "cost_segments", "profile_id"))
        segments = d.get("cost_segments") or []
        if not isinstance(segments, list):
            r.fail(d, "cost_segments", f"{where}.cost_segments must be a list")
        parsed = []
        for s_i, seg in enumerate(segments):
            ok = isinstance(seg, list) and len(seg) == 2 and all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in seg)
            if not ok:
                r.fail(d, "cost_segments",
                       f"{where}.cost_segments[{s_i}] must be [width, marginal_cost]")
            parsed.append((float(seg[0]), float(seg[1])))
        ders.append(DerSpec(r.text(d, "id", where), r.text(d, "kind", where),
                            r.text(d, "native_bus", where),
                            r.number(d, "annualized_capital_cost", where),
                            r.number(d, "capacity_max", where),
                            r.text(d, "capacity_group", where, optional=True), tuple(parsed),
                            r.text(d, "profile_id", where, optional=True)))

    storages = []
    for i, st in enumerate(r.items(doc, "storages")):
        where = f"storages[{i}]"
        r.check_keys(st, where, ("id", "native_bus", "annualized_capital_cost", "power_max",
                                 "energy_per_power", "charge_efficiency",
                                 "discharge_efficiency"), ("soc_min", "soc_max"))
        storages.append(StorageSpec(
            r.text(st, "id", where), r.text(st, "native_bus", where),
            r.number(st, "annualized_capital_cost", where), r.number(st, "power_max", where),
            r.number(st, "energy_per_power", where), r.number(st, "charge_efficiency", where),
            r.number(st, "discharge_efficiency", where),
            r.number(st, "soc_min", where, default=0.0),
            r.number(st, "soc_max", where, default=1.0)))

    profiles = {}
    pm = doc.get("profiles") or {}
    if not isinstance(pm, dict):
        r.fail(doc, "profiles", "profiles must be a mapping")
    for name in pm:
        profiles[str(name)] = r.series(pm, name, "profiles")

    groups = {}
    gm = doc.get("capacity_groups") or {}
    if not isinstance(gm, dict):
        r.fail(doc, "capacity_groups", "capacity_groups must be a mapping")
    for name in gm:
        groups[str(name)] = r.number(gm, name, "capacity_groups")

    return Scenario(tuple(ders), tuple(storages), tuple(feeders), conv, load, market, horizon,
                    IslandingModel(islanded), profiles, groups)


def _series_sources(doc, base: Path):
    """(field path, csv path) for every series given as a file reference."""
    out = []
    for section, key in (("horizon", "hour_weights"), ("load", "demand_profile"),
                         ("market", "price_profile")):
        v = doc.get(section, {}).get(key) if isinstance(doc.get(section), dict) else None
        if isinstance(v, str):
            out.append((f"{section}.{key}", base / v))
    profiles = doc.get("profiles")
    if isinstance(profiles, dict):
        for name, v in profiles.items():
            if isinstance(v, str):
                out.append((f"profiles.{name}", base / v))
    return out


def load_scenario(path) -> Scenario:
    """Read, parse and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ScenarioFileError(f"{path}: no such scenario file") from None
    except OSError as exc:
        raise ScenarioFileError(f"{path}: {exc.strerror or exc}") from None
    try:
        loader = _Loader(text)
        loader.name = str(path)
        try:
            doc = loader.get_single_data()
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark
        raise ScenarioParseError(path, m.line + 1 if m else None, m.column + 1 if m else None,
                                 exc.problem or str(exc)) from None
    except yaml.YAMLError as exc:
        raise ScenarioParseError(path, None, None, str(exc)) from None
    scenario = _parse(doc, path)

    # series read from files get a length check that names the file
    hours = scenario.horizon.representative_hours
    lengths = {"horizon.hour_weights": len(scenario.horizon.hour_weights),
               "load.demand_profile": len(scenario.load.demand_profile),
               "market.price_profile": len(scenario.market.price_profile)}
    lengths.update({f"profiles.{k}": len(v) for k, v in scenario.profiles.items()})
    for field_path, csv_path in _series_sources(doc, path.parent):
        if lengths[field_path] != hours:
            raise ProfileLengthError(csv_path, None, f"{lengths[field_path]} values for "
                                     f"{field_path}, expected {hours}")

    violations = domain.validate(scenario)
    if violations:
        raise ScenarioValidationError(path, violations)
    return scenario


def bundled_path(name: str) -> Path:
    """Path of a scenario shipped in the package ``data`` directory."""
    from importlib.resources import files
    path = Path(str(files("hybridplan") / "data" / name))
    if not path.exists():
        raise ScenarioFileError(f"no bundled scenario named {name!r}")
    return path


def load_profile_csv(path) -> tuple[float, ...]:
    """One value per line; a non-numeric first line is taken as a header."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ScenarioFileError(f"{path}: no such profile file") from None
    except OSError as exc:
        raise ScenarioFileError(f"{path}: {exc.strerror or exc}") from None
    values = []
    for row_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 1:
            raise ProfileError(path, row_no, f"expected one column, found {len(row)}")
        cell = row[0].strip()
        if not _NUMBER.fullmatch(cell):
            if row_no == 1 and not re.fullmatch(r"[-+]?(nan|inf|infinity)", cell, re.I):
                continue  # header
            raise ProfileError(path, row_no, f"not a finite number: {cell!r}")
        values.append(float(cell))
    if not values:
        raise ProfileError(path, None, "profile file has no values")
    return tuple(values)


def write_profile_csv(values, path, header: str | None = None) -> None:
    lines = ([header] if header else []) + [repr(float(v)) for v in values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def scenario_to_document(s: Scenario, series: dict | None = None) -> dict:
    """Plain-data form of a scenario. ``series`` overrides inline series by field path."""
    series = series or {}

    def ser(field_path, values):
        return series.get(field_path, [float(v) for v in values])

    c = s.converters
    conv = {"rectifier_unit_cost": c.rectifier_unit_cost, "inverter_unit_cost": c.inverter_unit_cost,
            "eta_rec": c.eta_rec, "eta_inv": c.eta_inv, "dc_dc_unit_cost": c.dc_dc_unit_cost,
            "grid_interface_unit_cost": c.grid_interface_unit_cost}
    if c.der_rectifier_unit_cost is not None:
        conv["der_rectifier_unit_cost"] = c.der_rectifier_unit_cost
    if c.der_inverter_unit_cost is not None:
        conv["der_inverter_unit_cost"] = c.der_inverter_unit_cost
    horizon = {"years": s.horizon.years, "representative_hours": s.horizon.representative_hours,
               "hour_weights": ser("horizon.hour_weights", s.horizon.hour_weights)}
    if s.horizon.period_hours is not None:
        horizon["period_hours"] = s.horizon.period_hours
    ders = []
    for d in s.ders:
        item = {"id": d.id, "kind": d.kind, "native_bus": d.native_bus,
                "annualized_capital_cost": d.annualized_capital_cost,
                "capacity_max": d.capacity_max}
        if d.capacity_group is not None:
            item["capacity_group"] = d.capacity_group
        if d.cost_segments:
            item["cost_segments"] = [[w, mc] for w, mc in d.cost_segments]
        if d.profile_id is not None:
            item["profile_id"] = d.profile_id
        ders.append(item)
    return {
        "horizon": horizon,
        "load": {"demand_profile": ser("load.demand_profile", s.load.demand_profile),
                 "dc_ratio": s.load.dc_ratio, "critical_ratio": s.load.critical_ratio,
                 "voll": s.load.voll},
        "market": {"price_profile": ser("market.price_profile", s.market.price_profile),
                   "exchange_limit": s.market.exchange_limit},
        "islanding": {"islanded_hours": [int(h) for h in s.islanding.islanded_hours]},
        "converters": conv,
        "feeders": [dataclasses.asdict(f) for f in s.feeders],
        "ders": ders,
        "storages": [dataclasses.asdict(st) for st in s.storages],
        "profiles": {k: ser(f"profiles.{k}", v) for k, v in s.profiles.items()},
        "capacity_groups": dict(s.capacity_groups),
    }


def write_scenario(s: Scenario, path, profile_dir: str = "profiles") -> None:
    """Write ``s`` as YAML with its series in CSV files under ``profile_dir``."""
    path = Path(path)
    pdir = path.parent / profile_dir
    pdir.mkdir(parents=True, exist_ok=True)
    files = {"horizon.hour_weights": ("weights.csv", s.horizon.hour_weights),
             "load.demand_profile": ("demand.csv", s.load.demand_profile),
             "market.price_profile": ("price.csv", s.market.price_profile)}
    for name, values in s.profiles.items():
        files[f"profiles.{name}"] = (f"profile_{name}.csv", values)
    series = {}
    for field_path, (fname, values) in files.items():
        write_profile_csv(values, pdir / fname)
        series[field_path] = f"{profile_dir}/{fname}"
    doc = scenario_to_document(s, series)
    path.write_text(yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, width=100),
                    encoding="utf-8")


# -- results ----------------------------------------------------------------------

def plan_to_dict(p: PlanResult) -> dict:
    return {
        "feeder_types": dict(p.feeder_types),
        "placements": {u: dataclasses.asdict(v) for u, v in p.placements.items()},
        "cost_breakdown": dataclasses.asdict(p.cost_breakdown),
        "dispatch": [dataclasses.asdict(h) for h in p.dispatch],
        "solver_stats": dataclasses.asdict(p.solver_stats),
    }


def plan_from_dict(d: dict) -> PlanResult:
    return PlanResult(dict(d["feeder_types"]),
                      {u: Placement(**v) for u, v in d["placements"].items()},
                      CostBreakdown(**d["cost_breakdown"]),
                      tuple(HourDispatch(**h) for h in d["dispatch"]),
                      SolverStats(**d["solver_stats"]))


def _sweep_types():
    from .cli.commands import SweepReport, SweepRow
    return SweepReport, SweepRow


def sweep_to_dict(report) -> dict:
    rows = []
    for row in report.rows:
        rows.append({"value": row.value, "status": row.status, "error": row.error,
                     "plan": plan_to_dict(row.plan) if row.plan is not None else None})
    return {"parameter": report.parameter, "rows": rows}


def sweep_from_dict(d: dict):
    SweepReport, SweepRow = _sweep_types()
    rows = [SweepRow(r["value"], r["status"],
                     plan_from_dict(r["plan"]) if r["plan"] is not None else None, r["error"])
            for r in d["rows"]]
    return SweepReport(d["parameter"], tuple(rows))


def result_to_json(result) -> str:
    if isinstance(result, PlanResult):
        doc = {"type": "plan", "version": RESULT_VERSION, "plan": plan_to_dict(result)}
    else:
        doc = {"type": "sweep", "version": RESULT_VERSION, "sweep": sweep_to_dict(result)}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def result_from_json(text: str):
    try:
        doc = json.loads(text)
        kind = doc["type"]
        if doc.get("version") != RESULT_VERSION:
            raise ResultFormatError(f"unsupported result version {doc.get('version')!r}")
        if kind == "plan":
            return plan_from_dict(doc["plan"])
        if kind == "sweep":
            return sweep_from_dict(doc["sweep"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ResultFormatError(f"malformed result dump: {exc}") from None
    raise ResultFormatError(f"unknown result type {kind!r}")


def read_result(path):
    return result_from_json(Path(path).read_text(encoding="utf-8"))


SWEEP_COLUMNS = ("investment", "operation", "reliability", "total", "dc_feeder_count")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _num(x) -> str:
    return repr(float(x))


def _plan_tables(p: PlanResult, out: Path):
    _write_csv(out / "plan.csv", ("unit", "kind", "native_bus", "feeder", "feeder_type",
                                  "capacity_mw"),
               [(u, v.kind, v.native_bus, v.feeder or "",
                 p.feeder_types.get(v.feeder, "") if v.feeder else "", _num(v.capacity))
                for u, v in p.placements.items()])
    _write_csv(out / "feeders.csv", ("feeder", "type"), list(p.feeder_types.items()))
    _write_csv(out / "costs.csv", ("component", "value"),
               [(k, _num(v)) for k, v in dataclasses.asdict(p.cost_breakdown).items()])
    units = list(p.dispatch[0].outputs) if p.dispatch else []
    stores = list(p.dispatch[0].soc) if p.dispatch else []
    header = (["hour", "demand_mw", "grid_import_mw", "grid_export_mw", "shed_mw"]
              + [f"{u}_output_mw" for u in units]
              + [f"{j}_{what}" for j in stores for what in ("charge_mw", "discharge_mw", "soc_mwh")])
    rows = []
    for h in p.dispatch:
        row = [h.hour, _num(h.demand), _num(h.grid_import), _num(h.grid_export), _num(h.shed)]
        row += [_num(h.outputs[u]) for u in units]
        for j in stores:
            row += [_num(h.charge[j]), _num(h.discharge[j]), _num(h.soc[j])]
        rows.append(row)
    _write_csv(out / "dispatch.csv", header, rows)


def _sweep_table(report, out: Path):
    rows = []
    for r in report.rows:
        if r.plan is None:
            rows.append([_num(r.value)] + [""] * len(SWEEP_COLUMNS) + [r.status])
            continue
        c = r.plan.cost_breakdown
        rows.append([_num(r.value), _num(c.investment), _num(c.operation), _num(c.reliability),
                     _num(c.total), r.plan.dc_feeder_count, r.status])
    _write_csv(out / "sweep.csv", (report.parameter,) + SWEEP_COLUMNS + ("status",), rows)


def write_result(result, path, format: str = "machine") -> Path:
    """Write a PlanResult or SweepReport.

    ``machine`` writes one JSON file at ``path``. ``csv`` treats ``path`` as a
    directory and writes plan.csv, feeders.csv, costs.csv and dispatch.csv for
    a plan, or sweep.csv for a sweep.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    path = Path(path)
    try:
        if format == "machine":
            if path.parent != Path(""):
                path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(result_to_json(result), encoding="utf-8")
        else:
            path.mkdir(parents=True, exist_ok=True)
            if isinstance(result, PlanResult):
                _plan_tables(result, path)
            else:
                _sweep_table(result, path)
    except OSError as exc:
        raise ScenarioFileError(f"{path}: cannot write result: {exc.strerror or exc}") from None
    return path
