"""Dataset loading, validation and report writing.

A dataset is a directory of nine CSV files. Validation is exhaustive:
every problem across every file is collected into one report instead
of stopping at the first. The package also bundles two data sets: the
EU-wide default cost references and a small fictional-but-realistic
fixture used by the tests and as a demo.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

from .costs import CostAction, CostReference, Granularity, PreparednessFactor
from .coverage import (PUBLISHED_BANDS, CoverageInterval, NationalFigure, TechClass)
from .errors import DataError, DatasetValidationError
from .geo import (SIZE_CLASSES, Country, Degurba, FixedTechChoice, Geotype,
                  Locality, Region)

if TYPE_CHECKING:  # pragma: no cover
    from .gap import EvolutionReport, GapReport

log = logging.getLogger(__name__)

DATASET_FILES = (
    "regions.csv", "localities.csv", "countries.csv", "enterprises.csv",
    "coverage_intervals.csv", "coverage_national.csv", "cost_references.csv",
    "price_index.csv", "cohesion.csv",
)


def _data_root() -> Path:
    return Path(str(resources.files("gigagap"))) / "data"


def fixture_path() -> Path:
    """Directory of the bundled demo dataset."""
    return _data_root() / "fixture"


def defaults_path() -> Path:
    """Directory of the bundled default cost data."""
    return _data_root() / "defaults"


def eu_reference_path() -> Path:
    """Directory of the bundled EU-28 reference tables."""
    return _data_root() / "eu28"


@dataclass
class ValidationEntry:
    severity: str  # "error" | "warning"
    file: str
    row: int
    message: str

    def __str__(self):
        where = f"{self.file}:{self.row}" if self.row else self.file
        return f"{self.severity.upper()} {where}: {self.message}"


@dataclass
class ValidationReport:
    dataset: str
    entries: list[ValidationEntry] = field(default_factory=list)

    def error(self, file: str, row: int, message: str) -> None:
        self.entries.append(ValidationEntry("error", file, row, message))

    def warning(self, file: str, row: int, message: str) -> None:
        self.entries.append(ValidationEntry("warning", file, row, message))
        log.warning("%s:%s: %s", file, row, message)

    @property
    def errors(self) -> list[ValidationEntry]:
        return [e for e in self.entries if e.severity == "error"]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass
class Dataset:
    """Fully parsed and cross-checked model inputs."""

    path: Path | None
    vintage: int
    countries: dict[str, Country]
    regions: dict[str, Region]
    localities: list[Locality]
    enterprises: dict[tuple[str, str], float]
    coverage_intervals: list[CoverageInterval]
    coverage_national: list[NationalFigure]
    cost_references: list[CostReference]
    price_index: dict[int, float]
    cohesion: dict[str, bool]


def _read_rows(path: Path, filename: str, required: tuple[str, ...],
               optional: tuple[str, ...], report: ValidationReport):
    """Read one CSV, checking columns. Yields (row_number, dict) pairs."""
    file = path / filename
    if not file.is_file():
        report.error(filename, 0, "file not found")
        return
    with open(file, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            report.error(filename, 1, f"missing required columns: {', '.join(missing)}")
            return
        known = set(required) | set(optional)
        for col in header:
            if col not in known:
                report.warning(filename, 1, f"ignoring unknown column {col!r}")
        for row in reader:
            yield reader.line_num, row


def _parse_float(raw: str, what: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise DataError(f"{what}: not a number: {raw!r}") from None


def _parse_int(raw: str, what: str) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise DataError(f"{what}: not an integer: {raw!r}") from None


def _parse_enum(raw: str, enum_cls, what: str):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise DataError(f"{what}: {raw!r} is not one of {valid}") from None


_DEGURBA_ALIASES = {"1": Degurba.URBAN, "2": Degurba.SUBURBAN, "3": Degurba.RURAL}


def _parse_degurba(raw: str) -> Degurba:
    key = (raw or "").strip().lower()
    if key in _DEGURBA_ALIASES:
        return _DEGURBA_ALIASES[key]
    return _parse_enum(key, Degurba, "degurba")


def _parse_bool(raw: str, what: str) -> bool:
    key = (raw or "").strip().lower()
    if key in ("true", "1", "yes"):
        return True
    if key in ("false", "0", "no"):
        return False
    raise DataError(f"{what}: expected a boolean, got {raw!r}")


def validate_dataset(path: str | Path) -> tuple[Dataset | None, ValidationReport]:
    """Parse and cross-check a dataset directory.

    Returns the dataset (None when there are errors) plus the full
    validation report with every error and warning found."""
    path = Path(path)
    report = ValidationReport(dataset=str(path))
    if not path.is_dir():
        report.error(str(path), 0, "dataset directory not found")
        return None, report

    regions = _load_regions(path, report)
    localities = _load_localities(path, report)
    countries = _load_countries(path, report)
    enterprises = _load_enterprises(path, report)
    intervals = _load_intervals(path, report)
    national = _load_national(path, report)
    cost_refs = _load_cost_references(path, report)
    price_index = _load_price_index(path, report)
    cohesion = _load_cohesion(path, report)

    _cross_checks(report, regions, localities, countries, enterprises,
                  intervals, national, cost_refs, price_index, cohesion)

    vintages = sorted({iv.vintage for iv in intervals} | {nf.vintage for nf in national})
    if len(vintages) > 1:
        report.error("coverage_intervals.csv", 0,
                     f"mixed coverage vintages in one dataset: {vintages}")
    if not vintages:
        report.error("coverage_national.csv", 0, "dataset contains no coverage data")

    if not report.ok:
        return None, report
    dataset = Dataset(
        path=path, vintage=vintages[0], countries=countries, regions=regions,
        localities=localities, enterprises=enterprises,
        coverage_intervals=intervals, coverage_national=national,
        cost_references=cost_refs, price_index=price_index, cohesion=cohesion,
    )
    return dataset, report


def load_dataset(path: str | Path) -> Dataset:
    """Load a dataset directory, raising with the full report on errors."""
    dataset, report = validate_dataset(path)
    if dataset is None:
        raise DatasetValidationError(report)
    return dataset


def _load_regions(path, report) -> dict[str, Region]:
    out: dict[str, Region] = {}
    cols = ("id", "country", "population", "area_km2", "households")
    for lineno, row in _read_rows(path, "regions.csv", cols, (), report):
        try:
            region = Region(
                id=row["id"].strip(),
                country=row["country"].strip(),
                population=_parse_float(row["population"], "population"),
                area_km2=_parse_float(row["area_km2"], "area_km2"),
                households=_parse_float(row["households"], "households"),
            )
        except DataError as err:
            report.error("regions.csv", lineno, str(err))
            continue
        if region.id in out:
            report.error("regions.csv", lineno, f"duplicate region id {region.id}")
            continue
        if region.population == 0 and region.households > 0:
            report.warning("regions.csv", lineno,
                           f"region {region.id} has households but zero population")
        out[region.id] = region
    return out


def _load_localities(path, report) -> list[Locality]:
    out = []
    seen = set()
    cols = ("id", "region", "population", "area_km2", "degurba")
    for lineno, row in _read_rows(path, "localities.csv", cols, (), report):
        try:
            loc = Locality(
                id=row["id"].strip(),
                region=row["region"].strip(),
                population=_parse_float(row["population"], "population"),
                area_km2=_parse_float(row["area_km2"], "area_km2"),
                degurba=_parse_degurba(row["degurba"]),
            )
        except DataError as err:
            report.error("localities.csv", lineno, str(err))
            continue
        if loc.id in seen:
            report.error("localities.csv", lineno, f"duplicate locality id {loc.id}")
            continue
        seen.add(loc.id)
        out.append(loc)
    return out


def _load_countries(path, report) -> dict[str, Country]:
    out: dict[str, Country] = {}
    cols = ("code", "labour_index", "prep_geo", "prep_housing", "prep_regulation",
            "dominant_fixed_tech", "road_km", "rail_km", "capital_region")
    optional = ("docsis_band", "fttp_band")
    for lineno, row in _read_rows(path, "countries.csv", cols, optional, report):
        code = row["code"].strip()
        try:
            prep = PreparednessFactor(
                country=code,
                geographic=_parse_float(row["prep_geo"], "prep_geo"),
                housing=_parse_float(row["prep_housing"], "prep_housing"),
                regulation=_parse_float(row["prep_regulation"], "prep_regulation"),
            )
            for name in ("prep_geo", "prep_housing", "prep_regulation"):
                v = float(row[name])
                if min(abs(v - s) for s in (-0.10, 0.0, 0.10)) > 1e-9:
                    report.warning("countries.csv", lineno,
                                   f"{name}={v} is not one of the usual -0.10/0/0.10 steps")
            country = Country(
                code=code,
                labour_index=_parse_float(row["labour_index"], "labour_index"),
                preparedness=prep,
                dominant_fixed_tech=_parse_enum(row["dominant_fixed_tech"].strip(),
                                                FixedTechChoice, "dominant_fixed_tech"),
                road_km=_parse_float(row["road_km"], "road_km"),
                rail_km=_parse_float(row["rail_km"], "rail_km"),
                capital_region=row["capital_region"].strip(),
                docsis_band=(row.get("docsis_band") or "").strip() or None,
                fttp_band=(row.get("fttp_band") or "").strip() or None,
            )
        except DataError as err:
            report.error("countries.csv", lineno, str(err))
            continue
        if code in out:
            report.error("countries.csv", lineno, f"duplicate country code {code}")
            continue
        out[code] = country
    return out


def _load_enterprises(path, report) -> dict[tuple[str, str], float]:
    out: dict[tuple[str, str], float] = {}
    for lineno, row in _read_rows(path, "enterprises.csv",
                                  ("country", "size_class", "count"), (), report):
        country = row["country"].strip()
        size_class = row["size_class"].strip()
        if size_class not in SIZE_CLASSES:
            report.error("enterprises.csv", lineno,
                         f"unknown size class {size_class!r}; expected one of "
                         + ", ".join(SIZE_CLASSES))
            continue
        try:
            count = _parse_float(row["count"], "count")
        except DataError as err:
            report.error("enterprises.csv", lineno, str(err))
            continue
        if count < 0:
            report.error("enterprises.csv", lineno, f"negative enterprise count {count}")
            continue
        key = (country, size_class)
        if key in out:
            report.error("enterprises.csv", lineno,
                         f"duplicate enterprise row for {country}/{size_class}")
            continue
        out[key] = count
    return out


def _load_intervals(path, report) -> list[CoverageInterval]:
    out = []
    seen = set()
    cols = ("region", "technology", "band_low", "band_high", "vintage")
    for lineno, row in _read_rows(path, "coverage_intervals.csv", cols, (), report):
        try:
            iv = CoverageInterval(
                region=row["region"].strip(),
                technology=_parse_enum(row["technology"].strip(), TechClass, "technology"),
                low=_parse_float(row["band_low"], "band_low"),
                high=_parse_float(row["band_high"], "band_high"),
                vintage=_parse_int(row["vintage"], "vintage"),
            )
        except DataError as err:
            report.error("coverage_intervals.csv", lineno, str(err))
            continue
        key = (iv.region, iv.technology)
        if key in seen:
            report.error("coverage_intervals.csv", lineno,
                         f"duplicate interval for {iv.region}/{iv.technology.value}")
            continue
        seen.add(key)
        if all(abs(iv.low - lo) > 1e-9 or abs(iv.high - hi) > 1e-9
               for lo, hi in PUBLISHED_BANDS):
            report.warning("coverage_intervals.csv", lineno,
                           f"band [{iv.low}, {iv.high}] is not one of the published bands")
        out.append(iv)
    return out


def _load_national(path, report) -> list[NationalFigure]:
    out = []
    seen = set()
    cols = ("country", "technology", "coverage", "vintage")
    for lineno, row in _read_rows(path, "coverage_national.csv", cols, (), report):
        try:
            nf = NationalFigure(
                country=row["country"].strip(),
                technology=_parse_enum(row["technology"].strip(), TechClass, "technology"),
                coverage=_parse_float(row["coverage"], "coverage"),
                vintage=_parse_int(row["vintage"], "vintage"),
            )
        except DataError as err:
            report.error("coverage_national.csv", lineno, str(err))
            continue
        key = (nf.country, nf.technology)
        if key in seen:
            report.error("coverage_national.csv", lineno,
                         f"duplicate national figure for {nf.country}/{nf.technology.value}")
            continue
        seen.add(key)
        out.append(nf)
    return out


def _load_cost_references(path, report) -> list[CostReference]:
    out = []
    cols = ("action", "geotype", "granularity", "value_eur", "price_year", "source_id")
    for lineno, row in _read_rows(path, "cost_references.csv", cols, (), report):
        try:
            action = _parse_enum(row["action"].strip(), CostAction, "action")
            raw_geotype = (row["geotype"] or "").strip()
            geotype = _parse_enum(raw_geotype, Geotype, "geotype") if raw_geotype else None
            ref = CostReference(
                action=action,
                geotype=geotype,
                granularity=_parse_enum(row["granularity"].strip(), Granularity,
                                        "granularity"),
                value_eur=_parse_float(row["value_eur"], "value_eur"),
                price_year=_parse_int(row["price_year"], "price_year"),
                source=(row["source_id"] or "").strip(),
            )
        except DataError as err:
            report.error("cost_references.csv", lineno, str(err))
            continue
        out.append(ref)
    return out


def _load_price_index(path, report) -> dict[int, float]:
    out: dict[int, float] = {}
    for lineno, row in _read_rows(path, "price_index.csv",
                                  ("year", "multiplier"), (), report):
        try:
            year = _parse_int(row["year"], "year")
            multiplier = _parse_float(row["multiplier"], "multiplier")
        except DataError as err:
            report.error("price_index.csv", lineno, str(err))
            continue
        if multiplier <= 0:
            report.error("price_index.csv", lineno, f"multiplier must be positive: {multiplier}")
            continue
        if year in out:
            report.error("price_index.csv", lineno, f"duplicate year {year}")
            continue
        out[year] = multiplier
    return out


def _load_cohesion(path, report) -> dict[str, bool]:
    out: dict[str, bool] = {}
    for lineno, row in _read_rows(path, "cohesion.csv",
                                  ("region", "is_cohesion"), (), report):
        region = row["region"].strip()
        try:
            flag = _parse_bool(row["is_cohesion"], "is_cohesion")
        except DataError as err:
            report.error("cohesion.csv", lineno, str(err))
            continue
        if region in out:
            report.error("cohesion.csv", lineno, f"duplicate cohesion row for {region}")
            continue
        out[region] = flag
    return out


def _cross_checks(report, regions, localities, countries, enterprises,
                  intervals, national, cost_refs, price_index, cohesion) -> None:
    for region in regions.values():
        if region.country not in countries:
            report.error("regions.csv", 0,
                         f"region {region.id} references unknown country {region.country}")

    by_region: dict[str, list[Locality]] = {}
    for loc in localities:
        if loc.region not in regions:
            report.error("localities.csv", 0,
                         f"locality {loc.id} references unknown region {loc.region}")
            continue
        by_region.setdefault(loc.region, []).append(loc)
    for region_id in sorted(regions):
        locs = by_region.get(region_id, [])
        if not locs:
            report.error("localities.csv", 0, f"region {region_id} has no localities")
            continue
        region = regions[region_id]
        pop = sum(l.population for l in locs)
        area = sum(l.area_km2 for l in locs)
        for name, have, want in (("population", pop, region.population),
                                 ("area", area, region.area_km2)):
            if want == 0:
                continue
            rel = abs(have - want) / abs(want)
            if rel > 0.02:
                report.error("localities.csv", 0,
                             f"region {region_id}: locality {name} sums to {have:.6g} "
                             f"but the region total is {want:.6g} ({rel:.1%} off)")
            elif rel > 1e-9:
                report.warning("localities.csv", 0,
                               f"region {region_id}: locality {name} off by {rel:.2%}")

    for code in sorted(countries):
        country = countries[code]
        capital = country.capital_region
        if capital not in regions:
            report.error("countries.csv", 0,
                         f"country {code}: capital region {capital} not in regions.csv")
        elif regions[capital].country != code:
            report.error("countries.csv", 0,
                         f"country {code}: capital region {capital} belongs to "
                         f"{regions[capital].country}")

    for (country, _sc) in enterprises:
        if country not in countries:
            report.error("enterprises.csv", 0,
                         f"enterprise counts reference unknown country {country}")

    region_country = {r.id: r.country for r in regions.values()}
    pairs_with_intervals: dict[tuple[str, TechClass], set[str]] = {}
    for iv in intervals:
        if iv.region not in regions:
            report.error("coverage_intervals.csv", 0,
                         f"interval references unknown region {iv.region}")
            continue
        pairs_with_intervals.setdefault(
            (region_country[iv.region], iv.technology), set()).add(iv.region)
    national_pairs = set()
    for nf in national:
        if nf.country not in countries:
            report.error("coverage_national.csv", 0,
                         f"national figure references unknown country {nf.country}")
            continue
        national_pairs.add((nf.country, nf.technology))

    for pair in sorted(pairs_with_intervals, key=lambda p: (p[0], p[1].value)):
        country, tech = pair
        have = pairs_with_intervals[pair]
        members = {r for r, c in region_country.items() if c == country}
        missing = sorted(members - have)
        if missing:
            report.error("coverage_intervals.csv", 0,
                         f"{country}/{tech.value}: intervals missing for regions "
                         + ", ".join(missing))
        if pair not in national_pairs:
            report.error("coverage_national.csv", 0,
                         f"{country}/{tech.value}: intervals present but no national figure")
    for pair in sorted(national_pairs - set(pairs_with_intervals),
                       key=lambda p: (p[0], p[1].value)):
        report.error("coverage_intervals.csv", 0,
                     f"{pair[0]}/{pair[1].value}: national figure present but no intervals")

    years_needed = {ref.price_year for ref in cost_refs}
    for year in sorted(years_needed - set(price_index)):
        report.error("price_index.csv", 0,
                     f"cost references use price year {year} but the index has no entry")

    for region_id in cohesion:
        if region_id not in regions:
            report.error("cohesion.csv", 0,
                         f"cohesion flag references unknown region {region_id}")
    for region_id in sorted(set(regions) - set(cohesion)):
        report.warning("cohesion.csv", 0, f"region {region_id} has no cohesion flag")


# ---------------------------------------------------------------------------
# bundled data

def default_cost_references() -> list[CostReference]:
    """EU-wide default unit cost references (2019 prices)."""
    report = ValidationReport(dataset="defaults")
    refs = _load_cost_references(defaults_path(), report)
    if not report.ok:  # bundled data must parse
        raise DataError("; ".join(str(e) for e in report.errors))
    return refs


def default_price_index() -> dict[int, float]:
    report = ValidationReport(dataset="defaults")
    index = _load_price_index(defaults_path(), report)
    if not report.ok:
        raise DataError("; ".join(str(e) for e in report.errors))
    return index


def eu_preparedness_table() -> list[dict]:
    """Bundled national preparedness components with their published sums."""
    rows = []
    file = eu_reference_path() / "preparedness.csv"
    with open(file, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append({
                "country": row["country"],
                "factor": PreparednessFactor(
                    country=row["country"],
                    geographic=float(row["geographic"]),
                    housing=float(row["housing"]),
                    regulation=float(row["regulation"]),
                ),
                "published_combined": float(row["combined"]),
            })
    return rows


def eu_transport_table() -> dict[str, tuple[float, float]]:
    """Bundled national road and rail lengths outside urban areas (km)."""
    out = {}
    file = eu_reference_path() / "transport.csv"
    with open(file, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["country"]] = (float(row["road_km"]), float(row["rail_km"]))
    return out


def eu_tech_choices() -> dict[str, FixedTechChoice]:
    """Bundled dominant fixed-technology choice per country."""
    out = {}
    file = eu_reference_path() / "tech_choices.csv"
    with open(file, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["country"]] = FixedTechChoice(row["dominant_fixed_tech"])
    return out


def eu_cable_fibre_bands() -> dict[str, tuple[str, str]]:
    """Bundled DOCSIS and fibre deployment bands per country."""
    out = {}
    file = eu_reference_path() / "cable_fibre.csv"
    with open(file, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["country"]] = (row["docsis_band"], row["fttp_band"])
    return out


# ---------------------------------------------------------------------------
# report writing

def _fmt(value) -> str:
    """Lossless text form for CSV output."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def scenario_to_dict(report: "GapReport") -> dict:
    scenario = report.scenario
    out = {"name": report.scenario_name}
    if scenario is not None:
        out.update({
            "t1_quality": scenario.t1_quality.value,
            "t2_quality": scenario.t2_quality.value,
            "t3_tier": scenario.t3_tier.value,
            "t4_wireless": scenario.t4_wireless.value,
            "docsis_upgrade": scenario.docsis_upgrade,
        })
    return out


def summary_dict(report: "GapReport") -> dict:
    from .gap import BreakdownDimension, breakdown, histogram_gap_shares

    hist = histogram_gap_shares(report)
    breakdowns = {}
    for dim in BreakdownDimension.ALL:
        try:
            breakdowns[dim] = breakdown(report, dim)
        except DataError:
            continue  # e.g. cohesion flags absent
    out = {
        "format": "gigagap-summary-v1",
        "scenario": scenario_to_dict(report),
        "vintage": report.vintage,
        "totals_eur": dict(sorted(report.totals.items())),
        "country_totals_eur": dict(sorted(report.country_totals.items())),
        "geotype_totals_eur": {g.value: v for g, v in report.geotype_totals.items()},
        "regions": {
            rid: {
                "country": s.country,
                "population": s.population,
                "households": s.households,
                "premises_total": s.premises_total,
                "premises_to_cover": s.premises_to_cover,
                "cohesion": s.cohesion,
            } for rid, s in sorted(report.regions.items())
        },
        "histogram": {
            "buckets": [
                {"low": b.low, "high": b.high, "region_count": b.region_count,
                 "population_share": b.population_share} for b in hist.buckets
            ],
            "le50_regions": hist.le50_regions,
            "le50_population_share": hist.le50_population_share,
            "gt50_regions": hist.gt50_regions,
            "gt50_population_share": hist.gt50_population_share,
        },
        "breakdowns": breakdowns,
    }
    if report.operator is not None:
        op = report.operator
        out["operator"] = {
            "fixed_pool_eur": op.fixed_pool_eur,
            "wireless_pool_eur": op.wireless_pool_eur,
            "fixed_used_eur": op.fixed_used_eur,
            "wireless_used_eur": op.wireless_used_eur,
            "residual_gap_eur": op.residual_gap_eur,
            "residual_by_country_eur": dict(sorted(op.residual_by_country_eur.items())),
            "clamped_eur": op.clamped_eur,
        }
    return out


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_reports(report: "GapReport", out_dir: str | Path,
                  evolution: "EvolutionReport | None" = None) -> list[Path]:
    """Write gap_cells.csv, gap_summary.json and histogram.csv (plus
    evolution.json when trend data is supplied). Output is byte-stable
    for identical inputs."""
    from .gap import histogram_gap_shares

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    cells_path = out_dir / "gap_cells.csv"
    _write_csv(
        cells_path,
        ["target", "region", "geotype", "action", "unit", "quantity",
         "unit_cost_eur", "investment_eur"],
        [[c.target.value, c.region, c.geotype.value, c.action.value, c.unit.value,
          c.quantity, c.unit_cost_eur, c.investment_eur] for c in report.cells],
    )
    written.append(cells_path)

    summary_path = out_dir / "gap_summary.json"
    _write_json(summary_path, summary_dict(report))
    written.append(summary_path)

    hist = histogram_gap_shares(report)
    hist_path = out_dir / "histogram.csv"
    _write_csv(
        hist_path,
        ["bucket_low", "bucket_high", "region_count", "population_share"],
        [[b.low, b.high, b.region_count, b.population_share] for b in hist.buckets],
    )
    written.append(hist_path)

    evo_path = out_dir / "evolution.json"
    if evolution is not None:
        _write_json(evo_path, evolution_dict(evolution))
    else:
        _write_json(evo_path, {
            "format": "gigagap-evolution-v1",
            "scenario_name": report.scenario_name,
            "points": [{"vintage": report.vintage,
                        "total_eur": report.headline_total_eur}],
            "note": "single vintage; run compare with a second summary for a trend",
        })
    written.append(evo_path)
    return written


def write_cost_table(table, out_dir: str | Path) -> Path:
    """Dump base and fully adjusted unit costs for audit."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for (action, geotype, country) in sorted(
            table.adjusted,
            key=lambda k: (k[0].value, "" if k[1] is None else k[1].value, k[2])):
        rows.append([
            action.value,
            "" if geotype is None else geotype.value,
            country,
            table.base[(action, geotype)],
            table.adjusted[(action, geotype, country)],
        ])
    path = out_dir / "cost_table.csv"
    _write_csv(path, ["action", "geotype", "country", "base_eur", "adjusted_eur"], rows)
    return path


def write_coverage_points(state, out_dir: str | Path) -> Path:
    """Dump the disaggregated coverage state for inspection."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for (region, geotype, tech) in sorted(state.entries,
                                          key=lambda k: (k[0], k[1].order, k[2].value)):
        rows.append([region, geotype.value, tech.value, state.entries[(region, geotype, tech)]])
    path = out_dir / "coverage_point.csv"
    _write_csv(path, ["region", "geotype", "technology", "coverage"], rows)
    return path


def evolution_dict(evolution: "EvolutionReport") -> dict:
    return {
        "format": "gigagap-evolution-v1",
        "scenario_name": evolution.scenario_name,
        "points": [{"vintage": y, "total_eur": v} for y, v in evolution.points],
        "target_deltas_eur": dict(sorted(evolution.target_deltas_eur.items())),
        "total_delta_eur": evolution.total_delta_eur,
        "slope_eur_per_year": evolution.slope_eur_per_year,
        "extrapolated_2025_eur": evolution.extrapolated_2025_eur,
        "zero_crossing_year": evolution.zero_crossing_year,
        "countries_grown": dict(sorted(evolution.countries_grown.items())),
    }


def report_from_summary(path: str | Path) -> "GapReport":
    """Rebuild enough of a report from gap_summary.json to compare
    vintages. Cells are not reconstructed."""
    from .gap import GapReport, RegionSummary
    from .targets import Quality, Scenario, T3Tier, T4WirelessScope

    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("format") != "gigagap-summary-v1":
        raise DataError(f"{path}: not a gap summary file")
    sc = data.get("scenario", {})
    scenario = None
    if "t1_quality" in sc:
        scenario = Scenario(
            t1_quality=Quality(sc["t1_quality"]),
            t2_quality=Quality(sc["t2_quality"]),
            t3_tier=T3Tier(sc["t3_tier"]),
            t4_wireless=T4WirelessScope(sc["t4_wireless"]),
            docsis_upgrade=bool(sc["docsis_upgrade"]),
        )
    regions = {
        rid: RegionSummary(
            region=rid, country=r["country"], population=r["population"],
            households=r["households"], premises_total=r["premises_total"],
            premises_to_cover=r["premises_to_cover"], cohesion=r.get("cohesion"),
        ) for rid, r in data.get("regions", {}).items()
    }
    return GapReport(
        scenario=scenario,
        scenario_name=sc.get("name", "unknown"),
        vintage=int(data["vintage"]),
        cells=[],
        totals=dict(data.get("totals_eur", {})),
        country_totals=dict(data.get("country_totals_eur", {})),
        geotype_totals={},
        regions=regions,
    )
