"""Broadband coverage handling.

National operator statistics only pin regional coverage to interval
bands. A single scalar k per country and technology turns the bands
into point estimates: each region gets clamp(k * density, band), with
k solved so that the premises-weighted mean over the country matches
the national figure. Region values are then spread over geotypes with
a densest-first waterfall.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from .errors import DataError, InfeasibleCoverageError
from .geo import GEOTYPES_DENSEST_FIRST, GeoFrame, Geotype

log = logging.getLogger(__name__)

# Premises-weighted mean must reproduce the national figure this well.
RECONCILE_TOLERANCE = 1e-4

# Interval bands published with the coverage statistics.
PUBLISHED_BANDS = ((0.0, 0.35), (0.35, 0.65), (0.65, 0.95), (0.95, 1.0), (1.0, 1.0))


class TechClass(Enum):
    """Access technologies tracked in the coverage data.

    FTTH_1G outranks FTTH_100M and DOCSIS_31 outranks DOCSIS_30 in
    delivered speed; the remaining classes are incomparable.
    """

    FTTH_100M = "FTTH_100M"
    FTTH_1G = "FTTH_1G"
    FTTB = "FTTB"
    FTTC_ADV_DSL = "FTTC_ADV_DSL"
    DOCSIS_30 = "DOCSIS_30"
    DOCSIS_31 = "DOCSIS_31"
    LTE = "LTE"
    FIVE_G = "FIVE_G"


class CapabilityTier(Enum):
    """Service levels a demand can ask for."""

    MBPS_100 = "100mbps"
    GBPS_1 = "1gbps"
    FIVE_G = "5g"


# Technologies that satisfy each tier. LTE joins the 100 Mbps tier only
# in the extremely rural geotype.
_TIER_TECHS = {
    CapabilityTier.MBPS_100: frozenset({
        TechClass.FTTH_100M, TechClass.FTTH_1G, TechClass.FTTB,
        TechClass.FTTC_ADV_DSL, TechClass.DOCSIS_30, TechClass.DOCSIS_31,
    }),
    CapabilityTier.GBPS_1: frozenset({TechClass.FTTH_1G, TechClass.DOCSIS_31}),
    CapabilityTier.FIVE_G: frozenset({TechClass.FIVE_G}),
}


@dataclass
class CoverageInterval:
    """Band constraint on one region's coverage for one technology."""

    region: str
    technology: TechClass
    low: float
    high: float
    vintage: int

    def __post_init__(self):
        if not (0.0 <= self.low <= 1.0 and 0.0 <= self.high <= 1.0):
            raise DataError(
                f"coverage interval {self.region}/{self.technology.value}: "
                f"bounds must lie in [0, 1]"
            )
        if self.low > self.high:
            raise DataError(
                f"coverage interval {self.region}/{self.technology.value}: "
                f"low {self.low} exceeds high {self.high}"
            )

    def widened(self, eps: float) -> "CoverageInterval":
        return CoverageInterval(
            region=self.region, technology=self.technology,
            low=max(0.0, self.low - eps), high=min(1.0, self.high + eps),
            vintage=self.vintage,
        )


@dataclass
class NationalFigure:
    """Country-level coverage share for one technology."""

    country: str
    technology: TechClass
    coverage: float
    vintage: int

    def __post_init__(self):
        if not 0.0 <= self.coverage <= 1.0:
            raise DataError(
                f"national coverage {self.country}/{self.technology.value}: "
                f"{self.coverage} outside [0, 1]"
            )


@dataclass
class CoverageState:
    """Point coverage per (region, geotype, technology)."""

    vintage: int
    entries: dict[tuple[str, Geotype, TechClass], float] = field(default_factory=dict)

    def get(self, region: str, geotype: Geotype, tech: TechClass) -> float:
        return self.entries.get((region, geotype, tech), 0.0)

    def footprint_over(self, region: str, geotype: Geotype, techs) -> float:
        """Best coverage over a set of technologies (0 when none present)."""
        return max((self.get(region, geotype, t) for t in techs), default=0.0)


def effective_footprint(state: CoverageState, region: str, geotype: Geotype,
                        tier: CapabilityTier) -> float:
    """Maximum existing coverage over all technologies that satisfy the
    capability tier in the given geotype."""
    if not isinstance(tier, CapabilityTier):
        raise DataError(f"unknown capability tier: {tier!r}")
    techs = set(_TIER_TECHS[tier])
    if tier is CapabilityTier.MBPS_100 and geotype is Geotype.EXTREMELY_RURAL:
        techs.add(TechClass.LTE)
    return state.footprint_over(region, geotype, techs)


def disaggregate_regions(intervals: dict[str, CoverageInterval],
                         national: float,
                         densities: dict[str, float],
                         weights: dict[str, float]) -> dict[str, float]:
    """Turn interval-banded regional coverage into point estimates.

    Parameters
    ----------
    intervals : region id -> CoverageInterval for one (country, technology)
    national : national coverage share to reconcile against
    densities : region id -> population density
    weights : region id -> premises count (weighting of the mean)

    Returns
    -------
    dict region id -> coverage in [0, 1], clamped to its band, with the
    premises-weighted mean matching the national figure.

    Raises
    ------
    InfeasibleCoverageError if no scalar k can reconcile the bands with
    the national figure.
    """
    regions = sorted(intervals)
    total_w = sum(weights[r] for r in regions)
    if total_w <= 0:
        raise DataError("cannot disaggregate coverage: total premises weight is zero")

    def estimate(k: float) -> dict[str, float]:
        out = {}
        for r in regions:
            iv = intervals[r]
            out[r] = min(iv.high, max(iv.low, k * densities[r]))
        return out

    def mean(values: dict[str, float]) -> float:
        return sum(weights[r] * values[r] for r in regions) / total_w

    low_mean = mean(estimate(0.0))
    # All positive-density regions saturate at their band for large k;
    # zero-density regions stay pinned at their lower bound.
    k_hi = 1.0
    max_density = max((densities[r] for r in regions), default=0.0)
    if max_density > 0:
        k_hi = 2.0 / max(min(d for d in densities.values() if d > 0), 1e-12)
    high_mean = mean(estimate(k_hi))
    # push k_hi until the mean stops growing
    while True:
        nxt = mean(estimate(k_hi * 2))
        if nxt <= high_mean + 1e-15:
            break
        k_hi *= 2
        high_mean = nxt

    if not (low_mean - RECONCILE_TOLERANCE <= national <= high_mean + RECONCILE_TOLERANCE):
        raise InfeasibleCoverageError(
            country="?", technology="?", national=national,
            feasible_low=low_mean, feasible_high=high_mean,
        )

    k_lo = 0.0
    for _ in range(200):
        k_mid = 0.5 * (k_lo + k_hi)
        if mean(estimate(k_mid)) < national:
            k_lo = k_mid
        else:
            k_hi = k_mid
    values = estimate(k_hi)
    got = mean(values)
    if abs(got - national) > RECONCILE_TOLERANCE:
        raise InfeasibleCoverageError(
            country="?", technology="?", national=national,
            feasible_low=low_mean, feasible_high=high_mean,
        )
    return values


def spread_over_geotypes(region_coverage: float,
                         premises_share: dict[Geotype, float]) -> dict[Geotype, float]:
    """Spread a region-level coverage share over geotypes, filling the
    densest geotype first (market deployments saturate cities before
    moving outward).

    The premises-weighted mean of the per-geotype values reproduces the
    region figure.
    """
    if not 0.0 <= region_coverage <= 1.0 + 1e-12:
        raise DataError(f"region coverage {region_coverage} outside [0, 1]")
    region_coverage = min(region_coverage, 1.0)
    out = {}
    cum = 0.0
    for g in GEOTYPES_DENSEST_FIRST:
        share = premises_share.get(g, 0.0)
        if share > 0:
            out[g] = min(1.0, max(0.0, (region_coverage - cum) / share))
        else:
            # empty geotype: inside the filled prefix counts as covered
            out[g] = 1.0 if region_coverage > 0 and region_coverage >= cum - 1e-12 else 0.0
        cum += share
    return out


def build_state(dataset, frame: GeoFrame, relax_intervals: float = 0.0) -> CoverageState:
    """Disaggregate every (country, technology) present in the dataset
    and spread the results over geotypes.

    Technologies absent from the input carry zero coverage; in the 2019
    baseline data that is the norm for 5G.
    """
    state = CoverageState(vintage=dataset.vintage)

    by_pair: dict[tuple[str, TechClass], dict[str, CoverageInterval]] = {}
    for iv in dataset.coverage_intervals:
        country = frame.regions[iv.region].country
        pair = by_pair.setdefault((country, iv.technology), {})
        pair[iv.region] = iv.widened(relax_intervals) if relax_intervals > 0 else iv

    national = {(nf.country, nf.technology): nf for nf in dataset.coverage_national}

    for (country, tech) in sorted(by_pair, key=lambda p: (p[0], p[1].value)):
        intervals = by_pair[(country, tech)]
        member_regions = frame.country_regions(country)
        missing = [r for r in member_regions if r not in intervals]
        if missing:
            raise DataError(
                f"coverage intervals for {country}/{tech.value} missing regions: "
                + ", ".join(missing)
            )
        figure = national.get((country, tech))
        if figure is None:
            raise DataError(f"no national coverage figure for {country}/{tech.value}")
        densities = {r: frame.regions[r].density for r in intervals}
        weights = {r: frame.region_premises(r) for r in intervals}
        try:
            points = disaggregate_regions(intervals, figure.coverage, densities, weights)
        except InfeasibleCoverageError as err:
            raise InfeasibleCoverageError(
                country=country, technology=tech.value, national=figure.coverage,
                feasible_low=err.feasible_low, feasible_high=err.feasible_high,
            ) from None
        for region_id in sorted(points):
            share = frame.profiles[region_id].premises_share
            for g, value in spread_over_geotypes(points[region_id], share).items():
                state.entries[(region_id, g, tech)] = value
    return state
