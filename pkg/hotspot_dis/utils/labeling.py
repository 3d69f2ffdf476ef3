#!/usr/bin/env python

# labeling.py - Extinction date estimation and hotspot / burned area cross-referencing

import datetime
from dataclasses import dataclass, field, replace
from typing import Dict

import numpy as np

from hotspot_dis.core.geo import TimeInterval, build_st_index
from hotspot_dis.core.records import day_start, end_of_day
from hotspot_dis.utils.constants import SECONDS_PER_DAY, EXTINCTION_MIN_COUNT, \
    EXTINCTION_SEARCH_DAYS


@dataclass
class LabelReport:
    """Outcome of a labeling pass.

    ``labels`` maps hotspot id to 1 (wildfire) / 0; ``matched`` maps burned
    area id to the number of hotspots it labeled positive.
    """
    labels: Dict[int, int] = field(default_factory=dict)
    estimated_end: Dict[str, datetime.date] = field(default_factory=dict)
    matched: Dict[str, int] = field(default_factory=dict)

    @property
    def positives(self):
        return int(sum(self.labels.values()))

    @property
    def negatives(self):
        return len(self.labels) - self.positives

    @property
    def positive_fraction(self):
        return self.positives / len(self.labels) if self.labels else 0.0

    def summary(self):
        """JSON-serialisable summary."""
        return {'total': len(self.labels),
                'positives': self.positives,
                'negatives': self.negatives,
                'positive_fraction': self.positive_fraction,
                'estimated_end': {k: v.isoformat() for k, v in sorted(self.estimated_end.items())},
                'matched': dict(sorted(self.matched.items()))}


def _area_positions(area, idx, interval):
    """Index positions inside any polygon part of an area during `interval`."""
    found = [idx.polygon_positions(poly, interval) for poly in area.geometry]
    return np.unique(np.concatenate(found)) if found else np.empty(0, dtype=np.intp)


def daily_counts(area, idx, n_days):
    """In-polygon hotspot counts for the `n_days` UTC days from the reported start day."""
    t0 = day_start(area.start_date)
    interval = TimeInterval(t0, float(np.nextafter(t0 + n_days * SECONDS_PER_DAY, -np.inf)))
    pos = _area_positions(area, idx, interval)
    days = np.floor((idx.times[pos] - t0) / SECONDS_PER_DAY).astype(int)
    return np.bincount(days, minlength=n_days)[:n_days]


def first_quiet_day(counts, min_count=EXTINCTION_MIN_COUNT):
    """Offset of the first day with fewer than `min_count` hotspots, or None."""
    quiet = np.flatnonzero(np.asarray(counts) < min_count)
    return int(quiet[0]) if quiet.size else None


def estimate_extinction_date(area, idx, min_count=EXTINCTION_MIN_COUNT,
                             search_days=EXTINCTION_SEARCH_DAYS):
    """
    Estimate the day a fire went out.

    UTC days are scanned from the reported start date; the first day with
    fewer than `min_count` hotspots inside the area (all sensors pooled) is
    returned. Without such a day up to `search_days` after the reported end,
    the reported end date is returned.

    Parameters
    ----------
    area : BurnedAreaRecord
    idx : STIndex over all hotspots of the campaign
    min_count : int
    search_days : int

    Returns
    -------
    datetime.date
    """
    start = area.start_date
    last = area.end_date + datetime.timedelta(days=search_days)
    n_days = (last - start).days + 1
    offset = first_quiet_day(daily_counts(area, idx, n_days), min_count)
    if offset is None:
        return area.end_date
    return start + datetime.timedelta(days=offset)


def label_hotspots(hotspots, areas, idx):
    """
    Cross-reference hotspots with burned areas.

    A hotspot is positive iff it lies inside an area (boundary inclusive)
    with a timestamp between the reported start and the end of the
    estimated extinction day.

    Parameters
    ----------
    hotspots : sequence of HotspotRecord
    areas : sequence of BurnedAreaRecord, with estimated_end set
    idx : STIndex over the hotspots

    Returns
    -------
    LabelReport
    """
    missing = [a.id for a in areas if a.estimated_end is None]
    if missing:
        raise ValueError(f'Estimate extinction dates first; missing for areas {missing[:5]}.')

    positive = np.zeros(len(idx), dtype=bool)
    report = LabelReport()
    for area in areas:
        pos = _area_positions(area, idx, area.active_window())
        positive[pos] = True
        report.matched[area.id] = report.matched.get(area.id, 0) + int(pos.size)
        report.estimated_end[area.id] = area.estimated_end

    by_id = dict(zip(idx.ids.tolist(), positive.tolist()))
    report.labels = {h.id: int(by_id[h.id]) for h in hotspots}
    return report


def label_campaign(hotspots, areas, verbose=False):
    """
    Estimate every extinction date then label the hotspots.

    Returns
    -------
    list of BurnedAreaRecord (with estimated_end), LabelReport
    """
    idx = build_st_index(hotspots)
    dated = []
    for area in areas:
        dated.append(area.with_estimated_end(estimate_extinction_date(area, idx)))
    report = label_hotspots(hotspots, dated, idx)
    if verbose:
        print(f'Labeled {len(report.labels)} hotspots against {len(dated)} burned areas: '
              f'{report.positives} positive ({100 * report.positive_fraction:.2f}%).')
    return dated, report


def apply_labels(hotspots, report):
    """Copies of the hotspots carrying the report's labels."""
    return [replace(h, label=report.labels[h.id]) for h in hotspots]
