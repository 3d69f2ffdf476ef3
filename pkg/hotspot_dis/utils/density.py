#!/usr/bin/env python

# density.py - Hotspot density grids with log-scaled grayscale export

from dataclasses import dataclass

import numpy as np
import pandas as pd
from PIL import Image

CELL_COLUMNS = ['lat_idx', 'lon_idx', 'count']
# Longest side of the exported image; wider extents are binned into blocks of cells
MAX_IMAGE_SIDE = 4096


@dataclass
class DensityGrid:
    """
    Hotspot counts of the non-empty cells of a lat/lon grid.

    Cell indices are absolute: lat_idx = floor(lat / cell_deg) and likewise
    for lon. Only occupied cells are stored.
    """
    table: pd.DataFrame
    cell_deg: float

    @property
    def total(self):
        return int(self.table['count'].sum())

    @property
    def shape(self):
        """Extent in cells (rows, columns) of the bounding box of the occupied cells."""
        if self.table.empty:
            return (0, 0)
        return (int(self.table['lat_idx'].max() - self.table['lat_idx'].min()) + 1,
                int(self.table['lon_idx'].max() - self.table['lon_idx'].min()) + 1)

    def cells(self):
        """Non-empty cells as a DataFrame (lat_idx, lon_idx, count)."""
        return self.table.copy()

    def raster(self, max_side=MAX_IMAGE_SIDE):
        """
        Dense counts over the bounding box, south row first.

        When the box is longer than `max_side` cells, blocks of factor x factor
        cells are summed so that no side exceeds `max_side`.

        Returns
        -------
        counts : int array
        factor : int
        """
        if self.table.empty:
            return np.zeros((0, 0), dtype=int), 1
        factor = max(1, int(np.ceil(max(self.shape) / max_side)))
        i = (self.table['lat_idx'].to_numpy() - self.table['lat_idx'].min()) // factor
        j = (self.table['lon_idx'].to_numpy() - self.table['lon_idx'].min()) // factor
        counts = np.zeros((int(i.max()) + 1, int(j.max()) + 1), dtype=int)
        np.add.at(counts, (i, j), self.table['count'].to_numpy())
        return counts, factor

    def intensity(self, max_side=MAX_IMAGE_SIDE):
        """8-bit image, north up: round(255 * log1p(count) / log1p(max count))."""
        counts, _ = self.raster(max_side)
        if counts.size == 0 or counts.max() == 0:
            return np.zeros((1, 1), dtype=np.uint8)
        scaled = 255.0 * np.log1p(counts) / np.log1p(counts.max())
        return np.flipud(np.rint(scaled)).astype(np.uint8)

    def write_csv(self, filename):
        self.table.to_csv(filename, index=False)

    def write_png(self, filename):
        Image.fromarray(self.intensity()).save(filename)


def density_grid(hotspots, cell_deg=1.0, positives_only=False):
    """
    Count hotspots per cell of a regular lat/lon grid.

    Parameters
    ----------
    hotspots : sequence of HotspotRecord
    cell_deg : float, cell size in degrees
    positives_only : bool
        Count only hotspots labeled 1.

    Returns
    -------
    DensityGrid
    """
    if not cell_deg > 0:
        raise ValueError(f'Cell size must be positive, got {cell_deg}.')
    if positives_only:
        hotspots = [h for h in hotspots if h.label == 1]
    if not hotspots:
        return DensityGrid(pd.DataFrame({c: np.zeros(0, dtype=np.int64) for c in CELL_COLUMNS}),
                           cell_deg)
    lat = np.array([h.point.lat for h in hotspots], dtype=float)
    lon = np.array([h.point.lon for h in hotspots], dtype=float)
    df = pd.DataFrame({'lat_idx': np.floor(lat / cell_deg).astype(np.int64),
                       'lon_idx': np.floor(lon / cell_deg).astype(np.int64)})
    table = df.groupby(['lat_idx', 'lon_idx'], sort=True).size().reset_index(name='count')
    return DensityGrid(table[CELL_COLUMNS], cell_deg)
