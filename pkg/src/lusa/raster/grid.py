"""Single-band float raster with ESRI ASCII grid and PGM serialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np


class RasterParseError(Exception):
    pass


class ConfigError(Exception):
    pass


@dataclass
class Raster:
    """Row-major float grid; row 0 is the top (northernmost) row."""
    cells: np.ndarray
    cellsize: float = 1.0
    xllcorner: float = 0.0
    yllcorner: float = 0.0
    nodata: float = -9999.0

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.float64)
        if self.cells.ndim != 2 or self.cells.size == 0:
            raise ConfigError("raster cells must be a non-empty 2-D grid")
        if self.cellsize <= 0:
            raise ConfigError("cellsize must be positive")

    @property
    def nrows(self) -> int:
        return self.cells.shape[0]

    @property
    def ncols(self) -> int:
        return self.cells.shape[1]

    def nodata_mask(self) -> np.ndarray:
        return self.cells == self.nodata

    def like(self, cells: np.ndarray) -> "Raster":
        """New raster with the same georeference but different cells."""
        return Raster(cells, self.cellsize, self.xllcorner, self.yllcorner,
                      self.nodata)

    def same_shape(self, other: "Raster") -> bool:
        return (self.cells.shape == other.cells.shape
                and self.cellsize == other.cellsize
                and self.xllcorner == other.xllcorner
                and self.yllcorner == other.yllcorner)

    def stats(self) -> dict:
        valid = self.cells[~self.nodata_mask()]
        if valid.size == 0:
            return {"min": None, "max": None, "mean": None}
        return {"min": float(valid.min()), "max": float(valid.max()),
                "mean": float(valid.mean())}


def _format_cell(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def write_ascii_grid(r: Raster) -> str:
    header = (
        f"ncols {r.ncols}\n"
        f"nrows {r.nrows}\n"
        f"xllcorner {_format_cell(r.xllcorner)}\n"
        f"yllcorner {_format_cell(r.yllcorner)}\n"
        f"cellsize {_format_cell(r.cellsize)}\n"
        f"NODATA_value {_format_cell(r.nodata)}\n"
    )
    rows = "\n".join(" ".join(_format_cell(v) for v in row) for row in r.cells)
    return header + rows + "\n"


def read_ascii_grid(data: str) -> Raster:
    lines = [ln for ln in data.splitlines() if ln.strip()]
    if len(lines) < 6:
        raise RasterParseError("truncated ASCII grid header")
    header = {}
    for ln in lines[:6]:
        parts = ln.split()
        if len(parts) != 2:
            raise RasterParseError(f"malformed header line: {ln!r}")
        header[parts[0].lower()] = parts[1]
    try:
        ncols = int(header["ncols"])
        nrows = int(header["nrows"])
        xll = float(header["xllcorner"])
        yll = float(header["yllcorner"])
        cellsize = float(header["cellsize"])
        nodata = float(header["nodata_value"])
    except (KeyError, ValueError) as exc:
        raise RasterParseError(f"malformed header: {exc}") from exc
    values = " ".join(lines[6:]).split()
    if len(values) != ncols * nrows:
        raise RasterParseError(
            f"expected {ncols * nrows} cells, found {len(values)}")
    cells = np.array([float(v) for v in values], dtype=np.float64)
    return Raster(cells.reshape(nrows, ncols), cellsize, xll, yll, nodata)


def write_pgm(r: Raster) -> str:
    """8-bit grayscale (P2); values are rounded then clamped to [0, 255]."""
    pixels = np.clip(np.rint(np.where(r.nodata_mask(), 0.0, r.cells)),
                     0, 255).astype(int)
    lines = [f"P2", f"{r.ncols} {r.nrows}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in pixels)
    return "\n".join(lines) + "\n"


def write_raster(r: Raster, path: Union[str, Path], format: str = "ascii_grid") -> None:
    path = Path(path)
    if format == "ascii_grid":
        path.write_text(write_ascii_grid(r), encoding="ascii")
    elif format == "pgm":
        path.write_text(write_pgm(r), encoding="ascii")
    else:
        raise ValueError(f"unknown raster format {format!r}")


def read_raster(path: Union[str, Path]) -> Raster:
    return read_ascii_grid(Path(path).read_text(encoding="ascii"))


def rasters_equal(a: Raster, b: Raster) -> bool:
    return a.same_shape(b) and a.nodata == b.nodata \
        and np.array_equal(a.cells, b.cells)
