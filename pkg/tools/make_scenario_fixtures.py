"""Regenerate the bundled synthetic scenario rasters.

64x64 grid, 50 m cells: a river strip, a road cross, a developed block,
and open/treed zones.  Land-use codes: 1 open, 2 treed, 3 developed,
4 water, 5 road.
"""

from pathlib import Path

import numpy as np

from lusa.linguistic import resource_path
from lusa.raster import Raster, write_raster


def main() -> None:
    n = 64
    landuse = np.ones((n, n))
    landuse[:, 40:] = 2            # treed east
    landuse[44:57, 44:57] = 3      # developed block
    landuse[32, :] = 5             # east-west road
    landuse[:, 32] = 5             # north-south road
    landuse[:, 8:11] = 4           # river strip (cuts the road: a ford)

    out_dir = Path(resource_path("scenario"))
    out_dir.mkdir(parents=True, exist_ok=True)

    def save(name: str, cells: np.ndarray) -> None:
        write_raster(Raster(cells, cellsize=50.0), out_dir / name)

    save("landuse.asc", landuse)
    save("water.asc", (landuse == 4).astype(float))
    save("roads.asc", (landuse == 5).astype(float))
    save("developed.asc", (landuse == 3).astype(float))
    print(f"wrote rasters to {out_dir}")


if __name__ == "__main__":
    main()
