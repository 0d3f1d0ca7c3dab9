"""Matrix geometric means, Riccati solvers and their block-encoded pipelines."""
from .errors import GeomeanError
from .linalg_core import (HermitianMatrix, PDMatrix, geodesic_point, geometric_mean,
                          geodesic_distance, weighted_geometric_mean)
from .riccati import solve_pth_order, solve_riccati_general, solve_yayc
from .polyapprox import approx_negative_power, approx_positive_power
from .blockenc import BlockEncoding
from .geomean_pipeline import (be_inverse_geomean, be_riccati_general, be_weighted_geomean,
                               be_weighted_inverse)

__version__ = "0.1.0"

__all__ = [
    "GeomeanError", "HermitianMatrix", "PDMatrix", "geodesic_point", "geometric_mean",
    "geodesic_distance", "weighted_geometric_mean", "solve_pth_order", "solve_riccati_general",
    "solve_yayc", "approx_negative_power", "approx_positive_power", "BlockEncoding",
    "be_inverse_geomean", "be_riccati_general", "be_weighted_geomean", "be_weighted_inverse",
]
