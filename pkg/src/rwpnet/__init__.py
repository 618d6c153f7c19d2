"""Connectivity and throughput of random-waypoint ad hoc networks.

Stationary node distributions of the random waypoint model, the Laplace
transform of SINR interference, link connection probabilities, the spatial
density of successful transmissions and Monte-Carlo counterparts of all of
them.
"""

from .channel import (ChannelParams, LaplaceCache, NetworkConfig, connection_probability, interference_exponent,
                      laplace_disk_center_closed, laplace_interference_numeric, path_loss, unit_disk_probability)
from .errors import ConvergenceError, DomainError, GeometryError, SingularityError, UnsupportedError
from .geometry import Disk, Point2, Rectangle, boundary_distance, chord_split, contains, disk_domain_overlap
from .montecarlo import (SnapshotEstimate, empirical_connection_probability, empirical_mu,
                         empirical_pause_probability, position_at, sample_stationary, simulate_trajectory)
from .numerics import QuadratureSpec, hyp2f1, integrate_1d, integrate_2d
from .rwpm import (MobilityParams, StationaryDistribution, leg_statistics, mean_leg_length_numeric,
                   pdf_mobile_disk_approx, pdf_mobile_disk_exact, pdf_mobile_rect_approx, pdf_mobile_rect_exact,
                   stationary_pdf)
from .throughput import mu_numeric, mu_unit_disk_numeric, mu_vs_density_profile

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "ConvergenceError", "Disk", "DomainError", "GeometryError", "LaplaceCache",
    "MobilityParams", "NetworkConfig", "Point2", "QuadratureSpec", "Rectangle", "SingularityError",
    "SnapshotEstimate", "StationaryDistribution", "UnsupportedError", "boundary_distance", "chord_split",
    "connection_probability", "contains", "disk_domain_overlap", "empirical_connection_probability",
    "empirical_mu", "empirical_pause_probability", "hyp2f1", "integrate_1d", "integrate_2d",
    "interference_exponent", "laplace_disk_center_closed", "laplace_interference_numeric", "leg_statistics",
    "mean_leg_length_numeric", "mu_numeric", "mu_unit_disk_numeric", "mu_vs_density_profile", "path_loss",
    "pdf_mobile_disk_approx", "pdf_mobile_disk_exact", "pdf_mobile_rect_approx", "pdf_mobile_rect_exact",
    "position_at", "sample_stationary", "simulate_trajectory", "stationary_pdf", "unit_disk_probability",
]
