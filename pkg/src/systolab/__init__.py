"""systolab: a numerical laboratory for systolic ratios.

Flat-torus and Klein-bottle moduli, conformal Loewner-bound certification,
Zoll surfaces of revolution, linear symplectic capacities and shadows,
circle-invariant contact forms over the sphere, and convex-body duality.
"""

from .flat_moduli import (
    KLEIN_RATIO_CEILING,
    TORUS_RATIO_MAX,
    DegenerateLatticeError,
    KleinParams,
    Lattice2,
    TorusModulus,
    klein_systole,
    klein_systolic_ratio,
    reduce_to_gamma,
    shortest_vector,
    torus_systolic_ratio,
)
from .conformal import (
    ConformalTorusMetric,
    LoewnerReport,
    area,
    horizontal_lengths,
    loewner_chain_check,
)
from .revolution import (
    GeodesicState,
    RevolutionMetric,
    closure_test,
    integrate_geodesic,
    meridian_length,
    surface_area,
    weak_systolic_ratio_estimate,
    zoll_closure_battery,
)
from .symplectic import (
    EllipsoidSpec,
    RadialHypersurfaceS3,
    SymplecticSpace,
    capacity_ellipsoid,
    contact_volume_radial_s3,
    hopf_flow,
    is_symplectic,
    oscillator_normal_form,
    shadow_area_linear,
    standard_j,
    viterbo_ratio_ellipsoid,
    volume_ellipsoid,
)
from .boothby_wang import (
    BWBundle,
    DensityOnBase,
    bw_contact_volume,
    bw_systolic_ratio,
    min_of_density,
    tmin_upper_bound,
)
from .convex import (
    EllipsoidBody,
    PolytopeV,
    coarse_viterbo_bound,
    mahler_volume,
    mvee,
    polar,
    santalo_mahler_check,
    volume,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
