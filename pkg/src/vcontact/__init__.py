"""Contact forms on the circle bundle over a genus-2 hyperbolic surface:
twist construction, positivity certification, disk foliations, periodic
orbits, and magnetic-flow utilities on the universal cover."""

from .hyperbolic import (
    DiskPoint,
    FuchsianGroup,
    Isometry,
    enumerate_words,
    genus2_generators,
    hyperbolic_distance,
    validate_separation,
)
from .forms import (
    ContactFrame,
    CoverPoint,
    Jet,
    MetricField,
    OneFormField,
    TwoFormValue,
    average_form,
    compatible_acs,
    contact_volume,
    cr_residual,
    cylinder_acs,
    cylinder_metric,
    energy_density,
    energy_integrand,
    hofer_select,
    kernel_field,
    product_metric,
    project_xi,
    pullback_form,
    radial_one_form,
    reeb_vector,
)
from .lutz import (
    LutzData,
    Profile,
    ReebLikeField,
    base_alpha,
    bound_L,
    build_profiles,
    default_lutz_data,
    lutz_form,
    lutz_reeb_like,
    smooth_profiles,
)
from .verifier import (
    FoliationReport,
    OTDisk,
    VerificationReport,
    VerifyGrid,
    VirtualContactStructure,
    characteristic_foliation,
    classify_singularity,
    orbit_infimum,
    region_bounds,
    twisted_structure,
    untwisted_structure,
    verify_virtual_contact,
)
from .dynamics import (
    OrbitRecord,
    Section,
    Trajectory,
    find_periodic_orbit,
    homotopy_data,
    integrate_flow,
    phi_section,
    t_section,
)
from .magnetic import (
    MagneticSystem,
    closure_time,
    dual_norm,
    magnetic_flow,
    mane_upper_bound,
    theta_zero,
)

__version__ = "0.1.0"
