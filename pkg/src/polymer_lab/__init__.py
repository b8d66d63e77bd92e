"""Numerical laboratory for the inverse-gamma directed lattice polymer."""

__version__ = "0.1.0"

from .dp import (
    DownRightPath,
    FreeEnergyTable,
    PathConstraint,
    crossing_argmax,
    log_partition_records,
    log_partition_table,
    profile_increments,
    reverse_table,
)
from .environment import (
    RegionSpec,
    WeightField,
    dump_field,
    forced_field,
    load_field,
    sample_weight_field,
)
from .estimators import (
    CovarianceAccumulator,
    ExperimentPlan,
    MomentAccumulator,
    PowerLawFit,
    TailCounter,
    fit_power_law,
)
from .sampler import PolymerPath, QuenchedSampler, midpoint_displacement, sample_path
from .shape import (
    Direction2,
    ModelShape,
    characteristic_direction,
    diagonal_shape_value,
    inverse_slope,
    polygamma,
    shape_at,
    shape_f,
    slope_map,
)
from .stationary import (
    StationaryEnvironment,
    make_stationary_environment,
    quenched_exit_probability,
    rw_sandwich_check,
    stationary_table,
)
