"""Spin squeezing of the transverse-field XY chain from exact free-fermion correlators."""

from .model import (
    ModelParams,
    MomentumGrid,
    ModeData,
    OccupationProfile,
    build_grid,
    grid_modes,
    mode_data,
    mode_density_matrix,
    occupation_profile_eigenstate,
    occupation_profile_thermal,
    state_energy,
)
from .correlators import (
    ContractionKernel,
    CorrelatorTable,
    contraction_kernel,
    corr_xx,
    corr_xy_check,
    corr_yx_check,
    corr_yy,
    correlator_table,
    pfaffian,
)
from .squeezing import (
    CoherentTemperatureResult,
    Regime,
    SqueezingValue,
    ThermalFactorizedFit,
    find_coherent_temperatures,
    fit_factorized_field,
    ground_states,
    ssp_eigenstate,
    ssp_from_table,
    ssp_thermal,
    thermal_factorized_curve,
    thermal_table,
)

__version__ = "0.1.0"
