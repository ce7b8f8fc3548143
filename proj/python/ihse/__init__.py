"""Inelastic hard spheres with emission: dynamics and numerical verification."""

from ._ihse import (
    Configuration,
    IhseError,
    SCHEMA_VERSION,
    analytic_flow_jacobian_det,
    classify_tct_domain,
    collision_time_gradients,
    conserved_quantities,
    emission_velocity_jacobian,
    ensemble_volume_evolution,
    estimate_pathological_measure,
    fd_jacobian,
    first_collision,
    free_transport,
    grazing_discriminant,
    pair_collision_time,
    scatter,
    sigma_direction,
    simulate,
    tct_flow,
    tensor_sum_det,
    validate_configuration,
    verify_flow_jacobian,
    verify_scattering_measure,
)

__all__ = [
    "Configuration",
    "IhseError",
    "SCHEMA_VERSION",
    "analytic_flow_jacobian_det",
    "classify_tct_domain",
    "collision_time_gradients",
    "conserved_quantities",
    "emission_velocity_jacobian",
    "ensemble_volume_evolution",
    "estimate_pathological_measure",
    "fd_jacobian",
    "first_collision",
    "free_transport",
    "grazing_discriminant",
    "pair_collision_time",
    "scatter",
    "sigma_direction",
    "simulate",
    "tct_flow",
    "tensor_sum_det",
    "validate_configuration",
    "verify_flow_jacobian",
    "verify_scattering_measure",
]
