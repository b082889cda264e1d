"""Closed-form moments, multi-time correlators and reference solvers for quadratic fermionic jump channels."""

__version__ = "0.1.0"

from .car import (
    FermionRep,
    QuadraticGenerator,
    build_rep,
    exchange_matrix,
    quadratic_form,
    random_generator,
    tilde,
    validate_generator,
)
from .channels import (
    ChannelSet,
    JumpChannel,
    conjugation_check,
    jump_unitary,
    moment_generator,
    one_particle_matrix,
    partial_generator,
)
from .moments import MomentTensor, initial_moments, multitime_correlations, propagate_moments
from .oracle import (
    adjoint_apply,
    evolve_density,
    liouvillian,
    oracle_moments,
    oracle_multitime,
)
from .states import DensityState
from .trajectories import TrajectoryConfig, estimate_evolution, sample_trajectory
