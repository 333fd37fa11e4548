"""Null-measurement-conditioned decay and quantum trajectories in structured environments.

The package models a two-level emitter coupled to a finite-bandwidth
reservoir and observed by frequent photon detection:

* :mod:`zenoscope.spectral` -- spectral-density models and memory kernels,
* :mod:`zenoscope.volterra` -- the decay-amplitude Volterra solver and
  null-result conditioning,
* :mod:`zenoscope.rates` -- effective decay rates and their scaling laws,
* :mod:`zenoscope.trajectories` -- seeded Monte-Carlo photon-counting
  trajectories,
* :mod:`zenoscope.lindblad` -- the ensemble-level master-equation reference,
* :mod:`zenoscope.verify` -- quantitative figure-reproduction checks,
* :mod:`zenoscope.cli` -- the ``zenoscope`` command-line front end.
"""

from .lindblad import DensityMatrix2, lindblad_rhs, solve_master, write_master_csv
from .rates import (
    RateCurve,
    RateSource,
    gamma_closed_form,
    gamma_double_lorentzian,
    gamma_eff,
    gamma_gaussian,
    gamma_lorentzian,
    gamma_numeric,
    gamma_rectangular,
    kk_rate,
    rate_curve,
)
from .spectral import (
    KernelMode,
    MemoryKernel,
    Shape,
    SpectralDensity,
    kernel_value,
    load_tabulated_profile,
    scaled_kernel_g,
    sdf_value,
)
from .trajectories import (
    AtomState,
    DriveConfig,
    EnsembleResult,
    TrajectoryRecord,
    a_bar_from_memory,
    child_seed,
    ensemble_average,
    make_drive_config,
    make_rng,
    mc_step,
    run_ensemble,
    simulate_trajectory,
    unitary_drive,
)
from .volterra import (
    DecaySeries,
    analytic_lorentzian_a,
    conditioned_state,
    default_time_step,
    null_conditioned_power,
    null_result_survival,
    solve_decay,
)

__version__ = "0.1.0"
