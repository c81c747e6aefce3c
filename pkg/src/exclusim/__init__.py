"""exclusim: symmetric exclusion processes on weighted graphs.

Event-driven simulation via the Harris graphical construction, exact
one-particle semigroup computations, a heat-equation reference solver, and
experiments certifying the reduction of the hydrodynamic limit to a
one-particle homogenization problem.
"""

from .conductance import ConductanceField, arithmetic_mean, assign, harmonic_mean
from .config import ExperimentConfig, ProfileSpec, parse_config, parse_config_file
from .errors import (
    ConfigError,
    ExclusimError,
    HorizonError,
    InvalidGraphError,
    InvalidProfileError,
    NumericalError,
    ResolutionError,
    TooLargeError,
    UnsupportedTopologyError,
)
from .experiments import (
    ExperimentReport,
    Record,
    duality_experiment,
    hom_discrepancy,
    homogenization_experiment,
    hydro_experiment,
    initial_pairing_check,
    z_statistic,
)
from .graphs import (
    GraphInstance,
    TestFunction,
    build_torus_1d,
    build_torus_2d,
    empirical_integral,
    vague_discrepancy,
)
from .harris import (
    ComponentStatistics,
    EventLog,
    component_statistics,
    evolve_exclusion,
    evolve_walker,
    sample_clocks,
    sample_product_measure,
)
from .kernel import (
    TransitionKernel,
    apply_generator,
    dirichlet_form,
    duhamel_residual,
    semigroup_apply,
    transition_matrix,
)
from .pde import (
    DensityProfile,
    cosine_decay_closed_form,
    effective_diffusivity_1d,
    heat_solve,
    limit_semigroup_on_vertices,
)

__version__ = "0.1.0"
