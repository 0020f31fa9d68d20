"""Hierarchical (ultrametric) diffusion on networks.

A graph's vertices are embedded as addresses of disjoint balls in a
p-adic hierarchy; the graph Laplacian becomes the coarsest member of a
family of diffusion generators that can be refined to any level.  The
package constructs those operators, computes their exact spectra,
checks diffusion-driven instability criteria, and simulates the
resulting nonlinear pattern formation.
"""

from .kinetics import KineticsModel, brusselator, cima, parse_kinetics, steady_state
from .network import (
    Graph,
    LevelGrid,
    NetworkEmbedding,
    complete_graph,
    cycle_graph,
    embed,
    load_graph,
    path_graph,
    refine,
)
from .operators import (
    OperatorMatrix,
    ScaledParams,
    build_full_level,
    build_graph_laplacian,
    build_replica_block,
    build_replica_full,
    build_scaled_lambda,
    kernel_eval,
    project,
    semigroup_exp,
)
from .padic import PAdicCode, PhaseFraction, digit_weight
from .simulate import (
    Perturbation,
    SimConfig,
    convergence_study,
    initial_condition,
    integrate,
    pattern_report,
    picard_verify,
    replica_compare,
)
from .spectra import (
    SpectrumReport,
    WaveletVector,
    eig_symmetric,
    kozyrev_wavelet,
    spectrum_infinity,
    spectrum_level_predicted,
    wavelet_family,
)
from .turing import (
    TuringReport,
    critical_diffusion,
    dispersion,
    h_kappa,
    instability_band,
    linear_stability,
    turing_check,
)

__version__ = "0.1.0"
