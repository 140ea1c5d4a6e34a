"""Numerical laboratory for the Novikov-Veselov equation.

Pieces: a periodic pseudo-spectral grid with the auxiliary dbar-system solve
(grid), a semi-implicit theta-scheme time stepper (evolver), the planar
KdV reduction (planar), the transverse-instability analysis (instability),
end-to-end experiment drivers (experiments), and a command-line harness (cli).
"""

from .errors import (
    ComplexRootError,
    ConfigurationError,
    DegenerateDirectionError,
    DegenerateShapeError,
    DivergenceError,
    NVLabError,
    OffCurveError,
    ResonanceError,
    TraceLostError,
)
from .evolver import (
    Diagnostics,
    NVState,
    SchemeParams,
    amplification_eigenvalues,
    default_dt,
    diagnostics,
    evolve,
    max_stable_dt,
    nonlinear_term,
    scheme_stable,
    step,
)
from .grid import (
    RealField,
    SpectralField,
    TorusGrid,
    forward,
    inverse,
    is_hermitian,
    l2_norm,
    linear_symbol,
    make_grid,
    read_snapshot,
    solve_auxiliary,
    write_snapshot,
)
from .instability import (
    AsymptoticRoots,
    ComovingScaling,
    CurvePoint,
    PerturbationParams,
    PerturbationShape,
    TraceResult,
    asymptotic_matrices,
    characteristic_roots,
    comoving_transform,
    det_mismatch,
    det_mismatch_k0,
    find_zero_gamma,
    flow_map,
    growth_rate_fit,
    linearized_rhs,
    perturbation_shape,
    perturbed_initial_state,
    trace_instability_curve,
    unstable_band,
)
from .experiments import (
    FidelityResult,
    GrowthResult,
    best_fit_shift,
    peak_position,
    pearson_correlation,
    run_growth_experiment,
    run_soliton_fidelity,
    soliton_deviation,
    torus_soliton_speed,
    transverse_profile,
)
from .planar import (
    PlanarParams,
    PlanarSolution,
    kappa,
    kdv_soliton,
    planar_from_kdv,
    planar_speed,
    speed_profile,
    standard_kdv_soliton,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
