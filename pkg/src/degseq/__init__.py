"""Degree-sequence laboratory: graphicality, realization, heavy-tailed sampling, Monte Carlo."""

from .core import (
    DegreeSequence,
    Parity,
    SortedDegrees,
    eg_margin,
    erdos_gallai_ok,
    is_graphical,
    sort_desc,
    sum_parity,
)
from .distributions import (
    ExactCOverN,
    Geometric,
    LogDamped,
    PerturbedCOverN,
    PowerLawTail,
    TableTail,
    TailSpec,
    Zeta,
    classify_regime,
    family_from_config,
    g_inverse,
    g_of,
    parity_bias,
    point_mass,
    sample_iid,
    sample_sorted_renyi,
    truncated_moment,
)
from .montecarlo import ExperimentConfig, EstimateSeries, estimate_graphical_prob, wilson_ci
from .realize import SimpleGraph, choudum_realize, exhaustive_oracle, realize, verify_realization

__version__ = "0.1.0"
