"""Random growth graphs with a prescribed degree distribution.

Invert a target distribution P into an attachment function f and a
node-event probability p, then grow a multigraph whose degree distribution
converges to P.
"""
from .distributions import (
    DegreeDistribution,
    RawHistogram,
    build,
    build_broken_power_law,
    build_exact_power_law,
    build_generalized_chung_lu,
    build_geometric,
    build_poisson,
    load_empirical,
    mean_degree,
    with_boosts,
)
from .inversion import (
    AttachmentFunction,
    ConditionReport,
    ModelRate,
    check_conditions,
    closed_form_f,
    forward,
    invert,
    node_probability,
    predicted_distribution,
)
from .simulator import GrowthGraph, GrowthSimulator, SimulationConfig, run

__version__ = "0.1.0"
