"""Minimax-unfitness attachment: solvers, verifiers and network growth.

Attachment probabilities that minimise the worst expected exposure to node
unfitness (the reciprocal of fitness) turn out to be proportional to
fitness. This package computes them in closed form and by successive
averages, for homogeneous and tiered populations, checks candidate
solutions against the optimality conditions, and grows networks under the
resulting attachment rules.
"""

from .errors import (
    DegenerateWeightsError,
    InvalidFitnessError,
    InvalidInputError,
    InvalidSpecError,
    MinmaxAttachError,
    OracleLimitError,
    ParseError,
)
from .fitness import (
    FITNESS_CAP,
    LognormalSpec,
    NodeRecord,
    lnfa_fitness,
    nodes_from_fitness,
    sample_lognormal,
    standard_normal,
    unfitness,
)
from .growth import (
    DegreeDistribution,
    FrequencyReport,
    GrowthConfig,
    GrownGraph,
    LnfaSource,
    TieredGrowthConfig,
    attachment_weights,
    degree_distribution,
    empirical_attachment_check,
    grow_homogeneous,
    grow_tiered,
)
from .homogeneous import (
    KKTReport,
    MinmaxSolution,
    MsaTrace,
    closed_form_solution,
    msa_a0,
    proportional_attachment,
    verify_kkt,
)
from .io import parse_node_table, write_node_table
from .rng import RandomStream
from .tiered import (
    PathSelection,
    TieredPopulation,
    TieredSolution,
    best_path,
    brute_force_best_path,
    closed_form_tiered,
    msa_a1,
    path_cost,
    sample_tiered,
    verify_kkt_tiered,
)

__version__ = "0.1.0"
