"""regulab: regularity, quasirandomness, and decomposition for weighted graphs.

A weighted graph carries positive vertex weights mu and positive pair
weights rho supported on its edges.  The library checks quasirandomness
of whole graphs, regularity of set pairs, decomposes pair indicator
functions into structured + pseudorandom + small parts, and builds the
regular partitions those decompositions induce, with reference models
and a JSON command line on top.
"""

from .core import (
    FLOAT_TOL,
    EdgeFunction,
    HeavyVertexWarning,
    InputError,
    NormalizationScales,
    SubgraphPair,
    WeightedGraph,
    global_density,
    index_array,
    inner_product,
    is_normalized,
    mu_sum,
    norm,
    normalize,
    rho_sum,
    weighted_density,
)
from .decomposition import (
    BasicFunction,
    ProjectionResult,
    StructuredDecomposition,
    basic_inner,
    best_basic_exhaustive,
    best_basic_search,
    correlation,
    project_structured,
    strong_decompose,
)
from .io import (
    dump_report,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    load_pair,
    load_partition,
    pair_from_dict,
    pair_to_dict,
    partition_from_dict,
    partition_to_dict,
    save_graph,
)
from .models import (
    ConcentrationReport,
    Counterexample,
    ProbMatrixSpec,
    check_volume_pair,
    chernoff_K,
    concentration_test,
    gen_gnpij,
    make_counterexample,
    make_star,
    volume_density,
    volume_weights,
)
from .partition import (
    BuildReport,
    ChunkOversizeWarning,
    PairClassification,
    SplitResult,
    atoms_from_structure,
    build_regular_partition,
    classify_pairs,
    default_max_atoms,
    split_atoms,
)
from .quasirandom import (
    QuasirandomVerdict,
    ScaleWarning,
    check_quasirandom,
    check_quasirandom_exhaustive,
    check_quasirandom_search,
)
from .regularity import (
    PairRegularityVerdict,
    PartitionCheckReport,
    check_pair,
    check_pair_exhaustive,
    check_pair_search,
    check_partition,
    classical_epsilon_regular,
    relative_regularity,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FLOAT_TOL",
    "EdgeFunction",
    "HeavyVertexWarning",
    "InputError",
    "NormalizationScales",
    "SubgraphPair",
    "WeightedGraph",
    "global_density",
    "index_array",
    "inner_product",
    "is_normalized",
    "mu_sum",
    "norm",
    "normalize",
    "rho_sum",
    "weighted_density",
    "BasicFunction",
    "ProjectionResult",
    "StructuredDecomposition",
    "basic_inner",
    "best_basic_exhaustive",
    "best_basic_search",
    "correlation",
    "project_structured",
    "strong_decompose",
    "dump_report",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "load_pair",
    "load_partition",
    "pair_from_dict",
    "pair_to_dict",
    "partition_from_dict",
    "partition_to_dict",
    "save_graph",
    "ConcentrationReport",
    "Counterexample",
    "ProbMatrixSpec",
    "check_volume_pair",
    "chernoff_K",
    "concentration_test",
    "gen_gnpij",
    "make_counterexample",
    "make_star",
    "volume_density",
    "volume_weights",
    "BuildReport",
    "ChunkOversizeWarning",
    "PairClassification",
    "SplitResult",
    "atoms_from_structure",
    "build_regular_partition",
    "classify_pairs",
    "default_max_atoms",
    "split_atoms",
    "QuasirandomVerdict",
    "ScaleWarning",
    "check_quasirandom",
    "check_quasirandom_exhaustive",
    "check_quasirandom_search",
    "PairRegularityVerdict",
    "PartitionCheckReport",
    "check_pair",
    "check_pair_exhaustive",
    "check_pair_search",
    "check_partition",
    "classical_epsilon_regular",
    "relative_regularity",
]
