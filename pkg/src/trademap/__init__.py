"""Trade maps from bilateral trade volumes.

Given only how much every pair of countries trades, this package builds a
weighted graph, takes the normalized graph Laplacian, and places each
country in the plane using the eigenvectors of the two smallest nontrivial
eigenvalues.  Countries that trade heavily land close together, so the map
recovers a data-driven notion of distance.  A gravity-model generator with
planted geometry provides ground truth for validating the recovery.

Typical use::

    from trademap import build_flow_matrix, compose_map, parse_dyadic_csv

    records = parse_dyadic_csv(open("trade.csv"))
    flow = build_flow_matrix(records, year=2009)
    embedding = compose_map(flow)
"""

from .analysis import (
    Bipartition,
    DistanceReport,
    bipartition,
    nearest_neighbors,
    pairwise_distances,
    procrustes_align,
)
from .embedding import (
    Embedding,
    compose_map,
    embed,
    nontrivial_indices,
    read_coordinates,
    write_coordinates,
)
from .errors import TradeMapError
from .graph import (
    AffinityMatrix,
    DegreeVector,
    LaplacianMatrix,
    affinity,
    connected_components,
    degrees,
    normalized_laplacian,
)
from .ingest import (
    COW_MISSING_SENTINEL,
    COW_SCHEMA,
    CountryRoster,
    DyadRecord,
    DyadSchema,
    FlowMatrix,
    build_flow_matrix,
    load_labels,
    parse_dyadic_csv,
    select_subgraph,
    write_dyadic_csv,
)
from .plot import PlotSpec, render_svg
from .spectral import Spectrum, fix_signs, symmetric_eigen, tridiagonalize
from .synth import (
    RecoveryScore,
    SyntheticScenario,
    gravity_flows,
    planted_cluster_scenario,
    read_scenario,
    recovery_score,
    write_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix",
    "Bipartition",
    "COW_MISSING_SENTINEL",
    "COW_SCHEMA",
    "CountryRoster",
    "DegreeVector",
    "DistanceReport",
    "DyadRecord",
    "DyadSchema",
    "Embedding",
    "FlowMatrix",
    "LaplacianMatrix",
    "PlotSpec",
    "RecoveryScore",
    "Spectrum",
    "SyntheticScenario",
    "TradeMapError",
    "affinity",
    "bipartition",
    "build_flow_matrix",
    "compose_map",
    "connected_components",
    "degrees",
    "embed",
    "fix_signs",
    "gravity_flows",
    "load_labels",
    "nearest_neighbors",
    "nontrivial_indices",
    "normalized_laplacian",
    "pairwise_distances",
    "parse_dyadic_csv",
    "planted_cluster_scenario",
    "procrustes_align",
    "read_coordinates",
    "read_scenario",
    "recovery_score",
    "render_svg",
    "select_subgraph",
    "symmetric_eigen",
    "tridiagonalize",
    "write_coordinates",
    "write_dyadic_csv",
    "write_scenario",
]
