"""Game-theoretic opinion-leader detection on social interaction graphs."""

from .centrality import (
    CentralityVector,
    betweenness_centrality,
    closeness_centrality,
    clustering_coefficients,
    compute_centralities,
    connected_components,
    degree_centrality,
    eigenvector_centrality,
)
from .detect import (
    Coalition,
    DetectionResult,
    EmptyPool,
    LeaderWeights,
    SearchConfig,
    assign_weights,
    detect_leaders,
)
from .games import (
    SOLUTIONS,
    GameParams,
    MissingDistance,
    PayoffMatrices,
    best_responses,
    opinion_step,
    payoff_matrices,
)
from .graph import (
    EmptyGraph,
    NodeAttributes,
    SocialGraph,
    TrustModel,
    TrustResult,
    build_trust_graph,
    direct_trust,
    indirect_trust,
    recommended_trust,
)
from .shapley import (
    CharacteristicFn,
    ShapleyResult,
    TooLarge,
    characteristic_value,
    compute_shapley,
    shapley_exact,
    shapley_monte_carlo,
)
from .synergy import SynergyParams, TooSmall, coalition_synergy, pair_distance, pair_synergy

__all__ = [
    "CentralityVector",
    "CharacteristicFn",
    "Coalition",
    "DetectionResult",
    "EmptyGraph",
    "EmptyPool",
    "GameParams",
    "LeaderWeights",
    "MissingDistance",
    "NodeAttributes",
    "PayoffMatrices",
    "SOLUTIONS",
    "SearchConfig",
    "ShapleyResult",
    "SocialGraph",
    "SynergyParams",
    "TooLarge",
    "TooSmall",
    "TrustModel",
    "TrustResult",
    "assign_weights",
    "best_responses",
    "betweenness_centrality",
    "build_trust_graph",
    "characteristic_value",
    "closeness_centrality",
    "clustering_coefficients",
    "coalition_synergy",
    "compute_centralities",
    "compute_shapley",
    "connected_components",
    "degree_centrality",
    "detect_leaders",
    "direct_trust",
    "eigenvector_centrality",
    "indirect_trust",
    "opinion_step",
    "pair_distance",
    "pair_synergy",
    "payoff_matrices",
    "recommended_trust",
    "shapley_exact",
    "shapley_monte_carlo",
]
