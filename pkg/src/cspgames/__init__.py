"""Two-prover CSP games over relational structures.

Core layers: structures (homomorphisms, cores, isomorphism), powers (the
Alice/Bob channel constructions), patterns (position patterns, covering
arrays, clique embeddings), games (strategy verification, translation,
brute-force search), quantum (PVM strategies and membership), geometry
(frames and sphere colorings).
"""

from .errors import (
    CapExceededError,
    CoverageError,
    ImperfectStrategyError,
    NotAHomomorphismError,
    SignatureMismatchError,
)
from .structures import (
    Homomorphism,
    RelationalStructure,
    Signature,
    are_isomorphic,
    core_of,
    find_homomorphism,
    induced_substructure,
    is_homomorphism,
    make_named,
)
from .powers import (
    AlicePowerView,
    BobPowerView,
    alice_one_bit_helps,
    alice_power,
    bob_one_bit_helps,
    bob_power,
)
from .patterns import (
    CoveringArray,
    SigmaPattern,
    central_vertices,
    chromatic_number,
    clique_into_alice_power,
    clique_into_alice_power_digraph,
    complete_into_bob_power,
    complete_structure,
    covering_array,
    pattern_of,
    refines,
    tuple_partition,
    verify_covering_array,
)
from .games import (
    AliceChannelStrategy,
    BobChannelStrategy,
    Counterexample,
    NoChannelStrategy,
    Verdict,
    alice_strategy_from_hom,
    bob_strategy_from_hom,
    brute_force_search,
    hom_from_alice_strategy,
    hom_from_bob_strategy,
    verify_perfect,
)
from .quantum import (
    PVM,
    JointPVM,
    QuantumStrategy,
    alpha_threshold,
    close_pvm_equality,
    deterministic_quantum_strategy,
    equality_experiment,
    find_certifying_partition,
    pvm_tuple_from_classical,
    pvms_commute,
    quantum_relation_membership,
    quantum_strategy_from_hom,
    validate_pvm,
    verify_perfect_quantum,
)
from .geometry import (
    SphereColoring,
    build_sphere_coloring,
    check_frame_adjacency,
    color_frame,
    is_frame,
    realify_frame,
    sample_adjacent_frames,
)

__version__ = "0.1.0"
