"""Region-restricted qubit mapping: fuse device communities, expand, and solve inside them."""

__version__ = "0.1.0"

from .circuit import LogicalCircuit, compute_metrics, load_qasm, parse_qasm
from .evaluator import (analytic_fidelity, complexity_estimates, hellinger_fidelity, pruning_ratios,
                        simulate)
from .expansion import MappingRegion, expand, restrict_graph, select_and_expand
from .fusion import FusionConfig, RegionTriple, best_region_for, modularity, recursive_community_fusion
from .hardware import CouplingGraph, generate_grid, generate_heavy_hex, ibm_eagle_like, load_device
from .solver import EncodingBounds, MappingSolution, encode, solve, solve_with_haqa, validate

__all__ = [
    "CouplingGraph", "EncodingBounds", "FusionConfig", "LogicalCircuit", "MappingRegion", "MappingSolution",
    "RegionTriple", "analytic_fidelity", "best_region_for", "complexity_estimates", "compute_metrics",
    "encode", "expand", "generate_grid", "generate_heavy_hex", "hellinger_fidelity", "ibm_eagle_like",
    "load_device", "load_qasm", "modularity", "parse_qasm", "pruning_ratios", "recursive_community_fusion",
    "restrict_graph", "select_and_expand", "simulate", "solve", "solve_with_haqa", "validate",
]
