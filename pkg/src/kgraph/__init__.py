"""Finitely aligned k-graphs: skeletons, paths, minimal common extensions,
exact Toeplitz-Cuntz-Krieger algebra and a truncated Fock representation."""

from .skeleton import Skeleton, SkeletonError, check_associativity, emit, load_skeleton, load_skeleton_file
from .paths import Path, compose, enumerate_paths, parse_path, segment
from .alignment import find_avoiding_path, is_finitely_aligned, mce, mce_family, vee
from .tck import FormalElement, adjoint, diag, gen, multiply, partition_check, q_projection
from .fock import FockSpace, check_nica_products, check_relations, evaluate, operator_norm

__version__ = "0.1.0"

__all__ = [
    "Skeleton", "SkeletonError", "check_associativity", "emit", "load_skeleton", "load_skeleton_file",
    "Path", "compose", "enumerate_paths", "parse_path", "segment",
    "find_avoiding_path", "is_finitely_aligned", "mce", "mce_family", "vee",
    "FormalElement", "adjoint", "diag", "gen", "multiply", "partition_check", "q_projection",
    "FockSpace", "check_nica_products", "check_relations", "evaluate", "operator_norm",
]
