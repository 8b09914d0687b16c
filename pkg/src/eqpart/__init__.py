"""Equitable partitions of the binary hypercube and optimal resilient (n,2)-functions.

Vertices of Q_n are integers in ``[0, 2**n)``; coordinate ``i`` (0-based, read
left to right) is bit ``n - 1 - i``.
"""

from .core import (CubePartition, NotEquitable, PartitionError, QuotientMismatch, VertexSet,
                   antipodal_partition, has_matrix, quotient_matrix, require_matrix, standard_matrix)
from .resilient import (VbFunction, ci_order, function_of, is_balanced, is_resilient, linear_function,
                        linear_s2, linear_s4, max_resilience_bound, partition_of)
from .algebra import (RankClass, RankKind, affine_dual, affine_rank, rank_class_s2, rank_class_s4,
                      rank_relation_check)
from .bridge import contract_s2_to_s4, expand_s4_to_s2, split_s2_to_s3
from .perfect import (MultifoldCode, eperf_partition, extend_parity, hamming_code, is_multifold_perfect,
                      multifold_union, s2_to_semi, semi_to_s2, semilinear_complete_to_s4)
from .latin import (HammingPartition, concat, detect_reducible, enumerate_latin_squares, latin_from_mds, lift,
                    linear_latin, mds_from_latin)

__version__ = "0.1.0"
