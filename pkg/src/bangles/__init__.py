"""Regularizing decompositions and canonical forms of bangles.

A bangle is a block matrix cut into vertical strips with one boxed square
strip; the group acting on it is the nonsingular upper block-triangular
column changes together with the matching row-and-box change, either
*congruently or by similarity.  This package computes the regularizing
decomposition (nonsingular regular part plus nilpotent singular summands),
canonical forms of the regular part where the theory provides them, the
translations to forms on subspace/quotient pairs and to linear mappings,
and an explicit transformation witness for every claimed equivalence.
"""

from .bangle import (Bangle, ColCombAdd, ColsInStrip, RowAndBox, SIM, STAR,
                     SingularSummand, Witness, admissible_permute, apply,
                     assemble_decomposition, block_direct_sum, delta, e_col,
                     gamma, jordan, regular_bangle, summand_bangle)
from .canonical import (CongruenceClassC, GammaBlock, HPair, SimilarityClass,
                        UnitGamma, canonical_bangle, congruence_canonical_c,
                        cosquare, invariant_factors, similarity_invariants,
                        star_congruence_canonical_c, star_cosquare)
from .fields import ScalarField
from .forms import (BasisChange, FormMatrix, MappingMatrix, bangle_of_form,
                    bangle_of_mapping, canonicalize_form,
                    canonicalize_mapping, form_of_bangle, mapping_of_bangle,
                    transform_form, transform_mapping, verify_equivalence)
from .matrix import (Mat, RankRevelation, column_echelon_in_strip, rank,
                     row_compress, unitary_rank_reveal)
from .reduction import (ReductionStep, left_reduce_sim, left_reduce_star,
                        right_reduce_sim, right_reduce_star)
from .regularize import (RegularizingDecomposition, regularize,
                         regularize_sim, regularize_star, sort_zero_one)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
