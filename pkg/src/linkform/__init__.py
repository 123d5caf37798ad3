"""Linking pairings of Seifert-fibered rational homology spheres and the
Gauss-sum invariants of linking pairings on 2-groups."""
from .algebra import INF, QZ, AbelianGroup, CyclotomicSum
from .invariants import (InvariantTable, decompose, invariant_table, is_isomorphic,
                         summand_test, tau)
from .pairing import BlockSum, GeneratorBlock, blocksum_pairing, direct_sum, generator
from .realize import SearchConfig, search_realization, verify_realization
from .seifert import (LinkingPairing, SeifertPresentation, linking_matrix,
                      linking_pairing, parse_presentation)

__all__ = ["INF", "QZ", "AbelianGroup", "CyclotomicSum", "InvariantTable", "decompose",
           "invariant_table", "is_isomorphic", "summand_test", "tau", "BlockSum",
           "GeneratorBlock", "blocksum_pairing", "direct_sum", "generator",
           "LinkingPairing", "SeifertPresentation", "linking_matrix", "linking_pairing",
           "parse_presentation", "SearchConfig", "search_realization", "verify_realization"]
