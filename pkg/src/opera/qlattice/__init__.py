"""q-difference operators, q-Miura maps, q-Poisson brackets and their limits."""
from .shiftring import ShiftPoly, sym
from .qdiff import (QDiffOp, q_compose, q_miura_expand, q_miura_product, q_nth_root, q_oper,
                    q_root_lax, generic_q_oper, lambda_product)
from .distributions import (DistributionExpr, dist_normalize, lambda_bracket, t_series,
                            verify_t_bracket)
from .limits import (baxter_substitute, classical_limit, deformed_relation_template,
                     deformed_structure_function, structure_constant)

__all__ = [
    "ShiftPoly", "sym", "QDiffOp", "q_compose", "q_miura_expand", "q_miura_product", "q_nth_root",
    "q_oper", "q_root_lax", "generic_q_oper", "lambda_product", "DistributionExpr", "dist_normalize",
    "lambda_bracket", "t_series", "verify_t_bracket", "baxter_substitute", "classical_limit",
    "deformed_relation_template", "deformed_structure_function", "structure_constant",
]
