"""Exact computation over commutative quantales and quantale-enriched categories.

The submodules are layered: :mod:`vlift.quantale` (values), :mod:`vlift.vcat`
(categories and functors), :mod:`vlift.vmod` (modules and collages),
:mod:`vlift.squares` (exact squares), :mod:`vlift.endo` (endofunctor
expressions), :mod:`vlift.lifting` (relation liftings and batteries) and
:mod:`vlift.coalg` (coalgebras and the cover modality).  The most used names
are re-exported here.
"""

__version__ = "0.1.0"

from .coalg import (  # noqa: E402
    Atom,
    Join,
    Meet,
    Nabla,
    Value,
    bisimilarity_closure,
    check_invariance,
    evaluate,
    eval_table,
    find_coalgebra_morphisms,
    largest_simulation,
    make_coalgebra,
    make_model,
)
from .endo import (  # noqa: E402
    Const,
    ConnectedComponents,
    Dual,
    Id,
    Lower,
    Power,
    Sum,
    Tensor,
    TripleDiag,
    Upper,
    apply_to_category,
    apply_to_functor,
)
from .lifting import (  # noqa: E402
    bcc_battery,
    check_distributive_axioms,
    derive_distributive_law,
    functoriality_battery,
    lift,
    lift_closed_form,
    lift_via_collage,
)
from .quantale import Quantale, make_quantale, validate_laws  # noqa: E402
from .report import Report, SizeGuardError, VLiftError  # noqa: E402
from .squares import LaxSquare, cocomma, factorize, is_exact, pushout_along_ff  # noqa: E402
from .vcat import (  # noqa: E402
    VCat,
    VFunctor,
    make_category,
    make_functor,
    validate_category,
    validate_functor,
)
from .vmod import Module, collage, compose, make_module, module_of_cospan, validate_module  # noqa: E402
from .workspace import emit_workspace, parse_workspace  # noqa: E402

__all__ = [
    "Atom",
    "Join",
    "Meet",
    "Nabla",
    "Value",
    "bisimilarity_closure",
    "check_invariance",
    "evaluate",
    "eval_table",
    "find_coalgebra_morphisms",
    "largest_simulation",
    "make_coalgebra",
    "make_model",
    "Const",
    "ConnectedComponents",
    "Dual",
    "Id",
    "Lower",
    "Power",
    "Sum",
    "Tensor",
    "TripleDiag",
    "Upper",
    "apply_to_category",
    "apply_to_functor",
    "bcc_battery",
    "check_distributive_axioms",
    "derive_distributive_law",
    "functoriality_battery",
    "lift",
    "lift_closed_form",
    "lift_via_collage",
    "Quantale",
    "make_quantale",
    "validate_laws",
    "Report",
    "SizeGuardError",
    "VLiftError",
    "LaxSquare",
    "cocomma",
    "factorize",
    "is_exact",
    "pushout_along_ff",
    "VCat",
    "VFunctor",
    "make_category",
    "make_functor",
    "validate_category",
    "validate_functor",
    "Module",
    "collage",
    "compose",
    "make_module",
    "module_of_cospan",
    "validate_module",
    "emit_workspace",
    "parse_workspace",
]
