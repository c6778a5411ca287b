"""Services for the rational function toolkit."""
from app.services.automata import (
    accepts,
    determinize,
    equivalent,
    minimize,
    product,
    reverse,
    trim,
)
from app.services.bimachine import (
    bimachine_to_nft,
    complete_bimachine,
    eval_bimachine,
    is_v_bimachine,
    nft_to_bimachine,
    rebase_finer,
)
from app.services.canonical import (
    CanonicalBimachine,
    Decision,
    build_T_family,
    canonical_bimachine,
    canonical_left_congruence,
    complete_function,
    decide_fo,
    decide_variety_unambiguous,
    left_syntactic_congruence,
    right_syntactic_congruence,
)
from app.services.converter import MachineConverter
from app.services.monoid import (
    FiniteMonoid,
    get_variety,
    in_variety,
    syntactic_monoid,
    transition_monoid,
)
from app.services.transducer import (
    determinize_nft,
    disambiguate,
    evaluate,
    is_functional,
    is_unambiguous_nft,
    minimize_dft,
)
from app.services.translation import (
    bimachine_to_translation,
    check_translation,
    eval_translation,
    translation_to_bimachine,
)

__all__ = [
    "accepts",
    "determinize",
    "equivalent",
    "minimize",
    "product",
    "reverse",
    "trim",
    "bimachine_to_nft",
    "complete_bimachine",
    "eval_bimachine",
    "is_v_bimachine",
    "nft_to_bimachine",
    "rebase_finer",
    "CanonicalBimachine",
    "Decision",
    "build_T_family",
    "canonical_bimachine",
    "canonical_left_congruence",
    "complete_function",
    "decide_fo",
    "decide_variety_unambiguous",
    "left_syntactic_congruence",
    "right_syntactic_congruence",
    "MachineConverter",
    "FiniteMonoid",
    "get_variety",
    "in_variety",
    "syntactic_monoid",
    "transition_monoid",
    "determinize_nft",
    "disambiguate",
    "evaluate",
    "is_functional",
    "is_unambiguous_nft",
    "minimize_dft",
    "bimachine_to_translation",
    "check_translation",
    "eval_translation",
    "translation_to_bimachine",
]
