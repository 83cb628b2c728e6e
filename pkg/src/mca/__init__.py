"""Monadic combinatory algebras: evaluator, stack machine, modalities and realizability checks."""
from .algebra import (FuelExhausted, I, K, S, Stuck, apply, bracket, check_bracket, check_mca_laws,
                      check_sk_axioms, evaluate)
from .effects import church, church_value, make_effect
from .frame import (Base, BotP, Conj, TopP, UImpl, check_evidence, check_ef_laws, make_core,
                    prop_eval)
from .modality import check_modality, law_samples, make_modality, make_separator
from .syntax import ParseError, ScopeError, parse, show, show_code

__all__ = [
    "FuelExhausted", "Stuck", "S", "K", "I", "apply", "evaluate", "bracket", "check_bracket",
    "check_mca_laws", "check_sk_axioms", "church", "church_value", "make_effect",
    "Base", "BotP", "Conj", "TopP", "UImpl", "check_evidence", "check_ef_laws", "make_core",
    "prop_eval", "check_modality", "law_samples", "make_modality", "make_separator",
    "ParseError", "ScopeError", "parse", "show", "show_code",
]
