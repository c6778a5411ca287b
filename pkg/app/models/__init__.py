"""Data models for machines and varieties."""
from app.models.automata import Dfa, Nfa, Orientation, Partition
from app.models.bimachine import Bimachine
from app.models.transducer import Dft, Nft
from app.models.translation import ComponentKey, Translation
from app.models.variety import Factor, ProfiniteEquation, VarietySpec

__all__ = [
    "Nfa",
    "Dfa",
    "Orientation",
    "Partition",
    "Nft",
    "Dft",
    "Bimachine",
    "Translation",
    "ComponentKey",
    "Factor",
    "ProfiniteEquation",
    "VarietySpec",
]
