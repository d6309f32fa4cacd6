"""Reed-Muller majority-logic decoding with small first-step gate counts."""

from .code import CodeSpec, canonical_information_set, encode, is_information_set, systematic_form
from .decoder import compile_full, compile_info, compile_punctured, decode, decode_batch, decode_info_checked, decode_info_checked_batch
from .estimators import MajorityLogicDecoder, RMEncoder
from .families import AdmissibleFamily, validate
from .geometry import Flat

__version__ = "0.1.0"

__all__ = [
    "AdmissibleFamily",
    "CodeSpec",
    "Flat",
    "MajorityLogicDecoder",
    "RMEncoder",
    "canonical_information_set",
    "compile_full",
    "compile_info",
    "compile_punctured",
    "decode",
    "decode_batch",
    "decode_info_checked",
    "decode_info_checked_batch",
    "encode",
    "is_information_set",
    "systematic_form",
    "validate",
]
