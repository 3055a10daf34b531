"""Boolean-algebra-valued types and Keisler measures over finite structures."""

from .algebra import (
    Element,
    FiniteBooleanAlgebra,
    Homomorphism,
    MeasureAlgebra,
    Subalgebra,
    generated_subalgebra,
    one_point_extension_interval,
    sikorski_extendable,
)
from .boolean_types import BooleanType, CompleteType, enumerate_types
from .corpus import generate_corpus
from .definable import FormulaAlgebra, build_formula_algebra, split
from .errors import BooltypeError
from .formula import evaluate, parse
from .measures import KeislerMeasure
from .structure import FiniteStructure, load_structure, parse_structure

__all__ = [
    "BooleanType",
    "BooltypeError",
    "CompleteType",
    "Element",
    "FiniteBooleanAlgebra",
    "FiniteStructure",
    "FormulaAlgebra",
    "Homomorphism",
    "KeislerMeasure",
    "MeasureAlgebra",
    "Subalgebra",
    "build_formula_algebra",
    "enumerate_types",
    "evaluate",
    "generate_corpus",
    "generated_subalgebra",
    "load_structure",
    "one_point_extension_interval",
    "parse",
    "parse_structure",
    "sikorski_extendable",
    "split",
]
