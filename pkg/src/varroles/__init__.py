"""Syntactic variable-role analysis for C programs and role-based file classification."""
from .core import Function, Program
from .engine import ROLE_ORDER, RoleAssignment, RoleId, analyze_function
from .parser import ParseError, parse_function, parse_program, pretty_print
from .cfront import lower_c
from .metrics import LabeledExample, RoleVector, ingest_corpus, vectorize
from .classifier import Model, evaluate_split, predict, train

__version__ = "0.1.0"

__all__ = [
    "Function", "Program", "ROLE_ORDER", "RoleAssignment", "RoleId", "analyze_function",
    "ParseError", "parse_function", "parse_program", "pretty_print", "lower_c",
    "LabeledExample", "RoleVector", "ingest_corpus", "vectorize",
    "Model", "evaluate_split", "predict", "train",
]
