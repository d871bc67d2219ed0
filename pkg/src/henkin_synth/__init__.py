"""Henkin function synthesis for DQBF by learning and counterexample-guided repair."""

from .certificate import HenkinVector, format_henkin_vector, parse_henkin_vector
from .engine import Config, SynthesisOutcome, synthesize
from .formula import DqbfInstance, ParseError, parse_dqdimacs, read_dqdimacs

__all__ = [
    "Config",
    "DqbfInstance",
    "HenkinVector",
    "ParseError",
    "SynthesisOutcome",
    "format_henkin_vector",
    "parse_dqdimacs",
    "parse_henkin_vector",
    "read_dqdimacs",
    "synthesize",
]

__version__ = "0.1.0"
