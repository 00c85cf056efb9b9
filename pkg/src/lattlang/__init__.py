"""Finite-lattice toy model of text as stable quantum states, with a
propositional theory engine, a Goedel map and an ink-on-page model."""

from .alphabet import DEFAULT_ALPHABET, Alphabet, DigitMap, InterpretationMap
from .expressions import Expression, compose, decompose
from .hilbert import IntervalProjector, LatticeSpace, StateVector, projector_prob
from .dynamics import StepOperator, build_step, build_writer, evolve, heisenberg_trace, probability_trace
from .stability import TauTable, classify_efficiency, estimate_tau, tau_table
from .theory_engine import Theory, check_proof, enumerate_theorems, shortest_inconsistency_proof
from .godel import Numeral, decode, encode

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ALPHABET", "Alphabet", "DigitMap", "InterpretationMap",
    "Expression", "compose", "decompose",
    "IntervalProjector", "LatticeSpace", "StateVector", "projector_prob",
    "StepOperator", "build_step", "build_writer", "evolve", "heisenberg_trace", "probability_trace",
    "TauTable", "classify_efficiency", "estimate_tau", "tau_table",
    "Theory", "check_proof", "enumerate_theorems", "shortest_inconsistency_proof",
    "Numeral", "decode", "encode",
]
