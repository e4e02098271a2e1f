"""Controlled-system identification with context-dependent grammars."""

from .alphabet import Alphabet, AlphabetError, Symbol, build_uniform_alphabet, dequantize, quantize
from .anomaly import AnomalyConfig, AnomalyReport, calibrate_threshold, detect
from .controller import ControlPlan, ControlTrace, NoApplicableProduction, plan_step, track_targets
from .grammar import Grammar, GrammarError, GrammarParseError, Production, parse, serialize, word
from .learner import LearnerConfig, LearnerState, finalize, learn_trace, observe
from .metric import CostModel, edit_distance, lhs_distance
from .recognizer import Interpolation, Prediction, predict_next, recognize, recognize_trace
from .traces import RawTrace, SymbolTrace, symbol_trace

__all__ = [
    "Alphabet", "AlphabetError", "Symbol", "build_uniform_alphabet", "dequantize", "quantize",
    "AnomalyConfig", "AnomalyReport", "calibrate_threshold", "detect",
    "ControlPlan", "ControlTrace", "NoApplicableProduction", "plan_step", "track_targets",
    "Grammar", "GrammarError", "GrammarParseError", "Production", "parse", "serialize", "word",
    "LearnerConfig", "LearnerState", "finalize", "learn_trace", "observe",
    "CostModel", "edit_distance", "lhs_distance",
    "Interpolation", "Prediction", "predict_next", "recognize", "recognize_trace",
    "RawTrace", "SymbolTrace", "symbol_trace",
]
