"""Reconstruction of random binary pictures from their k-decks."""

from .analysis import ExperimentRow, kc, run_experiment, zero_statement_log2_bound
from .deck_index import DeckIndex, build_index
from .diagnostics import (InterfacePath, MarkedGrid, classify_steps, extract_interfaces,
                          grid_graph, mark_bad_windows)
from .errors import (InputError, MalformedDeckError, ParseError, PicreconError,
                     ResourceError, StaleCheckpointError, UnsupportedError)
from .grid import Deck, KGrid, Picture, deck, infer_n, random_picture, subgrid
from .oracle import (TrialOutcome, classify_all, deck_equal, is_reconstructible_exhaustive,
                     run_trial)
from .reconstruct import ReconstructionResult, reconstruct

__all__ = [
    "Deck", "DeckIndex", "ExperimentRow", "InputError", "InterfacePath", "KGrid",
    "MalformedDeckError", "MarkedGrid", "ParseError", "Picture", "PicreconError",
    "ReconstructionResult", "ResourceError", "StaleCheckpointError", "TrialOutcome",
    "UnsupportedError", "build_index", "classify_all", "classify_steps", "deck",
    "deck_equal", "extract_interfaces", "grid_graph", "infer_n",
    "is_reconstructible_exhaustive", "kc", "mark_bad_windows", "random_picture",
    "reconstruct", "run_experiment", "run_trial", "subgrid", "zero_statement_log2_bound",
]
