"""Tsetlin machine engine: clause-team learning over bit-plane packed state,
with a scalar reference engine, multi-class variant, dataset tooling, an
analytic payoff oracle, and a CLI."""

from .automaton import Action, Event, TAState, ta_action, ta_apply
from .clauses import (
    ClauseTeam,
    EvalMode,
    LiteralVector,
    PlaneBlock,
    block_decrement,
    block_increment,
    clause_evaluate,
    clause_evaluate_packed,
    pack_team,
    unpack_block,
)
from .datasets import (
    BinaryDataset,
    binarize_threshold,
    gen_noisy_xor,
    load_dataset,
    quantize_bits,
    save_dataset,
    split,
)
from .errors import ConfigError, DatasetFormatError, TsetlinError, WidthMismatchError
from .feedback import FeedbackParams, FeedbackTriple, type_i_probs, type_ii_probs
from .machine import (
    ClauseExpression,
    FeedbackType,
    MachineConfig,
    ScalarTsetlinMachine,
    TrainReport,
    TsetlinMachine,
    activation_probability,
)
from .multiclass import MultiClassMachine

__all__ = [
    "Action",
    "BinaryDataset",
    "ClauseExpression",
    "ClauseTeam",
    "ConfigError",
    "DatasetFormatError",
    "EvalMode",
    "Event",
    "FeedbackParams",
    "FeedbackTriple",
    "FeedbackType",
    "LiteralVector",
    "MachineConfig",
    "MultiClassMachine",
    "PlaneBlock",
    "ScalarTsetlinMachine",
    "TAState",
    "TrainReport",
    "TsetlinError",
    "TsetlinMachine",
    "WidthMismatchError",
    "activation_probability",
    "binarize_threshold",
    "block_decrement",
    "block_increment",
    "clause_evaluate",
    "clause_evaluate_packed",
    "gen_noisy_xor",
    "load_dataset",
    "pack_team",
    "quantize_bits",
    "save_dataset",
    "split",
    "ta_action",
    "ta_apply",
    "type_i_probs",
    "type_ii_probs",
    "unpack_block",
]
