"""Decoding schedules over a shared sum-product kernel."""
from __future__ import annotations

from .arcid import (
    ReliabilityState,
    combined_metric,
    contextual_transition,
    decode_arcid,
    message_quality_check,
    reliability_state,
    select_active_set,
)
from .config import ALGORITHMS, DecoderConfig, canonical_algorithm
from .flooding import decode_flooding, decode_layered
from .queue import ResidualQueue
from .residual import compute_residual, decode_list_rbp, decode_rbp, decode_rd_rbp

DECODERS = {
    "flooding": decode_flooding,
    "layered": decode_layered,
    "rbp": decode_rbp,
    "rd_rbp": decode_rd_rbp,
    "list_rbp": decode_list_rbp,
    "arcid": decode_arcid,
}


def decode(graph, channel_llrs, config: DecoderConfig):
    """Run the scheduler named by ``config.algorithm``."""
    return DECODERS[config.algorithm](graph, channel_llrs, config)


__all__ = [
    "ALGORITHMS", "DECODERS", "DecoderConfig", "ReliabilityState", "ResidualQueue",
    "canonical_algorithm", "combined_metric", "compute_residual", "contextual_transition",
    "decode", "decode_arcid", "decode_flooding", "decode_layered", "decode_list_rbp",
    "decode_rbp", "decode_rd_rbp", "message_quality_check", "reliability_state",
    "select_active_set",
]
