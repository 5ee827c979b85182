"""LDPC decoding with reliability-driven and residual scheduling."""
from .codes import CodeSpec, TannerGraph, construct_regular_code, encode_systematic, is_codeword, syndrome
from .schedulers import DecoderConfig, decode

__version__ = "0.1.0"

__all__ = [
    "CodeSpec", "DecoderConfig", "TannerGraph", "construct_regular_code", "decode",
    "encode_systematic", "is_codeword", "syndrome",
]
