"""Forward error correction: Reed-Solomon, convolutional coding, interleaving."""

from .convolutional import (
    CONSTRAINT_LENGTH,
    GENERATORS_OCTAL,
    RATE_PATTERNS,
    TAIL_BITS,
    ConvolutionalCode,
    cc_encode,
    viterbi_decode,
)
from .galois import GF16, GF256, GaloisField
from .pipeline import (
    BlockReport,
    FecReport,
    deinterleave,
    fec_decode,
    fec_encode,
    fec_encoded_length,
    interleave,
)
from .reed_solomon import RsCode, rs_code_for, rs_decode, rs_encode

__all__ = [
    "CONSTRAINT_LENGTH",
    "GENERATORS_OCTAL",
    "RATE_PATTERNS",
    "TAIL_BITS",
    "ConvolutionalCode",
    "cc_encode",
    "viterbi_decode",
    "GF16",
    "GF256",
    "GaloisField",
    "BlockReport",
    "FecReport",
    "deinterleave",
    "fec_decode",
    "fec_encode",
    "fec_encoded_length",
    "interleave",
    "RsCode",
    "rs_code_for",
    "rs_decode",
    "rs_encode",
]
