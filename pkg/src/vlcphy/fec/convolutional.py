"""Constraint-length-7 convolutional code with a rate-1/3 mother code.

Generators 133/171/165 (octal), newest input bit on the most significant
tap. Rate 1/4 repeats the first generator output inside each trellis step;
rate 2/3 punctures three of every six mother bits with the period-6 keep
mask [1,1,0,1,0,0]. Every codeword is terminated by six zero tail bits, so

    output length = ceil((L + 6) * pattern_out / pattern_in)

for pattern 1->3, 1->4 and 2->3 respectively. The Viterbi decoder makes
hard decisions and treats punctured positions as erasures, which keeps it
exactly maximum-likelihood in Hamming distance over the transmitted bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import ConfigError, FramingError
from ..bitops import as_bits

CONSTRAINT_LENGTH = 7
GENERATORS_OCTAL = (0o133, 0o171, 0o165)
TAIL_BITS = CONSTRAINT_LENGTH - 1
_N_STATES = 1 << TAIL_BITS

# RATE_PATTERNS[rate] = (input bits, output bits, per-mother-bit keep/repeat map)
# The map lists, for each mother bit over one pattern period, how many times
# it appears in the channel stream (0 = punctured, 2 = repeated).
RATE_PATTERNS: dict[Fraction, tuple[int, int, tuple[int, ...]]] = {
    Fraction(1, 3): (1, 3, (1, 1, 1)),
    Fraction(1, 4): (1, 4, (2, 1, 1)),
    Fraction(2, 3): (2, 3, (1, 1, 0, 1, 0, 0)),
}


@dataclass(frozen=True)
class ConvolutionalCode:
    """The mother code at one of the three supported rates."""

    rate: Fraction

    def __post_init__(self):
        if self.rate not in RATE_PATTERNS:
            msg = f"unsupported convolutional rate {self.rate}"
            raise ConfigError(msg)

    @property
    def pattern(self) -> tuple[int, int, tuple[int, ...]]:
        return RATE_PATTERNS[self.rate]

    def output_length(self, message_length: int) -> int:
        pat_in, pat_out, _ = self.pattern
        return -(-(message_length + TAIL_BITS) * pat_out // pat_in)


def _mother_tables() -> tuple[np.ndarray, np.ndarray]:
    """next_state[s, u] and the three mother output bits out[s, u, g]."""
    next_state = np.empty((_N_STATES, 2), dtype=np.int64)
    outputs = np.empty((_N_STATES, 2, 3), dtype=np.uint8)
    for s in range(_N_STATES):
        for u in (0, 1):
            window = (u << TAIL_BITS) | s  # newest bit at the top tap
            next_state[s, u] = (u << (TAIL_BITS - 1)) | (s >> 1)
            for g, gen in enumerate(GENERATORS_OCTAL):
                outputs[s, u, g] = bin(window & gen).count("1") & 1
    return next_state, outputs


_NEXT_STATE, _MOTHER_OUT = _mother_tables()
# predecessors of each state n: states (2*(n & 31) + b) for b in {0,1},
# reached with input bit n >> 5
_PREV_STATES = np.array(
    [[(s & (_N_STATES // 2 - 1)) << 1, ((s & (_N_STATES // 2 - 1)) << 1) | 1]
     for s in range(_N_STATES)],
    dtype=np.int64,
)
_INPUT_OF_STATE = np.arange(_N_STATES) >> (TAIL_BITS - 1)


def _mother_encode(bits: np.ndarray) -> np.ndarray:
    """Terminated rate-1/3 mother stream, 3 bits per trellis step."""
    padded = np.concatenate([bits, np.zeros(TAIL_BITS, dtype=np.uint8)])
    out = np.empty((padded.size, 3), dtype=np.uint8)
    state = 0
    for i, u in enumerate(padded):
        out[i] = _MOTHER_OUT[state, u]
        state = _NEXT_STATE[state, u]
    return out.ravel()


def _stream_map(code: ConvolutionalCode, n_steps: int) -> np.ndarray:
    """Repetition count of each mother bit position for n_steps steps."""
    _, _, per_bit = code.pattern
    mother_len = 3 * n_steps
    reps = np.tile(per_bit, -(-mother_len // len(per_bit)))[:mother_len]
    return reps.astype(np.int64)


def cc_encode(bits, code: ConvolutionalCode) -> np.ndarray:
    """Encode and terminate a message at the code's rate."""
    bits = as_bits(bits)
    mother = _mother_encode(bits)
    reps = _stream_map(code, bits.size + TAIL_BITS)
    return np.repeat(mother, reps)


def _infer_steps(n_coded: int, code: ConvolutionalCode) -> int:
    """Recover the trellis step count (message + tail) from a stream length."""
    pat_in, pat_out, _ = code.pattern
    for steps in range((n_coded * pat_in) // pat_out, (n_coded * pat_in) // pat_out + pat_in + 1):
        if steps >= TAIL_BITS and -(-steps * pat_out // pat_in) == n_coded:
            return steps
    msg = f"stream length {n_coded} is impossible at rate {code.rate}"
    raise FramingError(msg)


def viterbi_decode(bits, code: ConvolutionalCode) -> np.ndarray:
    """Hard-decision ML decode of a terminated stream; tail bits stripped."""
    received = as_bits(bits)
    steps = _infer_steps(received.size, code)
    reps = _stream_map(code, steps)

    # branch metrics per step: Hamming distance over surviving channel bits,
    # with repeated mother bits counted once per transmitted copy
    mother_idx = np.repeat(np.arange(3 * steps), reps)
    dist = np.zeros(3 * steps, dtype=np.int64)
    np.add.at(dist, mother_idx, 1)  # weight per mother position
    ones = np.zeros(3 * steps, dtype=np.int64)
    np.add.at(ones, mother_idx, received.astype(np.int64))
    weight = dist.reshape(steps, 3)
    ones = ones.reshape(steps, 3)
    # metric(step, s, u) = sum_g [ out=1 ? (weight-ones) : ones ]
    out = _MOTHER_OUT.astype(np.int64)  # (64, 2, 3)
    bm = np.einsum("tg,sug->tsu", ones, 1 - out) + np.einsum(
        "tg,sug->tsu", weight - ones, out
    )

    big = np.int64(1) << 40
    pm = np.full(_N_STATES, big, dtype=np.int64)
    pm[0] = 0  # encoder starts in the all-zero state
    backptr = np.empty((steps, _N_STATES), dtype=np.uint8)
    prev0 = _PREV_STATES[:, 0]
    prev1 = _PREV_STATES[:, 1]
    u_in = _INPUT_OF_STATE
    for t in range(steps):
        bm_t = bm[t]
        cand0 = pm[prev0] + bm_t[prev0, u_in]
        cand1 = pm[prev1] + bm_t[prev1, u_in]
        take1 = cand1 < cand0
        backptr[t] = take1
        pm = np.where(take1, cand1, cand0)

    # terminated: trace back from the all-zero state
    state = 0
    decoded = np.empty(steps, dtype=np.uint8)
    for t in range(steps - 1, -1, -1):
        decoded[t] = u_in[state]
        state = _PREV_STATES[state, backptr[t, state]]
    return decoded[: steps - TAIL_BITS]
