"""Systematic Reed-Solomon codes, including shortened ones.

Codewords are symbol arrays with index 0 holding the highest-degree
coefficient, so shortening simply drops leading zero symbols. Generator
roots are alpha^1 .. alpha^2t (narrow sense). Decoding runs
Berlekamp-Massey, a Chien search and Forney's formula, then re-encodes the
corrected message and rejects any inconsistency as a DecodeFailure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DecodeFailure, FramingError
from .galois import GF16, GF256, GaloisField


@dataclass(frozen=True)
class RsCode:
    """RS(n, k) over a given field; shortened when n < field order - 1."""

    n: int
    k: int
    field: GaloisField

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            msg = f"need 1 <= k < n, got ({self.n}, {self.k})"
            raise ConfigError(msg)
        if self.n > self.field.order - 1:
            msg = f"n = {self.n} exceeds GF({self.field.order}) codeword bound"
            raise ConfigError(msg)

    @property
    def t(self) -> int:
        """Guaranteed correction capability in symbols."""
        return (self.n - self.k) // 2

    @property
    def parity(self) -> int:
        return self.n - self.k


_GENERATOR_CACHE: dict[tuple[int, int, int], list[int]] = {}


def _generator_poly(code: RsCode) -> list[int]:
    """g(x) = prod_{j=1..2t} (x - alpha^j), cached per (field, n, k)."""
    key = (code.field.order, code.n, code.k)
    gen = _GENERATOR_CACHE.get(key)
    if gen is None:
        field = code.field
        gen = [1]
        for j in range(1, code.parity + 1):
            gen = field.poly_mul(gen, [1, field.pow(2, j)])
        _GENERATOR_CACHE[key] = gen
    return gen


def rs_encode(message, code: RsCode) -> np.ndarray:
    """Append parity symbols to a k-symbol message (systematic)."""
    message = np.asarray(message, dtype=np.int64)
    if message.size != code.k:
        msg = f"message must hold {code.k} symbols, got {message.size}"
        raise FramingError(msg)
    if message.size and message.max() >= code.field.order:
        msg = f"symbol out of range for GF({code.field.order})"
        raise FramingError(msg)
    field = code.field
    gen_tail = np.array(_generator_poly(code)[1:], dtype=np.int64)
    parity = np.zeros(code.parity, dtype=np.int64)
    for sym in message:
        feedback = int(sym) ^ int(parity[0])
        parity[:-1] = parity[1:]
        parity[-1] = 0
        if feedback:
            parity ^= field.mul_vec(gen_tail, feedback)
    return np.concatenate([message, parity])


def _syndromes(received: np.ndarray, code: RsCode) -> list[int]:
    field = code.field
    return [field.poly_eval(received, field.pow(2, j)) for j in range(1, code.parity + 1)]


def _berlekamp_massey(synd: list[int], field: GaloisField) -> list[int]:
    """Error-locator polynomial, lowest-degree coefficient first."""
    err_loc = [1]
    old_loc = [1]
    for i, s in enumerate(synd):
        delta = s
        for j in range(1, len(err_loc)):
            delta ^= field.mul(err_loc[-(j + 1)], synd[i - j])
        old_loc.append(0)
        if delta != 0:
            if len(old_loc) > len(err_loc):
                new_loc = [field.mul(c, delta) for c in old_loc]
                old_loc = [field.div(c, delta) for c in err_loc]
                err_loc = new_loc
            scaled = [field.mul(c, delta) for c in old_loc]
            # align at the constant term before adding
            if len(scaled) < len(err_loc):
                scaled = [0] * (len(err_loc) - len(scaled)) + scaled
            else:
                err_loc = [0] * (len(scaled) - len(err_loc)) + err_loc
            err_loc = [a ^ b for a, b in zip(err_loc, scaled)]
    while len(err_loc) > 1 and err_loc[0] == 0:
        err_loc = err_loc[1:]
    return err_loc


def rs_decode(received, code: RsCode) -> tuple[np.ndarray, int]:
    """Correct up to t symbol errors; returns (message, corrected_count).

    Raises DecodeFailure when the word is uncorrectable or a correction
    fails the mandatory re-encode consistency check.
    """
    received = np.asarray(received, dtype=np.int64)
    if received.size != code.n:
        msg = f"received word must hold {code.n} symbols, got {received.size}"
        raise FramingError(msg)
    if received.size and received.max() >= code.field.order:
        msg = f"symbol out of range for GF({code.field.order})"
        raise FramingError(msg)
    field = code.field
    synd = _syndromes(received, code)
    if max(synd) == 0:
        return received[: code.k].copy(), 0

    err_loc = _berlekamp_massey(synd, field)
    n_errors = len(err_loc) - 1
    if n_errors > code.t:
        msg = f"error locator degree {n_errors} exceeds t = {code.t}"
        raise DecodeFailure(msg)

    # Chien search over the n transmitted positions
    positions = []
    for i in range(code.n):
        # position i carries the coefficient of x^(n-1-i)
        x_inv = field.pow(2, -(code.n - 1 - i) % field.n)
        if field.poly_eval(err_loc, x_inv) == 0:
            positions.append(i)
    if len(positions) != n_errors:
        msg = "error locator roots do not match its degree"
        raise DecodeFailure(msg)

    # Forney: magnitudes from the evaluator omega = S(x) * sigma(x) mod x^2t,
    # with S(x) = S_1 + S_2 x + ... (so no extra locator factor appears)
    synd_poly = list(reversed(synd))  # highest order first
    product = field.poly_mul(synd_poly, err_loc)
    evaluator = product[max(0, len(product) - code.parity) :]
    err_loc_rev = list(reversed(err_loc))  # lowest order first
    corrected = received.copy()
    for i in positions:
        x = field.pow(2, code.n - 1 - i)
        x_inv = field.inv(x)
        # formal derivative of the locator: odd-degree terms survive in GF(2^m)
        deriv = 0
        for j in range(1, len(err_loc_rev), 2):
            deriv ^= field.mul(err_loc_rev[j], field.pow(x_inv, j - 1))
        if deriv == 0:
            msg = "Forney derivative vanished"
            raise DecodeFailure(msg)
        magnitude = field.div(field.poly_eval(evaluator, x_inv), deriv)
        corrected[i] ^= magnitude

    if max(_syndromes(corrected, code)) != 0:
        msg = "corrected word still has non-zero syndromes"
        raise DecodeFailure(msg)
    message = corrected[: code.k].copy()
    # re-encode check: a decode that lands on a non-codeword or mangles the
    # parity relation must surface as a failure, not a silent miscorrection
    if not np.array_equal(rs_encode(message, code), corrected):
        msg = "re-encode consistency check failed"
        raise DecodeFailure(msg)
    return message, len(positions)


def rs_code_for(params: tuple[int, int]) -> RsCode:
    """Registry lookup: (15,k) lives in GF(16), larger codes in GF(256)."""
    n, k = params
    return RsCode(n, k, GF16 if n <= 15 else GF256)
