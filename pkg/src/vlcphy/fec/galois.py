"""Finite-field arithmetic over GF(16) and GF(256) via exp/log tables."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError


class GaloisField:
    """GF(2^m) with a fixed primitive polynomial and generator alpha = 2."""

    def __init__(self, order: int, primitive_poly: int):
        if order not in (16, 256):
            msg = f"unsupported field order {order}"
            raise ConfigError(msg)
        self.order = order
        self.primitive_poly = primitive_poly
        n = order - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(order, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & order:
                x ^= primitive_poly
        if x != 1:
            msg = f"0x{primitive_poly:x} is not primitive for GF({order})"
            raise ConfigError(msg)
        exp[n:] = exp[:n]  # wraparound spares a modulo in mul
        self.exp = exp
        self.log = log
        self.n = n

    @property
    def symbol_bits(self) -> int:
        return self.order.bit_length() - 1

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF")
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] - self.log[b]) % self.n])

    def inv(self, a: int) -> int:
        return self.div(1, a)

    def pow(self, a: int, power: int) -> int:
        if a == 0:
            return 0 if power > 0 else 1
        return int(self.exp[(self.log[a] * power) % self.n])

    def mul_vec(self, a: np.ndarray, scalar: int) -> np.ndarray:
        """Element-wise multiply an array of field elements by a scalar."""
        if scalar == 0:
            return np.zeros_like(a)
        out = np.zeros_like(a)
        nz = a != 0
        out[nz] = self.exp[self.log[a[nz]] + self.log[scalar]]
        return out

    def poly_mul(self, p: list[int], q: list[int]) -> list[int]:
        """Multiply polynomials (index 0 = highest-degree coefficient)."""
        out = [0] * (len(p) + len(q) - 1)
        for i, pc in enumerate(p):
            if pc == 0:
                continue
            for j, qc in enumerate(q):
                out[i + j] ^= self.mul(pc, qc)
        return out

    def poly_eval(self, poly, x: int) -> int:
        """Horner evaluation; poly[0] is the highest-degree coefficient."""
        y = 0
        for coeff in poly:
            y = self.mul(y, x) ^ int(coeff)
        return y


# the two fields used by the code family
GF16 = GaloisField(16, 0x13)     # x^4 + x + 1
GF256 = GaloisField(256, 0x11D)  # x^8 + x^4 + x^3 + x^2 + 1
