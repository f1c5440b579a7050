"""GF(256) arithmetic and a systematic MDS erasure code over byte symbols.

Codewords are formed across descriptions: a (k, total) code maps k data
bytes to `total` bytes such that any k of them recover the data. Data
symbols are values of the degree<k polynomial through points 0..k-1;
parity symbols are its values at points k..total-1 (Lagrange evaluation),
so the code is MDS and systematic. Field elements double as evaluation
points, which caps `total` at 255.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_POLY = 0x11D  # AES-style primitive polynomial for GF(2^8)

EXP = [0] * 512
LOG = [0] * 256
_value = 1
for _power in range(255):
    EXP[_power] = _value
    LOG[_value] = _power
    _value <<= 1
    if _value & 0x100:
        _value ^= _POLY
for _power in range(255, 512):
    EXP[_power] = EXP[_power - 255]

_EXP_NP = np.array(EXP, dtype=np.uint8)
_LOG_NP = np.array(LOG, dtype=np.int32)


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return EXP[255 - LOG[a]]


def gf_mul_vec(scalar: int, vec: np.ndarray) -> np.ndarray:
    """Multiply every byte of `vec` by a scalar field element."""
    if scalar == 0:
        return np.zeros_like(vec)
    out = _EXP_NP[(_LOG_NP[vec] + LOG[scalar]) % 255]
    np.putmask(out, vec == 0, 0)
    return out


@lru_cache(maxsize=None)
def _lagrange_coefficients(sources: tuple[int, ...], target: int) -> tuple[int, ...]:
    """Coefficients c_u with value(target) = xor_u c_u * value(sources[u])."""
    coefficients = []
    for u in sources:
        numer = 1
        denom = 1
        for v in sources:
            if v == u:
                continue
            numer = gf_mul(numer, target ^ v)
            denom = gf_mul(denom, u ^ v)
        coefficients.append(gf_mul(numer, gf_inv(denom)))
    return tuple(coefficients)


def _evaluate(sources: tuple[int, ...], rows: list[np.ndarray], target: int) -> np.ndarray:
    acc = np.zeros_like(rows[0])
    for coefficient, row in zip(_lagrange_coefficients(sources, target), rows):
        acc ^= gf_mul_vec(coefficient, row)
    return acc


def encode_block(data: np.ndarray, total: int) -> np.ndarray:
    """Extend a (k, width) uint8 block to (total, width) with parity rows."""
    data = np.asarray(data, dtype=np.uint8)
    k, width = data.shape
    if not 1 <= k <= total <= 255:
        raise ValueError(f"need 1 <= k <= total <= 255, got k={k}, total={total}")
    out = np.zeros((total, width), dtype=np.uint8)
    out[:k] = data
    sources = tuple(range(k))
    rows = [data[u] for u in range(k)]
    for target in range(k, total):
        out[target] = _evaluate(sources, rows, target)
    return out


def recover_block(shares: dict[int, np.ndarray], k: int, total: int) -> np.ndarray:
    """Recover the (k, width) data block from any >= k coded rows.

    `shares` maps row index (0-based point) to its byte row. Extra rows
    beyond k are used to verify consistency; a mismatch raises ValueError.
    """
    if not 1 <= k <= total <= 255:
        raise ValueError(f"need 1 <= k <= total <= 255, got k={k}, total={total}")
    if len(shares) < k:
        raise ValueError(f"need at least {k} rows to recover, got {len(shares)}")
    for point in shares:
        if not 0 <= point < total:
            raise ValueError(f"row index {point} outside 0..{total - 1}")
    chosen = tuple(sorted(shares)[:k])
    rows = [np.asarray(shares[point], dtype=np.uint8) for point in chosen]
    width = rows[0].shape[0]
    data = np.zeros((k, width), dtype=np.uint8)
    for target in range(k):
        if target in shares:
            data[target] = shares[target]
        else:
            data[target] = _evaluate(chosen, rows, target)
    for point, row in shares.items():
        if point in chosen or point < k:
            continue
        if not np.array_equal(_evaluate(tuple(range(k)), list(data), point), row):
            raise ValueError(f"parity row {point} is inconsistent with the recovered data")
    return data
