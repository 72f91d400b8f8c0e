"""Binary key and message files.

Key file layout (little-endian)::

    "QCLM" | version u8 | kind u8 | variant u8 | n0 u8 | d_v u8 | m u8 | t' u16 | p u32
    payload: first row of every circulant block, ceil(p/8) bytes each,
             bit j of byte i = coefficient 8i+j, blocks in row-major order

Public keys carry G' (k0 x n0 blocks); private keys carry H (1 x n0), S
(k0 x k0) and Q (n0 x n0).
"""
from __future__ import annotations

import enum
import struct
from pathlib import Path

import numpy as np

from .circulant import QcBlockMatrix
from .cryptosystem import KeyVariant, PrivateKey, PublicKey, private_key_from_parts
from .params import ParameterError, SystemParams

MAGIC = b"QCLM"
VERSION = 1
_HEADER = struct.Struct("<4sBBBBBBHI")
HEADER_SIZE = _HEADER.size


class KeyFormatError(ValueError):
    pass


class KeyKind(enum.IntEnum):
    PUBLIC = 0
    PRIVATE = 1


def _row_bytes(p: int) -> int:
    return (p + 7) // 8


def _pack_blocks(m: QcBlockMatrix) -> bytes:
    nb = _row_bytes(m.p)
    return b"".join(v.to_bytes(nb, "little") for row in m.raw() for v in row)


def _unpack_blocks(buf: bytes, offset: int, rows0: int, cols0: int, p: int) -> tuple[QcBlockMatrix, int]:
    nb = _row_bytes(p)
    limit = 1 << p
    rows = []
    for _ in range(rows0):
        row = []
        for _ in range(cols0):
            v = int.from_bytes(buf[offset:offset + nb], "little")
            if v >= limit:
                raise KeyFormatError("padding bits beyond p are set")
            row.append(v)
            offset += nb
        rows.append(row)
    return QcBlockMatrix(p, rows), offset


def payload_size(params: SystemParams, kind: KeyKind) -> int:
    n0, k0 = params.n0, params.k0
    blocks = k0 * n0 if kind is KeyKind.PUBLIC else n0 + k0 * k0 + n0 * n0
    return blocks * _row_bytes(params.p)


def _header(params: SystemParams, kind: KeyKind, variant: KeyVariant) -> bytes:
    return _HEADER.pack(MAGIC, VERSION, int(kind), variant.code, params.n0, params.d_v, params.m,
                        params.t_prime, params.p)


def _parse_header(data: bytes, expect: KeyKind | None):
    if len(data) < HEADER_SIZE:
        raise KeyFormatError(f"file too short for a key header ({len(data)} bytes)")
    magic, version, kind, variant, n0, d_v, m, tp, p = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise KeyFormatError("bad magic")
    if version != VERSION:
        raise KeyFormatError(f"unsupported version {version}")
    try:
        kind = KeyKind(kind)
        variant = KeyVariant.from_code(variant)
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from None
    if expect is not None and kind is not expect:
        raise KeyFormatError(f"expected a {expect.name.lower()} key, found {kind.name.lower()}")
    params = SystemParams(n0, d_v, p, m, tp)
    try:
        params.validate()
    except ParameterError as exc:
        raise KeyFormatError(f"invalid parameters in header: {exc}") from None
    want = HEADER_SIZE + payload_size(params, kind)
    if len(data) != want:
        raise KeyFormatError(f"key file has {len(data)} bytes, expected {want}")
    return kind, variant, params


def dump_public(pk: PublicKey) -> bytes:
    return _header(pk.params, KeyKind.PUBLIC, pk.variant) + _pack_blocks(pk.Gpub)


def dump_private(sk: PrivateKey) -> bytes:
    body = _pack_blocks(sk.H) + _pack_blocks(sk.S) + _pack_blocks(sk.Q)
    return _header(sk.params, KeyKind.PRIVATE, sk.variant) + body


def load_public(data: bytes) -> PublicKey:
    _, variant, params = _parse_header(data, KeyKind.PUBLIC)
    g, _ = _unpack_blocks(data, HEADER_SIZE, params.k0, params.n0, params.p)
    return PublicKey(params, g, variant)


def load_private(data: bytes) -> PrivateKey:
    _, variant, params = _parse_header(data, KeyKind.PRIVATE)
    p, n0, k0 = params.p, params.n0, params.k0
    h, off = _unpack_blocks(data, HEADER_SIZE, 1, n0, p)
    s, off = _unpack_blocks(data, off, k0, k0, p)
    q, _ = _unpack_blocks(data, off, n0, n0, p)
    try:
        return private_key_from_parts(params, h, s, q, variant)
    except ArithmeticError as exc:
        raise KeyFormatError(f"private key is not usable: {exc}") from None


def public_payload(pk: PublicKey) -> bytes:
    return dump_public(pk)[HEADER_SIZE:]


def save_key(key: PublicKey | PrivateKey, path: str | Path) -> int:
    data = dump_public(key) if isinstance(key, PublicKey) else dump_private(key)
    Path(path).write_bytes(data)
    return len(data)


def pack_bits(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, nbits: int) -> np.ndarray:
    if len(data) != (nbits + 7) // 8:
        raise KeyFormatError(f"message has {len(data)} bytes, expected {(nbits + 7) // 8}")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bits[nbits:].any():
        raise KeyFormatError("padding bits are set")
    return bits[:nbits].copy()
