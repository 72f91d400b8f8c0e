"""Log-domain sum-product (belief propagation) decoding with a flooding schedule."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circulant import QcBlockMatrix, vec_mul


@dataclass(frozen=True)
class DecoderConfig:
    max_iterations: int = 100
    t: int = 0
    early_stop: bool = True
    quant_bits: int | None = None
    llr_clip: float = 25.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.quant_bits is not None and self.quant_bits < 1:
            raise ValueError("quant_bits must be >= 1")


@dataclass
class DecodeOutcome:
    codeword: np.ndarray
    iterations_used: int
    success: bool


def syndrome(h: QcBlockMatrix, v: np.ndarray) -> np.ndarray:
    """H v^T over GF(2), returned as a flat bit vector of length rows0*p."""
    v = np.asarray(v, dtype=np.uint8)
    if v.size != h.cols0 * h.p:
        raise ValueError(f"vector length {v.size} != n = {h.cols0 * h.p}")
    return vec_mul(v, h.transpose())


def quantize(x: np.ndarray, bits: int, max_abs: float) -> np.ndarray:
    """Uniform saturating quantizer with 2**bits - 1 symmetric levels."""
    top = 2 ** (bits - 1) - 1
    if top == 0:
        return np.sign(x) * max_abs
    step = max_abs / top
    return np.clip(np.rint(x / step), -top, top) * step


def _phi(x: np.ndarray) -> np.ndarray:
    # phi(x) = -ln tanh(x/2); self-inverse on (0, inf)
    x = np.clip(x, 1e-12, 50.0)
    return -np.log(np.tanh(x / 2.0))


class SumProductDecoder:
    """Decoder bound to one parity-check matrix.

    The Tanner graph is flattened to an edge list sorted by check node, so a
    check-node update is a segmented reduction and a variable-node update is a
    ``bincount``.  One instance holds no per-frame state between calls.
    """

    def __init__(self, h: QcBlockMatrix, config: DecoderConfig | None = None):
        self.h = h
        self.config = config or DecoderConfig()
        p = h.p
        rows, cols = [], []
        for bi, brow in enumerate(h.blocks()):
            r = np.arange(p)
            for bj, poly in enumerate(brow):
                for s in poly.support():
                    rows.append(bi * p + r)
                    cols.append(bj * p + (r + s) % p)
        self.n = h.cols0 * p
        self.m = h.rows0 * p
        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        order = np.lexsort((cols, rows))
        self.edge_rows = rows[order]
        self.edge_cols = cols[order]
        counts = np.bincount(self.edge_rows, minlength=self.m)
        if np.any(counts == 0):
            raise ValueError("every check node needs at least one edge")
        self.row_starts = np.concatenate([[0], np.cumsum(counts)[:-1]])

    def channel_llr(self, x: np.ndarray, t: int | None = None) -> np.ndarray:
        """Per-bit LLR of the McEliece channel seen as a BSC with crossover t/n."""
        t = self.config.t if t is None else t
        clip = self.config.llr_clip
        rho = min(max(t / self.n, 1e-12), 1 - 1e-12)
        l0 = float(np.clip(np.log((1 - rho) / rho), -clip, clip))
        return np.where(np.asarray(x, dtype=np.uint8) == 1, -l0, l0)

    def check_parity(self, bits: np.ndarray) -> np.ndarray:
        return np.bitwise_xor.reduceat(bits[self.edge_cols], self.row_starts)

    def decode(self, x: np.ndarray) -> DecodeOutcome:
        cfg = self.config
        x = np.asarray(x, dtype=np.uint8)
        if x.size != self.n:
            raise ValueError(f"received word has length {x.size}, expected {self.n}")
        clip = cfg.llr_clip
        lch = self.channel_llr(x)
        if cfg.quant_bits:
            lch = quantize(lch, cfg.quant_bits, clip)
        rows, cols, starts = self.edge_rows, self.edge_cols, self.row_starts
        v2c = lch[cols]
        hard = x.copy()
        it = 0
        for it in range(1, cfg.max_iterations + 1):
            mag = _phi(np.abs(v2c))
            neg = (v2c < 0).astype(np.uint8)
            row_sum = np.add.reduceat(mag, starts)
            row_neg = np.bitwise_xor.reduceat(neg, starts)
            c2v = _phi(row_sum[rows] - mag)
            c2v = np.where(row_neg[rows] ^ neg, -c2v, c2v)
            c2v = np.clip(c2v, -clip, clip)
            if cfg.quant_bits:
                c2v = quantize(c2v, cfg.quant_bits, clip)
            total = lch + np.bincount(cols, weights=c2v, minlength=self.n)
            v2c = np.clip(total[cols] - c2v, -clip, clip)
            # ties keep the received bit
            hard = np.where(total < 0, 1, np.where(total > 0, 0, x)).astype(np.uint8)
            if cfg.early_stop and not self.check_parity(hard).any():
                return DecodeOutcome(hard, it, True)
        success = not self.check_parity(hard).any()
        return DecodeOutcome(hard, it, success)


def decode(h: QcBlockMatrix, x: np.ndarray, cfg: DecoderConfig) -> DecodeOutcome:
    return SumProductDecoder(h, cfg).decode(x)
