"""Monte Carlo frame-error simulation over the McEliece channel."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .construction import QcLdpcCode
from .cryptosystem import random_error
from .decoder import DecoderConfig, SumProductDecoder


def mceliece_channel(c: np.ndarray, t: int, rng: np.random.Generator) -> np.ndarray:
    """Flip exactly t uniformly chosen positions of c."""
    c = np.asarray(c, dtype=np.uint8)
    if not 0 <= t <= c.size:
        raise ValueError(f"t={t} outside [0, {c.size}]")
    return c ^ random_error(c.size, t, rng)


@dataclass
class SimReport:
    frames_run: int
    frame_errors: int
    bit_errors: int
    n: int
    iterations_total: int
    wall_time: float = 0.0

    @property
    def FER(self) -> float:
        return self.frame_errors / self.frames_run if self.frames_run else 0.0

    @property
    def BER(self) -> float:
        return self.bit_errors / (self.frames_run * self.n) if self.frames_run else 0.0

    @property
    def I_ave(self) -> float:
        return self.iterations_total / self.frames_run if self.frames_run else 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(FER=self.FER, BER=self.BER, I_ave=self.I_ave)
        return d


def _frame(code: QcLdpcCode, decoder: SumProductDecoder, t: int, seed: int, index: int):
    rng = np.random.default_rng([seed, index])
    u = rng.integers(0, 2, size=code.k, dtype=np.uint8)
    c = code.encode(u)
    out = decoder.decode(mceliece_channel(c, t, rng))
    # a converged but wrong codeword is still a frame error
    wrong = int(np.count_nonzero(out.codeword != c))
    return wrong, out.iterations_used


def _run_range(code, cfg, t, seed, start, stop):
    dec = SumProductDecoder(code.H, cfg)
    errs = bits = iters = 0
    for i in range(start, stop):
        wrong, it = _frame(code, dec, t, seed, i)
        errs += wrong > 0
        bits += wrong
        iters += it
    return errs, bits, iters


def run_fer(code: QcLdpcCode, t: int, frames: int, cfg: DecoderConfig | None = None,
            seed: int = 0, workers: int = 1) -> SimReport:
    """Decode ``frames`` random codewords hit by exactly t errors.

    Frame i draws from the stream ``(seed, i)``, so the report does not
    depend on ``workers``.
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")
    cfg = cfg or DecoderConfig(t=t)
    start = time.perf_counter()
    if workers <= 1:
        parts = [_run_range(code, cfg, t, seed, 0, frames)]
    else:
        bounds = np.linspace(0, frames, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            futs = [pool.submit(_run_range, code, cfg, t, seed, int(a), int(b))
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            parts = [f.result() for f in futs]
    errs, bits, iters = (sum(x) for x in zip(*parts))
    return SimReport(frames, errs, bits, code.n, iters, time.perf_counter() - start)


def sweep(code: QcLdpcCode, ts, frames: int, cfg: DecoderConfig | None = None, seed: int = 0,
          workers: int = 1) -> list[tuple[int, SimReport]]:
    """One report per error weight; the decoder is told the actual t of each point."""
    out = []
    for t in ts:
        c = DecoderConfig(**{**asdict(cfg), "t": t}) if cfg else DecoderConfig(t=t)
        out.append((t, run_fer(code, t, frames, c, seed, workers)))
    return out
