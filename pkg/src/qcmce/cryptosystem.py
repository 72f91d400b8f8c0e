"""Key generation, encryption and decryption for the QC-LDPC McEliece scheme.

Public key: ``G' = S^-1 G Q^-1``.  Encryption adds ``t'`` random errors to
``u G'``; decryption multiplies by Q (amplifying the error weight to at most
``t = t' m``), decodes the secret LDPC code, reads ``u S^-1`` off the
systematic part and multiplies by S.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .circulant import QcBlockMatrix, RingPoly, Singular, qc_inv, vec_mul
from .construction import ExhaustedRetries, QcLdpcCode, derive_generator, sample_code
from .decoder import DecoderConfig, SumProductDecoder
from .params import SystemParams


class DecodeFailure(RuntimeError):
    """Belief propagation did not converge on the transformed ciphertext."""


class KeyVariant(enum.Enum):
    HARDENED = "hardened"
    WEAK_OTD = "weak_otd"
    PERMUTATION = "permutation"

    @property
    def code(self) -> int:
        return list(KeyVariant).index(self)

    @classmethod
    def from_code(cls, code: int) -> "KeyVariant":
        try:
            return list(cls)[code]
        except IndexError:
            raise ValueError(f"unknown key variant code {code}") from None

    @classmethod
    def parse(cls, name: str | "KeyVariant") -> "KeyVariant":
        if isinstance(name, KeyVariant):
            return name
        return cls(name.replace("-", "_"))


@dataclass(frozen=True)
class PublicKey:
    params: SystemParams
    Gpub: QcBlockMatrix
    variant: KeyVariant = KeyVariant.HARDENED

    @property
    def size_bytes(self) -> int:
        return self.Gpub.rows0 * self.Gpub.cols0 * ((self.params.p + 7) // 8)


@dataclass
class PrivateKey:
    params: SystemParams
    code: QcLdpcCode
    S: QcBlockMatrix
    Q: QcBlockMatrix
    variant: KeyVariant = KeyVariant.HARDENED
    decoder_config: DecoderConfig | None = field(default=None, compare=False)

    @property
    def H(self) -> QcBlockMatrix:
        return self.code.H

    @cached_property
    def decoder(self) -> SumProductDecoder:
        cfg = self.decoder_config or DecoderConfig(t=self.params.t)
        return SumProductDecoder(self.code.H, cfg)

    @cached_property
    def public_parity_check(self) -> QcBlockMatrix:
        """H' = H Q^T, a parity-check matrix of the public code."""
        return self.code.H @ self.Q.transpose()

    def public_key(self) -> PublicKey:
        gpub = qc_inv(self.S) @ self.code.G @ qc_inv(self.Q)
        return PublicKey(self.params, gpub, self.variant)


@dataclass(frozen=True)
class Ciphertext:
    bits: np.ndarray


def _random_permutation_sum(n0: int, m: int, rng: np.random.Generator) -> np.ndarray:
    w = np.zeros((n0, n0), dtype=np.int64)
    for _ in range(m):
        w[np.arange(n0), rng.permutation(n0)] += 1
    return w


def _sample_hardened_q(params: SystemParams, rng: np.random.Generator) -> QcBlockMatrix:
    n0, p = params.n0, params.p
    while True:
        w = _random_permutation_sum(n0, params.m, rng)
        # reject m*P patterns: those are block permutations of single blocks
        if np.count_nonzero(w) > n0 or n0 == 1 or params.m == 1:
            break
    return QcBlockMatrix(p, [[RingPoly.random_weight(p, int(w[i, j]), rng) for j in range(n0)]
                             for i in range(n0)])


def _sample_dense_s(params: SystemParams, rng: np.random.Generator) -> QcBlockMatrix:
    k0, p = params.k0, params.p
    return QcBlockMatrix(p, [[RingPoly.random(p, rng) for _ in range(k0)] for _ in range(k0)])


def _sample_weak_s(params: SystemParams, rng: np.random.Generator) -> QcBlockMatrix:
    k0, p = params.k0, params.p
    pattern = rng.integers(0, 2, size=(k0, k0))
    return QcBlockMatrix(p, [[RingPoly.random_weight(p, params.m, rng) if pattern[i, j] else RingPoly.zero(p)
                              for j in range(k0)] for i in range(k0)])


def _sample_weak_q(params: SystemParams, rng: np.random.Generator) -> QcBlockMatrix:
    n0, p = params.n0, params.p
    return QcBlockMatrix(p, [[RingPoly.random_weight(p, params.m, rng) if i == j else RingPoly.zero(p)
                              for j in range(n0)] for i in range(n0)])


def _sample_permutation_q(params: SystemParams, rng: np.random.Generator) -> QcBlockMatrix:
    n0, p = params.n0, params.p
    perm = rng.permutation(n0)
    shifts = rng.integers(0, p, size=n0)
    return QcBlockMatrix(p, [[RingPoly.monomial(p, int(shifts[i])) if j == perm[i] else RingPoly.zero(p)
                              for j in range(n0)] for i in range(n0)])


_SAMPLERS = {
    KeyVariant.HARDENED: (_sample_dense_s, _sample_hardened_q),
    KeyVariant.WEAK_OTD: (_sample_weak_s, _sample_weak_q),
    KeyVariant.PERMUTATION: (_sample_dense_s, _sample_permutation_q),
}


def _invertible(sampler, params, rng, max_attempts) -> tuple[QcBlockMatrix, QcBlockMatrix]:
    for _ in range(max_attempts):
        a = sampler(params, rng)
        try:
            return a, qc_inv(a)
        except Singular:
            continue
    raise ExhaustedRetries(f"{sampler.__name__}: no invertible sample in {max_attempts} attempts")


def keygen(params: SystemParams, variant: KeyVariant | str = KeyVariant.HARDENED,
           rng: np.random.Generator | int | None = None,
           max_attempts: int = 64) -> tuple[PrivateKey, PublicKey]:
    """Generate a key pair.

    The permutation variant forces ``m = 1``; the returned keys carry the
    effective parameters.
    """
    variant = KeyVariant.parse(variant)
    rng = np.random.default_rng(rng)
    if variant is KeyVariant.PERMUTATION:
        params = replace(params, m=1)
    params.validate()
    code = sample_code(params, rng)
    s_sampler, q_sampler = _SAMPLERS[variant]
    s, s_inv = _invertible(s_sampler, params, rng, max_attempts)
    q, q_inv = _invertible(q_sampler, params, rng, max_attempts)
    gpub = s_inv @ code.G @ q_inv
    return PrivateKey(params, code, s, q, variant), PublicKey(params, gpub, variant)


def private_key_from_parts(params: SystemParams, h: QcBlockMatrix, s: QcBlockMatrix, q: QcBlockMatrix,
                           variant: KeyVariant) -> PrivateKey:
    code = QcLdpcCode(params, h, derive_generator(h))
    return PrivateKey(params, code, s, q, variant)


def random_error(n: int, weight: int, rng: np.random.Generator) -> np.ndarray:
    if weight > n:
        raise ValueError(f"error weight {weight} exceeds length {n}")
    e = np.zeros(n, dtype=np.uint8)
    e[rng.choice(n, size=weight, replace=False)] = 1
    return e


def encrypt(pk: PublicKey, u: np.ndarray, rng: np.random.Generator | int | None = None) -> Ciphertext:
    u = np.asarray(u, dtype=np.uint8)
    if u.size != pk.params.k:
        raise ValueError(f"cleartext has {u.size} bits, expected k={pk.params.k}")
    rng = np.random.default_rng(rng)
    e = random_error(pk.params.n, pk.params.t_prime, rng)
    return Ciphertext(vec_mul(u, pk.Gpub) ^ e)


def decrypt(sk: PrivateKey, x: Ciphertext | np.ndarray) -> np.ndarray:
    bits = x.bits if isinstance(x, Ciphertext) else np.asarray(x, dtype=np.uint8)
    if bits.size != sk.params.n:
        raise ValueError(f"ciphertext has {bits.size} bits, expected n={sk.params.n}")
    outcome = sk.decoder.decode(vec_mul(bits, sk.Q))
    if not outcome.success:
        raise DecodeFailure(f"no convergence after {outcome.iterations_used} iterations")
    return vec_mul(outcome.codeword[: sk.params.k], sk.S)


def error_amplification_check(sk: PrivateKey, e: np.ndarray) -> int:
    """Weight of e Q, the error the secret decoder actually faces."""
    return int(vec_mul(np.asarray(e, dtype=np.uint8), sk.Q).sum())


def keys_consistent(sk: PrivateKey, pk: PublicKey) -> bool:
    """G' (H Q^T)^T == 0."""
    return (pk.Gpub @ sk.public_parity_check.transpose()).is_zero()
