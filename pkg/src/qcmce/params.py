"""System parameter sets for the QC-LDPC McEliece scheme."""
from __future__ import annotations

from dataclasses import asdict, dataclass


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SystemParams:
    """Code and key parameters.

    ``n0`` circulant blocks of size ``p`` per row of H, each of column weight
    ``d_v``; ``m`` is the row/column weight of Q and ``t_prime`` the number of
    intentional errors added at encryption.
    """

    n0: int
    d_v: int
    p: int
    m: int
    t_prime: int

    @property
    def k0(self) -> int:
        return self.n0 - 1

    @property
    def n(self) -> int:
        return self.n0 * self.p

    @property
    def k(self) -> int:
        return self.k0 * self.p

    @property
    def d_c(self) -> int:
        return self.n0 * self.d_v

    @property
    def t(self) -> int:
        """Error weight the secret code must correct after multiplication by Q."""
        return self.t_prime * self.m

    @property
    def rate(self) -> float:
        return self.k0 / self.n0

    @property
    def key_bits(self) -> int:
        return self.k0 * self.n0 * self.p

    def validate(self) -> "SystemParams":
        if self.n0 < 2:
            raise ParameterError("n0 must be at least 2")
        if self.d_v < 1:
            raise ParameterError("d_v must be positive")
        if self.m < 1:
            raise ParameterError("m must be at least 1")
        if self.t_prime < 0:
            raise ParameterError("t' must be non-negative")
        if self.p <= self.d_c * self.m:
            raise ParameterError(f"p={self.p} must exceed d_c*m={self.d_c * self.m}")
        if self.t_prime > self.n:
            raise ParameterError("t' exceeds the code length")
        if self.n0 > 255 or self.d_v > 255 or self.m > 255 or self.t_prime > 0xFFFF or self.p >= 1 << 32:
            raise ParameterError("parameters exceed the key-file field widths")
        return self

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(k0=self.k0, n=self.n, k=self.k, d_c=self.d_c, t=self.t, rate=self.rate)
        return d


PRESETS: dict[int, SystemParams] = {
    1: SystemParams(n0=4, d_v=13, p=4096, m=7, t_prime=27),
    2: SystemParams(n0=3, d_v=13, p=8192, m=11, t_prime=40),
    3: SystemParams(n0=3, d_v=15, p=16384, m=13, t_prime=60),
}

TOY = SystemParams(n0=4, d_v=3, p=64, m=3, t_prime=2)


def preset(system: int) -> SystemParams:
    try:
        return PRESETS[int(system)]
    except (KeyError, ValueError):
        raise ParameterError(f"unknown system {system!r}; choose one of {sorted(PRESETS)}") from None
