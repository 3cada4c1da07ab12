"""Global input sampling: uniform and bituniform draws over the integer
type hierarchy, with optional compatible-type sampling (CTS) per argument.

Plain uniform sampling over a wide integer domain almost always yields huge
magnitudes; bituniform sampling first draws a bit length and then a value of
that length, spreading the mass over magnitudes.  CTS additionally picks a
concrete compatible type (down to Bool) per argument before sampling.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .suts import SutDescriptor
from .values import InputTuple, Value

DEFAULT_BIG_INT_BIT_CAP = 128


@dataclass(frozen=True)
class TypeDomain:
    name: str
    signedness: str   # unsigned | signed | boolean | big
    bit_width: int

    def bounds(self) -> tuple:
        """Representable range (inclusive)."""
        if self.signedness == "boolean":
            return (0, 1)
        if self.signedness == "unsigned":
            return (0, (1 << self.bit_width) - 1)
        # signed and capped big integers
        half = 1 << (self.bit_width - 1)
        return (-half, half - 1)

    def contains(self, v: int) -> bool:
        lo, hi = self.bounds()
        return lo <= v <= hi


def _big(cap: int) -> TypeDomain:
    return TypeDomain("BigInt", "big", cap)


@lru_cache(maxsize=None)
def compatible_types(abstract: str, big_int_bit_cap: int = DEFAULT_BIG_INT_BIT_CAP) -> tuple:
    """Concrete domains compatible with an abstract integer type, in fixed order."""
    if abstract == "Integer":
        return (
            TypeDomain("UInt8", "unsigned", 8),
            TypeDomain("UInt64", "unsigned", 64),
            TypeDomain("UInt32", "unsigned", 32),
            TypeDomain("UInt16", "unsigned", 16),
            TypeDomain("UInt128", "unsigned", 128),
            TypeDomain("Int8", "signed", 8),
            TypeDomain("Int64", "signed", 64),
            TypeDomain("Int32", "signed", 32),
            TypeDomain("Int16", "signed", 16),
            TypeDomain("Int128", "signed", 128),
            _big(big_int_bit_cap),
            TypeDomain("Bool", "boolean", 1),
        )
    if abstract == "Int16":
        return (
            TypeDomain("UInt8", "unsigned", 8),
            TypeDomain("Int8", "signed", 8),
            TypeDomain("Int16", "signed", 16),
            TypeDomain("Bool", "boolean", 1),
        )
    raise ValueError(f"no compatible type set for abstract type {abstract!r}")


@dataclass
class SamplerConfig:
    method: str = "bituniform"       # uniform | bituniform
    cts: bool = True
    big_int_bit_cap: int = DEFAULT_BIG_INT_BIT_CAP
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("uniform", "bituniform"):
            raise ValueError(f"unknown sampling method {self.method!r}")
        if self.big_int_bit_cap < 64:
            raise ValueError("big_int_bit_cap must be >= 64")


def sample_value(domain: TypeDomain, config: SamplerConfig, rng: random.Random) -> Value:
    """Draw one value from a concrete domain.

    Bituniform: bit length L uniform in 0..width-1, magnitude uniform in
    [2^(L-1), 2^L), then a uniform sign for signed/big domains.  The
    two's-complement extreme negative is never produced, so every value
    survives a +/-1 mutation inside the domain.
    """
    if domain.signedness == "boolean":
        return bool(rng.randrange(2))
    if config.method == "uniform":
        lo, hi = domain.bounds()
        return rng.randint(lo, hi)
    length = rng.randrange(domain.bit_width)
    magnitude = 0 if length == 0 else rng.randrange(1 << (length - 1), 1 << length)
    if domain.signedness in ("signed", "big") and rng.randrange(2):
        return -magnitude
    return magnitude


def sample_arguments(sut: SutDescriptor, config: SamplerConfig,
                     rng: random.Random) -> list:
    """Per-argument (value, domain) pairs; the domain feeds search truncation."""
    out = []
    for abstract in sut.argument_types:
        if config.cts:
            domain = rng.choice(compatible_types(abstract, config.big_int_bit_cap))
        else:
            domain = _big(config.big_int_bit_cap)
        out.append((sample_value(domain, config, rng), domain))
    return out


def sample_input(sut: SutDescriptor, config: SamplerConfig, rng: random.Random) -> InputTuple:
    """Draw one starting input for the detection loop."""
    return tuple(v for v, _ in sample_arguments(sut, config, rng))
