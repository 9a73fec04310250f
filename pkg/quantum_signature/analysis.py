# Copyright 2026 The quantum-signature Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Closed-form security estimates of the protocol and their brute-force oracles.

Probabilities are computed as exact fractions over Python integers whenever the
formula allows it; floats only appear when rendering.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from quantum_signature.shared_libraries.errors import DomainError
from quantum_signature.shared_libraries.types import (
    HashAlgorithmId,
    HashSuiteConfig,
    VerificationThreshold,
)
from quantum_signature.tools.hash_suite import strength_lookup

_LN2 = math.log(2)

# Above this exponent 1 - e^-r equals 1.0 in double precision.
_SATURATED = 800

# Exhaustive enumeration stays cheap up to this many labels.
_ENUMERATION_LIMIT = 16
_BRUTEFORCE_LIMIT = 40


class ProbabilityValue(BaseModel):
    """A probability with its base-2 logarithm; exact fractions keep numerator and denominator."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0.0, le=1.0)
    log2_value: float
    numerator: int | None = None
    denominator: int | None = None

    @classmethod
    def from_fraction(cls, p: Fraction) -> ProbabilityValue:
        if not 0 <= p <= 1:
            raise DomainError(f"{p} is not a probability")
        if p == 0:
            log2_value = -math.inf
        else:
            log2_value = math.log2(p.numerator) - math.log2(p.denominator)
        return cls(
            value=float(p),
            log2_value=log2_value,
            numerator=p.numerator,
            denominator=p.denominator,
        )

    @property
    def fraction(self) -> Fraction | None:
        if self.numerator is None or self.denominator is None:
            return None
        return Fraction(self.numerator, self.denominator)

    @property
    def is_exact(self) -> bool:
        return self.numerator is not None


class CollisionParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    input_length_x_bits: int = Field(ge=0)
    digest_length_k_bits: int = Field(ge=1)


class SecondPreimageParams(BaseModel):
    """d: digest bits, D: input bits, B: the hash's input block bits."""

    model_config = ConfigDict(frozen=True)

    digest_d_bits: int = Field(ge=1)
    input_D_bits: int = Field(ge=1)
    hash_block_B_bits: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_sizes(self) -> SecondPreimageParams:
        if self.input_D_bits < self.hash_block_B_bits:
            raise ValueError("the input cannot be shorter than one hash block (D >= B)")
        return self


def _require_even_blocks(n: int) -> None:
    if n < 2 or n % 2:
        raise DomainError(f"n = {n} must be even and at least 2")


def p_guess(l_bits: int) -> ProbabilityValue:
    """Chance of guessing all l/2 unknown key bits: 2^(-l/2)."""
    if l_bits < 2 or l_bits % 2:
        raise DomainError(f"l = {l_bits} must be even and at least 2")
    return ProbabilityValue.from_fraction(Fraction(1, 2 ** (l_bits // 2)))


def p_guess_threshold(l_bits: int, n_blocks: int, t_c: int) -> ProbabilityValue:
    """Forgery by guessing when Charlie tolerates t_c wrong blocks among Bob's n/2 guesses."""
    _require_even_blocks(n_blocks)
    if l_bits % n_blocks:
        raise DomainError(f"l = {l_bits} does not split into {n_blocks} blocks")
    if t_c < 0:
        raise DomainError(f"t_c = {t_c} must be non-negative")
    guesses = n_blocks // 2
    hit = Fraction(1, 2 ** (l_bits // n_blocks))
    p = sum(
        (
            math.comb(guesses, wrong) * (1 - hit) ** wrong * hit ** (guesses - wrong)
            for wrong in range(min(t_c, guesses) + 1)
        ),
        Fraction(0),
    )
    return ProbabilityValue.from_fraction(p)


def p_rep_closed_form(n: int, e: int) -> ProbabilityValue:
    """Repudiation success with e corrupted k_2 blocks: prod (n-2i) / (2(n-i)), i < e."""
    _require_even_blocks(n)
    if e < 1:
        raise DomainError(f"e = {e} must be at least 1")
    if e > n // 2:
        return ProbabilityValue.from_fraction(Fraction(0))
    p = Fraction(1)
    for i in range(e):
        p *= Fraction(n - 2 * i, 2 * (n - i))
    return ProbabilityValue.from_fraction(p)


def p_rep_bruteforce(n: int, e: int) -> ProbabilityValue:
    """Share of e-subsets of the n labels that avoid all n/2 labels Bob knows."""
    _require_even_blocks(n)
    if n > _BRUTEFORCE_LIMIT:
        raise DomainError(f"brute force is limited to n <= {_BRUTEFORCE_LIMIT}")
    if not 1 <= e <= n:
        raise DomainError(f"e = {e} must lie in 1..{n}")
    if n <= _ENUMERATION_LIMIT:
        unknown = set(range(n // 2, n))
        subsets = list(itertools.combinations(range(n), e))
        good = sum(1 for subset in subsets if unknown.issuperset(subset))
        return ProbabilityValue.from_fraction(Fraction(good, len(subsets)))
    return ProbabilityValue.from_fraction(Fraction(math.comb(n // 2, e), math.comb(n, e)))


def _hypergeometric_cdf(n: int, e: int, t: int) -> Fraction:
    """P(X <= t), X = corrupted blocks among the n/2 k_2 labels Bob knows."""
    half = n // 2
    total = math.comb(n, e)
    hits = sum(math.comb(half, x) * math.comb(half, e - x) for x in range(min(t, e) + 1))
    return Fraction(hits, total)


def p_rep_threshold(n: int, e: int, t_b: int) -> ProbabilityValue:
    """Bob tolerates t_b mismatches: hypergeometric tail; t_b = 0 is the closed form."""
    _require_even_blocks(n)
    if not 1 <= e <= n:
        raise DomainError(f"e = {e} must lie in 1..{n}")
    if t_b < 0:
        raise DomainError(f"t_b = {t_b} must be non-negative")
    return ProbabilityValue.from_fraction(_hypergeometric_cdf(n, e, t_b))


def p_rep_protocol(n: int, e: int, v_b: float, v_c: float) -> ProbabilityValue:
    """Bob accepts and Charlie rejects, both verifying 3n/2 known blocks."""
    _require_even_blocks(n)
    if not 1 <= e <= n:
        raise DomainError(f"e = {e} must lie in 1..{n}")
    known = 3 * n // 2
    t_b = VerificationThreshold(max_mismatch_fraction=v_b).allowed_mismatches(known)
    t_c = VerificationThreshold(max_mismatch_fraction=v_c).allowed_mismatches(known)
    if e <= t_c:
        return ProbabilityValue.from_fraction(Fraction(0))
    return ProbabilityValue.from_fraction(_hypergeometric_cdf(n, e, t_b))


def _one_minus_exp(r: Fraction) -> ProbabilityValue:
    """1 - e^(-r) for an exact r >= 0, without overflow or loss for tiny r."""
    if r == 0:
        return ProbabilityValue(value=0.0, log2_value=-math.inf)
    if r > _SATURATED:
        return ProbabilityValue(value=1.0, log2_value=0.0)
    rf = float(r)
    if rf < 1e-8:
        # 1 - e^-r = r (1 - r/2 + ...)
        log2_r = math.log2(r.numerator) - math.log2(r.denominator)
        return ProbabilityValue(value=rf, log2_value=log2_r + math.log1p(-rf / 2) / _LN2)
    value = -math.expm1(-rf)
    return ProbabilityValue(value=value, log2_value=math.log2(value))


def p_collision(params: CollisionParams) -> ProbabilityValue:
    """1 - exp[-(2^x + 1)^2 / (2 (2^k + 1 - 2^x))], evaluated as printed."""
    x, k = params.input_length_x_bits, params.digest_length_k_bits
    denominator = 2 * (2**k + 1 - 2**x)
    if denominator <= 0:
        raise DomainError(f"2^x must stay below 2^k + 1 (x = {x}, k = {k})")
    return _one_minus_exp(Fraction((2**x + 1) ** 2, denominator))


def birthday_approximation(params: CollisionParams) -> ProbabilityValue:
    """Textbook birthday bound 1 - exp(-2^(2x-k-1)), as a cross-check of p_collision."""
    exponent = 2 * params.input_length_x_bits - params.digest_length_k_bits - 1
    if exponent > 10:
        return ProbabilityValue(value=1.0, log2_value=0.0)
    if exponent < -1000:
        return ProbabilityValue(value=2.0**exponent, log2_value=float(exponent))
    return _one_minus_exp(Fraction(2) ** exponent)


def second_preimage_strength(
    params: SecondPreimageParams, alg: HashAlgorithmId | None = None
) -> int:
    """2PR = d - log2(D/B) bits; input-independent for SHA2-384 and the Keccak family."""
    d = params.digest_d_bits
    if alg is not None and not alg.is_sha2:
        if alg.is_xof:
            return min(d, alg.capacity_bits or d)
        return d
    if alg == HashAlgorithmId.SHA2_384:
        return d
    log_ratio = math.log2(params.input_D_bits) - math.log2(params.hash_block_B_bits)
    return math.floor(d - log_ratio)


def block_preimage_strength(key_bits: int, n_blocks: int) -> int:
    """Brute-force work, in bits, to recover one block of l/n bits."""
    if n_blocks < 1 or key_bits % n_blocks:
        raise DomainError(f"{key_bits} bits do not split into {n_blocks} blocks")
    return key_bits // n_blocks


class ProtocolStrength(BaseModel):
    model_config = ConfigDict(frozen=True)

    message_hash_bits: int
    block_hash_bits: int
    block_preimage_bits: int

    @property
    def overall_bits(self) -> int:
        return min(self.message_hash_bits, self.block_hash_bits, self.block_preimage_bits)

    @property
    def weakest(self) -> str:
        parts = {
            "message_hash": self.message_hash_bits,
            "block_hash": self.block_hash_bits,
            "block_preimage": self.block_preimage_bits,
        }
        return min(parts, key=parts.__getitem__)


def protocol_strength(suite: HashSuiteConfig) -> ProtocolStrength:
    """The protocol is only as strong as its weakest element."""
    message = strength_lookup(suite.message_hash, suite.message_delta_bits)
    block = strength_lookup(suite.block_hash, suite.block_delta_bits)
    return ProtocolStrength(
        message_hash_bits=message.overall_strength,
        block_hash_bits=block.overall_strength,
        block_preimage_bits=suite.combined_block_bits,
    )


def work_factor(strength_bits: int) -> str:
    if strength_bits < 0:
        raise DomainError(f"strength must be non-negative, got {strength_bits}")
    if strength_bits <= 16:
        return f"2^{strength_bits} ({2**strength_bits})"
    log10 = strength_bits * math.log10(2)
    exponent = math.floor(log10)
    mantissa = round(10 ** (log10 - exponent), 1)
    if mantissa >= 10:
        mantissa /= 10
        exponent += 1
    return f"2^{strength_bits} (≈ {mantissa:.1f}×10^{exponent})"
