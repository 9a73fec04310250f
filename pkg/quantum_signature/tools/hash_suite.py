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

"""Wrapper around the NIST hash functions, the SHAKE XOFs and OTP encryption."""

import hashlib
import logging

from quantum_signature.shared_libraries.errors import (
    LengthMismatch,
    UnalignedLength,
    UnsupportedAlgorithm,
)
from quantum_signature.shared_libraries.types import (
    BitString,
    HashAlgorithmId,
    HashSuiteConfig,
    StrengthTriple,
)

logger = logging.getLogger(__name__)

# Fixed-output rows of the strength table: (CR, PR, 2PR lower, 2PR upper).
_FIXED_STRENGTHS: dict[HashAlgorithmId, tuple[int, int, int, int]] = {
    HashAlgorithmId.SHA2_224: (112, 224, 201, 224),
    HashAlgorithmId.SHA2_256: (128, 256, 201, 256),
    HashAlgorithmId.SHA2_384: (192, 384, 384, 384),
    HashAlgorithmId.SHA2_512: (256, 512, 394, 512),
    HashAlgorithmId.SHA3_224: (112, 224, 224, 224),
    HashAlgorithmId.SHA3_256: (128, 256, 256, 256),
    HashAlgorithmId.SHA3_384: (192, 384, 384, 384),
    HashAlgorithmId.SHA3_512: (256, 512, 512, 512),
}


def _as_bytes(data: BitString | bytes) -> bytes:
    if isinstance(data, BitString):
        if not data.is_byte_aligned:
            raise UnalignedLength(
                f"hash input of {data.length_bits} bits is not a whole number of bytes"
            )
        return data.data
    return bytes(data)


def digest(alg: HashAlgorithmId, data: BitString | bytes) -> BitString:
    """Fixed-size digest of `data` under a SHA-2 or SHA-3 function."""
    if alg.is_xof:
        raise UnsupportedAlgorithm(
            f"{alg.display_name} is an XOF; use xof_expand with an explicit δ"
        )
    return BitString.from_bytes(hashlib.new(alg.hashlib_name, _as_bytes(data)).digest())


def xof_expand(alg: HashAlgorithmId, data: BitString | bytes, delta_bits: int) -> BitString:
    """First `delta_bits` bits of the SHAKE output on `data`."""
    if not alg.is_xof:
        raise UnsupportedAlgorithm(f"{alg.display_name} has a fixed output length")
    if delta_bits <= 0:
        raise ValueError(f"δ must be positive, got {delta_bits}")
    xof = hashlib.new(alg.hashlib_name, _as_bytes(data))
    return BitString.from_bytes(xof.digest((delta_bits + 7) // 8), delta_bits)  # type: ignore[call-arg]


def otp_encrypt(key: BitString, payload: BitString) -> BitString:
    """One-time pad: element-by-element XOR of key and payload."""
    if key.length_bits != payload.length_bits:
        raise LengthMismatch(
            f"OTP key has {key.length_bits} bits but the payload has "
            f"{payload.length_bits}; the protocol requires 2l = d"
        )
    return key.xor(payload)


def strength_lookup(alg: HashAlgorithmId, delta_bits: int | None = None) -> StrengthTriple:
    """CR / PR / 2PR strengths in bits of one approved hash function."""
    if alg.is_xof:
        if delta_bits is None:
            raise ValueError(f"{alg.display_name} strength depends on δ; pass delta_bits")
        cap = alg.capacity_bits or 0
        strength = min(delta_bits, cap)
        return StrengthTriple(
            collision_resistance_bits=min(delta_bits // 2, cap),
            preimage_resistance_bits=strength,
            second_preimage_resistance_bits=(strength, strength),
            preimage_is_lower_bound=True,
        )
    cr, pr, spr_low, spr_high = _FIXED_STRENGTHS[alg]
    return StrengthTriple(
        collision_resistance_bits=cr,
        preimage_resistance_bits=pr,
        second_preimage_resistance_bits=(spr_low, spr_high),
    )


def message_digest(suite: HashSuiteConfig, message: bytes) -> BitString:
    """h(m): d bits under the suite's message hash."""
    if suite.message_hash.is_xof:
        return xof_expand(suite.message_hash, message, suite.message_digest_bits)
    return digest(suite.message_hash, message)


def block_digest(suite: HashSuiteConfig, block: BitString) -> BitString:
    """h_p over one block of c."""
    if suite.block_hash.is_xof:
        return xof_expand(suite.block_hash, block, suite.block_digest_bits)
    return digest(suite.block_hash, block)
