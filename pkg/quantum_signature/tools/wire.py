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

"""Bit-exact wire format of the (m, S_a) tuple.

Layout, big-endian throughout::

    magic "QDS1"            4 bytes
    version                 u8  (= 1)
    message-hash alg id     u8
    block-hash alg id       u8
    reserved                u8  (= 0)
    δ_msg                   u32 bits, 0 for fixed-output message hashes
    l                       u32 bits
    n                       u32
    block digest length     u32 bits
    message length          u64 bytes
    message
    2n block digests, label order k1:B1..k1:Bn, k2:B1..k2:Bn
"""

import logging
import struct

from pydantic import ValidationError

from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.errors import (
    BadMagic,
    InconsistentLengths,
    TruncatedPayload,
    UnsupportedVersion,
)
from quantum_signature.shared_libraries.types import (
    BitString,
    HashAlgorithmId,
    HashSuiteConfig,
    SignatureBundle,
    SignedTuple,
)

logger = logging.getLogger(__name__)

_HEADER = struct.Struct(">4sBBBBIIIIQ")
assert _HEADER.size == constants.WIRE_HEADER_SIZE


def encoded_size(t: SignedTuple) -> int:
    """Header + message + 2n digests, in bytes."""
    digest_bytes = t.signature.block_digest_len_bits // 8
    return _HEADER.size + len(t.message) + 2 * t.n_blocks * digest_bytes


def encode_tuple(t: SignedTuple) -> bytes:
    signature = t.signature
    if not signature.is_complete:
        raise ValueError(
            f"only complete signatures go on the wire; {signature.absent_count} entries are absent"
        )
    suite = t.suite
    header = _HEADER.pack(
        constants.WIRE_MAGIC,
        constants.WIRE_VERSION,
        suite.message_hash.wire_id,
        suite.block_hash.wire_id,
        0,
        suite.message_delta_bits or 0,
        suite.key_length_l_bits,
        suite.n_blocks_per_key,
        signature.block_digest_len_bits,
        len(t.message),
    )
    digests = b"".join(d.data for d in signature.per_block_digests if d is not None)
    return header + t.message + digests


def _suite_from_header(
    message_alg_id: int,
    block_alg_id: int,
    delta_msg: int,
    l_bits: int,
    n_blocks: int,
    digest_len_bits: int,
) -> HashSuiteConfig:
    try:
        message_hash = HashAlgorithmId.from_wire_id(message_alg_id)
        block_hash = HashAlgorithmId.from_wire_id(block_alg_id)
    except ValueError as e:
        raise InconsistentLengths(str(e)) from None
    if message_hash.is_xof != (delta_msg != 0):
        raise InconsistentLengths(
            f"δ_msg = {delta_msg} does not fit message hash {message_hash.display_name}"
        )
    if not block_hash.is_xof and digest_len_bits != block_hash.digest_bits:
        raise InconsistentLengths(
            f"{block_hash.display_name} digests have {block_hash.digest_bits} bits, "
            f"header declares {digest_len_bits}"
        )
    try:
        return HashSuiteConfig(
            message_hash=message_hash,
            message_delta_bits=delta_msg or None,
            block_hash=block_hash,
            block_delta_bits=digest_len_bits if block_hash.is_xof else None,
            n_blocks_per_key=n_blocks,
            key_length_l_bits=l_bits,
        )
    except ValidationError as e:
        raise InconsistentLengths(f"header parameters are inconsistent: {e}") from None


def decode_tuple(data: bytes) -> SignedTuple:
    """Parses one encoded tuple; raises a DecodeError subclass, never returns partial data."""
    data = bytes(data)
    if len(data) >= len(constants.WIRE_MAGIC) and not data.startswith(constants.WIRE_MAGIC):
        raise BadMagic(f"payload starts with {data[:4]!r}, expected {constants.WIRE_MAGIC!r}")
    if len(data) < _HEADER.size:
        raise TruncatedPayload(f"{len(data)} bytes cannot hold the {_HEADER.size}-byte header")
    (
        _magic,
        version,
        message_alg_id,
        block_alg_id,
        reserved,
        delta_msg,
        l_bits,
        n_blocks,
        digest_len_bits,
        message_len,
    ) = _HEADER.unpack_from(data)
    if version != constants.WIRE_VERSION:
        raise UnsupportedVersion(f"wire version {version} is not supported")
    if reserved:
        raise InconsistentLengths(f"reserved header byte is {reserved}, expected 0")
    if n_blocks == 0 or digest_len_bits == 0 or digest_len_bits % 8:
        raise InconsistentLengths(
            f"n = {n_blocks} and block digest length {digest_len_bits} bits are not usable"
        )

    body = _HEADER.size + message_len
    if body > len(data):
        raise TruncatedPayload(
            f"header declares a {message_len}-byte message but only "
            f"{len(data) - _HEADER.size} bytes follow"
        )
    digest_bytes = digest_len_bits // 8
    expected = 2 * n_blocks * digest_bytes
    remaining = len(data) - body
    if remaining < expected and remaining % digest_bytes:
        raise TruncatedPayload(
            f"signature area ends inside a digest ({remaining} of {expected} bytes)"
        )
    if remaining != expected:
        raise InconsistentLengths(
            f"n = {n_blocks} needs 2n = {2 * n_blocks} digests, "
            f"payload holds {remaining / digest_bytes:g}"
        )

    suite = _suite_from_header(
        message_alg_id, block_alg_id, delta_msg, l_bits, n_blocks, digest_len_bits
    )
    digests = tuple(
        BitString.from_bytes(data[offset : offset + digest_bytes])
        for offset in range(body, len(data), digest_bytes)
    )
    logger.debug("decoded tuple: %d-byte message, %d digests", message_len, len(digests))
    return SignedTuple(
        message=data[_HEADER.size : body],
        signature=SignatureBundle(
            per_block_digests=digests,
            block_digest_len_bits=digest_len_bits,
            suite=suite,
        ),
    )
