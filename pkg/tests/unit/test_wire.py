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

"""Tests for the wire codec of (m, S_a)."""

import struct
import unittest

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantum_signature.distribution import SeedSource, run_distribution
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.errors import (
    BadMagic,
    DecodeError,
    InconsistentLengths,
    TruncatedPayload,
    UnsupportedVersion,
)
from quantum_signature.shared_libraries.types import (
    BitString,
    HashAlgorithmId,
    HashSuiteConfig,
    PartyRole,
    SignatureBundle,
    SignedTuple,
)
from quantum_signature.signing import combine_keys, sign
from quantum_signature.tools.wire import decode_tuple, encode_tuple, encoded_size


@st.composite
def signed_tuples(draw):
    n = draw(st.sampled_from([2, 4, 8, 16]))
    l_bits = n * 8 * draw(st.integers(min_value=1, max_value=8))
    block_hash = draw(
        st.sampled_from(
            [HashAlgorithmId.SHA2_256, HashAlgorithmId.SHA3_512, HashAlgorithmId.SHAKE_128]
        )
    )
    block_delta = draw(st.sampled_from([64, 128, 264])) if block_hash.is_xof else None
    suite = HashSuiteConfig(
        message_hash=HashAlgorithmId.SHAKE_256,
        message_delta_bits=2 * l_bits,
        block_hash=block_hash,
        block_delta_bits=block_delta,
        n_blocks_per_key=n,
        key_length_l_bits=l_bits,
    )
    size = suite.block_digest_bits // 8
    digests = draw(st.lists(st.binary(min_size=size, max_size=size), min_size=2 * n, max_size=2 * n))
    return SignedTuple(
        message=draw(st.binary(max_size=512)),
        signature=SignatureBundle(
            per_block_digests=tuple(BitString.from_bytes(d) for d in digests),
            block_digest_len_bits=suite.block_digest_bits,
            suite=suite,
        ),
    )


@settings(max_examples=1000, deadline=None)
@given(signed_tuples())
def test_round_trip_is_bit_exact(t):
    encoded = encode_tuple(t)
    assert len(encoded) == encoded_size(t)
    assert decode_tuple(encoded) == t
    assert encode_tuple(decode_tuple(encoded)) == encoded


@settings(max_examples=300, deadline=None)
@given(signed_tuples(), st.data())
def test_damaged_payloads_only_raise_decode_errors(t, data):
    encoded = bytearray(encode_tuple(t))
    position = data.draw(st.integers(min_value=0, max_value=len(encoded) - 1))
    encoded[position] ^= data.draw(st.integers(min_value=1, max_value=255))
    cut = data.draw(st.integers(min_value=0, max_value=len(encoded)))
    try:
        decode_tuple(bytes(encoded[:cut]))
    except DecodeError:
        pass


@given(st.binary(max_size=96))
def test_arbitrary_bytes_never_crash(data):
    try:
        decode_tuple(data)
    except DecodeError:
        pass


class TestWire(unittest.TestCase):
    def setUp(self):
        super().setUp()
        config = RunConfig(seed=4)
        result = run_distribution(config, SeedSource(4))
        key = combine_keys(*result.halves(PartyRole.SIGNER))
        message = b"wire test message"
        self.tuple = SignedTuple(message=message, signature=sign(message, key, config.suite()))
        self.encoded = encode_tuple(self.tuple)

    def test_header_fields(self):
        magic, version, message_alg, block_alg, reserved, delta, l_bits, n, digest, length = (
            struct.unpack_from(">4sBBBBIIIIQ", self.encoded)
        )
        self.assertEqual(magic, b"QDS1")
        self.assertEqual(version, 1)
        self.assertEqual(message_alg, HashAlgorithmId.SHAKE_256.wire_id)
        self.assertEqual(block_alg, HashAlgorithmId.SHA2_256.wire_id)
        self.assertEqual(reserved, 0)
        self.assertEqual((delta, l_bits, n, digest), (2048, 1024, 32, 256))
        self.assertEqual(length, len(self.tuple.message))
        self.assertEqual(len(self.encoded), 32 + len(self.tuple.message) + 64 * 32)

    def test_bad_magic(self):
        with self.assertRaises(BadMagic):
            decode_tuple(b"XDS1" + self.encoded[4:])

    def test_short_header(self):
        with self.assertRaises(TruncatedPayload):
            decode_tuple(self.encoded[:20])
        with self.assertRaises(TruncatedPayload):
            decode_tuple(b"QD")

    def test_unsupported_version(self):
        data = bytearray(self.encoded)
        data[4] = 2
        with self.assertRaises(UnsupportedVersion):
            decode_tuple(bytes(data))

    def test_reserved_byte(self):
        data = bytearray(self.encoded)
        data[7] = 1
        with self.assertRaises(InconsistentLengths):
            decode_tuple(bytes(data))

    def test_truncated_message(self):
        with self.assertRaises(TruncatedPayload):
            decode_tuple(self.encoded[: 32 + 5])

    def test_truncated_inside_a_digest(self):
        with self.assertRaises(TruncatedPayload):
            decode_tuple(self.encoded[:-7])

    def test_missing_whole_digest(self):
        with self.assertRaises(InconsistentLengths):
            decode_tuple(self.encoded[:-32])

    def test_trailing_digest(self):
        with self.assertRaises(InconsistentLengths):
            decode_tuple(self.encoded + bytes(32))

    def test_declared_n_disagrees(self):
        data = bytearray(self.encoded)
        struct.pack_into(">I", data, 16, 16)
        with self.assertRaises(InconsistentLengths):
            decode_tuple(bytes(data))

    def test_incomplete_signature_is_not_encoded(self):
        digests = list(self.tuple.signature.per_block_digests)
        digests[3] = None
        partial = self.tuple.model_copy(
            update={
                "signature": self.tuple.signature.model_copy(
                    update={"per_block_digests": tuple(digests)}
                )
            }
        )
        with pytest.raises(ValueError):
            encode_tuple(partial)
