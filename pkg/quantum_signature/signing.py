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

"""Messaging-phase core: combined key, signature, partial candidate and threshold verification."""

import logging

from quantum_signature.shared_libraries.errors import (
    DimensionMismatch,
    LengthConstraintViolated,
    PartialKey,
    SuiteMismatch,
)
from quantum_signature.shared_libraries.types import (
    BitString,
    CombinedKey,
    HashSuiteConfig,
    KeyHalf,
    KnowledgeMask,
    SignatureBundle,
    Verdict,
    VerificationReport,
    VerificationThreshold,
)
from quantum_signature.tools import hash_suite
from quantum_signature.tools.key_store import KeyStore

logger = logging.getLogger(__name__)


def combine_keys(first: KeyHalf, second: KeyHalf) -> CombinedKey:
    """k_1 || k_2 as known to one party (k_a, k_b or k_c)."""
    if first.n_blocks != second.n_blocks or first.block_len_bits != second.block_len_bits:
        raise DimensionMismatch(
            f"cannot combine {first.n_blocks}x{first.block_len_bits}-bit blocks "
            f"with {second.n_blocks}x{second.block_len_bits}-bit blocks"
        )
    return CombinedKey(
        n_blocks_per_key=first.n_blocks,
        block_len_bits=first.block_len_bits,
        blocks=first.blocks + second.blocks,
        mask=KnowledgeMask.from_halves(first.known_flags, second.known_flags),
        key_ids=(first.source_key_id, second.source_key_id),
    )


def _check_geometry(key: CombinedKey, suite: HashSuiteConfig) -> None:
    if key.total_bits != suite.message_digest_bits:
        raise LengthConstraintViolated(
            f"combined key has 2l = {key.total_bits} bits, message digest has "
            f"d = {suite.message_digest_bits}"
        )
    if key.n_blocks_per_key != suite.n_blocks_per_key:
        raise LengthConstraintViolated(
            f"key has n = {key.n_blocks_per_key} blocks, suite expects {suite.n_blocks_per_key}"
        )


def _bundle(digests: tuple[BitString | None, ...], suite: HashSuiteConfig) -> SignatureBundle:
    return SignatureBundle(
        per_block_digests=digests,
        block_digest_len_bits=suite.block_digest_bits,
        suite=suite,
    )


def sign(
    message: bytes,
    key: CombinedKey,
    suite: HashSuiteConfig,
    store: KeyStore | None = None,
) -> SignatureBundle:
    """S_a = h_p(c_1) .. h_p(c_2n) with c_a = k_a XOR h(m).

    With a store, both key ids are consumed atomically before anything is signed.
    """
    if not key.mask.is_complete:
        raise PartialKey(f"signing needs the full key; {key.mask.unknown_count} blocks are unknown")
    _check_geometry(key, suite)
    if store is not None:
        store.take(key.key_ids)

    h = hash_suite.message_digest(suite, message)
    c = hash_suite.otp_encrypt(key.bits(), h)
    digests = tuple(
        hash_suite.block_digest(suite, block) for block in c.split(2 * suite.n_blocks_per_key)
    )
    logger.info("signed a %d-byte message with keys %s", len(message), " + ".join(key.key_ids))
    return _bundle(digests, suite)


def compute_candidate(message: bytes, key: CombinedKey, suite: HashSuiteConfig) -> SignatureBundle:
    """S_b / S_c: the signing pipeline over the known key blocks only."""
    _check_geometry(key, suite)
    h_blocks = hash_suite.message_digest(suite, message).split(2 * suite.n_blocks_per_key)
    digests = tuple(
        None
        if key_block is None
        else hash_suite.block_digest(suite, hash_suite.otp_encrypt(key_block, h_block))
        for key_block, h_block in zip(key.blocks, h_blocks)
    )
    return _bundle(digests, suite)


def threshold_tolerance(threshold: VerificationThreshold, known: int) -> int:
    """Largest number of mismatching known blocks that still verifies."""
    return threshold.allowed_mismatches(known)


def verify(
    received: SignatureBundle,
    candidate: SignatureBundle,
    threshold: VerificationThreshold,
) -> VerificationReport:
    """Label-by-label comparison of a received signature against a candidate."""
    if received.suite != candidate.suite:
        raise SuiteMismatch("signature and candidate were computed under different hash suites")

    matches = mismatches = unknowns = 0
    mismatched: list[str] = []
    for label, got, expected in zip(
        candidate.labels, received.per_block_digests, candidate.per_block_digests
    ):
        if expected is None:
            unknowns += 1
        elif got is not None and got == expected:
            matches += 1
        else:
            mismatches += 1
            mismatched.append(label)

    allowed = threshold_tolerance(threshold, matches + mismatches)
    verdict = Verdict.ACCEPTED if mismatches <= allowed else Verdict.REJECTED
    logger.debug(
        "verification: %d match, %d mismatch, %d unknown, %d allowed -> %s",
        matches,
        mismatches,
        unknowns,
        allowed,
        verdict.value,
    )
    return VerificationReport(
        matches=matches,
        mismatches=mismatches,
        unknowns=unknowns,
        threshold_used=threshold,
        allowed_mismatches=allowed,
        verdict=verdict,
        mismatched_labels=tuple(mismatched),
    )
