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

"""Distribution phase: QKD keys, XOF expansion, partition and the verifiers' block exchange."""

from __future__ import annotations

import hashlib
import logging
import uuid
from collections.abc import Callable
from typing import Any, Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict

from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.errors import (
    ChannelFailure,
    DimensionMismatch,
    NonDivisibleLength,
    UnalignedLength,
    UnsupportedAlgorithm,
)
from quantum_signature.shared_libraries.types import (
    BitString,
    BlockPartition,
    EventKind,
    ExchangedBlock,
    ExchangedBlockSet,
    HashAlgorithmId,
    KeyHalf,
    KnowledgeMask,
    Link,
    PartyRole,
    Permutation,
    Phase,
    QkdKey,
    Transcript,
)
from quantum_signature.tools import hash_suite
from quantum_signature.tools.key_store import KeyStore
from quantum_signature.transport import check_route

logger = logging.getLogger(__name__)

_KEY_NAMESPACE = uuid.uuid5(uuid.NAMESPACE_URL, "urn:quantum-signature:qkd-key")

_LINK_ENDPOINTS = {
    Link.ALICE_BOB: (PartyRole.SIGNER, PartyRole.VERIFIER_1),
    Link.ALICE_CHARLIE: (PartyRole.SIGNER, PartyRole.VERIFIER_2),
}


def _purpose_word(purpose: str) -> int:
    return int.from_bytes(hashlib.sha256(purpose.encode("utf-8")).digest()[:8], "big")


class SeedSource:
    """All randomness of one run, derived from a single 64-bit seed.

    QKD key material comes from a SHAKE-256 stream per (link, counter); numpy
    generators for permutations and attacker choices are spawned per purpose,
    so adding a consumer never shifts the draws of another.
    """

    def __init__(self, seed: int) -> None:
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._counters: dict[Link, int] = {}

    def key_material(self, link: Link, l_bits: int) -> tuple[str, bytes]:
        counter = self._counters.get(link, 0)
        self._counters[link] = counter + 1
        stream = hashlib.shake_256(
            constants.QKD_STREAM_TAG
            + self.seed.to_bytes(8, "big")
            + link.value.encode("ascii")
            + counter.to_bytes(4, "big")
        )
        key_id = str(uuid.uuid5(_KEY_NAMESPACE, f"{self.seed}/{link.value}/{counter}"))
        return key_id, stream.digest(l_bits // 8)

    def generator(self, purpose: str) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, _purpose_word(purpose)]))


class KeyDeliveryClient(Protocol):
    """Anything that hands both ends of a link the same fresh key."""

    def establish(self, link: Link, l_bits: int) -> QkdKey: ...


def simulate_qkd_link(source: SeedSource, l_bits: int, link: Link) -> QkdKey:
    """l uniformly random bits, identical at both endpoints of `link`."""
    if l_bits <= 0:
        raise ValueError(f"l must be positive, got {l_bits}")
    if l_bits % 8:
        raise UnalignedLength(f"l = {l_bits} is not a whole number of bytes")
    key_id, material = source.key_material(link, l_bits)
    return QkdKey(
        key_id=key_id,
        link=link,
        bits=BitString.from_bytes(material),
        length_l_bits=l_bits,
    )


class SimulatedQkdClient:
    """KeyDeliveryClient backed by the run's SeedSource."""

    def __init__(self, source: SeedSource) -> None:
        self.source = source

    def establish(self, link: Link, l_bits: int) -> QkdKey:
        key = simulate_qkd_link(self.source, l_bits, link)
        logger.info("QKD link %s delivered key %s (%d bits)", link.value, key.key_id, l_bits)
        return key


def expand_key_xof(key: QkdKey, alg: HashAlgorithmId, delta_bits: int) -> QkdKey:
    """l -> δ by SHAKE, applied before the block division."""
    if not alg.is_xof:
        raise UnsupportedAlgorithm(f"key expansion needs SHAKE, got {alg.display_name}")
    if delta_bits < key.length_l_bits:
        raise ValueError(
            f"δ = {delta_bits} is smaller than the key length {key.length_l_bits}"
        )
    if delta_bits % 8:
        raise UnalignedLength(f"δ = {delta_bits} is not a whole number of bytes")
    return QkdKey(
        key_id=f"{key.key_id}+{alg.value}/{delta_bits}",
        link=key.link,
        bits=hash_suite.xof_expand(alg, key.bits, delta_bits),
        length_l_bits=delta_bits,
        derived_from=key.key_id,
    )


def partition(key: QkdKey, n: int) -> BlockPartition:
    if n < 1 or key.length_l_bits % n:
        raise NonDivisibleLength(f"a {key.length_l_bits}-bit key cannot be cut into {n} blocks")
    block_len = key.length_l_bits // n
    if block_len % 8:
        raise UnalignedLength(f"blocks of {block_len} bits are not byte-aligned")
    return BlockPartition(
        source_key_id=key.key_id,
        n_blocks=n,
        block_len_bits=block_len,
        blocks=key.bits.split(n),
    )


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """γ: a uniform element of S_n."""
    if n < 2 or n % 2:
        raise ValueError(f"n = {n} must be even and at least 2")
    return Permutation(n=n, mapping=tuple(int(a) + 1 for a in rng.permutation(n)))


def select_exchange_blocks(part: BlockPartition, perm: Permutation) -> ExchangedBlockSet:
    """The blocks labeled γ(1)..γ(n/2)."""
    if perm.n != part.n_blocks:
        raise DimensionMismatch(
            f"permutation over {perm.n} labels applied to {part.n_blocks} blocks"
        )
    labels = perm.mapping[: part.n_blocks // 2]
    return ExchangedBlockSet(
        source_key_id=part.source_key_id,
        n_blocks=part.n_blocks,
        block_len_bits=part.block_len_bits,
        entries=tuple(ExchangedBlock(label_index=i, bits=part.block(i)) for i in labels),
    )


class AuthenticatedChannel:
    """Simulated authenticated and encrypted classical channel between the verifiers.

    No cipher is applied; `available=False` makes every transmission fail and
    `authentic=False` delivers frames whose authentication check fails.
    """

    def __init__(
        self,
        transcript: Transcript | None = None,
        available: bool = True,
        authentic: bool = True,
    ) -> None:
        self.transcript = transcript
        self.available = available
        self.authentic = authentic
        self._sent = 0

    def transmit(
        self, sender: PartyRole, receiver: PartyRole, blocks: ExchangedBlockSet
    ) -> ExchangedBlockSet:
        check_route(Phase.EXCHANGE, sender, receiver)
        if not self.available:
            raise ChannelFailure(
                f"channel {sender.display_name} -> {receiver.display_name} is down"
            )
        message_id = f"exchange-{self._sent}"
        self._sent += 1
        if self.transcript is not None:
            self.transcript.record(
                Phase.EXCHANGE,
                EventKind.SEND,
                sender,
                receiver,
                message_id,
                source_key_id=blocks.source_key_id,
                labels=list(blocks.labels),
            )
        frame = blocks.model_dump_json()
        if not self.authentic:
            raise ChannelFailure(
                f"{receiver.display_name} could not authenticate {message_id}"
            )
        received = ExchangedBlockSet.model_validate_json(frame)
        if self.transcript is not None:
            self.transcript.record(
                Phase.EXCHANGE,
                EventKind.RECEIVE,
                receiver,
                sender,
                message_id,
                count=received.count,
            )
        logger.debug(
            "%s -> %s: %s", sender.display_name, receiver.display_name, ",".join(received.labels)
        )
        return received


class ExchangeOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    bob_mask: KnowledgeMask
    charlie_mask: KnowledgeMask
    bob_received: ExchangedBlockSet
    charlie_received: ExchangedBlockSet


def _flags(n: int, indices: frozenset[int]) -> tuple[bool, ...]:
    return tuple(i in indices for i in range(1, n + 1))


def exchange(
    bob_set: ExchangedBlockSet,
    charlie_set: ExchangedBlockSet,
    channel: AuthenticatedChannel,
) -> ExchangeOutcome:
    """Bob sends k'_1 to Charlie, Charlie sends k'_2 to Bob; the signer sees neither."""
    if bob_set.n_blocks != charlie_set.n_blocks:
        raise DimensionMismatch("the two keys were partitioned with different n")
    n = bob_set.n_blocks
    charlie_received = channel.transmit(PartyRole.VERIFIER_1, PartyRole.VERIFIER_2, bob_set)
    bob_received = channel.transmit(PartyRole.VERIFIER_2, PartyRole.VERIFIER_1, charlie_set)
    return ExchangeOutcome(
        bob_mask=KnowledgeMask.from_halves((True,) * n, _flags(n, bob_received.label_indices)),
        charlie_mask=KnowledgeMask.from_halves(
            _flags(n, charlie_received.label_indices), (True,) * n
        ),
        bob_received=bob_received,
        charlie_received=charlie_received,
    )


class DistributionResult(BaseModel):
    """Keys, partitions and exchange results of one distribution phase.

    The host keeps this; each party is only handed its own halves.
    """

    model_config = ConfigDict(frozen=True)

    first_key: QkdKey
    second_key: QkdKey
    raw_key_ids: tuple[str, str]
    first_partition: BlockPartition
    second_partition: BlockPartition
    bob_permutation: Permutation
    charlie_permutation: Permutation
    bob_sent: ExchangedBlockSet
    charlie_sent: ExchangedBlockSet
    outcome: ExchangeOutcome

    @property
    def n_blocks(self) -> int:
        return self.first_partition.n_blocks

    @property
    def key_ids(self) -> tuple[str, str]:
        return (self.first_key.key_id, self.second_key.key_id)

    def halves(self, role: PartyRole) -> tuple[KeyHalf, KeyHalf]:
        """(k_1 view, k_2 view) held by `role`."""
        first = KeyHalf.full(self.first_partition)
        second = KeyHalf.full(self.second_partition)
        if role == PartyRole.VERIFIER_1:
            return first, KeyHalf.from_exchange(self.outcome.bob_received)
        if role == PartyRole.VERIFIER_2:
            return KeyHalf.from_exchange(self.outcome.charlie_received), second
        return first, second

    def mask(self, role: PartyRole) -> KnowledgeMask:
        if role == PartyRole.VERIFIER_1:
            return self.outcome.bob_mask
        if role == PartyRole.VERIFIER_2:
            return self.outcome.charlie_mask
        return KnowledgeMask.all_known(self.n_blocks)


OutgoingHook = Callable[[ExchangedBlockSet], ExchangedBlockSet]


def run_distribution(
    config: RunConfig,
    source: SeedSource,
    store: KeyStore | None = None,
    transcript: Transcript | None = None,
    channel: AuthenticatedChannel | None = None,
    client: KeyDeliveryClient | None = None,
    outgoing: dict[PartyRole, OutgoingHook] | None = None,
) -> DistributionResult:
    """Establish k_1 and k_2, expand, partition and exchange half of the blocks.

    `outgoing` lets a verifier alter the block set it sends (wrong information
    about its key); its own view of the key is unaffected.
    """
    config.validated()
    store = store if store is not None else KeyStore()
    client = client or SimulatedQkdClient(source)
    channel = channel or AuthenticatedChannel(transcript)
    outgoing = outgoing or {}

    def record(kind: EventKind, on: Link | None = None, **detail: Any) -> None:
        if transcript is None:
            return
        party, peer = _LINK_ENDPOINTS[on] if on is not None else (None, None)
        transcript.record(Phase.DISTRIBUTION, kind, party, peer, **detail)

    keys: list[QkdKey] = []
    raw_ids: list[str] = []
    for link in (Link.ALICE_BOB, Link.ALICE_CHARLIE):
        key = client.establish(link, config.l_bits)
        store.put(key)
        raw_ids.append(key.key_id)
        record(
            EventKind.KEY_ESTABLISHED,
            link,
            link=link.value,
            key_id=key.key_id,
            l_bits=key.length_l_bits,
        )
        if config.delta_key_bits is not None:
            expanded = expand_key_xof(key, config.key_xof, config.delta_key_bits)
            store.retire(key.key_id)
            store.put(expanded)
            record(
                EventKind.KEY_EXPANDED,
                link,
                key_id=expanded.key_id,
                derived_from=key.key_id,
                delta_bits=config.delta_key_bits,
            )
            key = expanded
        keys.append(key)

    first, second = keys
    p1 = partition(first, config.n_blocks)
    p2 = partition(second, config.n_blocks)
    for part in (p1, p2):
        record(
            EventKind.PARTITIONED,
            key_id=part.source_key_id,
            n_blocks=part.n_blocks,
            block_len_bits=part.block_len_bits,
        )

    gamma_b = random_permutation(config.n_blocks, source.generator("permutation/verifier_1"))
    gamma_c = random_permutation(config.n_blocks, source.generator("permutation/verifier_2"))
    bob_sent = select_exchange_blocks(p1, gamma_b)
    charlie_sent = select_exchange_blocks(p2, gamma_c)

    bob_out = outgoing.get(PartyRole.VERIFIER_1, lambda s: s)(bob_sent)
    charlie_out = outgoing.get(PartyRole.VERIFIER_2, lambda s: s)(charlie_sent)
    try:
        outcome = exchange(bob_out, charlie_out, channel)
    except ChannelFailure as e:
        if transcript is not None:
            transcript.record(Phase.EXCHANGE, EventKind.ABORT, reason=str(e))
        logger.warning("distribution aborted: %s", e)
        raise

    logger.info(
        "distribution done: n = %d, %d-bit blocks, keys %s / %s",
        config.n_blocks,
        p1.block_len_bits,
        first.key_id,
        second.key_id,
    )
    return DistributionResult(
        first_key=first,
        second_key=second,
        raw_key_ids=(raw_ids[0], raw_ids[1]),
        first_partition=p1,
        second_partition=p2,
        bob_permutation=gamma_b,
        charlie_permutation=gamma_c,
        bob_sent=bob_sent,
        charlie_sent=charlie_sent,
        outcome=outcome,
    )
