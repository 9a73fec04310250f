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

"""Scripted attacks: honest party machines with attacker overrides injected."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Callable, Iterable
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from quantum_signature.parties.executor import PartyOverrides
from quantum_signature.protocol import ProtocolHost
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.types import (
    BitString,
    CombinedKey,
    ExchangedBlock,
    ExchangedBlockSet,
    PartyRole,
    SignatureBundle,
    SignedTuple,
    Transcript,
    Verdict,
    VerificationReport,
)
from quantum_signature.signing import combine_keys, sign

logger = logging.getLogger(__name__)


class AttackKind(str, Enum):
    INTEGRITY = "integrity"
    FORGERY_GUESS = "forgery_guess"
    FORGERY_REUSE = "forgery_reuse"
    REPUDIATION = "repudiation"
    DOS = "dos"


class ForgeryStrategy(str, Enum):
    GUESS = "guess"
    REUSE = "reuse"


class Placement(str, Enum):
    """Where a repudiating signer puts her corrupted k_2 blocks."""

    RANDOM = "random"
    # Oracle placements: the simulator reveals Bob's labels, Alice never learns them.
    BOB_UNKNOWN = "bob_unknown"
    BOB_KNOWN = "bob_known"


class DosTarget(str, Enum):
    SELF = "self"
    EXCHANGE = "exchange"


class ForgeryAttempt(BaseModel):
    """M, Bob's guess K of k_2 and the forged signature S_f."""

    model_config = ConfigDict(frozen=True)

    tampered_message: bytes
    guessed_key: BitString
    forged: SignatureBundle
    guessed_blocks: int
    correct_guesses: int

    @field_serializer("tampered_message", when_used="json")
    def _serialize_message(self, value: bytes) -> str:
        return value.hex()


class RepudiationPlan(BaseModel):
    """e corrupted blocks of k_2, either given explicitly or drawn by placement."""

    model_config = ConfigDict(frozen=True)

    e: int = Field(ge=1)
    placement: Placement = Placement.RANDOM
    labels: tuple[int, ...] | None = None

    @model_validator(mode="after")
    def _check_labels(self) -> RepudiationPlan:
        if self.labels is not None:
            if len(self.labels) != self.e or len(set(self.labels)) != self.e:
                raise ValueError(f"need {self.e} distinct labels, got {self.labels}")
            if min(self.labels) < 1:
                raise ValueError("labels are 1-based")
        return self

    def choose_labels(
        self, n: int, bob_known: frozenset[int], rng: np.random.Generator
    ) -> tuple[int, ...]:
        if self.e > n:
            raise ValueError(f"e = {self.e} exceeds the n = {n} blocks of k_2")
        if self.labels is not None:
            if max(self.labels) > n:
                raise ValueError(f"labels {self.labels} outside B1..B{n}")
            return tuple(sorted(self.labels))
        if self.placement == Placement.BOB_UNKNOWN:
            pool = [i for i in range(1, n + 1) if i not in bob_known]
        elif self.placement == Placement.BOB_KNOWN:
            pool = sorted(bob_known)
        else:
            pool = list(range(1, n + 1))
        if self.e > len(pool):
            raise ValueError(
                f"placement {self.placement.value} has only {len(pool)} labels for e = {self.e}"
            )
        return tuple(sorted(int(i) for i in rng.choice(pool, size=self.e, replace=False)))


class AttackOutcome(BaseModel):
    kind: AttackKind
    bob_verdict: Verdict | None
    charlie_verdict: Verdict | None
    success: bool
    transcript: Transcript
    detail: dict[str, Any] = Field(default_factory=dict)

    @property
    def reports(self) -> dict[PartyRole, VerificationReport]:
        return self.transcript.reports()


def flip_message_bits(message: bytes, count: int, rng: np.random.Generator) -> bytes:
    """M != m: `count` distinct bit positions inverted (one byte added to an empty m)."""
    if not message:
        return b"\x00"
    positions = rng.choice(len(message) * 8, size=min(count, len(message) * 8), replace=False)
    tampered = bytearray(message)
    for position in positions:
        tampered[position // 8] ^= 0x80 >> (position % 8)
    return bytes(tampered)


def corrupt_positions(key: CombinedKey, positions: Iterable[int]) -> CombinedKey:
    """Copy of the combined key with every bit of the given blocks (0-based) inverted."""
    blocks = list(key.blocks)
    for position in positions:
        block = blocks[position]
        if block is None:
            raise ValueError(f"cannot corrupt unknown block {key.labels[position]}")
        blocks[position] = block.flipped()
    return key.model_copy(update={"blocks": tuple(blocks)})


def corruption_overrides(
    target: DosTarget,
    party: PartyRole,
    corrupt_blocks: int,
    n_blocks: int,
    rng: np.random.Generator,
) -> PartyOverrides:
    """A verifier spoiling its own stored key or the blocks it reveals to the other."""
    if party == PartyRole.SIGNER:
        raise ValueError("only a verifier can mount this denial of service")
    if target == DosTarget.SELF:
        if not 0 <= corrupt_blocks <= n_blocks:
            raise ValueError(f"cannot corrupt {corrupt_blocks} of {n_blocks} own blocks")
        offset = 0 if party == PartyRole.VERIFIER_1 else n_blocks
        picks = [offset + int(i) for i in rng.choice(n_blocks, size=corrupt_blocks, replace=False)]
        return PartyOverrides(
            candidate_keys={party: lambda key: corrupt_positions(key, picks)}
        )

    if not 0 <= corrupt_blocks <= n_blocks // 2:
        raise ValueError(f"cannot corrupt {corrupt_blocks} of the {n_blocks // 2} revealed blocks")
    chosen = {int(i) for i in rng.choice(n_blocks // 2, size=corrupt_blocks, replace=False)}

    def outgoing(blocks: ExchangedBlockSet) -> ExchangedBlockSet:
        entries = tuple(
            ExchangedBlock(label_index=entry.label_index, bits=entry.bits.flipped())
            if i in chosen
            else entry
            for i, entry in enumerate(blocks.entries)
        )
        return blocks.model_copy(update={"entries": entries})

    return PartyOverrides(outgoing_exchange={party: outgoing})


def _finish(
    kind: AttackKind,
    host: ProtocolHost,
    success: Callable[[Verdict | None, Verdict | None], bool],
    **detail: Any,
) -> AttackOutcome:
    transcript = asyncio.run(host.messaging())
    verdicts = transcript.verdicts()
    bob = verdicts.get(PartyRole.VERIFIER_1)
    charlie = verdicts.get(PartyRole.VERIFIER_2)
    outcome = AttackOutcome(
        kind=kind,
        bob_verdict=bob,
        charlie_verdict=charlie,
        success=success(bob, charlie),
        transcript=transcript,
        detail=detail,
    )
    logger.info(
        "%s (seed %d): Bob %s, Charlie %s, success=%s",
        kind.value,
        host.seed,
        bob.value if bob else "-",
        charlie.value if charlie else "-",
        outcome.success,
    )
    return outcome


def _charlie_accepts(bob: Verdict | None, charlie: Verdict | None) -> bool:
    return charlie == Verdict.ACCEPTED


def integrity_attack(
    config: RunConfig,
    seed: int | None = None,
    tamper: Callable[[bytes], bytes] | None = None,
    flips: int = 1,
) -> AttackOutcome:
    """Bob accepts honestly, then forwards (M, S_a) with M != m."""
    host = ProtocolHost(config, seed)
    host.distribute()
    rng = host.source.generator("attack/integrity")
    tampered: dict[str, bytes] = {}

    def forward(t: SignedTuple) -> SignedTuple:
        message = tamper(t.message) if tamper else flip_message_bits(t.message, flips, rng)
        tampered["message"] = message
        return SignedTuple(message=message, signature=t.signature)

    host.overrides = PartyOverrides(forward=forward)
    message = host.message()
    outcome = _finish(AttackKind.INTEGRITY, host, _charlie_accepts)
    outcome.detail["modified"] = tampered.get("message", message) != message
    return outcome


def forgery_attack(
    strategy: ForgeryStrategy | str,
    config: RunConfig,
    seed: int | None = None,
    oracle: bool = False,
    flips: int = 1,
) -> AttackOutcome:
    """Bob sends Charlie (M, S_f); guess fills his n/2 unknown k_2 blocks at random.

    With `oracle`, Bob is handed the true k_2 blocks (success-predicate sanity check).
    """
    strategy = ForgeryStrategy(strategy)
    kind = AttackKind.FORGERY_GUESS if strategy == ForgeryStrategy.GUESS else AttackKind.FORGERY_REUSE
    host = ProtocolHost(config, seed)
    distribution = host.distribute()
    rng = host.source.generator("attack/forgery")
    attempts: list[ForgeryAttempt] = []

    def forward(t: SignedTuple) -> SignedTuple:
        message = flip_message_bits(t.message, flips, rng)
        if strategy == ForgeryStrategy.REUSE:
            return SignedTuple(message=message, signature=t.signature)
        first, second = distribution.halves(PartyRole.VERIFIER_1)
        truth = distribution.second_partition
        guesses: dict[int, BitString | None] = {}
        for index in range(1, second.n_blocks + 1):
            if second.blocks[index - 1] is None:
                guesses[index] = (
                    truth.block(index)
                    if oracle
                    else BitString.from_bytes(rng.bytes(second.block_len_bits // 8))
                )
        guessed = second.replace_blocks(guesses)
        forged = sign(message, combine_keys(first, guessed), host.suite)
        attempts.append(
            ForgeryAttempt(
                tampered_message=message,
                guessed_key=BitString.concat(b for b in guessed.blocks if b is not None),
                forged=forged,
                guessed_blocks=len(guesses),
                correct_guesses=sum(
                    1 for index, bits in guesses.items() if bits == truth.block(index)
                ),
            )
        )
        return SignedTuple(message=message, signature=forged)

    host.overrides = PartyOverrides(forward=forward)
    outcome = _finish(kind, host, _charlie_accepts, strategy=strategy.value, oracle=oracle)
    if attempts:
        outcome.detail["guessed_blocks"] = attempts[0].guessed_blocks
        outcome.detail["correct_guesses"] = attempts[0].correct_guesses
        outcome.detail["attempt"] = attempts[0]
    return outcome


def repudiation_attack(
    plan: RepudiationPlan, config: RunConfig, seed: int | None = None
) -> AttackOutcome:
    """Alice signs with k_1||K, K = k_2 with e blocks inverted; wins if Bob accepts and Charlie rejects."""
    host = ProtocolHost(config, seed)
    distribution = host.distribute()
    rng = host.source.generator("attack/repudiation")
    n = distribution.n_blocks
    bob_known = distribution.outcome.bob_received.label_indices
    labels = plan.choose_labels(n, bob_known, rng)

    host.overrides = PartyOverrides(
        signing_key=lambda key: corrupt_positions(key, [n + i - 1 for i in labels])
    )
    return _finish(
        AttackKind.REPUDIATION,
        host,
        lambda bob, charlie: bob == Verdict.ACCEPTED and charlie == Verdict.REJECTED,
        labels=list(labels),
        bob_known_hits=len(bob_known.intersection(labels)),
    )


def dos_scenario(
    config: RunConfig,
    seed: int | None = None,
    target: DosTarget | str = DosTarget.SELF,
    party: PartyRole = PartyRole.VERIFIER_1,
    corrupt_blocks: int = 1,
) -> AttackOutcome:
    """A verifier feeds wrong key material into the protocol; success is any forced rejection."""
    target = DosTarget(target)
    host = ProtocolHost(config, seed)
    host.overrides = corruption_overrides(
        target,
        party,
        corrupt_blocks,
        config.n_blocks,
        host.source.generator("attack/dos"),
    )
    host.distribute()
    return _finish(
        AttackKind.DOS,
        host,
        lambda bob, charlie: bob != Verdict.ACCEPTED or charlie != Verdict.ACCEPTED,
        target=target.value,
        party=party.value,
        corrupt_blocks=corrupt_blocks,
    )
