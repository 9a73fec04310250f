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

import abc
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from quantum_signature.shared_libraries.types import (
    CombinedKey,
    EventKind,
    ExchangedBlockSet,
    HashSuiteConfig,
    KeyHalf,
    PartyRole,
    Phase,
    SignedTuple,
    Transcript,
)
from quantum_signature.signing import combine_keys
from quantum_signature.transport import Router

logger = logging.getLogger(__name__)

KeyOverride = Callable[[CombinedKey], CombinedKey]
TupleOverride = Callable[[SignedTuple], SignedTuple]
ExchangeOverride = Callable[[ExchangedBlockSet], ExchangedBlockSet]


@dataclass(frozen=True)
class PartyOverrides:
    """Attacker behaviour injected into otherwise honest parties.

    signing_key: the key Alice actually signs with (repudiation).
    forward: what Bob forwards to Charlie after accepting (integrity, forgery).
    candidate_keys: a verifier's stored key as used for its candidate (DoS).
    outgoing_exchange: the block set a verifier reveals to the other (DoS).
    """

    signing_key: KeyOverride | None = None
    forward: TupleOverride | None = None
    candidate_keys: dict[PartyRole, KeyOverride] = field(default_factory=dict)
    outgoing_exchange: dict[PartyRole, ExchangeOverride] = field(default_factory=dict)


class PartyExecutor(abc.ABC):
    """Runs one party as a sequential task driven by the envelopes it receives."""

    role: PartyRole

    def __init__(
        self,
        router: Router,
        suite: HashSuiteConfig,
        halves: tuple[KeyHalf, KeyHalf],
        transcript: Transcript | None = None,
    ) -> None:
        self.router = router
        self.suite = suite
        self.halves = halves
        self.transcript = transcript

    @property
    def name(self) -> str:
        return self.role.display_name

    def combined_key(self) -> CombinedKey:
        return combine_keys(*self.halves)

    def record(
        self, kind: EventKind, peer: PartyRole | None = None, **detail: Any
    ) -> None:
        if self.transcript is not None:
            self.transcript.record(Phase.MESSAGING, kind, self.role, peer, **detail)

    @abc.abstractmethod
    async def execute(self) -> None:
        """Plays this party's part of the messaging phase to completion."""
