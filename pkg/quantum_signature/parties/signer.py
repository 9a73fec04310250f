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

import logging

from quantum_signature.parties.executor import KeyOverride, PartyExecutor
from quantum_signature.shared_libraries.types import (
    HashSuiteConfig,
    KeyHalf,
    PartyRole,
    SignedTuple,
    Transcript,
)
from quantum_signature.signing import sign
from quantum_signature.tools.key_store import KeyStore
from quantum_signature.tools.wire import encode_tuple
from quantum_signature.transport import EnvelopeKind, Router

logger = logging.getLogger(__name__)


class SignerExecutor(PartyExecutor):
    """Alice: signs m with k_1||k_2 and sends (m, S_a) to Bob."""

    role = PartyRole.SIGNER

    def __init__(
        self,
        router: Router,
        suite: HashSuiteConfig,
        halves: tuple[KeyHalf, KeyHalf],
        message: bytes,
        transcript: Transcript | None = None,
        store: KeyStore | None = None,
        signing_key: KeyOverride | None = None,
    ) -> None:
        super().__init__(router, suite, halves, transcript)
        self.message = message
        self.store = store
        self.signing_key = signing_key
        self.sent: SignedTuple | None = None

    async def execute(self) -> None:
        key = self.combined_key()
        if self.signing_key is not None:
            key = self.signing_key(key)
        signature = sign(self.message, key, self.suite, self.store)
        self.sent = SignedTuple(message=self.message, signature=signature)
        await self.router.send(
            self.role, PartyRole.VERIFIER_1, EnvelopeKind.SIGNED_TUPLE, encode_tuple(self.sent)
        )
        logger.info("%s sent (m, S_a): %d-byte message", self.name, len(self.message))
