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

from quantum_signature.parties.executor import KeyOverride, PartyExecutor, TupleOverride
from quantum_signature.shared_libraries.errors import DecodeError, SuiteMismatch
from quantum_signature.shared_libraries.types import (
    EventKind,
    HashSuiteConfig,
    KeyHalf,
    PartyRole,
    SignedTuple,
    Transcript,
    Verdict,
    VerificationReport,
    VerificationThreshold,
)
from quantum_signature.signing import compute_candidate, verify
from quantum_signature.tools.wire import decode_tuple, encode_tuple
from quantum_signature.transport import Envelope, EnvelopeKind, Router

logger = logging.getLogger(__name__)


class VerifierExecutor(PartyExecutor):
    """Bob or Charlie: verifies the received tuple against the partial candidate.

    Bob forwards (m, S_a) to Charlie when he accepts and sends an abort notice
    when he rejects.
    """

    def __init__(
        self,
        role: PartyRole,
        router: Router,
        suite: HashSuiteConfig,
        halves: tuple[KeyHalf, KeyHalf],
        threshold: VerificationThreshold,
        transcript: Transcript | None = None,
        forward_to: PartyRole | None = None,
        candidate_key: KeyOverride | None = None,
        forward: TupleOverride | None = None,
    ) -> None:
        if role == PartyRole.SIGNER:
            raise ValueError("the signer does not verify")
        super().__init__(router, suite, halves, transcript)
        self.role = role
        self.threshold = threshold
        self.forward_to = forward_to
        self.candidate_key = candidate_key
        self.forward = forward
        self.received: SignedTuple | None = None
        self.report: VerificationReport | None = None
        self.verdict: Verdict | None = None

    async def execute(self) -> None:
        envelope = await self.router.receive(self.role)
        if envelope.kind == EnvelopeKind.ABORT:
            self._conclude(Verdict.ABORTED, envelope.sender, reason=envelope.payload.decode())
            return

        verdict = self._check(envelope)
        if self.forward_to is None:
            return
        if verdict == Verdict.ACCEPTED and self.received is not None:
            outgoing = self.received
            if self.forward is not None:
                outgoing = self.forward(outgoing)
            await self.router.send(
                self.role, self.forward_to, EnvelopeKind.SIGNED_TUPLE, encode_tuple(outgoing)
            )
        else:
            reason = f"{self.name} rejected the signature"
            self.record(EventKind.ABORT, self.forward_to, reason=reason)
            await self.router.send(
                self.role, self.forward_to, EnvelopeKind.ABORT, reason.encode()
            )

    def _check(self, envelope: Envelope) -> Verdict:
        try:
            self.received = decode_tuple(envelope.payload)
            key = self.combined_key()
            if self.candidate_key is not None:
                key = self.candidate_key(key)
            candidate = compute_candidate(self.received.message, key, self.suite)
            self.report = verify(self.received.signature, candidate, self.threshold)
        except (DecodeError, SuiteMismatch) as e:
            logger.warning("%s cannot verify %s: %s", self.name, envelope.message_id, e)
            self._conclude(Verdict.REJECTED, envelope.sender, reason=str(e))
            return Verdict.REJECTED

        self.record(
            EventKind.VERIFICATION,
            envelope.sender,
            report=self.report.model_dump(mode="json"),
        )
        self._conclude(self.report.verdict, envelope.sender)
        return self.report.verdict

    def _conclude(self, verdict: Verdict, peer: PartyRole, **detail: str) -> None:
        self.verdict = verdict
        self.record(EventKind.VERDICT, peer, verdict=verdict.value, **detail)
        logger.info("%s: %s", self.name, verdict.value)
