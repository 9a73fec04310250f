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

"""Host that runs Alice, Bob and Charlie through both protocol phases."""

import asyncio
import inspect
import logging
from collections.abc import Awaitable, Callable

from quantum_signature.distribution import (
    AuthenticatedChannel,
    DistributionResult,
    KeyDeliveryClient,
    SeedSource,
    run_distribution,
)
from quantum_signature.parties.executor import PartyOverrides
from quantum_signature.parties.signer import SignerExecutor
from quantum_signature.parties.verifier import VerifierExecutor
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.types import PartyRole, Transcript
from quantum_signature.tools.key_store import KeyStore
from quantum_signature.transport import InMemoryTransport, Router, Transport

logger = logging.getLogger(__name__)

TransportFactory = Callable[[], Transport | Awaitable[Transport]]


class ProtocolHost:
    """Coordinates one protocol run.

    The host owns the distribution result and hands each party only its own
    key halves; all randomness flows from the run seed.
    """

    def __init__(
        self,
        config: RunConfig,
        seed: int | None = None,
        overrides: PartyOverrides | None = None,
        store: KeyStore | None = None,
        transport_factory: TransportFactory = InMemoryTransport,
        channel: AuthenticatedChannel | None = None,
        client: KeyDeliveryClient | None = None,
    ) -> None:
        self.config = config.validated()
        self.suite = config.suite()
        self.seed = config.seed if seed is None else seed
        self.source = SeedSource(self.seed)
        self.overrides = overrides or PartyOverrides()
        self.store = store if store is not None else KeyStore()
        self.transport_factory = transport_factory
        self.transcript = Transcript(seed=self.seed)
        self.channel = channel
        self.client = client
        self.distribution: DistributionResult | None = None
        self.signer: SignerExecutor | None = None
        self.verifiers: dict[PartyRole, VerifierExecutor] = {}

    def distribute(self) -> DistributionResult:
        if self.channel is not None and self.channel.transcript is None:
            self.channel.transcript = self.transcript
        self.distribution = run_distribution(
            self.config,
            self.source,
            store=self.store,
            transcript=self.transcript,
            channel=self.channel,
            client=self.client,
            outgoing=self.overrides.outgoing_exchange,
        )
        return self.distribution

    def message(self) -> bytes:
        return self.config.message.resolve(self.source.generator("message"))

    async def _open_transport(self) -> Transport:
        transport = self.transport_factory()
        if inspect.isawaitable(transport):
            transport = await transport
        return transport

    async def messaging(self, message: bytes | None = None) -> Transcript:
        """Sign at Alice, verify at Bob, forward or abort, verify at Charlie."""
        if self.distribution is None:
            self.distribute()
        assert self.distribution is not None
        if message is None:
            message = self.message()

        transport = await self._open_transport()
        router = Router(transport, self.transcript)
        self.signer = SignerExecutor(
            router,
            self.suite,
            self.distribution.halves(PartyRole.SIGNER),
            message,
            transcript=self.transcript,
            store=self.store,
            signing_key=self.overrides.signing_key,
        )
        for role, forward_to in (
            (PartyRole.VERIFIER_1, PartyRole.VERIFIER_2),
            (PartyRole.VERIFIER_2, None),
        ):
            self.verifiers[role] = VerifierExecutor(
                role,
                router,
                self.suite,
                self.distribution.halves(role),
                self.config.threshold(role),
                transcript=self.transcript,
                forward_to=forward_to,
                candidate_key=self.overrides.candidate_keys.get(role),
                forward=self.overrides.forward if role == PartyRole.VERIFIER_1 else None,
            )
        try:
            await asyncio.gather(
                self.verifiers[PartyRole.VERIFIER_2].execute(),
                self.verifiers[PartyRole.VERIFIER_1].execute(),
                self.signer.execute(),
            )
        finally:
            await transport.close()
        logger.info(
            "run %d finished: %s",
            self.seed,
            ", ".join(f"{r.display_name} {v.value}" for r, v in self.transcript.verdicts().items()),
        )
        return self.transcript

    def run(self, message: bytes | None = None) -> Transcript:
        self.distribute()
        return asyncio.run(self.messaging(message))


def run_honest_protocol(
    config: RunConfig, seed: int | None = None, message: bytes | None = None
) -> Transcript:
    """Both phases with honest parties; both verdicts are expected to be accepted."""
    return ProtocolHost(config, seed).run(message)
