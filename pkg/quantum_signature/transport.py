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

"""Connections between the parties: envelopes, routing policy and two transports."""

from __future__ import annotations

import abc
import asyncio
import logging
import socket
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, field_serializer, field_validator

from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.errors import (
    RoutingPolicyViolation,
    TransportClosed,
)
from quantum_signature.shared_libraries.types import (
    EventKind,
    PartyRole,
    Phase,
    Transcript,
)

logger = logging.getLogger(__name__)


class EnvelopeKind(str, Enum):
    SIGNED_TUPLE = "signed_tuple"
    ABORT = "abort"


class Envelope(BaseModel):
    """One message between two parties; payload is opaque bytes."""

    model_config = ConfigDict(frozen=True)

    message_id: str
    phase: Phase
    sender: PartyRole
    receiver: PartyRole
    kind: EnvelopeKind
    payload: bytes = b""

    @field_validator("payload", mode="before")
    @classmethod
    def _accept_hex(cls, value: Any) -> Any:
        if isinstance(value, str):
            return bytes.fromhex(value)
        return value

    @field_serializer("payload", when_used="json")
    def _serialize_payload(self, value: bytes) -> str:
        return value.hex()


def check_route(phase: Phase, sender: PartyRole, receiver: PartyRole) -> None:
    """Rejects routes the protocol forbids; exchange traffic never touches the signer."""
    if sender == receiver:
        raise RoutingPolicyViolation(f"{sender.display_name} cannot send to itself")
    if phase == Phase.EXCHANGE and PartyRole.SIGNER in (sender, receiver):
        raise RoutingPolicyViolation(
            f"exchange traffic {sender.display_name} -> {receiver.display_name} "
            "must not involve the signer"
        )


class Transport(abc.ABC):
    """Delivers envelopes to per-party inboxes, each exactly once."""

    def __init__(self) -> None:
        self.closed = False

    @abc.abstractmethod
    async def send(self, envelope: Envelope) -> None: ...

    @abc.abstractmethod
    async def receive(self, role: PartyRole) -> Envelope: ...

    async def close(self) -> None:
        self.closed = True


class InMemoryTransport(Transport):
    """One asyncio.Queue per party."""

    def __init__(self) -> None:
        super().__init__()
        self._inboxes: dict[PartyRole, asyncio.Queue[Envelope | None]] = {
            role: asyncio.Queue() for role in PartyRole
        }

    async def send(self, envelope: Envelope) -> None:
        if self.closed:
            raise TransportClosed(f"cannot send {envelope.message_id}: transport closed")
        await self._inboxes[envelope.receiver].put(envelope)

    async def receive(self, role: PartyRole) -> Envelope:
        inbox = self._inboxes[role]
        if self.closed and inbox.empty():
            raise TransportClosed(f"{role.display_name}'s inbox is closed")
        envelope = await inbox.get()
        if envelope is None:
            raise TransportClosed(f"{role.display_name}'s inbox is closed")
        return envelope

    async def close(self) -> None:
        await super().close()
        for inbox in self._inboxes.values():
            inbox.put_nowait(None)


def encode_frame(body: bytes) -> bytes:
    """u32 big-endian length, then the body."""
    if len(body) >= 2 ** (8 * constants.FRAME_LENGTH_SIZE):
        raise ValueError(f"frame of {len(body)} bytes is too large")
    return len(body).to_bytes(constants.FRAME_LENGTH_SIZE, "big") + body


async def read_frame(reader: asyncio.StreamReader) -> bytes:
    try:
        header = await reader.readexactly(constants.FRAME_LENGTH_SIZE)
        return await reader.readexactly(int.from_bytes(header, "big"))
    except asyncio.IncompleteReadError as e:
        raise TransportClosed(f"stream ended after {len(e.partial)} bytes of a frame") from None


class FramedStreamTransport(Transport):
    """Length-prefixed frames over byte streams, one stream per receiving party."""

    def __init__(
        self,
        readers: dict[PartyRole, asyncio.StreamReader],
        writers: dict[PartyRole, asyncio.StreamWriter],
    ) -> None:
        super().__init__()
        self._readers = readers
        self._writers = writers

    @classmethod
    async def loopback(cls) -> FramedStreamTransport:
        """All three inboxes on in-process socket pairs."""
        readers: dict[PartyRole, asyncio.StreamReader] = {}
        writers: dict[PartyRole, asyncio.StreamWriter] = {}
        for role in PartyRole:
            inbound, outbound = socket.socketpair()
            readers[role], _ = await asyncio.open_connection(sock=inbound)
            _, writers[role] = await asyncio.open_connection(sock=outbound)
        return cls(readers, writers)

    async def send(self, envelope: Envelope) -> None:
        if self.closed:
            raise TransportClosed(f"cannot send {envelope.message_id}: transport closed")
        writer = self._writers[envelope.receiver]
        writer.write(encode_frame(envelope.model_dump_json().encode("utf-8")))
        await writer.drain()

    async def receive(self, role: PartyRole) -> Envelope:
        frame = await read_frame(self._readers[role])
        return Envelope.model_validate_json(frame)

    async def close(self) -> None:
        await super().close()
        for writer in self._writers.values():
            writer.close()
            try:
                await writer.wait_closed()
            except ConnectionError:
                pass


class Router:
    """Sends envelopes over a transport under the routing policy and logs both ends."""

    def __init__(self, transport: Transport, transcript: Transcript | None = None) -> None:
        self.transport = transport
        self.transcript = transcript
        self._counters: dict[Phase, int] = {}

    def next_message_id(self, phase: Phase) -> str:
        count = self._counters.get(phase, 0)
        self._counters[phase] = count + 1
        return f"{phase.value}-{count}"

    async def send(
        self,
        sender: PartyRole,
        receiver: PartyRole,
        kind: EnvelopeKind,
        payload: bytes = b"",
        phase: Phase = Phase.MESSAGING,
    ) -> Envelope:
        check_route(phase, sender, receiver)
        envelope = Envelope(
            message_id=self.next_message_id(phase),
            phase=phase,
            sender=sender,
            receiver=receiver,
            kind=kind,
            payload=payload,
        )
        if self.transcript is not None:
            self.transcript.record(
                phase,
                EventKind.SEND,
                sender,
                receiver,
                envelope.message_id,
                envelope_kind=kind.value,
                size=len(payload),
            )
        await self.transport.send(envelope)
        logger.debug(
            "%s -> %s: %s (%d bytes)",
            sender.display_name,
            receiver.display_name,
            kind.value,
            len(payload),
        )
        return envelope

    async def receive(self, role: PartyRole) -> Envelope:
        envelope = await self.transport.receive(role)
        if self.transcript is not None:
            self.transcript.record(
                envelope.phase,
                EventKind.RECEIVE,
                role,
                envelope.sender,
                envelope.message_id,
                envelope_kind=envelope.kind.value,
                size=len(envelope.payload),
            )
        return envelope


async def route(
    sender: PartyRole,
    receiver: PartyRole,
    payload: bytes,
    transport: Transport,
    transcript: Transcript | None = None,
    phase: Phase = Phase.MESSAGING,
    kind: EnvelopeKind = EnvelopeKind.SIGNED_TUPLE,
) -> Envelope:
    """Sends one payload and returns it as delivered at the receiver."""
    router = Router(transport, transcript)
    # Stream transports block on large frames until the receiver reads.
    receiving = asyncio.create_task(router.receive(receiver))
    try:
        await router.send(sender, receiver, kind, payload, phase)
    except BaseException:
        receiving.cancel()
        raise
    return await receiving
