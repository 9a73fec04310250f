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

"""End-to-end protocol runs with honest parties."""

import json
import unittest

import pytest

from quantum_signature.parties.executor import PartyOverrides
from quantum_signature.parties.verifier import VerifierExecutor
from quantum_signature.protocol import ProtocolHost, run_honest_protocol
from quantum_signature.shared_libraries.config import MessageSource, RunConfig
from quantum_signature.shared_libraries.errors import ConfigError
from quantum_signature.shared_libraries.types import (
    EventKind,
    PartyRole,
    Phase,
    Verdict,
)
from quantum_signature.transport import FramedStreamTransport

BOB, CHARLIE = PartyRole.VERIFIER_1, PartyRole.VERIFIER_2


class TestHonestRun(unittest.TestCase):
    def setUp(self):
        super().setUp()
        self.config = RunConfig(seed=21)

    def test_messages_of_any_length_verify(self):
        n = self.config.n_blocks
        for size in (0, 1, 1024, 1 << 20):
            with self.subTest(size=size):
                transcript = run_honest_protocol(self.config, message=b"\x5a" * size)
                self.assertEqual(transcript.verdicts(), {BOB: Verdict.ACCEPTED, CHARLIE: Verdict.ACCEPTED})
                for report in transcript.reports().values():
                    self.assertEqual(report.mismatches, 0)
                    self.assertEqual(report.matches, 3 * n // 2)
                    self.assertEqual(report.unknowns, n // 2)

    def test_transcript_invariants(self):
        transcript = run_honest_protocol(self.config)
        self.assertEqual(transcript.unmatched_sends(), [])
        self.assertEqual(transcript.signer_exchange_events(), [])
        self.assertFalse(transcript.is_aborted)
        phases = [event.phase for event in transcript.events]
        self.assertEqual(phases, sorted(phases, key=[Phase.DISTRIBUTION, Phase.EXCHANGE, Phase.MESSAGING].index))
        self.assertEqual([event.seq for event in transcript.events], list(range(len(transcript.events))))

    def test_transcript_json(self):
        document = json.loads(run_honest_protocol(self.config).to_json(label="x"))
        self.assertEqual(document["seed"], 21)
        self.assertEqual(document["label"], "x")
        kinds = {event["kind"] for event in document["events"]}
        self.assertTrue({"send", "receive", "verification", "verdict"} <= kinds)

    def test_same_seed_same_transcript(self):
        self.assertEqual(
            run_honest_protocol(self.config).to_json(),
            run_honest_protocol(self.config).to_json(),
        )

    def test_seed_argument_overrides_config(self):
        host = ProtocolHost(self.config, seed=99)
        transcript = host.run()
        self.assertEqual(transcript.seed, 99)

    def test_keys_are_consumed_by_the_signature(self):
        host = ProtocolHost(self.config)
        host.run()
        for key_id in host.distribution.key_ids:
            self.assertTrue(host.store.is_consumed(key_id))

    def test_random_message_source(self):
        config = self.config.model_copy(update={"message": MessageSource.random(300)})
        host = ProtocolHost(config)
        self.assertEqual(len(host.message()), 300)
        self.assertEqual(host.message(), ProtocolHost(config).message())
        transcript = host.run()
        self.assertEqual(set(transcript.verdicts().values()), {Verdict.ACCEPTED})
        self.assertEqual(host.signer.sent.message, host.message())

    def test_invalid_config_is_refused_before_any_party_exists(self):
        with self.assertRaises(ConfigError):
            ProtocolHost(RunConfig(n_blocks=7))

    def test_tolerant_verifiers_and_desk_scale(self):
        config = RunConfig.desk_scale(16, v_b=0.25, v_c=0.25)
        transcript = run_honest_protocol(config, seed=1)
        self.assertEqual(set(transcript.verdicts().values()), {Verdict.ACCEPTED})


class TestRejectionPath(unittest.TestCase):
    def test_bob_rejects_and_charlie_is_aborted(self):
        def corrupt(key):
            blocks = list(key.blocks)
            blocks[0] = blocks[0].flipped()
            return key.model_copy(update={"blocks": tuple(blocks)})

        host = ProtocolHost(
            RunConfig(seed=5), overrides=PartyOverrides(candidate_keys={BOB: corrupt})
        )
        transcript = host.run()
        self.assertEqual(transcript.verdicts(), {BOB: Verdict.REJECTED, CHARLIE: Verdict.ABORTED})
        self.assertTrue(transcript.is_aborted)
        self.assertNotIn(CHARLIE, transcript.reports())
        self.assertEqual(transcript.reports()[BOB].mismatched_labels, ("k1:B1",))
        self.assertEqual(transcript.unmatched_sends(), [])
        aborts = transcript.of_kind(EventKind.ABORT)
        self.assertEqual([(a.party, a.peer) for a in aborts], [(BOB, CHARLIE)])

    def test_only_verifiers_verify(self):
        with self.assertRaises(ValueError):
            VerifierExecutor(PartyRole.SIGNER, None, None, (None, None), None)


@pytest.mark.asyncio
async def test_stream_transport_run():
    host = ProtocolHost(RunConfig(seed=8), transport_factory=FramedStreamTransport.loopback)
    host.distribute()
    transcript = await host.messaging(b"over sockets" * 1000)
    assert transcript.verdicts() == {BOB: Verdict.ACCEPTED, CHARLIE: Verdict.ACCEPTED}
    assert transcript.unmatched_sends() == []


@pytest.mark.asyncio
async def test_messaging_distributes_on_demand():
    host = ProtocolHost(RunConfig(seed=8))
    transcript = await host.messaging()
    assert host.distribution is not None
    assert transcript.verdicts()[CHARLIE] == Verdict.ACCEPTED
