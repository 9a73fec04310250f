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

"""Attack scenarios and the Monte Carlo driver."""

import json
import unittest

import numpy as np
import pytest
from pydantic import ValidationError

from quantum_signature import analysis
from quantum_signature.adversary.monte_carlo import (
    AttackParams,
    monte_carlo,
    predicted_rate,
    rates_agree,
    trial_seed,
    wilson_ci,
)
from quantum_signature.adversary.scenarios import (
    AttackKind,
    DosTarget,
    ForgeryStrategy,
    Placement,
    RepudiationPlan,
    corruption_overrides,
    dos_scenario,
    flip_message_bits,
    forgery_attack,
    integrity_attack,
    repudiation_attack,
)
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.errors import DomainError
from quantum_signature.shared_libraries.types import PartyRole, Verdict

BOB, CHARLIE = PartyRole.VERIFIER_1, PartyRole.VERIFIER_2


class TestScenarios(unittest.TestCase):
    def setUp(self):
        super().setUp()
        self.config = RunConfig(seed=13)

    def test_integrity_attack_is_caught_by_charlie(self):
        for flips in (1, 5, 64):
            with self.subTest(flips=flips):
                outcome = integrity_attack(self.config, flips=flips)
                self.assertEqual(outcome.bob_verdict, Verdict.ACCEPTED)
                self.assertEqual(outcome.charlie_verdict, Verdict.REJECTED)
                self.assertFalse(outcome.success)
                self.assertTrue(outcome.detail["modified"])

    def test_integrity_predicate_with_untouched_message(self):
        outcome = integrity_attack(self.config, tamper=lambda m: m)
        self.assertEqual(outcome.charlie_verdict, Verdict.ACCEPTED)
        self.assertTrue(outcome.success)
        self.assertFalse(outcome.detail["modified"])

    def test_forgery_by_reuse_fails(self):
        outcome = forgery_attack(ForgeryStrategy.REUSE, self.config)
        self.assertEqual(outcome.bob_verdict, Verdict.ACCEPTED)
        self.assertEqual(outcome.charlie_verdict, Verdict.REJECTED)
        self.assertFalse(outcome.success)

    def test_forgery_by_guessing_fails_at_full_scale(self):
        outcome = forgery_attack("guess", self.config)
        self.assertEqual(outcome.charlie_verdict, Verdict.REJECTED)
        self.assertEqual(outcome.detail["guessed_blocks"], self.config.n_blocks // 2)
        self.assertFalse(outcome.success)

    def test_forgery_oracle_sanity_check(self):
        outcome = forgery_attack("guess", self.config, oracle=True)
        self.assertEqual(outcome.charlie_verdict, Verdict.ACCEPTED)
        self.assertTrue(outcome.success)
        self.assertEqual(outcome.detail["correct_guesses"], outcome.detail["guessed_blocks"])

    def test_repudiation_outside_bobs_view_succeeds(self):
        outcome = repudiation_attack(
            RepudiationPlan(e=3, placement=Placement.BOB_UNKNOWN), self.config
        )
        self.assertEqual(outcome.bob_verdict, Verdict.ACCEPTED)
        self.assertEqual(outcome.charlie_verdict, Verdict.REJECTED)
        self.assertTrue(outcome.success)
        self.assertEqual(outcome.detail["bob_known_hits"], 0)
        self.assertEqual(outcome.reports[CHARLIE].mismatches, 3)

    def test_repudiation_seen_by_bob_aborts(self):
        outcome = repudiation_attack(
            RepudiationPlan(e=1, placement=Placement.BOB_KNOWN), self.config
        )
        self.assertEqual(outcome.bob_verdict, Verdict.REJECTED)
        self.assertEqual(outcome.charlie_verdict, Verdict.ABORTED)
        self.assertFalse(outcome.success)
        self.assertTrue(outcome.transcript.is_aborted)

    def test_repudiation_with_explicit_labels(self):
        # Bob tolerates everything, so Charlie always gets to verify.
        config = self.config.model_copy(update={"v_b": 1.0})
        outcome = repudiation_attack(RepudiationPlan(e=2, labels=(4, 1)), config)
        self.assertEqual(outcome.bob_verdict, Verdict.ACCEPTED)
        self.assertEqual(outcome.detail["labels"], [1, 4])
        self.assertEqual(outcome.reports[CHARLIE].mismatched_labels, ("k2:B1", "k2:B4"))

    def test_repudiation_plan_validation(self):
        with self.assertRaises(ValidationError):
            RepudiationPlan(e=2, labels=(1,))
        with self.assertRaises(ValidationError):
            RepudiationPlan(e=0)
        plan = RepudiationPlan(e=20, placement=Placement.BOB_UNKNOWN)
        with self.assertRaises(ValueError):
            plan.choose_labels(32, frozenset(range(1, 17)), np.random.default_rng(0))
        with self.assertRaises(ValueError):
            RepudiationPlan(e=40).choose_labels(32, frozenset(), np.random.default_rng(0))

    def test_dos_on_own_key(self):
        outcome = dos_scenario(self.config, target=DosTarget.SELF, party=BOB, corrupt_blocks=1)
        self.assertEqual(outcome.bob_verdict, Verdict.REJECTED)
        self.assertEqual(outcome.charlie_verdict, Verdict.ABORTED)
        self.assertTrue(outcome.success)

    def test_dos_through_the_exchange(self):
        outcome = dos_scenario(self.config, target="exchange", party=BOB, corrupt_blocks=2)
        self.assertEqual(outcome.bob_verdict, Verdict.ACCEPTED)
        self.assertEqual(outcome.charlie_verdict, Verdict.REJECTED)
        self.assertEqual(outcome.reports[CHARLIE].mismatches, 2)
        self.assertTrue(outcome.success)

    def test_dos_absorbed_by_tolerance(self):
        config = self.config.model_copy(update={"v_c": 0.25})
        outcome = dos_scenario(config, target=DosTarget.EXCHANGE, party=BOB, corrupt_blocks=2)
        self.assertEqual(outcome.charlie_verdict, Verdict.ACCEPTED)
        self.assertFalse(outcome.success)

    def test_signer_cannot_mount_dos(self):
        with self.assertRaises(ValueError):
            corruption_overrides(
                DosTarget.SELF, PartyRole.SIGNER, 1, 32, np.random.default_rng(0)
            )

    def test_flip_message_bits(self):
        rng = np.random.default_rng(3)
        message = b"\x00" * 16
        tampered = flip_message_bits(message, 5, rng)
        flipped = sum(bin(a ^ b).count("1") for a, b in zip(message, tampered))
        self.assertEqual(flipped, 5)
        self.assertNotEqual(flip_message_bits(b"", 1, rng), b"")


class TestStatistics(unittest.TestCase):
    def test_wilson_interval(self):
        low, high = wilson_ci(50, 100)
        self.assertAlmostEqual(low, 0.40383, places=4)
        self.assertAlmostEqual(high, 0.59617, places=4)
        self.assertEqual(wilson_ci(0, 0), (0.0, 0.0))
        self.assertAlmostEqual(wilson_ci(0, 10)[0], 0.0)
        self.assertAlmostEqual(wilson_ci(10, 10)[1], 1.0)

    def test_rates_agree(self):
        self.assertTrue(rates_agree(0.0, 0.0, 100))
        self.assertFalse(rates_agree(0.01, 0.0, 100))
        self.assertTrue(rates_agree(0.52, 0.5, 1000))
        self.assertFalse(rates_agree(0.6, 0.5, 1000))

    def test_trial_seeds(self):
        self.assertEqual(trial_seed(1, 5), trial_seed(1, 5))
        self.assertEqual(len({trial_seed(1, i) for i in range(1000)}), 1000)
        self.assertTrue(all(0 <= trial_seed(2**64 - 1, i) < 2**64 for i in range(10)))

    def test_predicted_rates(self):
        config = RunConfig()
        self.assertAlmostEqual(
            predicted_rate(AttackKind.REPUDIATION, AttackParams(e=7), config), 0.0034, places=4
        )
        self.assertEqual(predicted_rate(AttackKind.INTEGRITY, AttackParams(), config), 0.0)
        self.assertEqual(
            predicted_rate(
                AttackKind.REPUDIATION, AttackParams(e=2, placement="bob_known"), config
            ),
            0.0,
        )
        self.assertEqual(predicted_rate(AttackKind.DOS, AttackParams(corrupt_blocks=1), config), 1.0)


class TestMonteCarlo(unittest.TestCase):
    def test_repudiation_single_block_is_a_coin_flip(self):
        report = monte_carlo("repudiation", AttackParams(n_blocks=32, e=1), trials=20_000, seed=1)
        self.assertEqual(report.engine, "sampled")
        self.assertEqual(report.predicted_rate, 0.5)
        self.assertLess(abs(report.rate - 0.5), 0.02)
        self.assertLessEqual(report.ci_low, report.rate)
        self.assertLessEqual(report.rate, report.ci_high)

    def test_desk_scale_forgery(self):
        report = monte_carlo("forgery_guess", AttackParams(l_bits=16), trials=20_000, seed=2)
        self.assertEqual(report.params["l_bits"], 16)
        self.assertEqual(report.params["n_blocks"], 2)
        self.assertAlmostEqual(report.predicted_rate, 1 / 256)
        self.assertLess(abs(report.rate - 1 / 256), 0.0025)

    def test_sampled_forgery_refuses_wide_blocks(self):
        with self.assertRaises(DomainError):
            monte_carlo("forgery_guess", AttackParams(l_bits=256, n_blocks=2), trials=10)

    def test_deterministic_placements_agree_across_engines(self):
        params = AttackParams(n_blocks=8, e=2, l_bits=64, placement=Placement.BOB_UNKNOWN)
        sampled = monte_carlo("repudiation", params, trials=5, seed=3)
        played = monte_carlo("repudiation", params, trials=5, seed=3, engine="protocol")
        self.assertEqual(sampled.successes, 5)
        self.assertEqual(played.successes, 5)
        self.assertTrue(played.agrees)

    def test_integrity_falls_back_to_protocol_runs(self):
        report = monte_carlo(AttackKind.INTEGRITY, AttackParams(), trials=5, seed=4)
        self.assertEqual(report.engine, "protocol")
        self.assertEqual(report.successes, 0)
        self.assertTrue(report.agrees)

    def test_report_is_reproducible(self):
        params = AttackParams(n_blocks=32, e=7)
        first = monte_carlo("repudiation", params, trials=2000, seed=5).to_json()
        second = monte_carlo("repudiation", params, trials=2000, seed=5).to_json()
        self.assertEqual(first, second)
        self.assertEqual(json.loads(first)["kind"], "repudiation")

    def test_trials_must_be_positive(self):
        with self.assertRaises(DomainError):
            monte_carlo("repudiation", trials=0)


@pytest.mark.slow
def test_worker_count_does_not_change_results():
    params = AttackParams(l_bits=16)
    one = monte_carlo("forgery_guess", params, trials=8, seed=6, engine="protocol", workers=1)
    two = monte_carlo("forgery_guess", params, trials=8, seed=6, engine="protocol", workers=2)
    assert one.successes == two.successes
    assert one.to_json() == two.to_json()


REPUDIATION_GRID = [(n, e) for n in (8, 16, 32) for e in range(1, n // 2 + 1)]
# Per-cell band over 28 cells per engine.
GRID_Z = 4.0
# No key expansion: 32- down to 8-bit blocks.
GRID_BASE = RunConfig(l_bits=256, delta_key_bits=None)


def _grid_cases():
    for n, e in REPUDIATION_GRID:
        yield pytest.param("sampled", n, e, 20_000, id=f"sampled-n{n}-e{e}")
        yield pytest.param(
            "protocol", n, e, 400, id=f"protocol-n{n}-e{e}", marks=pytest.mark.slow
        )


@pytest.mark.parametrize(("engine", "n", "e", "trials"), list(_grid_cases()))
def test_repudiation_rate_matches_closed_form(engine, n, e, trials):
    expected = analysis.p_rep_closed_form(n, e).value
    report = monte_carlo(
        "repudiation",
        AttackParams(n_blocks=n, e=e),
        trials=trials,
        seed=1000 * n + e,
        engine=engine,
        config=GRID_BASE,
    )
    assert report.engine == engine
    assert report.predicted_rate == pytest.approx(expected)
    low, high = wilson_ci(report.successes, trials, z=GRID_Z)
    assert low <= expected <= high, (report.successes, trials, expected)
