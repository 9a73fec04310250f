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

"""Closed-form security estimates."""

import math
import unittest
from fractions import Fraction

import pytest
from scipy import stats

from quantum_signature.analysis import (
    CollisionParams,
    ProbabilityValue,
    SecondPreimageParams,
    birthday_approximation,
    block_preimage_strength,
    p_collision,
    p_guess,
    p_guess_threshold,
    p_rep_bruteforce,
    p_rep_closed_form,
    p_rep_protocol,
    p_rep_threshold,
    protocol_strength,
    second_preimage_strength,
    work_factor,
)
from quantum_signature.shared_libraries.config import RunConfig
from quantum_signature.shared_libraries.errors import DomainError
from quantum_signature.shared_libraries.types import HashAlgorithmId


class TestGuessing(unittest.TestCase):
    def test_values(self):
        self.assertAlmostEqual(p_guess(112).value / 1.3878e-17, 1.0, places=3)
        self.assertAlmostEqual(p_guess(256).value / 2.9387e-39, 1.0, places=3)
        self.assertEqual(p_guess(256).log2_value, -128)
        self.assertEqual(p_guess(16).fraction, Fraction(1, 256))

    def test_domain(self):
        for bad in (0, 1, 17):
            with self.subTest(l=bad), self.assertRaises(DomainError):
                p_guess(bad)

    def test_threshold_variant(self):
        self.assertEqual(p_guess_threshold(16, 2, 0).fraction, Fraction(1, 256))
        self.assertEqual(p_guess_threshold(16, 2, 1).fraction, Fraction(1))
        # Without tolerance it is the plain l/2-bit guess.
        self.assertEqual(p_guess_threshold(256, 32, 0).fraction, p_guess(256).fraction)
        with self.assertRaises(DomainError):
            p_guess_threshold(100, 32, 0)


class TestRepudiation(unittest.TestCase):
    def test_closed_form_matches_enumeration(self):
        for n in range(2, 17, 2):
            for e in range(1, n + 1):
                with self.subTest(n=n, e=e):
                    self.assertEqual(
                        p_rep_closed_form(n, e).fraction, p_rep_bruteforce(n, e).fraction
                    )

    def test_closed_form_matches_counting_up_to_forty(self):
        for n in range(18, 41, 2):
            for e in range(1, n + 1):
                with self.subTest(n=n, e=e):
                    self.assertEqual(
                        p_rep_closed_form(n, e).fraction, p_rep_bruteforce(n, e).fraction
                    )

    def test_known_values(self):
        self.assertAlmostEqual(p_rep_closed_form(32, 7).value, 0.0034, places=4)
        for n in (2, 8, 32, 1024):
            self.assertEqual(p_rep_closed_form(n, 1).value, 0.5)
        self.assertEqual(p_rep_closed_form(32, 17).value, 0.0)
        self.assertEqual(p_rep_closed_form(32, 17).log2_value, -math.inf)

    def test_domain(self):
        with self.assertRaises(DomainError):
            p_rep_closed_form(7, 1)
        with self.assertRaises(DomainError):
            p_rep_closed_form(32, 0)
        with self.assertRaises(DomainError):
            p_rep_bruteforce(42, 1)

    def test_threshold_reduces_to_closed_form(self):
        for e in range(1, 17):
            self.assertEqual(p_rep_threshold(32, e, 0).fraction, p_rep_closed_form(32, e).fraction)

    def test_threshold_against_scipy_hypergeometric(self):
        for n, e, t_b in ((32, 7, 0), (32, 7, 2), (32, 20, 5), (64, 10, 3), (16, 16, 8)):
            with self.subTest(n=n, e=e, t_b=t_b):
                expected = stats.hypergeom(n, n // 2, e).cdf(t_b)
                self.assertAlmostEqual(p_rep_threshold(n, e, t_b).value, expected, places=10)

    def test_protocol_thresholds(self):
        self.assertEqual(p_rep_protocol(32, 7, 0.0, 0.0).fraction, p_rep_closed_form(32, 7).fraction)
        # floor(0.25 * 48) = 12 tolerated blocks at Charlie.
        self.assertEqual(p_rep_protocol(32, 7, 0.0, 0.25).value, 0.0)
        self.assertEqual(p_rep_protocol(32, 13, 0.0, 0.25).fraction, p_rep_closed_form(32, 13).fraction)
        loose = p_rep_protocol(32, 7, 0.05, 0.0).value
        self.assertGreater(loose, p_rep_closed_form(32, 7).value)


class TestCollisions(unittest.TestCase):
    def test_known_value(self):
        p = p_collision(CollisionParams(input_length_x_bits=128, digest_length_k_bits=256))
        self.assertAlmostEqual(p.value, 0.3935, places=4)
        approx = birthday_approximation(
            CollisionParams(input_length_x_bits=128, digest_length_k_bits=256)
        )
        self.assertAlmostEqual(approx.value, p.value, places=6)

    def test_no_overflow_and_monotone(self):
        for k in (64, 256, 1024):
            previous = -1.0
            for x in range(0, k + 1, 16):
                p = p_collision(CollisionParams(input_length_x_bits=x, digest_length_k_bits=k))
                self.assertFalse(math.isnan(p.value))
                self.assertTrue(0.0 <= p.value <= 1.0)
                self.assertGreaterEqual(p.value, previous)
                previous = p.value
            self.assertEqual(previous, 1.0)

    def test_tiny_probabilities_keep_their_logarithm(self):
        p = p_collision(CollisionParams(input_length_x_bits=8, digest_length_k_bits=1024))
        self.assertGreater(p.value, 0.0)
        self.assertAlmostEqual(p.log2_value, 2 * 8 - 1024 - 1, delta=0.1)

    def test_domain(self):
        with self.assertRaises(DomainError):
            p_collision(CollisionParams(input_length_x_bits=300, digest_length_k_bits=256))


class TestStrength(unittest.TestCase):
    def test_second_preimage(self):
        sha256 = SecondPreimageParams(digest_d_bits=256, input_D_bits=2**64, hash_block_B_bits=512)
        self.assertEqual(second_preimage_strength(sha256, HashAlgorithmId.SHA2_256), 201)
        sha512 = SecondPreimageParams(digest_d_bits=512, input_D_bits=2**128, hash_block_B_bits=1024)
        self.assertEqual(second_preimage_strength(sha512, HashAlgorithmId.SHA2_512), 394)
        sha384 = SecondPreimageParams(digest_d_bits=384, input_D_bits=2**128, hash_block_B_bits=1024)
        self.assertEqual(second_preimage_strength(sha384, HashAlgorithmId.SHA2_384), 384)
        sha3 = SecondPreimageParams(digest_d_bits=256, input_D_bits=2**64, hash_block_B_bits=1088)
        self.assertEqual(second_preimage_strength(sha3, HashAlgorithmId.SHA3_256), 256)
        shake = SecondPreimageParams(digest_d_bits=1024, input_D_bits=2**64, hash_block_B_bits=1088)
        self.assertEqual(second_preimage_strength(shake, HashAlgorithmId.SHAKE_256), 256)

    def test_input_shorter_than_a_block(self):
        with self.assertRaises(ValueError):
            SecondPreimageParams(digest_d_bits=256, input_D_bits=256, hash_block_B_bits=512)

    def test_block_preimage(self):
        self.assertEqual(block_preimage_strength(1024, 32), 32)
        with self.assertRaises(DomainError):
            block_preimage_strength(1000, 32)

    def test_protocol_strength_names_the_weakest_part(self):
        strength = protocol_strength(RunConfig().suite())
        self.assertEqual(strength.block_hash_bits, 128)
        self.assertEqual(strength.message_hash_bits, 256)
        self.assertEqual(strength.block_preimage_bits, 32)
        self.assertEqual(strength.overall_bits, 32)
        self.assertEqual(strength.weakest, "block_preimage")

    def test_work_factor(self):
        self.assertEqual(work_factor(16), "2^16 (65536)")
        self.assertEqual(work_factor(128), "2^128 (≈ 3.4×10^38)")
        with self.assertRaises(DomainError):
            work_factor(-1)


def test_probability_value_rejects_out_of_range():
    with pytest.raises(DomainError):
        ProbabilityValue.from_fraction(Fraction(3, 2))
    exact = ProbabilityValue.from_fraction(Fraction(1, 3))
    assert exact.is_exact
    assert exact.fraction == Fraction(1, 3)
