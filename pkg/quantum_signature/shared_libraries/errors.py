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

"""Exceptions raised across the package."""


class QdsError(Exception):
    """Base class for every error raised by quantum_signature."""


class LengthMismatch(QdsError, ValueError):
    """Two bit strings that must have equal length do not."""


class LengthConstraintViolated(QdsError, ValueError):
    """The message digest length d is not twice the key length l."""


class NonDivisibleLength(QdsError, ValueError):
    """A key length is not a multiple of the requested block count."""


class UnalignedLength(QdsError, ValueError):
    """A protocol length is not a whole number of bytes."""


class UnsupportedAlgorithm(QdsError, ValueError):
    """The hash algorithm cannot be used for the requested operation."""


class DimensionMismatch(QdsError, ValueError):
    """Shapes (block counts, block lengths, entry counts) disagree."""


class PartialKey(QdsError, ValueError):
    """A full combined key was required but some blocks are unknown."""


class KeyConsumed(QdsError):
    """A one-time key was already used for a signature."""


class UnknownKey(QdsError, KeyError):
    """No key with the given id exists in the store."""


class SuiteMismatch(QdsError, ValueError):
    """Two signature bundles were produced under different hash suites."""


class ChannelFailure(QdsError, RuntimeError):
    """The authenticated classical channel failed during the exchange."""


class RoutingPolicyViolation(QdsError, RuntimeError):
    """A message was addressed to a party that must not receive it."""


class TransportClosed(QdsError, RuntimeError):
    """The transport was closed before the message could be delivered."""


class DecodeError(QdsError, ValueError):
    """A wire payload could not be decoded into a signed tuple."""


class BadMagic(DecodeError):
    pass


class UnsupportedVersion(DecodeError):
    pass


class TruncatedPayload(DecodeError):
    pass


class InconsistentLengths(DecodeError):
    """Declared n / l / digest sizes disagree with the payload."""


class DomainError(QdsError, ValueError):
    """A formula was evaluated outside its domain."""


class ConfigError(QdsError, ValueError):
    """A run configuration violates a protocol precondition."""
