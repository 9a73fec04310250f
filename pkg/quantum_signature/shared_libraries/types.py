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

"""Common data schema and types for the signer, the verifiers and the simulator."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from enum import Enum
from fractions import Fraction
from math import floor
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.errors import (
    DimensionMismatch,
    LengthMismatch,
    NonDivisibleLength,
    PartialKey,
)


class HashAlgorithmId(str, Enum):
    """NIST-approved hash functions usable by the protocol (SHA-1 is excluded)."""

    SHA2_224 = "sha2-224"
    SHA2_256 = "sha2-256"
    SHA2_384 = "sha2-384"
    SHA2_512 = "sha2-512"
    SHA3_224 = "sha3-224"
    SHA3_256 = "sha3-256"
    SHA3_384 = "sha3-384"
    SHA3_512 = "sha3-512"
    SHAKE_128 = "shake-128"
    SHAKE_256 = "shake-256"

    @classmethod
    def parse(cls, text: str | HashAlgorithmId) -> HashAlgorithmId:
        """Accepts 'SHA2-256', 'sha2_256', 'SHAKE-256' and similar spellings."""
        if isinstance(text, HashAlgorithmId):
            return text
        normalized = text.strip().lower().replace("_", "-")
        try:
            return cls(normalized)
        except ValueError:
            raise ValueError(f"Unsupported hash algorithm: {text}") from None

    @classmethod
    def from_wire_id(cls, value: int) -> HashAlgorithmId:
        members = list(cls)
        if not 1 <= value <= len(members):
            raise ValueError(f"Unknown hash algorithm id on the wire: {value}")
        return members[value - 1]

    @property
    def wire_id(self) -> int:
        return list(HashAlgorithmId).index(self) + 1

    @property
    def is_xof(self) -> bool:
        return self in (HashAlgorithmId.SHAKE_128, HashAlgorithmId.SHAKE_256)

    @property
    def is_sha2(self) -> bool:
        return self.value.startswith("sha2-")

    @property
    def digest_bits(self) -> int | None:
        """Fixed output size; None for the XOFs."""
        if self.is_xof:
            return None
        return int(self.value.split("-")[1])

    @property
    def capacity_bits(self) -> int | None:
        """Strength cap of the XOFs (128 or 256); None for fixed-output hashes."""
        if not self.is_xof:
            return None
        return int(self.value.split("-")[1])

    @property
    def hashlib_name(self) -> str:
        family, size = self.value.split("-")
        if family == "sha2":
            return f"sha{size}"
        if family == "sha3":
            return f"sha3_{size}"
        return f"shake_{size}"

    @property
    def display_name(self) -> str:
        return self.value.upper()


class StrengthTriple(BaseModel):
    """Security strength in bits of one hash function."""

    model_config = ConfigDict(frozen=True)

    collision_resistance_bits: int
    preimage_resistance_bits: int
    second_preimage_resistance_bits: tuple[int, int] = Field(
        description="(lower, upper); equal bounds when the strength is a single value"
    )
    preimage_is_lower_bound: bool = False

    @property
    def overall_strength(self) -> int:
        return min(
            self.collision_resistance_bits,
            self.preimage_resistance_bits,
            self.second_preimage_resistance_bits[0],
        )


class BitString(BaseModel):
    """An exact-length bit sequence stored big-endian in bytes.

    When the length is not a multiple of 8, the unused low-order bits of the
    last byte are zero.
    """

    model_config = ConfigDict(frozen=True)

    data: bytes
    length_bits: int = Field(ge=0)

    @field_validator("data", mode="before")
    @classmethod
    def _accept_hex(cls, value: Any) -> Any:
        if isinstance(value, str):
            return bytes.fromhex(value)
        if isinstance(value, (bytearray, memoryview)):
            return bytes(value)
        return value

    @field_serializer("data", when_used="json")
    def _serialize_data(self, value: bytes) -> str:
        return value.hex()

    @model_validator(mode="after")
    def _check_storage(self) -> BitString:
        if len(self.data) != (self.length_bits + 7) // 8:
            raise ValueError(
                f"{len(self.data)} bytes cannot hold exactly {self.length_bits} bits"
            )
        pad = (-self.length_bits) % 8
        if pad and self.data[-1] & ((1 << pad) - 1):
            raise ValueError("padding bits of the last byte must be zero")
        return self

    @classmethod
    def _trusted(cls, data: bytes, length_bits: int) -> BitString:
        return cls.model_construct(data=data, length_bits=length_bits)

    @classmethod
    def from_bytes(cls, data: bytes, length_bits: int | None = None) -> BitString:
        """Wraps bytes; with a shorter length_bits the bytes are truncated."""
        data = bytes(data)
        if length_bits is None:
            return cls._trusted(data, len(data) * 8)
        if length_bits > len(data) * 8:
            raise LengthMismatch(
                f"{len(data)} bytes cannot provide {length_bits} bits"
            )
        return cls.from_int(
            int.from_bytes(data, "big") >> (len(data) * 8 - length_bits), length_bits
        )

    @classmethod
    def from_int(cls, value: int, length_bits: int) -> BitString:
        if value < 0 or value >> length_bits:
            raise ValueError(f"{value} does not fit in {length_bits} bits")
        nbytes = (length_bits + 7) // 8
        pad = nbytes * 8 - length_bits
        return cls._trusted((value << pad).to_bytes(nbytes, "big"), length_bits)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitString:
        value = 0
        length = 0
        for bit in bits:
            if bit not in (0, 1):
                raise ValueError(f"not a bit: {bit}")
            value = (value << 1) | bit
            length += 1
        return cls.from_int(value, length)

    @classmethod
    def from_hex(cls, text: str, length_bits: int | None = None) -> BitString:
        return cls.from_bytes(bytes.fromhex(text), length_bits)

    @classmethod
    def zeros(cls, length_bits: int) -> BitString:
        return cls._trusted(bytes((length_bits + 7) // 8), length_bits)

    @classmethod
    def concat(cls, parts: Iterable[BitString]) -> BitString:
        parts = list(parts)
        if all(part.is_byte_aligned for part in parts):
            return cls._trusted(
                b"".join(part.data for part in parts),
                sum(part.length_bits for part in parts),
            )
        value = 0
        length = 0
        for part in parts:
            value = (value << part.length_bits) | part.to_int()
            length += part.length_bits
        return cls.from_int(value, length)

    def __len__(self) -> int:
        return self.length_bits

    @property
    def is_byte_aligned(self) -> bool:
        return self.length_bits % 8 == 0

    def to_int(self) -> int:
        return int.from_bytes(self.data, "big") >> ((-self.length_bits) % 8)

    def bits(self) -> tuple[int, ...]:
        value = self.to_int()
        return tuple(
            (value >> (self.length_bits - 1 - i)) & 1 for i in range(self.length_bits)
        )

    def bit(self, index: int) -> int:
        if not 0 <= index < self.length_bits:
            raise IndexError(index)
        return (self.data[index // 8] >> (7 - index % 8)) & 1

    def hex(self) -> str:
        return self.data.hex()

    def slice(self, start: int, stop: int) -> BitString:
        if not 0 <= start <= stop <= self.length_bits:
            raise IndexError(f"[{start}, {stop}) outside {self.length_bits} bits")
        if start % 8 == 0 and stop % 8 == 0:
            return BitString._trusted(self.data[start // 8 : stop // 8], stop - start)
        width = stop - start
        return BitString.from_int(
            (self.to_int() >> (self.length_bits - stop)) & ((1 << width) - 1), width
        )

    def split(self, count: int) -> tuple[BitString, ...]:
        """Cuts into `count` equal consecutive pieces."""
        if count < 1 or self.length_bits % count:
            raise NonDivisibleLength(
                f"{self.length_bits} bits cannot be split into {count} equal blocks"
            )
        size = self.length_bits // count
        return tuple(self.slice(i * size, (i + 1) * size) for i in range(count))

    def xor(self, other: BitString) -> BitString:
        if self.length_bits != other.length_bits:
            raise LengthMismatch(
                f"cannot XOR {self.length_bits} bits with {other.length_bits} bits"
            )
        mixed = int.from_bytes(self.data, "big") ^ int.from_bytes(other.data, "big")
        return BitString._trusted(mixed.to_bytes(len(self.data), "big"), self.length_bits)

    def flipped(self) -> BitString:
        """Every bit inverted."""
        return BitString.from_int(
            self.to_int() ^ ((1 << self.length_bits) - 1), self.length_bits
        )

    def with_bit_flipped(self, index: int) -> BitString:
        if not 0 <= index < self.length_bits:
            raise IndexError(index)
        return BitString.from_int(
            self.to_int() ^ (1 << (self.length_bits - 1 - index)), self.length_bits
        )


class Link(str, Enum):
    """Party pairs that share a QKD link."""

    ALICE_BOB = "alice-bob"
    ALICE_CHARLIE = "alice-charlie"


class QkdKey(BaseModel):
    """A symmetric key delivered to both ends of a QKD link."""

    model_config = ConfigDict(frozen=True)

    key_id: str
    link: Link
    bits: BitString
    length_l_bits: int
    derived_from: str | None = Field(
        default=None, description="key_id of the raw key this one was expanded from"
    )

    @model_validator(mode="after")
    def _check_length(self) -> QkdKey:
        if self.length_l_bits != self.bits.length_bits:
            raise ValueError(
                f"key {self.key_id} declares {self.length_l_bits} bits "
                f"but carries {self.bits.length_bits}"
            )
        return self


def block_label(index: int) -> str:
    """Label B<index> of block `index` (1-based) inside one key."""
    return f"{constants.BLOCK_LABEL_PREFIX}{index}"


def combined_label(position: int, n_blocks_per_key: int) -> str:
    """Label of position `position` (0-based) of a 2n-block combined key."""
    key_name = (
        constants.FIRST_KEY_NAME
        if position < n_blocks_per_key
        else constants.SECOND_KEY_NAME
    )
    return f"{key_name}:{block_label(position % n_blocks_per_key + 1)}"


class BlockPartition(BaseModel):
    """A key cut into n labeled blocks B1..Bn of l/n bits."""

    model_config = ConfigDict(frozen=True)

    source_key_id: str
    n_blocks: int = Field(ge=1)
    block_len_bits: int = Field(ge=1)
    blocks: tuple[BitString, ...]

    @model_validator(mode="after")
    def _check_shape(self) -> BlockPartition:
        if len(self.blocks) != self.n_blocks:
            raise ValueError(f"expected {self.n_blocks} blocks, got {len(self.blocks)}")
        for label, block in zip(self.labels, self.blocks):
            if block.length_bits != self.block_len_bits:
                raise ValueError(
                    f"block {label} has {block.length_bits} bits, "
                    f"expected {self.block_len_bits}"
                )
        return self

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(block_label(i) for i in range(1, self.n_blocks + 1))

    def block(self, index: int) -> BitString:
        """Block B<index>, 1-based."""
        return self.blocks[index - 1]

    def join(self) -> BitString:
        return BitString.concat(self.blocks)


class Permutation(BaseModel):
    """A bijection i -> a_i over {1..n}."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    mapping: tuple[int, ...]

    @model_validator(mode="after")
    def _check_bijection(self) -> Permutation:
        if sorted(self.mapping) != list(range(1, self.n + 1)):
            raise ValueError(f"{self.mapping} is not a permutation of 1..{self.n}")
        return self

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(n=n, mapping=tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def inverse(self) -> Permutation:
        inverse = [0] * self.n
        for i, a_i in enumerate(self.mapping, start=1):
            inverse[a_i - 1] = i
        return Permutation(n=self.n, mapping=tuple(inverse))

    def compose(self, other: Permutation) -> Permutation:
        """self after other: i -> self(other(i))."""
        if other.n != self.n:
            raise DimensionMismatch(f"cannot compose S_{self.n} with S_{other.n}")
        return Permutation(n=self.n, mapping=tuple(self(other(i)) for i in range(1, self.n + 1)))

    @property
    def is_identity(self) -> bool:
        return self.mapping == tuple(range(1, self.n + 1))


class ExchangedBlock(BaseModel):
    model_config = ConfigDict(frozen=True)

    label_index: int = Field(ge=1)
    bits: BitString

    @property
    def label(self) -> str:
        return block_label(self.label_index)


class ExchangedBlockSet(BaseModel):
    """The n/2 labeled blocks of one key a verifier reveals to the other."""

    model_config = ConfigDict(frozen=True)

    source_key_id: str
    n_blocks: int = Field(ge=2)
    block_len_bits: int = Field(ge=1)
    entries: tuple[ExchangedBlock, ...]

    @model_validator(mode="after")
    def _check_entries(self) -> ExchangedBlockSet:
        if len(self.entries) != self.n_blocks // 2:
            raise ValueError(
                f"an exchange carries n/2 = {self.n_blocks // 2} blocks, "
                f"got {len(self.entries)}"
            )
        indices = [entry.label_index for entry in self.entries]
        if len(set(indices)) != len(indices):
            raise ValueError(f"duplicate labels in exchange: {indices}")
        for entry in self.entries:
            if entry.label_index > self.n_blocks:
                raise ValueError(f"label {entry.label} outside B1..B{self.n_blocks}")
            if entry.bits.length_bits != self.block_len_bits:
                raise ValueError(f"block {entry.label} has the wrong length")
        return self

    @property
    def count(self) -> int:
        return len(self.entries)

    @property
    def label_indices(self) -> frozenset[int]:
        return frozenset(entry.label_index for entry in self.entries)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(entry.label for entry in self.entries)


class KnowledgeMask(BaseModel):
    """Which of the 2n combined-key blocks a party knows."""

    model_config = ConfigDict(frozen=True)

    n_blocks_per_key: int = Field(ge=1)
    known: tuple[bool, ...]

    @model_validator(mode="after")
    def _check_size(self) -> KnowledgeMask:
        if len(self.known) != 2 * self.n_blocks_per_key:
            raise ValueError(
                f"a mask covers 2n = {2 * self.n_blocks_per_key} labels, "
                f"got {len(self.known)}"
            )
        return self

    @classmethod
    def all_known(cls, n_blocks_per_key: int) -> KnowledgeMask:
        return cls(n_blocks_per_key=n_blocks_per_key, known=(True,) * (2 * n_blocks_per_key))

    @classmethod
    def from_halves(cls, first: Sequence[bool], second: Sequence[bool]) -> KnowledgeMask:
        if len(first) != len(second):
            raise DimensionMismatch("mask halves differ in length")
        return cls(n_blocks_per_key=len(first), known=(*first, *second))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(
            combined_label(i, self.n_blocks_per_key) for i in range(len(self.known))
        )

    @property
    def known_count(self) -> int:
        return sum(self.known)

    @property
    def unknown_count(self) -> int:
        return len(self.known) - self.known_count

    @property
    def is_complete(self) -> bool:
        return all(self.known)

    def known_labels(self) -> tuple[str, ...]:
        return tuple(label for label, k in zip(self.labels, self.known) if k)

    def unknown_labels(self) -> tuple[str, ...]:
        return tuple(label for label, k in zip(self.labels, self.known) if not k)

    def half(self, which: int) -> tuple[bool, ...]:
        """Flags of the first (0) or second (1) key."""
        n = self.n_blocks_per_key
        return self.known[which * n : (which + 1) * n]


class KeyHalf(BaseModel):
    """One key's n blocks as held by a party; unknown blocks are None."""

    model_config = ConfigDict(frozen=True)

    source_key_id: str
    n_blocks: int = Field(ge=1)
    block_len_bits: int = Field(ge=1)
    blocks: tuple[BitString | None, ...]

    @model_validator(mode="after")
    def _check_shape(self) -> KeyHalf:
        if len(self.blocks) != self.n_blocks:
            raise ValueError(f"expected {self.n_blocks} blocks, got {len(self.blocks)}")
        for block in self.blocks:
            if block is not None and block.length_bits != self.block_len_bits:
                raise ValueError("block length disagrees with block_len_bits")
        return self

    @classmethod
    def full(cls, partition: BlockPartition) -> KeyHalf:
        return cls(
            source_key_id=partition.source_key_id,
            n_blocks=partition.n_blocks,
            block_len_bits=partition.block_len_bits,
            blocks=partition.blocks,
        )

    @classmethod
    def from_exchange(cls, exchanged: ExchangedBlockSet) -> KeyHalf:
        blocks: list[BitString | None] = [None] * exchanged.n_blocks
        for entry in exchanged.entries:
            blocks[entry.label_index - 1] = entry.bits
        return cls(
            source_key_id=exchanged.source_key_id,
            n_blocks=exchanged.n_blocks,
            block_len_bits=exchanged.block_len_bits,
            blocks=tuple(blocks),
        )

    @property
    def known_flags(self) -> tuple[bool, ...]:
        return tuple(block is not None for block in self.blocks)

    @property
    def known_indices(self) -> tuple[int, ...]:
        """1-based label indices of the known blocks."""
        return tuple(i for i, block in enumerate(self.blocks, start=1) if block is not None)

    def replace_blocks(self, replacements: dict[int, BitString | None]) -> KeyHalf:
        """Copy with blocks B<index> replaced (1-based index)."""
        blocks = list(self.blocks)
        for index, bits in replacements.items():
            if not 1 <= index <= self.n_blocks:
                raise DimensionMismatch(f"no block B{index} in a {self.n_blocks}-block key")
            blocks[index - 1] = bits
        return self.model_copy(update={"blocks": tuple(blocks)})

    def corrupted(self, label_indices: Iterable[int]) -> KeyHalf:
        """Copy with every bit of the given known blocks inverted."""
        replacements: dict[int, BitString | None] = {}
        for index in label_indices:
            block = self.blocks[index - 1]
            if block is None:
                raise PartialKey(f"cannot corrupt unknown block B{index}")
            replacements[index] = block.flipped()
        return self.replace_blocks(replacements)


class HashSuiteConfig(BaseModel):
    """Message hash h, block hash h_p and the key geometry they must fit."""

    model_config = ConfigDict(frozen=True)

    message_hash: HashAlgorithmId
    message_delta_bits: int | None = None
    block_hash: HashAlgorithmId
    block_delta_bits: int | None = None
    n_blocks_per_key: int
    key_length_l_bits: int

    @field_validator("message_hash", "block_hash", mode="before")
    @classmethod
    def _parse_algorithm(cls, value: Any) -> Any:
        if isinstance(value, str):
            return HashAlgorithmId.parse(value)
        return value

    @model_validator(mode="after")
    def _check_geometry(self) -> HashSuiteConfig:
        for name, alg, delta in (
            ("message", self.message_hash, self.message_delta_bits),
            ("block", self.block_hash, self.block_delta_bits),
        ):
            if alg.is_xof:
                if delta is None or delta <= 0:
                    raise ValueError(f"{alg.display_name} as {name} hash needs an output length δ")
                if delta % 8:
                    raise ValueError(f"{name} δ = {delta} is not a whole number of bytes")
            elif delta is not None:
                raise ValueError(f"{alg.display_name} has a fixed output; do not set a {name} δ")
        if self.n_blocks_per_key < 2 or self.n_blocks_per_key % 2:
            raise ValueError(f"n = {self.n_blocks_per_key} must be even and at least 2")
        d = self.message_digest_bits
        if d != 2 * self.key_length_l_bits:
            raise ValueError(
                f"2l = d is required: l = {self.key_length_l_bits} bits "
                f"but the message digest has d = {d} bits"
            )
        if d % (2 * self.n_blocks_per_key) or (d // (2 * self.n_blocks_per_key)) % 8:
            raise ValueError(
                f"d = {d} bits does not split into 2n = {2 * self.n_blocks_per_key} "
                "byte-aligned blocks"
            )
        return self

    @property
    def message_digest_bits(self) -> int:
        if self.message_hash.is_xof:
            return self.message_delta_bits or 0
        return self.message_hash.digest_bits or 0

    @property
    def block_digest_bits(self) -> int:
        if self.block_hash.is_xof:
            return self.block_delta_bits or 0
        return self.block_hash.digest_bits or 0

    @property
    def combined_block_bits(self) -> int:
        """Length of each of the 2n blocks of k_a and c_a."""
        return self.message_digest_bits // (2 * self.n_blocks_per_key)

    def descriptor(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


class CombinedKey(BaseModel):
    """k_1||k_2 as held by one party: 2n labeled blocks, unknown ones absent."""

    model_config = ConfigDict(frozen=True)

    n_blocks_per_key: int
    block_len_bits: int
    blocks: tuple[BitString | None, ...]
    mask: KnowledgeMask
    key_ids: tuple[str, str]

    @model_validator(mode="after")
    def _check_mask(self) -> CombinedKey:
        if len(self.blocks) != 2 * self.n_blocks_per_key:
            raise ValueError("a combined key has exactly 2n blocks")
        if self.mask.n_blocks_per_key != self.n_blocks_per_key:
            raise ValueError("mask and key disagree on n")
        for block, known in zip(self.blocks, self.mask.known):
            if (block is not None) != known:
                raise ValueError("absent blocks must coincide with unknown mask labels")
        return self

    @property
    def total_bits(self) -> int:
        return 2 * self.n_blocks_per_key * self.block_len_bits

    @property
    def labels(self) -> tuple[str, ...]:
        return self.mask.labels

    def bits(self) -> BitString:
        if not self.mask.is_complete:
            raise PartialKey(f"{self.mask.unknown_count} blocks of the combined key are unknown")
        return BitString.concat(block for block in self.blocks if block is not None)


class SignatureBundle(BaseModel):
    """The 2n per-block digests S = h_p(c_1) ... h_p(c_2n); absent entries are None."""

    model_config = ConfigDict(frozen=True)

    per_block_digests: tuple[BitString | None, ...]
    block_digest_len_bits: int
    suite: HashSuiteConfig

    @model_validator(mode="after")
    def _check_entries(self) -> SignatureBundle:
        expected = 2 * self.suite.n_blocks_per_key
        if len(self.per_block_digests) != expected:
            raise ValueError(f"a signature has 2n = {expected} entries")
        for digest in self.per_block_digests:
            if digest is not None and digest.length_bits != self.block_digest_len_bits:
                raise ValueError("digest length disagrees with block_digest_len_bits")
        return self

    @property
    def labels(self) -> tuple[str, ...]:
        n = self.suite.n_blocks_per_key
        return tuple(combined_label(i, n) for i in range(2 * n))

    @property
    def absent_count(self) -> int:
        return sum(digest is None for digest in self.per_block_digests)

    @property
    def is_complete(self) -> bool:
        return self.absent_count == 0

    @property
    def total_bits(self) -> int:
        return (len(self.per_block_digests) - self.absent_count) * self.block_digest_len_bits


class VerificationThreshold(BaseModel):
    """V_B / V_C: the largest tolerated fraction of mismatching known blocks."""

    model_config = ConfigDict(frozen=True)

    max_mismatch_fraction: float = Field(default=0.0, ge=0.0, le=1.0)

    def allowed_mismatches(self, known_count: int) -> int:
        """floor(V × known) evaluated exactly on the decimal value of V."""
        return floor(Fraction(repr(self.max_mismatch_fraction)) * known_count)


class Verdict(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    ABORTED = "aborted"


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    matches: int
    mismatches: int
    unknowns: int
    threshold_used: VerificationThreshold
    allowed_mismatches: int
    verdict: Verdict
    mismatched_labels: tuple[str, ...] = ()

    @property
    def known(self) -> int:
        return self.matches + self.mismatches


class PartyRole(str, Enum):
    SIGNER = "signer"
    VERIFIER_1 = "verifier_1"
    VERIFIER_2 = "verifier_2"

    @property
    def display_name(self) -> str:
        return {
            PartyRole.SIGNER: "Alice",
            PartyRole.VERIFIER_1: "Bob",
            PartyRole.VERIFIER_2: "Charlie",
        }[self]


class Phase(str, Enum):
    DISTRIBUTION = "distribution"
    EXCHANGE = "exchange"
    MESSAGING = "messaging"


class SignedTuple(BaseModel):
    """The (m, S_a) tuple sent by the signer and forwarded between verifiers."""

    model_config = ConfigDict(frozen=True)

    message: bytes
    signature: SignatureBundle

    @field_validator("message", mode="before")
    @classmethod
    def _accept_hex(cls, value: Any) -> Any:
        if isinstance(value, str):
            return bytes.fromhex(value)
        return value

    @field_serializer("message", when_used="json")
    def _serialize_message(self, value: bytes) -> str:
        return value.hex()

    @property
    def suite(self) -> HashSuiteConfig:
        return self.signature.suite

    @property
    def n_blocks(self) -> int:
        return self.suite.n_blocks_per_key

    @property
    def key_length_l_bits(self) -> int:
        return self.suite.key_length_l_bits

    @property
    def message_delta_bits(self) -> int | None:
        return self.suite.message_delta_bits


class EventKind(str, Enum):
    KEY_ESTABLISHED = "key_established"
    KEY_EXPANDED = "key_expanded"
    PARTITIONED = "partitioned"
    SEND = "send"
    RECEIVE = "receive"
    VERIFICATION = "verification"
    VERDICT = "verdict"
    ABORT = "abort"


class TranscriptEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    seq: int
    phase: Phase
    kind: EventKind
    party: PartyRole | None = None
    peer: PartyRole | None = None
    message_id: str | None = None
    detail: dict[str, Any] = Field(default_factory=dict)


class Transcript(BaseModel):
    """Ordered event log of one protocol run."""

    seed: int
    events: list[TranscriptEvent] = Field(default_factory=list)

    def record(
        self,
        phase: Phase,
        kind: EventKind,
        party: PartyRole | None = None,
        peer: PartyRole | None = None,
        message_id: str | None = None,
        **detail: Any,
    ) -> TranscriptEvent:
        event = TranscriptEvent(
            seq=len(self.events),
            phase=phase,
            kind=kind,
            party=party,
            peer=peer,
            message_id=message_id,
            detail=detail,
        )
        self.events.append(event)
        return event

    def of_kind(self, kind: EventKind) -> list[TranscriptEvent]:
        return [event for event in self.events if event.kind == kind]

    def verdicts(self) -> dict[PartyRole, Verdict]:
        return {
            event.party: Verdict(event.detail["verdict"])
            for event in self.of_kind(EventKind.VERDICT)
            if event.party is not None
        }

    def reports(self) -> dict[PartyRole, VerificationReport]:
        return {
            event.party: VerificationReport.model_validate(event.detail["report"])
            for event in self.of_kind(EventKind.VERIFICATION)
            if event.party is not None
        }

    def unmatched_sends(self) -> list[TranscriptEvent]:
        """Send events without exactly one receive event for their message id."""
        received: dict[str, int] = {}
        for event in self.of_kind(EventKind.RECEIVE):
            if event.message_id is not None:
                received[event.message_id] = received.get(event.message_id, 0) + 1
        return [
            event
            for event in self.of_kind(EventKind.SEND)
            if received.get(event.message_id or "", 0) != 1
        ]

    def signer_exchange_events(self) -> list[TranscriptEvent]:
        """Exchange-phase events that involve the signer; must stay empty."""
        return [
            event
            for event in self.events
            if event.phase == Phase.EXCHANGE
            and PartyRole.SIGNER in (event.party, event.peer)
        ]

    @property
    def is_aborted(self) -> bool:
        return bool(self.of_kind(EventKind.ABORT))

    def to_json(self, **extra: Any) -> str:
        document = {
            "seed": self.seed,
            **extra,
            "events": [event.model_dump(mode="json") for event in self.events],
        }
        return json.dumps(document, indent=2, sort_keys=True)
