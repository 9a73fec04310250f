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

"""Run configuration: defaults, flat TOML files, environment and flag overrides."""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path
from typing import Any, Literal

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.errors import ConfigError
from quantum_signature.shared_libraries.types import (
    HashAlgorithmId,
    HashSuiteConfig,
    PartyRole,
    VerificationThreshold,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

load_dotenv()

logger = logging.getLogger(__name__)

MAX_SEED = 2**64
PROFILES_DIR = Path(__file__).resolve().parent.parent / "profiles"


class MessageSource(BaseModel):
    """Where the message m comes from."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["inline", "file", "random"] = "inline"
    text: str | None = constants.DEFAULT_MESSAGE
    path: Path | None = None
    length: int | None = Field(default=None, ge=0)

    @classmethod
    def inline(cls, text: str) -> MessageSource:
        return cls(kind="inline", text=text)

    @classmethod
    def file(cls, path: str | Path) -> MessageSource:
        return cls(kind="file", text=None, path=Path(path))

    @classmethod
    def random(cls, length: int) -> MessageSource:
        return cls(kind="random", text=None, length=length)

    def resolve(self, rng: np.random.Generator) -> bytes:
        if self.kind == "file":
            if self.path is None:
                raise ConfigError("message source 'file' needs a path")
            return self.path.read_bytes()
        if self.kind == "random":
            return rng.bytes(self.length or 0)
        return (self.text or "").encode("utf-8")


class RunConfig(BaseModel):
    """All parameters of one protocol run (l, n, δ, hashes, V_B, V_C, seed, m)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    l_bits: int = constants.DEFAULT_KEY_BITS
    n_blocks: int = constants.DEFAULT_BLOCKS_PER_KEY
    delta_key_bits: int | None = constants.DEFAULT_KEY_DELTA_BITS
    key_xof: HashAlgorithmId = HashAlgorithmId.SHAKE_256
    message_hash: HashAlgorithmId = HashAlgorithmId.SHAKE_256
    delta_msg_bits: int | None = None
    block_hash: HashAlgorithmId = HashAlgorithmId.SHA2_256
    block_delta_bits: int | None = None
    v_b: float = Field(default=0.0, ge=0.0, le=1.0)
    v_c: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=MAX_SEED)
    message: MessageSource = MessageSource()
    corrupt_blocks: int = Field(default=0, ge=0)

    @field_validator("key_xof", "message_hash", "block_hash", mode="before")
    @classmethod
    def _parse_algorithm(cls, value: Any) -> Any:
        if isinstance(value, str):
            return HashAlgorithmId.parse(value)
        return value

    @field_validator("delta_key_bits", "delta_msg_bits", "block_delta_bits", mode="before")
    @classmethod
    def _zero_means_unset(cls, value: Any) -> Any:
        # TOML has no null; 0 switches key expansion off.
        return None if value == 0 else value

    @classmethod
    def desk_scale(cls, l_bits: int, n_blocks: int | None = None, **overrides: Any) -> RunConfig:
        """Small keys, no expansion, δ_msg = 2l: makes forgery guessing observable."""
        return cls(
            l_bits=l_bits,
            n_blocks=n_blocks or constants.DESK_SCALE_BLOCKS_PER_KEY,
            delta_key_bits=None,
            message_hash=HashAlgorithmId.SHAKE_256,
            delta_msg_bits=None,
            **overrides,
        )

    @property
    def effective_key_bits(self) -> int:
        """l after the optional XOF expansion."""
        return self.delta_key_bits or self.l_bits

    @property
    def resolved_delta_msg_bits(self) -> int | None:
        if not self.message_hash.is_xof:
            return None
        return self.delta_msg_bits or 2 * self.effective_key_bits

    @property
    def block_len_bits(self) -> int:
        return self.effective_key_bits // self.n_blocks

    def threshold(self, role: PartyRole) -> VerificationThreshold:
        fraction = self.v_b if role == PartyRole.VERIFIER_1 else self.v_c
        return VerificationThreshold(max_mismatch_fraction=fraction)

    def problems(self) -> list[str]:
        """Every violated protocol precondition, empty when the config is runnable."""
        found: list[str] = []
        if self.l_bits <= 0 or self.l_bits % 8:
            found.append(f"l = {self.l_bits} must be a positive multiple of 8 bits")
        if self.n_blocks < 2 or self.n_blocks % 2:
            found.append(f"n = {self.n_blocks} must be even and at least 2")
        if self.delta_key_bits is not None:
            if not self.key_xof.is_xof:
                found.append(f"key expansion needs a SHAKE function, not {self.key_xof.display_name}")
            if self.delta_key_bits < self.l_bits:
                found.append(f"δ_key = {self.delta_key_bits} is smaller than l = {self.l_bits}")
            if self.delta_key_bits % 8:
                found.append(f"δ_key = {self.delta_key_bits} is not a multiple of 8 bits")
        l_eff = self.effective_key_bits
        if self.n_blocks >= 2 and l_eff % self.n_blocks:
            found.append(f"l = {l_eff} is not divisible into n = {self.n_blocks} blocks")
        elif self.n_blocks >= 2 and (l_eff // self.n_blocks) % 8:
            found.append(
                f"block length l/n = {l_eff}/{self.n_blocks} is not a multiple of 8 bits"
            )
        if self.message_hash.is_xof:
            d = self.resolved_delta_msg_bits or 0
            if d != 2 * l_eff:
                found.append(f"2l = d is required: l = {l_eff}, δ_msg = {d}")
        else:
            if self.delta_msg_bits is not None:
                found.append(f"{self.message_hash.display_name} has a fixed output; drop δ_msg")
            d = self.message_hash.digest_bits or 0
            if d != 2 * l_eff:
                found.append(
                    f"2l = d is required: l = {l_eff} but "
                    f"{self.message_hash.display_name} gives d = {d}"
                )
        if self.block_hash.is_xof:
            if not self.block_delta_bits or self.block_delta_bits % 8:
                found.append(
                    f"{self.block_hash.display_name} block hash needs δ_blk, a positive multiple of 8"
                )
        elif self.block_delta_bits is not None:
            found.append(f"{self.block_hash.display_name} has a fixed output; drop δ_blk")
        if self.corrupt_blocks > self.n_blocks:
            found.append(f"cannot corrupt {self.corrupt_blocks} of n = {self.n_blocks} blocks")
        return found

    def validated(self) -> RunConfig:
        found = self.problems()
        if found:
            raise ConfigError("; ".join(found))
        return self

    def suite(self) -> HashSuiteConfig:
        self.validated()
        try:
            return HashSuiteConfig(
                message_hash=self.message_hash,
                message_delta_bits=self.resolved_delta_msg_bits,
                block_hash=self.block_hash,
                block_delta_bits=self.block_delta_bits,
                n_blocks_per_key=self.n_blocks,
                key_length_l_bits=self.effective_key_bits,
            )
        except ValidationError as e:
            raise ConfigError(str(e)) from e


# Flat TOML keys that are not RunConfig fields.
_MESSAGE_KEYS = {"message", "message_file", "message_length"}


def _message_from(values: dict[str, Any]) -> MessageSource | None:
    given = [key for key in _MESSAGE_KEYS if values.get(key) is not None]
    if len(given) > 1:
        raise ConfigError(f"choose one message source, got {sorted(given)}")
    if not given:
        return None
    key = given[0]
    if key == "message_file":
        return MessageSource.file(values[key])
    if key == "message_length":
        return MessageSource.random(int(values[key]))
    return MessageSource.inline(str(values[key]))


def env_seed() -> int | None:
    value = os.getenv(constants.ENV_SEED)
    if value is None or value == "":
        return None
    try:
        return int(value, 0)
    except ValueError:
        raise ConfigError(f"{constants.ENV_SEED}={value!r} is not an integer") from None


def resolve_profile(path: str | Path) -> Path:
    """A config path, or the name of a bundled profile such as `desk_scale`."""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    if candidate.suffix:
        raise ConfigError(f"config file {str(path)!r} not found")
    bundled = PROFILES_DIR / f"{candidate.name}.toml"
    if not bundled.exists():
        raise ConfigError(f"no config file or bundled profile named {str(path)!r}")
    return bundled


def load_run_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
    base: RunConfig | None = None,
) -> RunConfig:
    """Builds a RunConfig: defaults < TOML file < overrides (None values ignored)."""
    values: dict[str, Any] = {}
    if path is not None:
        path = resolve_profile(path)
        with open(path, "rb") as file:
            values.update(tomllib.load(file))
        logger.debug("loaded configuration file %s", path)
    file_message = _message_from(values)
    for key in _MESSAGE_KEYS:
        values.pop(key, None)

    flags = {key: value for key, value in (overrides or {}).items() if value is not None}
    flag_message = _message_from(flags)
    for key in _MESSAGE_KEYS:
        flags.pop(key, None)
    values.update(flags)

    message = flag_message or file_message
    if message is not None:
        values["message"] = message
    if "seed" not in values:
        seed = env_seed()
        if seed is not None:
            values["seed"] = seed

    try:
        if base is not None:
            return RunConfig.model_validate({**base.model_dump(), **values})
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
