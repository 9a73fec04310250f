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

"""Store of QKD keys shared by the parties; each key signs at most once."""

import json
import logging
import os
import threading
from collections.abc import Iterable
from datetime import datetime, timezone
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict

from quantum_signature.shared_libraries import constants
from quantum_signature.shared_libraries.errors import KeyConsumed, UnknownKey
from quantum_signature.shared_libraries.types import BitString, Link, QkdKey

load_dotenv()

logger = logging.getLogger(__name__)

KEYSTORE_PATH = os.getenv(constants.ENV_KEYSTORE, constants.DEFAULT_KEYSTORE_PATH)


class KeyRecord(BaseModel):
    """One entry of the JSON key export."""

    model_config = ConfigDict(frozen=True)

    key_id: str
    link: Link
    l_bits: int
    hex: str
    consumed: bool
    created_at: str

    def to_key(self) -> QkdKey:
        return QkdKey(
            key_id=self.key_id,
            link=self.link,
            bits=BitString.from_hex(self.hex, self.l_bits),
            length_l_bits=self.l_bits,
        )


class KeyStore:
    """In-memory key store keyed by key_id.

    Retrieval for signing and marking consumed happen under one lock, so two
    signers can never both obtain the same key.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._keys: dict[str, QkdKey] = {}
        self._consumed: set[str] = set()
        self._created_at: dict[str, str] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key_id: object) -> bool:
        return key_id in self._keys

    def put(self, key: QkdKey, created_at: str | None = None, consumed: bool = False) -> None:
        with self._lock:
            self._keys[key.key_id] = key
            self._created_at[key.key_id] = created_at or datetime.now(timezone.utc).isoformat()
            if consumed:
                self._consumed.add(key.key_id)
            else:
                self._consumed.discard(key.key_id)
        logger.debug("stored key %s (%s, %d bits)", key.key_id, key.link.value, key.length_l_bits)

    def get(self, key_id: str) -> QkdKey:
        try:
            return self._keys[key_id]
        except KeyError:
            raise UnknownKey(key_id) from None

    def is_consumed(self, key_id: str) -> bool:
        if key_id not in self._keys:
            raise UnknownKey(key_id)
        return key_id in self._consumed

    def take(self, key_ids: Iterable[str]) -> tuple[QkdKey, ...]:
        """Atomically returns the keys and marks them all consumed."""
        key_ids = tuple(key_ids)
        with self._lock:
            for key_id in key_ids:
                if key_id not in self._keys:
                    raise UnknownKey(key_id)
                if key_id in self._consumed:
                    raise KeyConsumed(f"key {key_id} was already used for a signature")
            self._consumed.update(key_ids)
            keys = tuple(self._keys[key_id] for key_id in key_ids)
        logger.info("consumed keys %s", ", ".join(key_ids))
        return keys

    def consume(self, key_ids: Iterable[str]) -> None:
        self.take(key_ids)

    def retire(self, key_id: str) -> None:
        """Marks a key unusable without signing (e.g. replaced by its XOF expansion)."""
        with self._lock:
            if key_id not in self._keys:
                raise UnknownKey(key_id)
            self._consumed.add(key_id)
        logger.debug("retired key %s", key_id)

    def keys(self, include_consumed: bool = True) -> list[QkdKey]:
        return [
            key
            for key_id, key in self._keys.items()
            if include_consumed or key_id not in self._consumed
        ]

    def records(self) -> list[KeyRecord]:
        with self._lock:
            return [
                KeyRecord(
                    key_id=key.key_id,
                    link=key.link,
                    l_bits=key.length_l_bits,
                    hex=key.bits.hex(),
                    consumed=key.key_id in self._consumed,
                    created_at=self._created_at[key.key_id],
                )
                for key in self._keys.values()
            ]

    def to_json(self) -> str:
        return json.dumps(
            [record.model_dump(mode="json") for record in self.records()], indent=2
        )

    def export_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")
        logger.info("exported %d keys to %s", len(self), path)

    def import_records(self, records: Iterable[KeyRecord]) -> int:
        count = 0
        for record in records:
            self.put(record.to_key(), created_at=record.created_at, consumed=record.consumed)
            count += 1
        return count

    @classmethod
    def from_json(cls, text: str) -> "KeyStore":
        store = cls()
        store.import_records(KeyRecord.model_validate(item) for item in json.loads(text))
        return store

    @classmethod
    def load(cls, path: str | Path | None = None) -> "KeyStore":
        """Loads the JSON export at `path` (default: $QDS_KEYSTORE); empty if absent."""
        path = Path(path or KEYSTORE_PATH)
        if not path.exists():
            logger.debug("no key store at %s, starting empty", path)
            return cls()
        with open(path, encoding="utf-8") as file:
            store = cls.from_json(file.read())
        logger.info("loaded %d keys from %s", len(store), path)
        return store
