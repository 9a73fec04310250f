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

"""Constants shared by the protocol, the wire codec and the CLI."""

# Environment variables (also read from .env).
ENV_SEED = "QDS_SEED"
ENV_KEYSTORE = "QDS_KEYSTORE"
ENV_LOG_LEVEL = "QDS_LOG_LEVEL"

DEFAULT_KEYSTORE_PATH = "keystore.json"

# Block labels are B1..Bn inside one key; the combined key prefixes the key name.
BLOCK_LABEL_PREFIX = "B"
FIRST_KEY_NAME = "k1"
SECOND_KEY_NAME = "k2"

# Wire format.
WIRE_MAGIC = b"QDS1"
WIRE_VERSION = 1
WIRE_HEADER_SIZE = 32
FRAME_LENGTH_SIZE = 4

# Worked-example defaults.
DEFAULT_KEY_BITS = 256
DEFAULT_KEY_DELTA_BITS = 1024
DEFAULT_MESSAGE_DELTA_BITS = 2048
DEFAULT_BLOCKS_PER_KEY = 32
DEFAULT_MESSAGE = "Quantum-assisted digital signature for arbitrary message length"

# Desk-scale forgery profile.
DESK_SCALE_BLOCKS_PER_KEY = 2

# Domain separation for the simulated QKD stream.
QKD_STREAM_TAG = b"qds/simulated-qkd/v1"

# z for the Wilson 95% interval and the sigma band used to compare rates.
WILSON_Z = 1.96
AGREEMENT_SIGMAS = 3.0
