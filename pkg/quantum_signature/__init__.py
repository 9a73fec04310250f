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

"""Hybrid quantum-assisted digital signatures for arbitrary-length messages."""

__version__ = "0.1.0"


def __getattr__(name):
    if name in ("ProtocolHost", "run_honest_protocol"):
        from . import protocol

        return getattr(protocol, name)
    if name == "RunConfig":
        from .shared_libraries.config import RunConfig

        return RunConfig
    raise AttributeError(f"module '{__name__}' has no attribute '{name}'")
