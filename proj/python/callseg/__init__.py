# Copyright 2026 The callseg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python access to the callseg C++ core."""

from ._core import (
    CallsegError,
    Model,
    aggregate_speaker,
    analyze_call,
    build_model,
    class_scores,
    confusion,
    count_params,
    load_audio,
    log_mel_spectrogram,
    run_cli,
    save_wav,
)

__all__ = [
    "CallsegError",
    "Model",
    "aggregate_speaker",
    "analyze_call",
    "build_model",
    "class_scores",
    "confusion",
    "count_params",
    "load_audio",
    "log_mel_spectrogram",
    "run_cli",
    "save_wav",
]
