// Copyright 2026 The audiomt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "audiomt/audio.hpp"

namespace audiomt {

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// Content digest of a buffer: SHA-256 over a canonical byte string of
// sample rate (u32 LE), channel count (u16 LE) and the interleaved 16-bit PCM
// payload. Equal for a buffer and its write_wav/read_wav round trip.
std::string audio_digest(const AudioBuffer& buffer);

std::string base64_encode(std::span<const std::uint8_t> bytes);

}  // namespace audiomt
