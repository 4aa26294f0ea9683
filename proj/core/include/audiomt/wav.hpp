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
#include <filesystem>
#include <span>
#include <vector>

#include "audiomt/audio.hpp"

namespace audiomt {

// Decodes RIFF/WAVE with integer PCM (8, 16, 24, 32 bit) or IEEE float
// (32, 64 bit) payloads, including WAVE_FORMAT_EXTENSIBLE wrappers.
// Integer samples are normalized by 2^(bits-1); float samples are clamped.
AudioBuffer read_wav(const std::filesystem::path& path);
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

// Only 16-bit output is produced. Samples are clamped then quantized with
// round-to-nearest against a 32768 scale, so 1.0 lands on 32767.
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
               int bit_depth = 16);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer,
                                     int bit_depth = 16);

std::int16_t quantize_pcm16(double sample) noexcept;

// Interleaved little-endian 16-bit payload, exactly what write_wav stores in
// its data chunk.
std::vector<std::uint8_t> pcm16_bytes(const AudioBuffer& buffer);

// The buffer after a write_wav/read_wav round trip, without touching disk.
AudioBuffer quantized(const AudioBuffer& buffer);

}  // namespace audiomt
