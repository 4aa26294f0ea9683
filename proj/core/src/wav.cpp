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

#include "audiomt/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "audiomt/errors.hpp"

namespace audiomt {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > remaining()) throw FormatError("truncated WAV data");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = take(4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::string_view tag() {
    auto b = take(4);
    return {reinterpret_cast<const char*>(b.data()), 4};
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk parse_format(std::span<const std::uint8_t> body) {
  if (body.size() < 16) throw FormatError("fmt chunk too short");
  ByteReader r(body);
  FormatChunk f;
  f.format = r.u16();
  f.channels = r.u16();
  f.sample_rate = r.u32();
  r.u32();  // byte rate
  f.block_align = r.u16();
  f.bits = r.u16();
  if (f.format == kFormatExtensible) {
    if (body.size() < 40) throw FormatError("extensible fmt chunk too short");
    r.u16();  // cbSize
    r.u16();  // valid bits
    r.u32();  // channel mask
    // The first two bytes of the sub-format GUID carry the real format tag.
    f.format = r.u16();
  }
  return f;
}

double decode_sample(const std::uint8_t* p, const FormatChunk& f) {
  if (f.format == kFormatPcm) {
    switch (f.bits) {
      case 8:
        return (static_cast<int>(p[0]) - 128) / 128.0;
      case 16: {
        const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        return v / 32768.0;
      }
      case 24: {
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000) v -= 0x1000000;
        return v / 8388608.0;
      }
      case 32: {
        const auto v = static_cast<std::int32_t>(
            static_cast<std::uint32_t>(p[0]) |
            (static_cast<std::uint32_t>(p[1]) << 8) |
            (static_cast<std::uint32_t>(p[2]) << 16) |
            (static_cast<std::uint32_t>(p[3]) << 24));
        return v / 2147483648.0;
      }
      default:
        break;
    }
  } else if (f.format == kFormatFloat) {
    double v = 0.0;
    if (f.bits == 32) {
      std::uint32_t raw = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
      v = std::bit_cast<float>(raw);
    } else {
      std::uint64_t raw = 0;
      for (int i = 7; i >= 0; --i) raw = (raw << 8) | p[i];
      v = std::bit_cast<double>(raw);
    }
    if (!std::isfinite(v)) throw FormatError("non-finite float sample");
    return clamp_sample(v);
  }
  throw UnsupportedCodecError("unsupported sample width");
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

void put_tag(std::vector<std::uint8_t>& out, std::string_view tag) {
  out.insert(out.end(), tag.begin(), tag.end());
}

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 12) throw FormatError("file too short for RIFF header");
  if (r.tag() != "RIFF") throw FormatError("missing RIFF tag");
  r.u32();
  if (r.tag() != "WAVE") throw FormatError("missing WAVE tag");

  std::optional<FormatChunk> format;
  std::optional<std::span<const std::uint8_t>> data;
  while (r.remaining() >= 8 && !(format && data)) {
    const auto id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "data" && size > r.remaining()) {
      // Streaming writers leave the size unset; take what is there.
      data = r.take(r.remaining());
      break;
    }
    const auto body = r.take(size);
    if (size % 2 == 1 && r.remaining() > 0) r.take(1);
    if (id == "fmt ") {
      format = parse_format(body);
    } else if (id == "data") {
      data = body;
    }
  }
  if (!format) throw FormatError("missing fmt chunk");
  if (!data) throw FormatError("missing data chunk");

  const FormatChunk& f = *format;
  if (f.format != kFormatPcm && f.format != kFormatFloat) {
    throw UnsupportedCodecError("unsupported WAV encoding tag " +
                                std::to_string(f.format));
  }
  const bool pcm_ok = f.format == kFormatPcm &&
                      (f.bits == 8 || f.bits == 16 || f.bits == 24 ||
                       f.bits == 32);
  const bool float_ok = f.format == kFormatFloat && (f.bits == 32 || f.bits == 64);
  if (!pcm_ok && !float_ok) {
    throw UnsupportedCodecError("unsupported bit depth " +
                                std::to_string(f.bits));
  }
  if (f.channels < 1 || f.channels > 2) {
    throw UnsupportedCodecError("only mono and stereo are supported");
  }
  if (f.sample_rate == 0) throw FormatError("zero sample rate");
  const std::size_t width = f.bits / 8;
  if (f.block_align != width * f.channels) {
    throw FormatError("block alignment disagrees with channels/bit depth");
  }

  const std::size_t frames = data->size() / f.block_align;
  std::vector<std::vector<double>> channels(f.channels,
                                            std::vector<double>(frames));
  const std::uint8_t* p = data->data();
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < f.channels; ++c) {
      channels[c][i] = decode_sample(p, f);
      p += width;
    }
  }
  return AudioBuffer(std::move(channels), static_cast<int>(f.sample_rate));
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const UnsupportedCodecError& e) {
    throw UnsupportedCodecError(path.string() + ": " + e.what());
  }
}

std::int16_t quantize_pcm16(double sample) noexcept {
  const double scaled = std::nearbyint(clamp_sample(sample) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::vector<std::uint8_t> pcm16_bytes(const AudioBuffer& buffer) {
  std::vector<std::uint8_t> out;
  out.reserve(buffer.frames() * buffer.channel_count() * 2);
  for (std::size_t i = 0; i < buffer.frames(); ++i) {
    for (std::size_t c = 0; c < buffer.channel_count(); ++c) {
      put_u16(out, static_cast<std::uint16_t>(
                       quantize_pcm16(buffer.channel(c)[i])));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer,
                                     int bit_depth) {
  if (bit_depth != 16) {
    throw ParameterError("only 16-bit PCM output is supported");
  }
  if (buffer.channel_count() == 0) throw DomainError("empty buffer");
  const auto payload = pcm16_bytes(buffer);
  const auto channels = static_cast<std::uint16_t>(buffer.channel_count());
  const auto rate = static_cast<std::uint32_t>(buffer.sample_rate());
  const std::uint16_t block_align = channels * 2;

  std::vector<std::uint8_t> out;
  out.reserve(44 + payload.size());
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + payload.size()));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * block_align);
  put_u16(out, block_align);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
               int bit_depth) {
  const auto bytes = encode_wav(buffer, bit_depth);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

AudioBuffer quantized(const AudioBuffer& buffer) {
  auto channels = buffer.channels();
  for (auto& ch : channels) {
    for (double& s : ch) s = quantize_pcm16(s) / 32768.0;
  }
  return AudioBuffer(std::move(channels), buffer.sample_rate());
}

}  // namespace audiomt
