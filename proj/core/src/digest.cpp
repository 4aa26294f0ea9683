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

#include "audiomt/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "audiomt/errors.hpp"
#include "audiomt/wav.hpp"

namespace audiomt {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int md_len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &md_len) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(md_len * 2);
  for (unsigned int i = 0; i < md_len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0x0F]);
  }
  return out;
}

std::string audio_digest(const AudioBuffer& buffer) {
  std::vector<std::uint8_t> canonical;
  const auto rate = static_cast<std::uint32_t>(buffer.sample_rate());
  for (int i = 0; i < 4; ++i) {
    canonical.push_back(static_cast<std::uint8_t>((rate >> (8 * i)) & 0xFF));
  }
  const auto channels = static_cast<std::uint16_t>(buffer.channel_count());
  canonical.push_back(static_cast<std::uint8_t>(channels & 0xFF));
  canonical.push_back(static_cast<std::uint8_t>(channels >> 8));
  const auto payload = pcm16_bytes(buffer);
  canonical.insert(canonical.end(), payload.begin(), payload.end());
  return sha256_hex(canonical);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(
      reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

}  // namespace audiomt
