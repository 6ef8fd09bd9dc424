// Copyright 2026 The convsim Authors
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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "convsim/error.hpp"
#include "convsim/render.hpp"

namespace convsim {

namespace {

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

bool tag_is(const std::uint8_t* p, std::string_view tag) {
  return std::memcmp(p, tag.data(), 4) == 0;
}

}  // namespace

AudioBuffer read_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") ||
      !tag_is(bytes.data() + 8, "WAVE")) {
    fail(ErrorKind::kUnsupported, "not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  int sample_rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::size_t size = le32(hdr + 4);
    const std::size_t body = pos + 8;
    if (tag_is(hdr, "fmt ")) {
      if (size < 16 || body + 16 > bytes.size()) {
        fail(ErrorKind::kParse, "truncated WAV fmt chunk");
      }
      const std::uint8_t* f = bytes.data() + body;
      const std::uint16_t format = le16(f);
      const std::uint16_t channels = le16(f + 2);
      const std::uint16_t bits = le16(f + 14);
      sample_rate = static_cast<int>(le32(f + 4));
      if (format != 1) {
        fail(ErrorKind::kUnsupported,
             "WAV encoding: format tag " + std::to_string(format) +
                 " (only PCM is supported)");
      }
      if (channels != 1) {
        fail(ErrorKind::kUnsupported, "WAV channels: " + std::to_string(channels) +
                                          " (only mono is supported)");
      }
      if (bits != 16) {
        fail(ErrorKind::kUnsupported, "WAV bit depth: " + std::to_string(bits) +
                                          " (only 16-bit is supported)");
      }
      if (sample_rate <= 0) fail(ErrorKind::kParse, "WAV sample rate is 0");
      have_fmt = true;
    } else if (tag_is(hdr, "data")) {
      if (!have_fmt) fail(ErrorKind::kParse, "WAV data chunk before fmt chunk");
      const std::size_t avail = std::min(size, bytes.size() - body);
      AudioBuffer out;
      out.sample_rate = sample_rate;
      out.samples.resize(avail / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(le16(bytes.data() + body + 2 * i));
        out.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  fail(ErrorKind::kParse, "WAV file has no data chunk");
}

std::vector<std::uint8_t> write_wav(const AudioBuffer& buffer) {
  const auto n = static_cast<std::uint32_t>(buffer.samples.size());
  const auto rate = static_cast<std::uint32_t>(buffer.sample_rate);
  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, 1);  // PCM
  put16(out, 1);  // mono
  put32(out, rate);
  put32(out, rate * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, 2 * n);
  for (double x : buffer.samples) {
    const double scaled = std::nearbyint(x * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

AudioBuffer read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return read_wav(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void write_wav_file(const std::string& path, const AudioBuffer& buffer) {
  const auto bytes = write_wav(buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "short write to '" + path + "'");
}

}  // namespace convsim
