// src/wav_io.cc

// Copyright 2026  The drnmf authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "drnmf/wav_io.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "drnmf/common.h"

namespace drnmf {

namespace {

void put_u32(std::vector<uint8_t>& buf, uint32_t v) {
  buf.push_back(v & 0xff);
  buf.push_back((v >> 8) & 0xff);
  buf.push_back((v >> 16) & 0xff);
  buf.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<uint8_t>& buf, uint16_t v) {
  buf.push_back(v & 0xff);
  buf.push_back((v >> 8) & 0xff);
}

uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw IoError(path + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  Waveform w;
  bool have_data = false;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const uint32_t size = get_u32(data.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + size > data.size()) throw IoError(path + ": truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw IoError(path + ": bad fmt chunk");
      format = get_u16(data.data() + body);
      channels = get_u16(data.data() + body + 2);
      rate = get_u32(data.data() + body + 4);
      bits = get_u16(data.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw IoError(path + ": data chunk before fmt");
      if (format != 1 || bits != 16)
        throw IoError(path + ": only 16-bit PCM is supported");
      if (channels != 1) throw IoError(path + ": only mono is supported");
      if (rate != kSampleRate)
        throw IoError(path + ": expected 16 kHz sample rate");
      const size_t n = size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const int16_t s =
            static_cast<int16_t>(get_u16(data.data() + body + 2 * i));
        w.samples[i] = s / 32768.0;
      }
      have_data = true;
    }
    pos = body + size + (size & 1);  // chunks are word aligned
  }
  if (!have_data) throw IoError(path + ": no data chunk");
  if (w.samples.empty()) throw IoError(path + ": empty data chunk");
  w.sample_rate = kSampleRate;
  return w;
}

int write_wav(const std::string& path, const Waveform& w) {
  if (w.samples.empty()) throw std::invalid_argument("write_wav: empty signal");
  if (w.sample_rate != kSampleRate)
    throw std::invalid_argument("write_wav: expected 16 kHz sample rate");

  int clipped = 0;
  std::vector<uint8_t> buf;
  buf.reserve(44 + 2 * w.samples.size());
  const uint32_t data_bytes = static_cast<uint32_t>(2 * w.samples.size());
  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  put_u32(buf, 36 + data_bytes);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, kSampleRate);
  put_u32(buf, kSampleRate * 2);  // byte rate
  put_u16(buf, 2);                // block align
  put_u16(buf, 16);               // bits
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  put_u32(buf, data_bytes);
  for (double v : w.samples) {
    double scaled = std::nearbyint(v * 32768.0);
    if (scaled > 32767.0) {
      scaled = 32767.0;
      ++clipped;
    } else if (scaled < -32768.0) {
      scaled = -32768.0;
      ++clipped;
    }
    put_u16(buf, static_cast<uint16_t>(static_cast<int16_t>(scaled)));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError(path + ": write failed");
  return clipped;
}

}  // namespace drnmf
