// src/model_io.cc

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

#include "drnmf/model_io.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drnmf/common.h"

namespace drnmf {

namespace {

constexpr char kMagic[] = "DRNMF1\n";
constexpr size_t kMagicLen = 7;
constexpr uint8_t kDtypeF64LE = 0;

template <typename T>
void put_le(std::string& buf, T v) {
  for (size_t i = 0; i < sizeof(T); ++i)
    buf.push_back(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const char* p) {
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<uint64_t>(static_cast<uint8_t>(p[i])) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

bool ArrayStore::has_array(const std::string& name) const {
  for (const auto& [n, a] : arrays)
    if (n == name) return true;
  return false;
}

const Eigen::MatrixXd& ArrayStore::array(const std::string& name) const {
  for (const auto& [n, a] : arrays)
    if (n == name) return a;
  throw std::invalid_argument("model file has no array named '" + name + "'");
}

void ArrayStore::set_meta(const std::string& key, const std::string& value) {
  metadata[key] = value;
}

void ArrayStore::set_meta_int(const std::string& key, long long value) {
  metadata[key] = std::to_string(value);
}

void ArrayStore::set_meta_double(const std::string& key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  metadata[key] = buf;
}

const std::string& ArrayStore::meta(const std::string& key) const {
  auto it = metadata.find(key);
  if (it == metadata.end())
    throw std::invalid_argument("model file has no metadata key '" + key + "'");
  return it->second;
}

long long ArrayStore::meta_int(const std::string& key) const {
  return std::stoll(meta(key));
}

double ArrayStore::meta_double(const std::string& key) const {
  return std::stod(meta(key));
}

void save_array_store(const std::string& path, const ArrayStore& store) {
  std::string buf;
  buf.append(kMagic, kMagicLen);
  put_le<uint64_t>(buf, store.arrays.size());
  for (const auto& [name, a] : store.arrays) {
    put_le<uint32_t>(buf, static_cast<uint32_t>(name.size()));
    buf.append(name);
    buf.push_back(static_cast<char>(kDtypeF64LE));
    put_le<uint32_t>(buf, 2);  // always 2-d
    put_le<uint64_t>(buf, static_cast<uint64_t>(a.rows()));
    put_le<uint64_t>(buf, static_cast<uint64_t>(a.cols()));
    const size_t bytes = sizeof(double) * static_cast<size_t>(a.size());
    const size_t off = buf.size();
    buf.resize(off + bytes);
    std::memcpy(buf.data() + off, a.data(), bytes);  // column-major
  }
  std::string meta_text;
  for (const auto& [k, v] : store.metadata)
    meta_text += k + " = " + v + "\n";
  put_le<uint64_t>(buf, meta_text.size());
  buf.append(meta_text);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError(path + ": write failed");
}

ArrayStore load_array_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < kMagicLen + 8 || std::memcmp(buf.data(), kMagic, kMagicLen) != 0)
    throw IoError(path + ": not a DRNMF1 model file");

  size_t pos = kMagicLen;
  auto need = [&](size_t n) {
    if (pos + n > buf.size()) throw IoError(path + ": truncated model file");
  };

  ArrayStore store;
  need(8);
  const uint64_t n_arrays = get_le<uint64_t>(buf.data() + pos);
  pos += 8;
  for (uint64_t i = 0; i < n_arrays; ++i) {
    need(4);
    const uint32_t name_len = get_le<uint32_t>(buf.data() + pos);
    pos += 4;
    need(name_len);
    std::string name(buf.data() + pos, name_len);
    pos += name_len;
    need(1);
    const uint8_t dtype = static_cast<uint8_t>(buf[pos]);
    pos += 1;
    if (dtype != kDtypeF64LE)
      throw IoError(path + ": unsupported dtype in array '" + name + "'");
    need(4);
    const uint32_t ndim = get_le<uint32_t>(buf.data() + pos);
    pos += 4;
    if (ndim != 2) throw IoError(path + ": unsupported rank in array '" + name + "'");
    need(16);
    const uint64_t rows = get_le<uint64_t>(buf.data() + pos);
    const uint64_t cols = get_le<uint64_t>(buf.data() + pos + 8);
    pos += 16;
    const size_t bytes = sizeof(double) * rows * cols;
    need(bytes);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
    std::memcpy(a.data(), buf.data() + pos, bytes);
    pos += bytes;
    store.arrays.emplace_back(std::move(name), std::move(a));
  }
  need(8);
  const uint64_t meta_len = get_le<uint64_t>(buf.data() + pos);
  pos += 8;
  need(meta_len);
  std::istringstream meta(std::string(buf.data() + pos, meta_len));
  std::string line;
  while (std::getline(meta, line)) {
    const size_t eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    store.metadata[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return store;
}

}  // namespace drnmf
