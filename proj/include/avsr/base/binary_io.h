// avsr/base/binary_io.h

// Copyright 2026  The AVSR Toolkit Authors

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

#ifndef AVSR_BASE_BINARY_IO_H_
#define AVSR_BASE_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "avsr/base/error.h"

namespace avsr::binary {

// Little-endian scalar I/O. Reads throw DataError on truncation.

template <typename T>
inline void WriteLe(std::ostream &os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  os.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
inline bool TryReadLe(std::istream &is, T *value) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char *>(bytes), sizeof(T));
  if (is.gcount() != static_cast<std::streamsize>(sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  std::memcpy(value, bytes, sizeof(T));
  return true;
}

template <typename T>
inline T ReadLe(std::istream &is, const char *what) {
  T value;
  if (!TryReadLe(is, &value)) throw DataError(std::string("truncated binary input reading ") + what);
  return value;
}

inline void WriteString(std::ostream &os, const std::string &s) {
  WriteLe<uint32_t>(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string ReadString(std::istream &is, const char *what) {
  uint32_t n = ReadLe<uint32_t>(is, what);
  if (n > (1u << 24)) throw DataError(std::string("implausible string length reading ") + what);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (is.gcount() != static_cast<std::streamsize>(n))
    throw DataError(std::string("truncated binary input reading ") + what);
  return s;
}

}  // namespace avsr::binary

#endif  // AVSR_BASE_BINARY_IO_H_
