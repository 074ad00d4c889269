// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_COMMON_HPP_
#define TAPBEAM_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tapbeam {

// Error categories; values align with the public C status codes and the
// CLI exit codes.
enum class ErrorKind : int {
  Config = 2,
  Data = 3,
  Numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string &msg) {
  if (!cond) throw Error(kind, msg);
}

// FNV-1a, used for content hashing of run manifests and for deriving
// independent per-utterance seeds from a corpus seed.
inline uint64_t fnv1a(const void *data, size_t len,
                      uint64_t h = 1469598103934665603ull) {
  const unsigned char *p = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t fnv1a_u64(uint64_t value, uint64_t h = 1469598103934665603ull) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  return fnv1a(bytes, 8, h);
}

}  // namespace tapbeam

#endif  // TAPBEAM_COMMON_HPP_
