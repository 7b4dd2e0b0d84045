/**
 * Copyright (c) 2026 the lfv authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lfv {

/// Base class for all library errors. Subclasses map onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched extents, missing views, incompatible tensors.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Input value outside the operation's domain (negative variance, excessive shift, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// API misuse (backward on a non-scalar, duplicate parameter registration, ...).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

/// NaN/Inf detected in a computation.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// File-system / serialization failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

namespace detail {
template <class E, class... Args>
[[noreturn]] inline void fail(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  throw E(os.str());
}
}  // namespace detail

#define LFV_CHECK(cond, ...)                                        \
  do {                                                              \
    if (!(cond)) ::lfv::detail::fail<::lfv::Error>(__VA_ARGS__);    \
  } while (0)

#define LFV_CHECK_SHAPE(cond, ...)                                      \
  do {                                                                  \
    if (!(cond)) ::lfv::detail::fail<::lfv::ShapeError>(__VA_ARGS__);   \
  } while (0)

#define LFV_CHECK_DOMAIN(cond, ...)                                     \
  do {                                                                  \
    if (!(cond)) ::lfv::detail::fail<::lfv::DomainError>(__VA_ARGS__);  \
  } while (0)

#define LFV_CHECK_USAGE(cond, ...)                                      \
  do {                                                                  \
    if (!(cond)) ::lfv::detail::fail<::lfv::UsageError>(__VA_ARGS__);   \
  } while (0)

/// Counter-based deterministic RNG (splitmix64 core). The standard <random>
/// distributions are not bit-portable across library implementations, so all
/// randomness in the library goes through this generator.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed + 0x9E3779B97F4A7C15ull) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  float next_float() { return static_cast<float>(next_double()); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }

 private:
  uint64_t state_;
};

/// Stateless integer hash, used for lattice noise and derived seeds.
inline uint64_t hash_u64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDull;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ull;
  x ^= x >> 33;
  return x;
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  return hash_u64(a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
}

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace lfv
