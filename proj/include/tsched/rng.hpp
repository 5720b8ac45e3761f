#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace tsched {

// splitmix64 finalizer; used to derive independent stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic 64-bit generator. All derived quantities (uniforms, normals,
// bounded integers) are computed here rather than through <random>
// distributions so that output is identical across standard libraries and the
// full state round-trips through a snapshot.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform01();

  // Standard normal (Box-Muller, one variate per call, no cached spare).
  double normal();

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  std::string state() const;
  void restore(const std::string& state);

  friend bool operator==(const SeededRng& a, const SeededRng& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tsched
