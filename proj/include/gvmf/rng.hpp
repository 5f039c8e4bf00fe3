#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gvmf {

/// Generator identity. Equal specs yield identical streams; specs differing
/// in stream_id are treated as independent.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Stream for sub-task `index` of this one (e.g. a bootstrap replicate).
  SeedSpec child(std::uint64_t index) const;
};

/// Name of the generator construction; changes whenever the bit stream does.
inline constexpr std::string_view kRngVersion = "mt19937_64-splitmix-v1";

std::uint64_t splitmix64(std::uint64_t x);

/// mt19937_64 seeded from a mixed (master, stream) pair. Uniform and normal
/// variates are generated here rather than by <random> distributions so the
/// output does not depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(const SeedSpec& seed);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// +1 or -1 with probability 1/2.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gvmf
