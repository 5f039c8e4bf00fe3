#include "gvmf/rng.hpp"

#include <cmath>

namespace gvmf {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t index) const {
  return {master_seed, splitmix64(stream_id ^ splitmix64(index + 0x632BE59BD9B4E019ULL))};
}

Rng::Rng(const SeedSpec& seed) {
  const std::uint64_t a = splitmix64(seed.master_seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(seed.stream_id + 0xD1B54A32D192ED03ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random bits, offset by half an ulp to stay off 0.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace gvmf
