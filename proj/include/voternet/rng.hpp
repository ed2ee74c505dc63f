#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace voternet {

// Counter-based pseudo-random stream. Draw i of a stream with key k is
//
//     out(i) = mix64(k + (i+1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finalizer. Streams are identified by a
// 64-bit key derived from (seed, purpose, replicate) through the fixed
// schedule in RngStream's constructor; the same triple yields the same
// sequence on every platform and under any thread schedule. Substreams
// derive a fresh key from (parent key, tag), so independent replicates
// and components can draw concurrently without coordination.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t combine_keys(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ (mix64(b) + kGolden + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view purpose, std::uint64_t replicate)
      : key_(combine_keys(combine_keys(mix64(seed ^ kGolden), fnv1a64(purpose)),
                          mix64(replicate ^ 0x6A09E667F3BCC909ULL))) {}

  explicit RngStream(std::uint64_t raw_key) : key_(raw_key) {}

  // Independent child stream; tags need only be distinct per parent.
  RngStream substream(std::uint64_t tag) const {
    return RngStream(combine_keys(key_, tag));
  }
  RngStream substream(std::string_view tag) const {
    return RngStream(combine_keys(key_, fnv1a64(tag)));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // Random-access draw; do not interleave with next_u64 on the same stream.
  std::uint64_t at(std::uint64_t index) const {
    return mix64(key_ + (index + 1) * kGolden);
  }

  // Uniform on [0,1), 53-bit resolution.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  static double to_u01(std::uint64_t r) {
    return static_cast<double>(r >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Unbiased via widening multiply with rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = ~std::uint64_t{0} % n + 1;  // 2^64 mod n
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return u01() < p; }

  double exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be positive");
    return -std::log1p(-u01()) / rate;
  }

  // Poisson by inversion below 10, by Hormann's PTRS transformed rejection above.
  std::uint64_t poisson(double lambda) {
    if (lambda < 0 || !std::isfinite(lambda))
      throw std::invalid_argument("poisson: invalid mean");
    if (lambda == 0) return 0;
    if (lambda < 10.0) return poisson_inversion(lambda);
    return poisson_ptrs(lambda);
  }

 private:
  std::uint64_t poisson_inversion(double lambda) {
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double prod = u01();
    while (prod > limit) {
      ++k;
      prod *= u01();
    }
    return k;
  }

  std::uint64_t poisson_ptrs(double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = u01() - 0.5;
      const double v = u01();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
      if (kf < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kf * loglam - lambda - std::lgamma(kf + 1.0)) {
        return static_cast<std::uint64_t>(kf);
      }
    }
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace voternet
