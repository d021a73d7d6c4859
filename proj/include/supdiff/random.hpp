#pragma once

#include <cstdint>
#include <random>

namespace supdiff {

using Engine = std::mt19937_64;

/// Named replicate streams. Every random draw in an experiment belongs to one
/// stream and one replicate index, so draws never depend on scheduling.
enum class Stream : std::uint64_t {
  statistic_x = 1,
  statistic_y = 2,
  limit = 3,
  limit_secondary = 4,
  oracle = 5,
};

/// Engine for replicate `index` of `stream` under `seed`. The engine state is
/// a pure function of the three counters.
inline Engine stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

inline Engine stream_engine(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return stream_engine(seed, static_cast<std::uint64_t>(stream), index);
}

/// Uniform draw on the open interval (0, 1).
inline double open_uniform(Engine& engine) {
  // 53 random bits shifted by half an ulp so neither endpoint is produced.
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draws from one replicate engine.
class NormalSource {
 public:
  explicit NormalSource(Engine engine) : engine_(std::move(engine)) {}

  double operator()() { return dist_(engine_); }
  Engine& engine() noexcept { return engine_; }

 private:
  Engine engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace supdiff
