#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace rsk {

/// Random source used by every sampler. Wraps a 64-bit Mersenne twister and
/// a normal distribution so that samplers only need one object.
///
/// Streams: `Rng::stream(seed, index)` derives an independent generator for
/// task `index` from the master `seed`. Work is split into tasks whose count
/// does not depend on the thread count, so results are bit-identical for any
/// number of workers.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0x5eed);

  static Rng stream(std::uint64_t seed, std::uint64_t index);

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Runs `body(task)` for task = 0..n_tasks-1 on up to `threads` workers.
/// Tasks are claimed dynamically; the caller stores per-task results and
/// reduces them in task order.
void parallel_for(std::size_t n_tasks, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace rsk
