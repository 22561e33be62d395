#pragma once

#include <cstdint>
#include <random>

namespace soprc {

class Rng;

/// Names an independent random stream. Repeat r of an experiment uses
/// stream_id = r so results do not depend on the parallel schedule.
struct RngHandle {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  Rng stream() const;
  RngHandle substream(std::uint64_t id) const;
};

/// Engine plus the handful of draws the library needs. The distribution code
/// is local so a (seed, stream) pair gives the same numbers on every stdlib.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const RngHandle& handle);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal(double mean, double sd);
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
};

}  // namespace soprc
