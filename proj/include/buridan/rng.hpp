#pragma once

#include <cstdint>
#include <random>

namespace buridan {

/// Seedable random source with a fixed stream layout.
///
/// A generator is identified by (seed, stream). The underlying engine is
/// std::mt19937_64 keyed through std::seed_seq, both of which have output
/// fixed by the standard, and every variate below is derived from raw
/// 64-bit draws by hand rather than through std::*_distribution (whose
/// algorithms are implementation-defined). Remaining platform dependence
/// is limited to libm's log/sin/cos.
///
/// Stream layout used by the simulators:
///   stream 0  switching / clock draws of a trajectory
///   stream 1  measurement noise
///   stream 2+ free for callers (test data, bootstrap, ...)
class Rng {
 public:
  static constexpr std::uint64_t kSwitchStream = 0;
  static constexpr std::uint64_t kNoiseStream = 1;

  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1).
  double uniform_open();

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  /// Exponential with the given mean.
  double exponential(double mean);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace buridan
