#ifndef LENTP_RANDOM_HPP
#define LENTP_RANDOM_HPP

#include <array>
#include <cstdint>

namespace lentp {

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix64(std::uint64_t x);

// xoshiro256** with counter-based stream derivation: the state of
// stream(seed, a, b, c) depends only on its arguments, so a Monte Carlo
// sample indexed by i draws the same numbers whatever worker runs it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  std::uint64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace lentp

#endif  // LENTP_RANDOM_HPP
