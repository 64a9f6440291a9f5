#pragma once

#include <cstdint>
#include <random>

#include "bouquet/shift.hpp"

namespace bouquet {

/// Deterministic (seeded) generator of words and eventually periodic
/// itineraries over the alphabet {-N..N}.
class ItinerarySampler {
 public:
  ItinerarySampler(TruncationLevel level, std::uint64_t seed, int max_preperiod = 8, int max_period = 3);

  Symbol symbol();
  Word word(std::size_t length);
  /// Preperiod length uniform in [0, max_preperiod], period length uniform in
  /// [1, max_period].
  Itinerary itinerary();
  /// Integer uniform in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Real uniform in [0, 1).
  double uniform();

  TruncationLevel level() const { return level_; }
  std::mt19937_64& engine() { return rng_; }

 private:
  TruncationLevel level_;
  std::mt19937_64 rng_;
  int max_preperiod_;
  int max_period_;
};

}  // namespace bouquet
