#include "bouquet/sampling.hpp"

namespace bouquet {

ItinerarySampler::ItinerarySampler(TruncationLevel level, std::uint64_t seed, int max_preperiod, int max_period)
    : level_(level), rng_(seed), max_preperiod_(max_preperiod), max_period_(max_period) {}

int ItinerarySampler::uniform_int(int lo, int hi) {
  // rejection sampling; std::uniform_int_distribution is not portable across libraries
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = rng_.max() - rng_.max() % span;
  std::uint64_t x;
  do x = rng_(); while (x >= limit);
  return lo + static_cast<int>(x % span);
}

double ItinerarySampler::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

Symbol ItinerarySampler::symbol() { return uniform_int(-level_.value(), level_.value()); }

Word ItinerarySampler::word(std::size_t length) {
  Word w(length);
  for (auto& s : w) s = symbol();
  return w;
}

Itinerary ItinerarySampler::itinerary() {
  Word pre = word(static_cast<std::size_t>(uniform_int(0, max_preperiod_)));
  Word per = word(static_cast<std::size_t>(uniform_int(1, max_period_)));
  return Itinerary(std::move(pre), std::move(per));
}

}  // namespace bouquet
