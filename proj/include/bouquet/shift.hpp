#pragma once

// Symbolic dynamics on the full shift over the integers: words, eventually
// periodic itineraries, the shift map and its natural metric, and the
// lexicographic enumeration of cylinders of the truncated shifts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bouquet {

/// Index k of the fundamental domain S_k.
using Symbol = std::int32_t;
using Word = std::vector<Symbol>;

/// Alphabet {-N, ..., N} of the truncated shift.
class TruncationLevel {
 public:
  explicit TruncationLevel(int n);

  int value() const { return n_; }
  std::size_t alphabet_size() const { return static_cast<std::size_t>(2 * n_ + 1); }
  bool contains(Symbol s) const { return s >= -n_ && s <= n_; }
  /// Position of `s` in the ordered alphabet, 0 for -N.
  std::size_t ordinal(Symbol s) const { return static_cast<std::size_t>(s + n_); }
  Symbol symbol_at(std::size_t ordinal) const { return static_cast<Symbol>(ordinal) - n_; }

  friend bool operator==(TruncationLevel, TruncationLevel) = default;

 private:
  int n_;
};

/// Infinite sequence preperiod . period . period . ...
///
/// Always held in canonical form: the period is primitive and the preperiod
/// is as short as possible, so structural equality is sequence equality.
class Itinerary {
 public:
  /// The all-zeros sequence.
  Itinerary();
  /// Throws DomainError when `period` is empty.
  Itinerary(Word preperiod, Word period);

  static Itinerary zeros() { return Itinerary(); }
  /// Cylinder representative w*0̄.
  static Itinerary representative(std::span<const Symbol> word);

  /// Text form "pre|per", e.g. "3,1|0". Throws ParseError naming the bad token.
  static Itinerary parse(std::string_view text);
  std::string to_string() const;

  const Word& preperiod() const { return pre_; }
  const Word& period() const { return per_; }

  Symbol operator[](std::size_t i) const;
  /// First `n` symbols.
  Word prefix(std::size_t n) const;
  /// Largest |s_j| over the whole sequence; s lies in Sigma_N iff this is <= N.
  int max_abs_symbol() const;
  bool in(TruncationLevel level) const { return max_abs_symbol() <= level.value(); }
  bool is_periodic() const { return pre_.empty(); }

  Itinerary shift() const;
  Itinerary shift(std::size_t n) const;
  Itinerary prepend(std::span<const Symbol> word) const;

  friend bool operator==(const Itinerary&, const Itinerary&) = default;

 private:
  void canonicalize();

  Word pre_;
  Word per_;
};

inline Itinerary shift(const Itinerary& s) { return s.shift(); }
inline Itinerary prepend(std::span<const Symbol> u, const Itinerary& s) { return s.prepend(u); }

/// inf{k : s_k != t_k}, or nullopt when s == t.
std::optional<std::size_t> first_disagreement(const Itinerary& s, const Itinerary& t);

/// d(s,t) = theta^k with k the first disagreement index; 0 when s == t.
double natural_metric(const Itinerary& s, const Itinerary& t, double theta);

/// Cap on enumerated state spaces. Defaults to 2e6, overridable through the
/// BOUQUET_STATE_CAP environment variable.
std::size_t state_cap();

/// (2N+1)^m, throwing CapExceeded when it exceeds `cap`.
std::size_t cylinder_count(TruncationLevel level, int depth, std::size_t cap = state_cap());

/// All words of length `depth` over {-N..N}, lexicographic with -N < ... < N.
/// Measures over cylinders are stored in exactly this order.
std::vector<Word> cylinders(TruncationLevel level, int depth, std::size_t cap = state_cap());

/// Position of `word` in the order produced by cylinders().
std::size_t cylinder_index(std::span<const Symbol> word, TruncationLevel level);
/// Inverse of cylinder_index().
Word cylinder_word(std::size_t index, TruncationLevel level, int depth);

std::string format_word(std::span<const Symbol> word);

}  // namespace bouquet
