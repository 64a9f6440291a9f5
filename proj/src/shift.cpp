#include "bouquet/shift.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "bouquet/error.hpp"

namespace bouquet {

TruncationLevel::TruncationLevel(int n) : n_(n) {
  if (n < 1) throw DomainError("truncation level must be >= 1, got " + std::to_string(n));
}

Itinerary::Itinerary() : per_{0} {}

Itinerary::Itinerary(Word preperiod, Word period) : pre_(std::move(preperiod)), per_(std::move(period)) {
  if (per_.empty()) throw DomainError("itinerary period must be nonempty");
  canonicalize();
}

void Itinerary::canonicalize() {
  // primitive root of the period
  const std::size_t q = per_.size();
  for (std::size_t d = 1; d < q; ++d) {
    if (q % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < q && repeats; ++i) repeats = per_[i] == per_[i % d];
    if (repeats) {
      per_.resize(d);
      break;
    }
  }
  // absorb the preperiod tail into the cycle
  while (!pre_.empty() && pre_.back() == per_.back()) {
    pre_.pop_back();
    std::rotate(per_.rbegin(), per_.rbegin() + 1, per_.rend());
  }
}

Itinerary Itinerary::representative(std::span<const Symbol> word) {
  return Itinerary(Word(word.begin(), word.end()), Word{0});
}

Symbol Itinerary::operator[](std::size_t i) const {
  if (i < pre_.size()) return pre_[i];
  return per_[(i - pre_.size()) % per_.size()];
}

Word Itinerary::prefix(std::size_t n) const {
  Word out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (*this)[i];
  return out;
}

int Itinerary::max_abs_symbol() const {
  int m = 0;
  for (Symbol s : pre_) m = std::max(m, std::abs(s));
  for (Symbol s : per_) m = std::max(m, std::abs(s));
  return m;
}

Itinerary Itinerary::shift() const {
  if (!pre_.empty()) return Itinerary(Word(pre_.begin() + 1, pre_.end()), per_);
  Word rotated(per_.begin() + 1, per_.end());
  rotated.push_back(per_.front());
  return Itinerary(Word{}, std::move(rotated));
}

Itinerary Itinerary::shift(std::size_t n) const {
  if (n <= pre_.size()) return Itinerary(Word(pre_.begin() + static_cast<std::ptrdiff_t>(n), pre_.end()), per_);
  const std::size_t r = (n - pre_.size()) % per_.size();
  Word rotated(per_.begin() + static_cast<std::ptrdiff_t>(r), per_.end());
  rotated.insert(rotated.end(), per_.begin(), per_.begin() + static_cast<std::ptrdiff_t>(r));
  return Itinerary(Word{}, std::move(rotated));
}

Itinerary Itinerary::prepend(std::span<const Symbol> word) const {
  Word pre(word.begin(), word.end());
  pre.insert(pre.end(), pre_.begin(), pre_.end());
  return Itinerary(std::move(pre), per_);
}

std::string format_word(std::span<const Symbol> word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(word[i]);
  }
  return out;
}

std::string Itinerary::to_string() const { return format_word(pre_) + "|" + format_word(per_); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

Word parse_word(std::string_view text) {
  Word out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string_view token =
        trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    std::string_view digits = token;
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    Symbol value{};
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != digits.data() + digits.size())
      throw ParseError("bad itinerary token '" + std::string(token) + "'");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Itinerary Itinerary::parse(std::string_view text) {
  const std::size_t bar = text.find('|');
  if (bar == std::string_view::npos)
    throw ParseError("itinerary '" + std::string(text) + "' lacks the '|' separator");
  if (text.find('|', bar + 1) != std::string_view::npos)
    throw ParseError("itinerary '" + std::string(text) + "' has more than one '|'");
  Word pre = parse_word(text.substr(0, bar));
  Word per = parse_word(text.substr(bar + 1));
  if (per.empty()) throw ParseError("itinerary '" + std::string(text) + "' has an empty period");
  return Itinerary(std::move(pre), std::move(per));
}

std::optional<std::size_t> first_disagreement(const Itinerary& s, const Itinerary& t) {
  const std::size_t horizon = std::max(s.preperiod().size(), t.preperiod().size()) +
                              std::lcm(s.period().size(), t.period().size());
  for (std::size_t k = 0; k < horizon; ++k)
    if (s[k] != t[k]) return k;
  return std::nullopt;
}

double natural_metric(const Itinerary& s, const Itinerary& t, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("natural metric needs theta in (0,1)");
  const auto k = first_disagreement(s, t);
  if (!k) return 0.0;
  return std::pow(theta, static_cast<double>(*k));
}

std::size_t state_cap() {
  if (const char* env = std::getenv("BOUQUET_STATE_CAP")) {
    std::size_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) return value;
  }
  return 2'000'000;
}

std::size_t cylinder_count(TruncationLevel level, int depth, std::size_t cap) {
  if (depth < 0) throw DomainError("cylinder depth must be >= 0");
  const std::size_t base = level.alphabet_size();
  std::size_t count = 1;
  for (int i = 0; i < depth; ++i) {
    if (count > cap / base)
      throw CapExceeded("(2N+1)^m = " + std::to_string(base) + "^" + std::to_string(depth) +
                        " exceeds the state cap " + std::to_string(cap));
    count *= base;
  }
  return count;
}

std::vector<Word> cylinders(TruncationLevel level, int depth, std::size_t cap) {
  if (depth < 1) throw DomainError("cylinder depth must be >= 1");
  const std::size_t count = cylinder_count(level, depth, cap);
  std::vector<Word> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(cylinder_word(i, level, depth));
  return out;
}

std::size_t cylinder_index(std::span<const Symbol> word, TruncationLevel level) {
  std::size_t index = 0;
  for (Symbol s : word) {
    if (!level.contains(s))
      throw DomainError("symbol " + std::to_string(s) + " outside {-N..N} with N=" + std::to_string(level.value()));
    index = index * level.alphabet_size() + level.ordinal(s);
  }
  return index;
}

Word cylinder_word(std::size_t index, TruncationLevel level, int depth) {
  Word w(static_cast<std::size_t>(depth));
  const std::size_t base = level.alphabet_size();
  for (int i = depth - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = level.symbol_at(index % base);
    index /= base;
  }
  return w;
}

}  // namespace bouquet
