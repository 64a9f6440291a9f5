#include "bouquet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bouquet/error.hpp"
#include "bouquet/sampling.hpp"

namespace bouquet {

std::string to_string(Axiom a) {
  switch (a) {
    case Axiom::B1:
      return "B1";
    case Axiom::B2:
      return "B2";
    case Axiom::B3:
      return "B3";
    case Axiom::Density:
      return "density";
    case Axiom::Compactness:
      return "compactness";
  }
  return "B1";
}

Axiom axiom_from_string(const std::string& text) {
  for (Axiom a : {Axiom::B1, Axiom::B2, Axiom::B3, Axiom::Density, Axiom::Compactness})
    if (to_string(a) == text) return a;
  throw ParseError("unknown axiom '" + text + "'");
}

namespace {

Verdict verdict_from_string(const std::string& text) {
  for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Inconclusive})
    if (to_string(v) == text) return v;
  throw ParseError("unknown verdict '" + text + "'");
}

Verdict violation_verdict(double worst) { return worst <= kAuditSlack ? Verdict::Pass : Verdict::Fail; }

}  // namespace

nlohmann::json AuditResult::to_json() const {
  return {{"axiom", to_string(axiom)},   {"N", n_level},  {"samples", samples},
          {"worst_violation", worst_violation}, {"verdict", to_string(verdict)}, {"notes", notes},
          {"details", details}};
}

AuditResult AuditResult::from_json(const nlohmann::json& j) {
  try {
    AuditResult r;
    r.axiom = axiom_from_string(j.at("axiom").get<std::string>());
    r.n_level = j.at("N").get<int>();
    r.samples = j.at("samples").get<std::size_t>();
    r.worst_violation = j.at("worst_violation").get<double>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.notes = j.value("notes", "");
    r.details = j.value("details", std::vector<int>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad audit result: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// B1

AuditResult audit_b1(const ExpMapModel& model, TruncationLevel level, const ShrinkingConstants& constants,
                     std::size_t samples, std::uint64_t seed, const B1Options& options) {
  AuditResult out;
  out.axiom = Axiom::B1;
  out.n_level = level.value();
  out.samples = samples;
  out.worst_violation = -std::numeric_limits<double>::infinity();

  if (options.metric == MetricKind::Natural) {
    ItinerarySampler sampler(level, seed);
    double worst_equality = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const Itinerary s = sampler.itinerary();
      const Itinerary t = sampler.itinerary();
      const Word u = sampler.word(static_cast<std::size_t>(sampler.uniform_int(1, 8)));
      const double base = natural_metric(s, t, options.theta);
      const double image = natural_metric(s.prepend(u), t.prepend(u), options.theta);
      const double bound = std::pow(options.theta, static_cast<double>(u.size())) * base;
      const double excess = bound > 0.0 ? (image - bound) / bound : image;
      out.worst_violation = std::max(out.worst_violation, excess);
      worst_equality = std::max(worst_equality, bound > 0.0 ? std::abs(image - bound) / bound : image);
    }
    out.verdict = violation_verdict(std::max(out.worst_violation, worst_equality));
    out.notes = "natural metric theta=" + std::to_string(options.theta) +
                "; max relative deviation from equality " + std::to_string(worst_equality);
    return out;
  }

  const auto pairs = sample_contractions(model, level, constants.delta_0, samples, seed);
  std::size_t violations = 0;
  for (const auto& p : pairs) {
    const double bound =
        constants.c_e * std::pow(constants.lambda_e, -static_cast<double>(p.prefix.size())) * p.base_distance;
    const double excess = (p.image_distance - bound) / bound;
    if (excess > kAuditSlack) ++violations;
    out.worst_violation = std::max(out.worst_violation, excess);
  }
  out.verdict = violation_verdict(out.worst_violation);
  out.notes = "induced metric C_E=" + std::to_string(constants.c_e) + " lambda_E=" +
              std::to_string(constants.lambda_e) + " delta_0=" + std::to_string(constants.delta_0) + "; " +
              std::to_string(violations) + " violations";
  return out;
}

// ---------------------------------------------------------------------------
// B2

MixingWitness mixing_length(const ExpMapModel& model, TruncationLevel level, const Itinerary& source,
                            const Itinerary& target, double delta, int n_cap, std::size_t exhaustive_limit) {
  const Complex zs = endpoint(model, source).point;
  const Complex zt = endpoint(model, target).point;
  if (std::abs(zt - zs) < delta) return {0, std::abs(zt - zs)};
  double last = 0.0;
  for (int n = 1; n <= n_cap; ++n) {
    const Word head = source.prefix(static_cast<std::size_t>(n));
    last = std::abs(pull_back(model, head, zt) - zs);
    if (last < delta) return {n, last};
    std::size_t count = 0;
    try {
      count = cylinder_count(level, n, exhaustive_limit);
    } catch (const CapExceeded&) {
      continue;
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double d = std::abs(pull_back(model, cylinder_word(i, level, n), zt) - zs);
      if (d < delta) return {n, d};
    }
  }
  return {-1, last};
}

AuditResult audit_b2_mixing(const ExpMapModel& model, TruncationLevel level, const ShrinkingConstants& constants,
                            std::size_t pairs, std::uint64_t seed, const B2Options& options) {
  const double delta = options.delta > 0.0 ? options.delta : constants.delta_0;
  ItinerarySampler sampler(level, seed);
  AuditResult out;
  out.axiom = Axiom::B2;
  out.n_level = level.value();
  out.samples = pairs;
  out.worst_violation = -std::numeric_limits<double>::infinity();
  int longest = 0;
  std::size_t attempts = 0;
  while (out.details.size() < pairs) {
    if (++attempts > 100 * pairs + 100) throw ConvergenceError("could not sample targets inside B(0, R)");
    const Itinerary t = sampler.itinerary();
    if (!(std::abs(endpoint(model, t).point - model.zero_endpoint) < options.radius)) continue;
    const Itinerary s = sampler.itinerary();
    const auto witness = mixing_length(model, level, s, t, delta, options.n_cap, options.exhaustive_limit);
    out.details.push_back(witness.length);
    longest = std::max(longest, witness.length);
    out.worst_violation = std::max(out.worst_violation, witness.distance - delta);
  }
  const bool capped = std::any_of(out.details.begin(), out.details.end(), [](int n) { return n < 0; });
  out.verdict = capped ? Verdict::Inconclusive : Verdict::Pass;
  out.notes = "R=" + std::to_string(options.radius) + " delta=" + std::to_string(delta) +
              " n_cap=" + std::to_string(options.n_cap) + "; max n " + std::to_string(longest);
  return out;
}

// ---------------------------------------------------------------------------
// B3

namespace {

std::vector<std::vector<Complex>> snapping_pool(const ExpMapModel& model, TruncationLevel level, int pool_samples,
                                                std::uint64_t seed) {
  ItinerarySampler sampler(level, seed, 6, 2);
  std::vector<std::vector<Complex>> pool(level.alphabet_size());
  int depth = 1;
  while (depth < 6 && level.alphabet_size() * cylinder_count(level, depth, 1'000'000) <= 729) ++depth;
  const auto tails = cylinders(level, depth);
  for (Symbol k = -level.value(); k <= level.value(); ++k) {
    auto& bucket = pool[level.ordinal(k)];
    const Symbol head[] = {k};
    for (const auto& w : tails) {
      Word word{k};
      word.insert(word.end(), w.begin(), w.end());
      bucket.push_back(representative_endpoint(model, word));
    }
    for (int i = 0; i < pool_samples; ++i) bucket.push_back(endpoint(model, sampler.itinerary().prepend(head)).point);
  }
  return pool;
}

Complex snap(const std::vector<Complex>& bucket, Complex z) {
  return *std::min_element(bucket.begin(), bucket.end(),
                           [z](Complex a, Complex b) { return std::abs(a - z) < std::abs(b - z); });
}

}  // namespace

AuditResult audit_b3_chaining(const ExpMapModel& model, TruncationLevel level, const ShrinkingConstants& constants,
                              std::size_t samples, std::uint64_t seed, const B3Options& options) {
  const double delta = constants.delta_0;
  const double delta_prime = std::min(delta, delta / constants.c_e);
  const auto pool = snapping_pool(model, level, options.pool_samples, seed + 1);
  ItinerarySampler sampler(level, seed);
  AuditResult out;
  out.axiom = Axiom::B3;
  out.n_level = level.value();
  out.samples = samples;
  out.worst_violation = -std::numeric_limits<double>::infinity();
  std::size_t attempts = 0;
  while (out.details.size() < samples) {
    if (++attempts > 200 * samples + 100) throw ConvergenceError("could not sample pairs inside B_0(s, delta)");
    const Itinerary s = sampler.itinerary();
    const Itinerary t = sampler.itinerary().prepend(s.prefix(static_cast<std::size_t>(sampler.uniform_int(1, 3))));
    const Complex zs = endpoint(model, s).point;
    const Complex zt = endpoint(model, t).point;
    if (!(std::abs(zs - zt) < delta)) continue;
    const auto& bucket = pool[level.ordinal(s[0])];
    double best = std::numeric_limits<double>::infinity();
    int found = -1;
    for (int length = 1; length <= options.chain_cap && found < 0; ++length) {
      Complex previous = zs;
      double widest = 0.0;
      for (int i = 1; i <= length; ++i) {
        const Complex next = i == length ? zt : snap(bucket, zs + (zt - zs) * (static_cast<double>(i) / length));
        widest = std::max(widest, std::abs(next - previous));
        previous = next;
      }
      best = std::min(best, widest);
      if (widest < delta_prime) found = length;
    }
    out.details.push_back(found);
    out.worst_violation = std::max(out.worst_violation, best - delta_prime);
  }
  const bool snapped = std::all_of(out.details.begin(), out.details.end(), [](int l) { return l > 0; });
  const int longest = *std::max_element(out.details.begin(), out.details.end());
  out.verdict = snapped ? Verdict::Pass : Verdict::Inconclusive;
  out.notes = "delta'=" + std::to_string(delta_prime) + " chain_cap=" + std::to_string(options.chain_cap) +
              "; max chain length " + std::to_string(longest);
  return out;
}

// ---------------------------------------------------------------------------
// Density and compactness

int density_depth(const ExpMapModel& model, const Itinerary& s, double eps, int depth_cap) {
  const Complex z = endpoint(model, s).point;
  for (int d = 0; d <= depth_cap; ++d)
    if (std::abs(representative_endpoint(model, s.prefix(static_cast<std::size_t>(d))) - z) < eps) return d;
  return -1;
}

AuditResult audit_density(const ExpMapModel& model, TruncationLevel n_max, std::size_t probes, std::uint64_t seed,
                          double eps, int depth_cap) {
  ItinerarySampler sampler(n_max, seed);
  AuditResult out;
  out.axiom = Axiom::Density;
  out.n_level = n_max.value();
  out.samples = probes;
  out.worst_violation = -std::numeric_limits<double>::infinity();
  int deepest = 0, widest = 0;
  for (std::size_t i = 0; i < probes; ++i) {
    const Itinerary s = sampler.itinerary();
    const int d = density_depth(model, s, eps, depth_cap);
    out.details.push_back(d);
    const Word w = s.prefix(static_cast<std::size_t>(d < 0 ? depth_cap : d));
    const double distance = std::abs(representative_endpoint(model, w) - endpoint(model, s).point);
    out.worst_violation = std::max(out.worst_violation, distance - eps);
    if (d >= 0) {
      deepest = std::max(deepest, d);
      for (Symbol x : w) widest = std::max(widest, std::abs(x));
    }
  }
  const bool capped = std::any_of(out.details.begin(), out.details.end(), [](int d) { return d < 0; });
  out.verdict = capped ? Verdict::Inconclusive : Verdict::Pass;
  out.notes = "eps=" + std::to_string(eps) + "; max depth " + std::to_string(deepest) + ", max N used " +
              std::to_string(widest);
  return out;
}

std::vector<double> running_endpoint_sup(const ExpMapModel& model, TruncationLevel level, std::size_t samples,
                                         std::uint64_t seed) {
  ItinerarySampler sampler(level, seed);
  std::vector<double> out;
  out.reserve(samples);
  double sup = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    sup = std::max(sup, std::abs(endpoint(model, sampler.itinerary()).point));
    out.push_back(sup);
  }
  return out;
}

AuditResult audit_compactness(const ExpMapModel& model, TruncationLevel level, std::size_t samples,
                              std::uint64_t seed) {
  if (samples < 2) throw DomainError("compactness proxy needs at least two samples");
  ItinerarySampler sampler(level, seed);
  AuditResult out;
  out.axiom = Axiom::Compactness;
  out.n_level = level.value();
  out.samples = samples;
  double sup = 0.0, half = 0.0, lowest_re = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const Complex z = endpoint(model, sampler.itinerary()).point;
    sup = std::max(sup, std::abs(z));
    lowest_re = std::min(lowest_re, z.real());
    if (i + 1 == samples / 2) half = sup;
  }
  const double growth = sup - half;
  out.worst_violation = growth - 1e-6;
  if (!std::isfinite(sup) || !(lowest_re > model.tract_boundary))
    out.verdict = Verdict::Fail;
  else
    out.verdict = growth < 1e-6 ? Verdict::Pass : Verdict::Inconclusive;
  out.notes = "proxy: sup |endpoint| = " + std::to_string(sup) + ", growth over second half " +
              std::to_string(growth) + ", min Re = " + std::to_string(lowest_re);
  return out;
}

}  // namespace bouquet
