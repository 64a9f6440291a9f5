#include "bouquet/expmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bouquet/error.hpp"
#include "bouquet/linefit.hpp"
#include "bouquet/sampling.hpp"

namespace bouquet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Newton on F(x) = lambda e^x - x inside a sign-changing bracket, falling back
// to bisection whenever the Newton step leaves it.
double solve_fixed_point(double lambda, double start, double lo, double hi) {
  auto f = [lambda](double x) { return lambda * std::exp(x) - x; };
  double flo = f(lo);
  double x = std::clamp(start, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = f(x);
    if (std::abs(fx) < 1e-14) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double dfx = lambda * std::exp(x) - 1.0;
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      if (std::abs(f(next)) < 1e-14) return next;
      break;
    }
    x = next;
  }
  throw ConvergenceError("Newton did not converge for the fixed point of " + std::to_string(lambda) + " e^x");
}

struct Resolved {
  Complex point;
  double residual;
  int depth;
};

// Attracting fixed point of g_{per_0} o ... o g_{per_{q-1}}, iterated from
// the base point. Iteration continues past the tolerance until the step stops
// shrinking so that the result sits at working precision.
Resolved resolve_period(const ExpMapModel& model, const Word& period) {
  Complex w = model.base_point();
  double previous = std::numeric_limits<double>::infinity();
  int depth = 0;
  int polish = 0;
  while (true) {
    Complex next = w;
    for (auto it = period.rbegin(); it != period.rend(); ++it) next = inverse_branch(model, *it, next);
    depth += static_cast<int>(period.size());
    const double step = std::abs(next - w);
    w = next;
    if (step < model.backward_tolerance) {
      const bool at_precision = step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w);
      if (at_precision || step >= previous || ++polish > 64 || depth >= model.max_backward_depth)
        return {w, step, depth};
    } else if (depth >= model.max_backward_depth) {
      throw ConvergenceError("backward iteration for period (" + format_word(period) + ") did not reach tolerance " +
                             std::to_string(model.backward_tolerance) + " within depth " +
                             std::to_string(model.max_backward_depth) + " (last step " + std::to_string(step) + ")");
    }
    previous = step;
  }
}

}  // namespace

ExpMapModel build_model(double lambda, double backward_tolerance, int max_backward_depth) {
  if (!(lambda > 0.0 && lambda < 1.0 / std::numbers::e))
    throw DomainError("lambda must lie in (0, 1/e), got " + std::to_string(lambda));
  if (!(backward_tolerance > 0.0)) throw DomainError("backward tolerance must be positive");
  if (max_backward_depth < 1) throw DomainError("max backward depth must be >= 1");

  ExpMapModel model;
  model.lambda = lambda;
  model.tract_boundary = std::log(1.0 / lambda);
  model.backward_tolerance = backward_tolerance;
  model.max_backward_depth = max_backward_depth;

  // q in (0,1) since F(0) = lambda > 0 > lambda e - 1 = F(1); p lies past ln(1/lambda) where F < 0.
  model.attracting = {solve_fixed_point(lambda, 0.0, 0.0, 1.0), 0.0};
  double hi = model.tract_boundary + 1.0;
  while (lambda * std::exp(hi) - hi <= 0.0) hi *= 2.0;
  model.repelling = {solve_fixed_point(lambda, 3.0, model.tract_boundary, hi), 0.0};

  const Resolved zero = resolve_period(model, Word{0});
  model.zero_endpoint = zero.point;
  model.zero_endpoint_depth = zero.depth;
  model.zero_endpoint_residual = zero.residual;
  return model;
}

Complex inverse_branch(const ExpMapModel& model, Symbol k, Complex w) {
  const double modulus = std::abs(w);
  const double arg = std::arg(w);
  if (modulus >= 1.0 && w.imag() == 0.0 && w.real() < 0.0)
    throw CutError("point lies on the cut ray (-inf,-1]");
  if (modulus >= 1.0 && std::numbers::pi - std::abs(arg) < 1e-14)
    throw CutError("point lies on the cut ray (-inf,-1]");
  if (!(modulus > 1.0))
    throw DomainError("inverse branch undefined at |w| <= 1: preimage leaves the tract");
  return {std::log(modulus) - std::log(model.lambda), arg + kTwoPi * k};
}

std::optional<Symbol> fundamental_domain(const ExpMapModel& model, Complex z) {
  if (z.real() < model.tract_boundary) return std::nullopt;
  return static_cast<Symbol>(std::floor((z.imag() + std::numbers::pi) / kTwoPi));
}

Complex pull_back(const ExpMapModel& model, std::span<const Symbol> word, Complex z) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) z = inverse_branch(model, *it, z);
  return z;
}

Complex representative_endpoint(const ExpMapModel& model, std::span<const Symbol> word) {
  return pull_back(model, word, model.zero_endpoint);
}

HairPoint endpoint(const ExpMapModel& model, const Itinerary& s) {
  HairPoint out;
  out.itinerary = s;
  Resolved tail;
  if (s.period() == Word{0}) {
    tail = {model.zero_endpoint, model.zero_endpoint_residual, model.zero_endpoint_depth};
  } else {
    tail = resolve_period(model, s.period());
  }
  out.point = pull_back(model, s.preperiod(), tail.point);
  out.residual = tail.residual;
  out.depth_used = tail.depth + static_cast<int>(s.preperiod().size());
  return out;
}

double induced_metric(const ExpMapModel& model, const Itinerary& s, const Itinerary& t) {
  if (s == t) return 0.0;
  return std::abs(endpoint(model, s).point - endpoint(model, t).point);
}

double theta_derivative(const ExpMapModel& model, Complex z, double tau) {
  if (z == Complex{0.0, 0.0}) throw DomainError("theta derivative undefined at z = 0");
  const double image = std::abs(model.evaluate(z));
  // |E'| = |E|, so |E'|_theta = |E|^(1 - tau) |z|^tau
  return std::pow(image, 1.0 - tau) * std::pow(std::abs(z), tau);
}

double fit_delta0(const ExpMapModel& model, TruncationLevel level, std::size_t samples, std::uint64_t seed) {
  const int n = level.value();
  ItinerarySampler sampler(level, seed, 6, 2);
  const std::size_t per_cluster = std::max<std::size_t>(32, std::min<std::size_t>(samples, 400));
  std::vector<std::vector<Complex>> clusters(level.alphabet_size());
  for (int k = -n; k <= n; ++k) {
    auto& cluster = clusters[level.ordinal(k)];
    // every depth-2 representative plus random itineraries starting with k
    for (int j = -n; j <= n; ++j) cluster.push_back(representative_endpoint(model, Word{k, j}));
    for (int j = -n; j <= n; ++j) cluster.push_back(endpoint(model, Itinerary(Word{k}, Word{j})).point);
    while (cluster.size() < per_cluster) {
      const Symbol head[] = {k};
      cluster.push_back(endpoint(model, sampler.itinerary().prepend(head)).point);
    }
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a + 1 < clusters.size(); ++a)
    for (Complex x : clusters[a])
      for (Complex y : clusters[a + 1]) gap = std::min(gap, std::abs(x - y));
  if (clusters.size() == 1 || !std::isfinite(gap)) throw DomainError("delta_0 needs at least two clusters");
  return 0.5 * gap;
}

std::vector<ContractionSample> sample_contractions(const ExpMapModel& model, TruncationLevel level, double delta_0,
                                                   std::size_t samples, std::uint64_t seed) {
  ItinerarySampler sampler(level, seed, 6, 2);
  std::vector<ContractionSample> out;
  out.reserve(samples);
  std::size_t attempts = 0;
  while (out.size() < samples) {
    if (++attempts > 200 * samples + 1000) throw ConvergenceError("could not draw pairs with rho(s,t) < delta_0");
    const Itinerary s = sampler.itinerary();
    const auto agree = static_cast<std::size_t>(sampler.uniform_int(1, 5));
    const Word head = s.prefix(agree);
    const Itinerary t = sampler.itinerary().prepend(head);
    if (t == s) continue;
    const Complex zs = endpoint(model, s).point;
    const Complex zt = endpoint(model, t).point;
    const double base = std::abs(zs - zt);
    if (!(base > 0.0 && base < delta_0)) continue;
    // every fourth prefix is a run of zeros, the slowest contraction (near p)
    const auto length = static_cast<std::size_t>(sampler.uniform_int(1, 8));
    Word prefix = out.size() % 4 == 3 ? Word(length, 0) : sampler.word(length);
    ContractionSample sample{s, t, std::move(prefix), base, 0.0};
    sample.image_distance = std::abs(pull_back(model, sample.prefix, zs) - pull_back(model, sample.prefix, zt));
    out.push_back(std::move(sample));
  }
  return out;
}

ShrinkingConstants fit_shrinking_constants(const ExpMapModel& model, TruncationLevel level, std::size_t samples,
                                           std::uint64_t seed) {
  if (samples < 100) throw DomainError("fit_shrinking_constants needs at least 100 samples");
  ShrinkingConstants out;
  out.delta_0 = fit_delta0(model, level, samples, seed);
  const auto pairs = sample_contractions(model, level, out.delta_0, samples, seed + 1);
  out.samples = pairs.size();

  std::vector<double> worst(9, 0.0);
  for (const auto& p : pairs) worst[p.prefix.size()] = std::max(worst[p.prefix.size()], p.ratio());

  // least squares of log(worst ratio) on n
  std::vector<double> xs, ys;
  for (std::size_t n = 1; n < worst.size(); ++n)
    if (worst[n] > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(worst[n]));
    }
  if (xs.size() < 2) throw ConvergenceError("fit failure: fewer than two prefix lengths sampled");
  const LineFit line = fit_line(xs, ys);
  out.r_squared = line.r_squared;
  // |g_0'| = 1/p at the fixed point, so long zero runs near p contract by
  // exactly 1/p per symbol and no lambda_E above p survives fresh samples.
  out.lambda_e = std::min(std::exp(-line.slope), std::abs(model.zero_endpoint));
  if (!(out.lambda_e > 1.0))
    throw ConvergenceError("fit failure: no lambda_E > 1 fits the sampled contraction ratios");

  double c = 0.0;
  for (const auto& p : pairs)
    c = std::max(c, p.ratio() * std::pow(out.lambda_e, static_cast<double>(p.prefix.size())));
  out.c_e = std::max(1.0, 1.05 * c);
  return out;
}

std::vector<HairSample> sample_hair(const ExpMapModel& model, const Itinerary& s, int depth, int pull, double length) {
  if (depth < 1) throw DomainError("hair sampling needs depth >= 1");
  if (pull < 0) throw DomainError("hair pull-back depth must be >= 0");
  std::vector<HairSample> out;
  out.reserve(static_cast<std::size_t>(depth));
  out.push_back({s, 0, endpoint(model, s).point});
  const Word head = s.prefix(static_cast<std::size_t>(pull));
  const double strip = kTwoPi * s[static_cast<std::size_t>(pull)];
  for (int j = 1; j < depth; ++j) {
    const double frac = depth > 2 ? static_cast<double>(j - 1) / (depth - 2) : 0.0;
    const Complex base{model.tract_boundary + 1.0 + frac * (length - 1.0), strip};
    out.push_back({s, j, pull_back(model, head, base)});
  }
  return out;
}

}  // namespace bouquet
