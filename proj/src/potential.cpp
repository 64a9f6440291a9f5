#include "bouquet/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bouquet/error.hpp"
#include "bouquet/linefit.hpp"
#include "bouquet/sampling.hpp"

namespace bouquet {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

// ---------------------------------------------------------------------------
// CLaw

CLaw CLaw::gaussian(double beta) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("gaussian c-law needs beta > 1");
  CLaw law;
  law.kind_ = Kind::Gaussian;
  law.beta_ = beta;
  return law;
}

CLaw CLaw::unit() { return CLaw{}; }

CLaw CLaw::table(std::vector<double> values, CLaw tail) {
  if (values.empty()) throw DomainError("table c-law needs at least one value");
  for (double c : values)
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c-law values must be finite and > 0");
  if (tail.kind_ == Kind::Table) throw DomainError("table c-law tail must be gaussian or unit");
  CLaw law;
  law.kind_ = Kind::Table;
  law.values_ = std::move(values);
  law.tail_kind_ = tail.kind_;
  law.tail_beta_ = tail.beta_;
  return law;
}

double CLaw::log_c(Symbol k) const {
  const double a = std::abs(static_cast<double>(k));
  switch (kind_) {
    case Kind::Unit:
      return 0.0;
    case Kind::Gaussian:
      return -std::pow(a, beta_);
    case Kind::Table: {
      const auto i = static_cast<std::size_t>(std::abs(k));
      if (i < values_.size()) return std::log(values_[i]);
      return tail_kind_ == Kind::Gaussian ? -std::pow(a, tail_beta_) : 0.0;
    }
  }
  return 0.0;
}

nlohmann::json CLaw::to_json() const {
  switch (kind_) {
    case Kind::Unit:
      return {{"kind", "unit"}};
    case Kind::Gaussian:
      return {{"kind", "gaussian"}, {"beta", beta_}};
    case Kind::Table: {
      nlohmann::json tail = tail_kind_ == Kind::Gaussian ? nlohmann::json{{"kind", "gaussian"}, {"beta", tail_beta_}}
                                                         : nlohmann::json{{"kind", "unit"}};
      return {{"kind", "table"}, {"values", values_}, {"tail", tail}};
    }
  }
  return {};
}

CLaw CLaw::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ParseError("c_law must be an object with a string \"kind\"");
  const auto kind = j["kind"].get<std::string>();
  try {
    if (kind == "unit") return unit();
    if (kind == "gaussian") return gaussian(j.value("beta", 2.0));
    if (kind == "table") {
      if (!j.contains("values") || !j["values"].is_array()) throw ParseError("table c_law needs a \"values\" array");
      const CLaw tail = j.contains("tail") ? from_json(j["tail"]) : gaussian(2.0);
      return table(j["values"].get<std::vector<double>>(), tail);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad c_law: ") + e.what());
  }
  throw ParseError("unknown c_law kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// PotentialSpec

PotentialSpec::PotentialSpec() = default;

PotentialSpec PotentialSpec::exponential(double t, CLaw law, double tau) {
  PotentialSpec spec = exponential_unchecked(t, std::move(law), tau);
  if (!spec.admissible())
    throw DomainError("potential needs t > 1/tau (t = " + std::to_string(t) + ", tau = " + std::to_string(tau) + ")");
  return spec;
}

PotentialSpec PotentialSpec::exponential_unchecked(double t, CLaw law, double tau) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("potential exponent t must be finite and >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and > 0");
  PotentialSpec spec;
  spec.t_ = t;
  spec.tau_ = tau;
  spec.law_ = std::move(law);
  return spec;
}

PotentialSpec PotentialSpec::constant(double value) {
  if (!std::isfinite(value)) throw DomainError("constant potential must be finite");
  PotentialSpec spec;
  spec.constant_ = true;
  spec.value_ = value;
  spec.t_ = 0.0;
  spec.law_ = CLaw::unit();
  return spec;
}

bool PotentialSpec::admissible() const { return constant_ || t_ > 1.0 / tau_; }

nlohmann::json PotentialSpec::to_json() const {
  if (constant_) return {{"constant", value_}};
  return {{"t", t_}, {"tau", tau_}, {"c_law", law_.to_json()}};
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j, bool require_admissible) {
  if (!j.is_object()) throw ParseError("potential spec must be a JSON object");
  try {
    if (j.contains("constant")) return constant(j["constant"].get<double>());
    const double t = j.value("t", 2.0);
    const double tau = j.value("tau", 1.0);
    const CLaw law = j.contains("c_law") ? CLaw::from_json(j["c_law"]) : CLaw::gaussian(2.0);
    return require_admissible ? exponential(t, law, tau) : exponential_unchecked(t, law, tau);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad potential spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

double phi_point(const ExpMapModel& model, const PotentialSpec& spec, Complex z) {
  if (spec.is_constant()) return spec.constant_value();
  const auto k = fundamental_domain(model, z);
  if (!k) throw DomainError("phi undefined outside the tract");
  return spec.c_law().log_c(*k) - spec.t() * std::log(theta_derivative(model, z, spec.tau()));
}

double phi_symbolic(const ExpMapModel& model, const PotentialSpec& spec, const Itinerary& s) {
  return phi_point(model, spec, endpoint(model, s).point);
}

namespace {

// Endpoints of s, shift(s), ..., shift^n(s), obtained by pulling the endpoint
// of shift^n(s) back one branch at a time.
std::vector<Complex> orbit_endpoints(const ExpMapModel& model, const Itinerary& s, int n) {
  std::vector<Complex> z(static_cast<std::size_t>(n) + 1);
  z[static_cast<std::size_t>(n)] = endpoint(model, s.shift(static_cast<std::size_t>(n))).point;
  for (int j = n - 1; j >= 0; --j)
    z[static_cast<std::size_t>(j)] =
        inverse_branch(model, s[static_cast<std::size_t>(j)], z[static_cast<std::size_t>(j) + 1]);
  return z;
}

}  // namespace

double birkhoff_sum(const ExpMapModel& model, const PotentialSpec& spec, const Itinerary& s, int n) {
  if (n < 0) throw DomainError("Birkhoff sum needs n >= 0");
  if (n == 0) return 0.0;
  const auto z = orbit_endpoints(model, s, n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += phi_point(model, spec, z[static_cast<std::size_t>(j)]);
  return sum;
}

// ---------------------------------------------------------------------------
// Summability

SummabilityReport summability_check(const ExpMapModel& model, const PotentialSpec& spec, int n_max,
                                    const std::vector<Itinerary>& samples) {
  if (n_max < 4) throw DomainError("summability check needs n_max >= 4");
  if (samples.empty()) throw DomainError("summability check needs at least one sample");
  SummabilityReport out;
  out.n_max = n_max;
  out.decay_exponent = std::numeric_limits<double>::infinity();
  bool all_pass = true;
  for (const auto& s : samples) {
    const Complex zs = endpoint(model, s).point;
    auto term = [&](Symbol u) { return std::exp(phi_point(model, spec, inverse_branch(model, u, zs))); };
    std::vector<double> partial(static_cast<std::size_t>(n_max));
    std::vector<double> increments(static_cast<std::size_t>(n_max));
    double sum = term(0);
    for (int k = 1; k <= n_max; ++k) {
      const double inc = term(k) + term(-k);
      sum += inc;
      increments[static_cast<std::size_t>(k) - 1] = inc;
      partial[static_cast<std::size_t>(k) - 1] = sum;
    }
    out.partial_sums.push_back(partial);
    if (!std::isfinite(sum)) {
      all_pass = false;
      out.decay_exponent = 0.0;
      continue;
    }
    out.sup = std::max(out.sup, sum);

    // decay of the increments over the second half of 1..n_max
    std::vector<double> xs, ys;
    bool negligible = true;
    for (int k = n_max / 2; k <= n_max; ++k) {
      const double inc = increments[static_cast<std::size_t>(k) - 1];
      if (inc > 1e-16 * sum) negligible = false;
      if (inc > 0.0) {
        xs.push_back(std::log(static_cast<double>(k)));
        ys.push_back(std::log(inc));
      }
    }
    double exponent = std::numeric_limits<double>::infinity();
    if (!negligible && xs.size() >= 2) exponent = -fit_line(xs, ys).slope;
    out.decay_exponent = std::min(out.decay_exponent, exponent);
    if (!negligible && !(exponent > 1.1)) all_pass = false;
  }
  out.verdict = all_pass ? Verdict::Pass : Verdict::Fail;
  out.note = all_pass ? "tail increments decay faster than K^-1.1"
                      : "partial sums not stabilized at K = " + std::to_string(n_max);
  return out;
}

// ---------------------------------------------------------------------------
// Rapid decrease

std::vector<TailPoint> tail_pool(const ExpMapModel& model, const PotentialSpec& spec, int n_max, int per_symbol,
                                 std::uint64_t seed) {
  if (n_max < 1) throw DomainError("tail pool needs n_max >= 1");
  const TruncationLevel level(n_max);
  ItinerarySampler sampler(level, seed, 6, 2);
  std::vector<TailPoint> pool;
  auto add = [&](Symbol k, Complex z) { pool.push_back({k, z, phi_point(model, spec, z)}); };
  for (Symbol k = -n_max; k <= n_max; ++k) {
    for (Symbol j = -n_max; j <= n_max; ++j) add(k, representative_endpoint(model, Word{k, j}));
    const Symbol head[] = {k};
    for (int i = 0; i < per_symbol; ++i) {
      try {
        add(k, endpoint(model, sampler.itinerary().prepend(head)).point);
      } catch (const ConvergenceError&) {
      }
    }
  }
  return pool;
}

namespace {

std::pair<double, int> tail_sum_counted(const std::vector<TailPoint>& pool, double radius, Complex center) {
  std::map<Symbol, double> sup;
  for (const auto& pt : pool) {
    if (!(std::abs(pt.z - center) > radius)) continue;
    auto [it, fresh] = sup.emplace(pt.head, pt.phi);
    if (!fresh) it->second = std::max(it->second, pt.phi);
  }
  double sum = 0.0;
  for (const auto& [k, phi] : sup) sum += 1.1 * std::exp(phi);
  return {sum, static_cast<int>(sup.size())};
}

}  // namespace

double tail_sum(const std::vector<TailPoint>& pool, double radius, Complex center) {
  return tail_sum_counted(pool, radius, center).first;
}

RapidDecreaseReport rapid_decrease_check(const ExpMapModel& model, const PotentialSpec& spec,
                                         const std::vector<double>& radii, int n_max, std::uint64_t seed,
                                         int per_symbol) {
  if (radii.empty()) throw DomainError("rapid decrease check needs at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly increasing");
  const auto pool = tail_pool(model, spec, n_max, per_symbol, seed);
  RapidDecreaseReport out;
  out.radii = radii;
  for (double r : radii) {
    const auto [sum, count] = tail_sum_counted(pool, r, model.zero_endpoint);
    out.tail_sums.push_back(sum);
    out.contributing.push_back(count);
  }
  if (out.contributing.back() < 2) {
    out.verdict = Verdict::Inconclusive;
    out.note = "fewer than two symbols sampled outside the largest ball";
    return out;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < out.tail_sums.size(); ++i)
    if (out.tail_sums[i] > out.tail_sums[i - 1]) monotone = false;
  const bool shrinking = out.tail_sums.back() <= 0.5 * out.tail_sums.front();
  out.verdict = monotone && shrinking ? Verdict::Pass : Verdict::Fail;
  out.note = !monotone ? "tail sums increase with R"
             : shrinking ? "tail sums decrease toward 0"
                         : "tail sums do not shrink with R";
  return out;
}

// ---------------------------------------------------------------------------
// Bounded on balls

BallReport bounded_on_balls_check(const ExpMapModel& model, const PotentialSpec& spec, double radius,
                                  TruncationLevel level, std::size_t samples, std::uint64_t seed) {
  if (!(radius > 0.0)) throw DomainError("ball radius must be > 0");
  ItinerarySampler sampler(level, seed);
  BallReport out;
  out.radius = radius;
  for (std::size_t i = 0; i < samples; ++i) {
    const Complex z = endpoint(model, sampler.itinerary()).point;
    if (!(std::abs(z - model.zero_endpoint) < radius)) continue;
    ++out.inside;
    out.sup_abs_phi = std::max(out.sup_abs_phi, std::abs(phi_point(model, spec, z)));
    if (i < samples / 2) out.sup_first_half = out.sup_abs_phi;
  }
  if (out.inside < 10) {
    out.verdict = Verdict::Inconclusive;
  } else if (!std::isfinite(out.sup_abs_phi)) {
    out.verdict = Verdict::Fail;
  } else {
    const double growth = out.sup_abs_phi - out.sup_first_half;
    out.verdict = growth <= 0.1 * std::max(1.0, out.sup_first_half) ? Verdict::Pass : Verdict::Fail;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variation

namespace {

void fit_variation(VariationReport& out) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.var_n.size(); ++i)
    if (out.var_n[i] > 0.0) {
      xs.push_back(static_cast<double>(out.n_values[i]));
      ys.push_back(std::log(out.var_n[i]));
    }
  if (xs.size() < 2) {
    // constant (or numerically constant) potential
    out.fitted_c = xs.empty() ? 0.0 : std::exp(ys.front());
    out.fitted_r = 0.0;
    out.r_squared = 1.0;
    out.w_r = out.fitted_c;
    return;
  }
  const LineFit line = fit_line(xs, ys);
  out.fitted_c = std::exp(line.intercept);
  out.fitted_r = std::exp(line.slope);
  out.r_squared = line.r_squared;
  out.w_r = 0.0;
  for (std::size_t i = 0; i < out.var_n.size(); ++i)
    out.w_r = std::max(out.w_r, out.var_n[i] / std::pow(out.fitted_r, out.n_values[i]));
}

bool shadows(const std::vector<Complex>& a, const std::vector<Complex>& b, int n, double delta) {
  for (int j = 0; j <= n; ++j)
    if (!(std::abs(a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)]) < delta)) return false;
  return true;
}

}  // namespace

VariationReport variation_report(const ExpMapModel& model, const PotentialSpec& spec, double delta, int n_max,
                                 std::size_t samples, TruncationLevel level, std::uint64_t seed) {
  if (!(delta > 0.0)) throw DomainError("variation needs delta > 0");
  if (n_max < 0) throw DomainError("variation needs n_max >= 0");
  ItinerarySampler sampler(level, seed);
  VariationReport out;
  for (int n = 0; n <= n_max; ++n) {
    double var = 0.0;
    std::size_t valid = 0;
    for (std::size_t attempt = 0; attempt < 20 * samples && valid < samples; ++attempt) {
      const Itinerary s = sampler.itinerary();
      const Itinerary t = sampler.itinerary().prepend(s.prefix(static_cast<std::size_t>(n) + 1));
      const auto zs = orbit_endpoints(model, s, n + 1);
      const auto zt = orbit_endpoints(model, t, n + 1);
      if (!shadows(zs, zt, n, delta)) continue;
      ++valid;
      var = std::max(var, std::abs(phi_point(model, spec, zs[0]) - phi_point(model, spec, zt[0])));
    }
    if (valid < 10)
      throw ConvergenceError("fit failure: only " + std::to_string(valid) + " valid pairs at n = " +
                             std::to_string(n));
    out.n_values.push_back(n);
    out.var_n.push_back(var);
    out.pairs.push_back(valid);
  }
  fit_variation(out);
  return out;
}

std::vector<double> exhaustive_variation(const ExpMapModel& model, const PotentialSpec& spec, double delta,
                                         int n_max, TruncationLevel level, int depth) {
  if (n_max + 1 > depth) throw DomainError("exhaustive variation needs depth > n_max");
  const auto words = cylinders(level, depth);
  std::vector<std::vector<Complex>> chains;
  std::vector<double> phis;
  chains.reserve(words.size());
  for (const auto& w : words) {
    std::vector<Complex> z(static_cast<std::size_t>(depth) + 1);
    z[static_cast<std::size_t>(depth)] = model.zero_endpoint;
    for (int j = depth - 1; j >= 0; --j)
      z[static_cast<std::size_t>(j)] =
          inverse_branch(model, w[static_cast<std::size_t>(j)], z[static_cast<std::size_t>(j) + 1]);
    phis.push_back(phi_point(model, spec, z[0]));
    chains.push_back(std::move(z));
  }
  std::vector<double> out;
  for (int n = 0; n <= n_max; ++n) {
    // words sharing a prefix of length n+1 are contiguous in lexicographic order
    const std::size_t block = cylinder_count(level, depth - n - 1);
    double var = 0.0;
    for (std::size_t start = 0; start < words.size(); start += block)
      for (std::size_t a = start; a < start + block; ++a)
        for (std::size_t b = a + 1; b < start + block; ++b)
          if (shadows(chains[a], chains[b], n, delta)) var = std::max(var, std::abs(phis[a] - phis[b]));
    out.push_back(var);
  }
  return out;
}

}  // namespace bouquet
