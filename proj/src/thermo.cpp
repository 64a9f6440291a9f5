#include "bouquet/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "bouquet/error.hpp"
#include "bouquet/sampling.hpp"

namespace bouquet {

namespace {

double weight_at(const ExpMapModel& model, const PotentialSpec& spec, Symbol u, Complex zw) {
  return std::exp(phi_point(model, spec, inverse_branch(model, u, zw)));
}

void fill_row(const ExpMapModel& model, const PotentialSpec& spec, TruncatedOperator& op, std::size_t w) {
  const std::size_t a = op.alphabet();
  const Word word = cylinder_word(w, op.level, op.depth);
  const Complex zw = representative_endpoint(model, word);
  for (std::size_t i = 0; i < a; ++i) op.weights[w * a + i] = weight_at(model, spec, op.level.symbol_at(i), zw);
}

[[noreturn]] void rethrow_for_cylinder(const TruncatedOperator& op, std::size_t w, const std::exception& e) {
  throw ConvergenceError("cannot evaluate the potential on cylinder [" +
                         format_word(cylinder_word(w, op.level, op.depth)) + "]: " + e.what());
}

}  // namespace

TruncatedOperator build_operator(const ExpMapModel& model, const PotentialSpec& spec, TruncationLevel level, int depth,
                                 Kernel kernel, std::size_t cap) {
  if (depth < 1) throw DomainError("operator depth must be >= 1");
  TruncatedOperator op;
  op.level = level;
  op.depth = depth;
  op.states = cylinder_count(level, depth, cap);
  op.weights.assign(op.states * op.alphabet(), 0.0);
  const auto states = static_cast<std::int64_t>(op.states);

  if (kernel == Kernel::Serial) {
    for (std::int64_t w = 0; w < states; ++w) {
      try {
        fill_row(model, spec, op, static_cast<std::size_t>(w));
      } catch (const std::exception& e) {
        rethrow_for_cylinder(op, static_cast<std::size_t>(w), e);
      }
    }
    return op;
  }

  // exceptions must not cross the parallel region: keep the first failing row
  std::int64_t failed = states;
  std::string message;
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < states; ++w) {
    try {
      fill_row(model, spec, op, static_cast<std::size_t>(w));
    } catch (const std::exception& e) {
#pragma omp critical(bouquet_build_failure)
      if (w < failed) {
        failed = w;
        message = e.what();
      }
    }
  }
  if (failed < states) rethrow_for_cylinder(op, static_cast<std::size_t>(failed), ConvergenceError(message));
  return op;
}

void apply(const TruncatedOperator& op, const std::vector<double>& g, std::vector<double>& out, Kernel kernel) {
  const std::size_t a = op.alphabet();
  const std::size_t block = op.states / a;
  const auto states = static_cast<std::int64_t>(op.states);
  out.resize(op.states);
  if (kernel == Kernel::Serial) {
    for (std::size_t w = 0; w < op.states; ++w) {
      double sum = 0.0;
      for (std::size_t i = 0; i < a; ++i) sum += op.weights[w * a + i] * g[i * block + w / a];
      out[w] = sum;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < states; ++w) {
    const auto t = static_cast<std::size_t>(w);
    const double* row = &op.weights[t * a];
    const std::size_t tail = t / a;
    double sum = 0.0;
    for (std::size_t i = 0; i < a; ++i) sum += row[i] * g[i * block + tail];
    out[t] = sum;
  }
}

std::vector<double> apply(const TruncatedOperator& op, const std::vector<double>& g, Kernel kernel) {
  std::vector<double> out;
  apply(op, g, out, kernel);
  return out;
}

void apply_adjoint(const TruncatedOperator& op, const std::vector<double>& nu, std::vector<double>& out,
                   Kernel kernel) {
  // state v = u x receives nu(x a) W(u, x a) from every extension x a
  const std::size_t a = op.alphabet();
  const std::size_t block = op.states / a;
  const auto states = static_cast<std::int64_t>(op.states);
  out.resize(op.states);
  if (kernel == Kernel::Serial) {
    for (std::size_t v = 0; v < op.states; ++v) {
      const std::size_t u = v / block;
      const std::size_t x = v % block;
      double sum = 0.0;
      for (std::size_t j = 0; j < a; ++j) sum += nu[x * a + j] * op.weights[(x * a + j) * a + u];
      out[v] = sum;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < states; ++v) {
    const auto t = static_cast<std::size_t>(v);
    const std::size_t u = t / block;
    const std::size_t x = t % block;
    double sum = 0.0;
    for (std::size_t j = 0; j < a; ++j) sum += nu[x * a + j] * op.weights[(x * a + j) * a + u];
    out[t] = sum;
  }
}

std::string to_string(Route r) { return r == Route::Eigen ? "eigen" : "iterate"; }

double PressureEstimate::theta() const { return std::exp(value); }

namespace {

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

struct PowerResult {
  std::vector<double> vector;
  double rho = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Power iteration for the leading eigenpair of L (adjoint = false) or L*
// (adjoint = true), from the all-ones start.
PowerResult power_iterate(const TruncatedOperator& op, bool adjoint, const EigenOptions& options) {
  std::vector<double> v(op.states, 1.0), w;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= options.max_iterations; ++it) {
    if (adjoint)
      apply_adjoint(op, v, w, options.kernel);
    else
      apply(op, v, w, options.kernel);
    const double rho = sum_of(w) / sum_of(v);
    const double scale = max_of(v);
    double residual = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) residual = std::max(residual, std::abs(w[i] - rho * v[i]));
    residual /= rho * scale;
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ConvergenceError("power iteration lost positivity");
    if (std::abs(rho - previous) < options.tolerance * rho && residual < 1e-12)
      return {std::move(v), rho, residual, it};
    previous = rho;
    const double top = max_of(w);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / top;
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(options.max_iterations) +
                         " iterations");
}

PressureEstimate eigen_estimate(const TruncatedOperator& op, const PowerResult& r) {
  PressureEstimate p;
  p.value = std::log(r.rho);
  p.route = Route::Eigen;
  p.n_level = op.level.value();
  p.m_or_n = op.depth;
  p.residual = r.residual;
  p.iterations = r.iterations;
  return p;
}

}  // namespace

RightEigen right_eigen(const TruncatedOperator& op, const EigenOptions& options) {
  PowerResult r = power_iterate(op, false, options);
  return {eigen_estimate(op, r), std::move(r.vector)};
}

PressureEstimate pressure_eigen(const TruncatedOperator& op, const EigenOptions& options) {
  return right_eigen(op, options).pressure;
}

// ---------------------------------------------------------------------------
// Iterates

namespace {

struct IterateWalk {
  const ExpMapModel& model;
  const PotentialSpec& spec;
  TruncationLevel level;
  int n_max;
  std::vector<std::vector<double>> sums;
  std::vector<double> distortion;

  void descend(const std::vector<Complex>& points, const std::vector<double>& birkhoff, int depth) {
    if (depth == n_max) return;
    const std::size_t bases = points.size();
    std::vector<Complex> next(bases);
    std::vector<double> sn(bases);
    for (Symbol u = -level.value(); u <= level.value(); ++u) {
      for (std::size_t b = 0; b < bases; ++b) {
        next[b] = inverse_branch(model, u, points[b]);
        sn[b] = birkhoff[b] + phi_point(model, spec, next[b]);
        sums[b][static_cast<std::size_t>(depth)] += std::exp(sn[b]);
      }
      const auto [lo, hi] = std::minmax_element(sn.begin(), sn.end());
      auto& d = distortion[static_cast<std::size_t>(depth)];
      d = std::max(d, *hi - *lo);
      descend(next, sn, depth + 1);
    }
  }
};

}  // namespace

IterateSeries iterate_series(const ExpMapModel& model, const PotentialSpec& spec, TruncationLevel level,
                             const std::vector<Itinerary>& bases, int n_max, std::size_t cap) {
  if (n_max < 1) throw DomainError("iterates need n_max >= 1");
  if (bases.empty()) throw DomainError("iterates need at least one base point");
  for (const auto& s : bases)
    if (!s.in(level)) throw DomainError("base point " + s.to_string() + " is not in Sigma_N");
  cylinder_count(level, n_max, cap);

  IterateWalk walk{model, spec, level, n_max, {}, std::vector<double>(static_cast<std::size_t>(n_max), 0.0)};
  walk.sums.assign(bases.size(), std::vector<double>(static_cast<std::size_t>(n_max), 0.0));
  std::vector<Complex> points;
  for (const auto& s : bases) points.push_back(endpoint(model, s).point);
  walk.descend(points, std::vector<double>(bases.size(), 0.0), 0);

  IterateSeries out;
  out.bases = bases;
  out.distortion = std::move(walk.distortion);
  for (auto& row : walk.sums) {
    for (double& x : row) x = std::log(x);
    out.log_sums.push_back(std::move(row));
  }
  return out;
}

std::vector<PressureEstimate> pressure_iterate(const ExpMapModel& model, const PotentialSpec& spec,
                                               TruncationLevel level, const Itinerary& s, int n_max,
                                               std::size_t cap) {
  const auto series = iterate_series(model, spec, level, {s}, n_max, cap);
  std::vector<PressureEstimate> out;
  for (int n = 1; n <= n_max; ++n) {
    PressureEstimate p;
    p.value = series.log_sums[0][static_cast<std::size_t>(n) - 1] / n;
    p.route = Route::Iterate;
    p.n_level = level.value();
    p.m_or_n = n;
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Measures

double CylinderMeasure::mass(std::span<const Symbol> word) const {
  if (static_cast<int>(word.size()) > depth) throw DomainError("cylinder deeper than the measure resolution");
  const std::size_t block = cylinder_count(level, depth - static_cast<int>(word.size()));
  const std::size_t start = cylinder_index(word, level) * block;
  double sum = 0.0;
  for (std::size_t i = start; i < start + block; ++i) sum += weights[i];
  return sum;
}

double conformality_residual(const TruncatedOperator& op, const CylinderMeasure& nu, double theta) {
  const std::size_t a = op.alphabet();
  const std::size_t block = op.states / a;
  double worst = 0.0;
  for (std::size_t v = 0; v < op.states; ++v) {
    const std::size_t u = v / block;
    const std::size_t x = v % block;
    double pulled = 0.0;
    for (std::size_t j = 0; j < a; ++j) pulled += op.weights[(x * a + j) * a + u] * nu.weights[x * a + j];
    worst = std::max(worst, std::abs(nu.weights[v] - pulled / theta));
  }
  return worst;
}

ConformalResult conformal_measure(const TruncatedOperator& op, const EigenOptions& options) {
  PowerResult r = power_iterate(op, true, options);
  const double mass = sum_of(r.vector);
  for (double& x : r.vector) x /= mass;
  ConformalResult out;
  out.pressure = eigen_estimate(op, r);
  out.measure = {op.level, op.depth, std::move(r.vector)};
  out.residual = conformality_residual(op, out.measure, r.rho);
  return out;
}

double invariance_residual(const CylinderMeasure& mu) {
  const std::size_t a = mu.level.alphabet_size();
  const std::size_t block = mu.weights.size() / a;
  double worst = 0.0;
  for (std::size_t x = 0; x < block; ++x) {
    double pre = 0.0, ext = 0.0;
    for (std::size_t j = 0; j < a; ++j) {
      pre += mu.weights[j * block + x];
      ext += mu.weights[x * a + j];
    }
    worst = std::max(worst, std::abs(pre - ext));
  }
  return worst;
}

InvariantResult invariant_measure(const TruncatedOperator& op, const ConformalResult& conformal, int cesaro_terms,
                                  const EigenOptions& options) {
  if (cesaro_terms < 1) throw DomainError("Cesaro averages need at least one term");
  const RightEigen right = right_eigen(op, options);
  const auto& nu = conformal.measure.weights;
  const double theta = right.pressure.theta();

  InvariantResult out;
  double nu_h = 0.0;
  for (std::size_t i = 0; i < op.states; ++i) nu_h += nu[i] * right.h[i];
  out.density = right.h;
  for (double& x : out.density) x /= nu_h;
  std::vector<double> mu(op.states);
  for (std::size_t i = 0; i < op.states; ++i) mu[i] = out.density[i] * nu[i];
  const double mass = sum_of(mu);
  for (double& x : mu) x /= mass;
  out.density_min = *std::min_element(out.density.begin(), out.density.end());
  out.density_max = max_of(out.density);
  out.measure = {op.level, op.depth, std::move(mu)};
  out.invariance_residual = invariance_residual(out.measure);

  std::vector<double> g(op.states, 1.0), next, acc(op.states, 0.0);
  for (int n = 0; n < cesaro_terms; ++n) {
    double tv = 0.0;
    for (std::size_t i = 0; i < op.states; ++i) {
      acc[i] += nu[i] * g[i];
      tv += std::abs(acc[i] / (n + 1) - out.measure.weights[i]);
    }
    out.cesaro_tv.push_back(0.5 * tv);
    apply(op, g, next, options.kernel);
    for (std::size_t i = 0; i < op.states; ++i) g[i] = next[i] / theta;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gibbs

GibbsReport gibbs_check(const ExpMapModel& model, const PotentialSpec& spec, const TruncatedOperator& op,
                        const CylinderMeasure& nu, double pressure, double envelope, std::size_t samples,
                        int base_depth, std::uint64_t seed) {
  if (base_depth < 1 || base_depth >= op.depth) throw DomainError("Gibbs base depth must lie in [1, m-1]");
  if (!(envelope >= 1.0)) throw DomainError("Gibbs envelope must be >= 1");
  ItinerarySampler sampler(op.level, seed);
  GibbsReport out;
  out.p_used = pressure;
  out.base_depth = base_depth;
  out.envelope = envelope;
  const auto bases = cylinders(op.level, base_depth);
  for (const auto& b : bases) out.r_hat.push_back(nu.mass(b));

  out.within_envelope = true;
  for (int n = 1; n + base_depth <= op.depth; ++n) {
    std::vector<std::pair<Word, std::size_t>> picks;
    const std::size_t total = cylinder_count(op.level, n) * bases.size();
    if (total <= samples) {
      for (const auto& u : cylinders(op.level, n))
        for (std::size_t b = 0; b < bases.size(); ++b) picks.emplace_back(u, b);
    } else {
      for (std::size_t i = 0; i < samples; ++i)
        picks.emplace_back(sampler.word(static_cast<std::size_t>(n)),
                           static_cast<std::size_t>(sampler.uniform_int(0, static_cast<int>(bases.size()) - 1)));
    }
    double d_hat = 1.0;
    for (const auto& [u, b] : picks) {
      Word full = u;
      full.insert(full.end(), bases[b].begin(), bases[b].end());
      const Itinerary s = Itinerary::representative(bases[b]);
      const double s_n = birkhoff_sum(model, spec, s.prepend(u), n);
      const double ratio = nu.mass(full) / std::exp(s_n - n * pressure);
      const double normalized = ratio / out.r_hat[b];
      d_hat = std::max({d_hat, normalized, 1.0 / normalized});
      if (normalized > envelope || normalized < 1.0 / envelope) out.within_envelope = false;
      out.ratios.push_back({u, s, ratio, normalized});
    }
    out.d_hat.push_back(d_hat);
  }

  const std::size_t hi = std::min<std::size_t>(4, out.d_hat.size());
  if (hi < 4) {
    out.verdict = out.within_envelope ? Verdict::Inconclusive : Verdict::Fail;
  } else {
    const bool stable = std::abs(out.d_hat[hi - 1] - out.d_hat[1]) <= 0.2 * out.d_hat[1];
    out.verdict = out.within_envelope && stable ? Verdict::Pass : Verdict::Fail;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tightness

TightnessReport tightness_report(const ExpMapModel& model, const PotentialSpec& spec, const std::vector<int>& n_levels,
                                 const std::vector<double>& radii, int depth, int pool_symbols, std::uint64_t seed,
                                 Kernel kernel) {
  if (n_levels.empty() || radii.empty()) throw DomainError("tightness needs nonempty N and R lists");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw DomainError("tightness radii must be strictly increasing");
  const int top = std::max(pool_symbols, *std::max_element(n_levels.begin(), n_levels.end()));
  const auto base_pool = tail_pool(model, spec, top, 48, seed);
  const Complex center = model.zero_endpoint;

  TightnessReport out;
  out.bound_monotone = true;
  out.all_hold = true;
  for (int n : n_levels) {
    const TruncationLevel level(n);
    const auto op = build_operator(model, spec, level, depth, kernel);
    const auto conformal = conformal_measure(op, {1e-13, 100'000, kernel});
    // the operator's own evaluation points u w 0̄ are samples of [u] as well
    auto pool = base_pool;
    std::vector<Complex> reps(op.states);
    for (std::size_t w = 0; w < op.states; ++w) {
      reps[w] = representative_endpoint(model, cylinder_word(w, level, depth));
      for (std::size_t i = 0; i < op.alphabet(); ++i) {
        const Symbol u = level.symbol_at(i);
        pool.push_back({u, inverse_branch(model, u, reps[w]), std::log(op.weights[w * op.alphabet() + i])});
      }
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double r : radii) {
      TightnessRow row;
      row.n_level = n;
      row.radius = r;
      row.pressure = conformal.pressure.value;
      for (std::size_t w = 0; w < op.states; ++w)
        if (std::abs(reps[w] - center) > r) row.measured += conformal.measure.weights[w];
      row.bound = std::exp(-row.pressure) * tail_sum(pool, r, center);
      row.holds = row.measured <= row.bound;
      if (row.bound > previous) out.bound_monotone = false;
      previous = row.bound;
      out.all_hold = out.all_hold && row.holds;
      out.rows.push_back(row);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalized iterates

IterateBoundsReport normalized_iterate_bounds(const ExpMapModel& model, const TruncatedOperator& op,
                                              const ConformalResult& conformal, double radius, int n_max,
                                              Kernel kernel) {
  if (n_max < 2) throw DomainError("iterate bounds need n_max >= 2");
  IterateBoundsReport out;
  out.radius = radius;
  std::vector<std::size_t> ball;
  for (std::size_t w = 0; w < op.states; ++w) {
    const Complex z = representative_endpoint(model, cylinder_word(w, op.level, op.depth));
    if (std::abs(z - model.zero_endpoint) < radius) {
      ball.push_back(w);
      out.ball_mass += conformal.measure.weights[w];
    }
  }
  out.cylinders_in_ball = ball.size();
  if (ball.empty()) return out;

  const double theta = conformal.pressure.theta();
  std::vector<double> g(op.states, 1.0), next;
  for (int n = 0; n <= n_max; ++n) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t w : ball) {
      lo = std::min(lo, g[w]);
      hi = std::max(hi, g[w]);
    }
    out.min_values.push_back(lo);
    out.max_values.push_back(hi);
    out.l_hat = std::max(out.l_hat, hi / lo);
    apply(op, g, next, kernel);
    for (std::size_t i = 0; i < op.states; ++i) g[i] = next[i] / theta;
  }
  out.xi_hat = out.l_hat / out.ball_mass;

  bool bounded = true;
  for (std::size_t n = 0; n < out.min_values.size(); ++n)
    bounded = bounded && out.min_values[n] > 0.0 && out.max_values[n] <= out.xi_hat * (1.0 + 1e-12);
  const double late = out.min_values.back();
  const double mid = out.min_values[static_cast<std::size_t>(n_max / 2)];
  const bool settled = std::abs(late - mid) <= 0.1 * mid;
  out.verdict = bounded && settled ? Verdict::Pass : Verdict::Fail;
  return out;
}

}  // namespace bouquet
