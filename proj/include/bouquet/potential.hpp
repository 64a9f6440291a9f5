#pragma once

// Potentials phi(z) = log(c(z) |z|^-t) on the fundamental domains of E, their
// symbolic pullbacks phi o H, Birkhoff sums and admissibility diagnostics.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bouquet/expmap.hpp"
#include "bouquet/shift.hpp"

namespace bouquet {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// Law of the per-domain constants c_k (c is constant on S_k and S_{-k}).
class CLaw {
 public:
  enum class Kind { Gaussian, Unit, Table };

  /// c_k = exp(-|k|^beta), beta > 1.
  static CLaw gaussian(double beta);
  static CLaw unit();
  /// c_0..c_{K-1} explicitly, then `tail` (which must not itself be a table).
  static CLaw table(std::vector<double> values, CLaw tail);

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  const std::vector<double>& values() const { return values_; }

  /// log c_{|k|}.
  double log_c(Symbol k) const;

  nlohmann::json to_json() const;
  static CLaw from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::Unit;
  double beta_ = 0.0;
  std::vector<double> values_;
  Kind tail_kind_ = Kind::Unit;
  double tail_beta_ = 0.0;
};

class PotentialSpec {
 public:
  /// Default potential: gaussian(2) constants, t = 2, tau = 1.
  PotentialSpec();

  /// Member of the potential class: requires t > 1/tau, tau > 0.
  static PotentialSpec exponential(double t, CLaw law, double tau = 1.0);
  /// Same family with only t >= 0 enforced; used by admissibility audits and
  /// negative controls.
  static PotentialSpec exponential_unchecked(double t, CLaw law, double tau = 1.0);
  /// phi == value everywhere.
  static PotentialSpec constant(double value);

  bool is_constant() const { return constant_; }
  double t() const { return t_; }
  double tau() const { return tau_; }
  const CLaw& c_law() const { return law_; }
  double constant_value() const { return value_; }
  /// t > 1/tau (always true for constant potentials).
  bool admissible() const;

  nlohmann::json to_json() const;
  /// Accepts {"t", "c_law", "tau"?} or {"constant": value}.
  static PotentialSpec from_json(const nlohmann::json& j, bool require_admissible = true);

 private:
  bool constant_ = false;
  double value_ = 0.0;
  double t_ = 2.0;
  double tau_ = 1.0;
  CLaw law_ = CLaw::gaussian(2.0);
};

/// log c_{|k(z)|} - t log |E'(z)|_theta; throws DomainError outside the tract.
double phi_point(const ExpMapModel& model, const PotentialSpec& spec, Complex z);

/// phi at the endpoint of s.
double phi_symbolic(const ExpMapModel& model, const PotentialSpec& spec, const Itinerary& s);

/// S_n(phi)(s) = sum_{k<n} phi(shift^k s); S_0 = 0.
double birkhoff_sum(const ExpMapModel& model, const PotentialSpec& spec, const Itinerary& s, int n);

// ---------------------------------------------------------------------------
// Admissibility diagnostics

struct SummabilityReport {
  int n_max = 0;
  /// partial_sums[i][K-1] = sum_{|u| <= K} e^{phi(u s_i)}.
  std::vector<std::vector<double>> partial_sums;
  /// Smallest fitted power-law decay exponent of the increments over samples.
  double decay_exponent = 0.0;
  double sup = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// PASS when, for every sampled s, the increments of the partial sums have
/// underflowed or decay faster than K^-1.1 over the second half of 1..n_max,
/// and the supremum over samples is finite.
SummabilityReport summability_check(const ExpMapModel& model, const PotentialSpec& spec, int n_max,
                                    const std::vector<Itinerary>& samples);

/// A sampled point of some cylinder [k] together with phi there.
struct TailPoint {
  Symbol head = 0;
  Complex z{};
  double phi = 0.0;
};

/// Sample pool for sup phi over [k] outside balls: every representative
/// k*j*0̄ with |j| <= n_max and `per_symbol` random itineraries per k.
std::vector<TailPoint> tail_pool(const ExpMapModel& model, const PotentialSpec& spec, int n_max, int per_symbol,
                                 std::uint64_t seed);

/// Sampled-sup approximation of sum_k exp(sup phi|[k] outside B(center, R)),
/// each exp(sup) inflated by 10%.
double tail_sum(const std::vector<TailPoint>& pool, double radius, Complex center);

struct RapidDecreaseReport {
  std::vector<double> radii;
  std::vector<double> tail_sums;
  /// Number of symbols contributing at each radius.
  std::vector<int> contributing;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

/// PASS when the tail sums are nonincreasing in R and the last is at most
/// half the first; INCONCLUSIVE when fewer than two symbols contribute at the
/// largest R.
RapidDecreaseReport rapid_decrease_check(const ExpMapModel& model, const PotentialSpec& spec,
                                         const std::vector<double>& radii, int n_max, std::uint64_t seed = 7,
                                         int per_symbol = 48);

struct BallReport {
  double radius = 0.0;
  double sup_abs_phi = 0.0;
  double sup_first_half = 0.0;
  std::size_t inside = 0;
  Verdict verdict = Verdict::Inconclusive;
};

/// sup |phi o H| over sampled s in Sigma_N with rho(s, 0̄) < R.
BallReport bounded_on_balls_check(const ExpMapModel& model, const PotentialSpec& spec, double radius,
                                  TruncationLevel level, std::size_t samples = 2000, std::uint64_t seed = 11);

struct VariationReport {
  std::vector<int> n_values;
  std::vector<double> var_n;
  std::vector<std::size_t> pairs;
  double fitted_c = 0.0;
  double fitted_r = 0.0;
  double r_squared = 0.0;
  /// sup_n Var_n / r^n over the measured n.
  double w_r = 0.0;
};

/// Monte-Carlo estimate of Var_n(phi o H) for n = 0..n_max: the largest
/// |phi(s) - phi(t)| over pairs agreeing on symbols 0..n whose shifts
/// sigma^j s, sigma^j t stay within delta for j = 0..n. Throws
/// ConvergenceError ("fit failure") when some n has fewer than 10 valid pairs.
VariationReport variation_report(const ExpMapModel& model, const PotentialSpec& spec, double delta, int n_max,
                                 std::size_t samples, TruncationLevel level, std::uint64_t seed = 13);

/// Exhaustive Var_n over Sigma_N representatives w*0̄ with |w| <= depth
/// (small N and depth only); the oracle for variation_report.
std::vector<double> exhaustive_variation(const ExpMapModel& model, const PotentialSpec& spec, double delta,
                                         int n_max, TruncationLevel level, int depth);

}  // namespace bouquet
