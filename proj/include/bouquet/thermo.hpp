#pragma once

// Transfer operators of phi o H on the truncated shifts Sigma_N, discretized on
// depth-m cylinders: pressure, the conformal measure nu, the invariant
// measure mu = h nu and the Gibbs, tightness and iterate-bound reports.
//
// States are depth-m words in cylinders(N, m) order. The operator acts as
// (L g)(w) = sum_{|u| <= N} W(u, w) g(u w_0 ... w_{m-2}) with
// W(u, w) = exp(phi o H(u w 0̄)).

#include <cstdint>
#include <string>
#include <vector>

#include "bouquet/expmap.hpp"
#include "bouquet/potential.hpp"
#include "bouquet/shift.hpp"

namespace bouquet {

/// OpenMP kernels or the serial reference kernels. Both produce identical bits.
enum class Kernel { Parallel, Serial };

struct TruncatedOperator {
  TruncationLevel level{1};
  int depth = 1;
  std::size_t states = 0;
  /// weights[w * alphabet + ordinal(u)] = W(u, w).
  std::vector<double> weights;

  std::size_t alphabet() const { return level.alphabet_size(); }
  double weight(std::size_t target, Symbol u) const { return weights[target * alphabet() + level.ordinal(u)]; }
  /// State index of u w_0 ... w_{m-2}.
  std::size_t source(std::size_t target, std::size_t u_ordinal) const {
    return u_ordinal * (states / alphabet()) + target / alphabet();
  }
};

/// Throws CapExceeded when (2N+1)^m exceeds the state cap. Any failure to
/// evaluate phi names the offending cylinder.
TruncatedOperator build_operator(const ExpMapModel& model, const PotentialSpec& spec, TruncationLevel level, int depth,
                                 Kernel kernel = Kernel::Parallel, std::size_t cap = state_cap());

/// out = L g.
void apply(const TruncatedOperator& op, const std::vector<double>& g, std::vector<double>& out,
           Kernel kernel = Kernel::Parallel);
std::vector<double> apply(const TruncatedOperator& op, const std::vector<double>& g, Kernel kernel = Kernel::Parallel);

/// out = L* nu, i.e. the measure g -> nu(L g).
void apply_adjoint(const TruncatedOperator& op, const std::vector<double>& nu, std::vector<double>& out,
                   Kernel kernel = Kernel::Parallel);

enum class Route { Eigen, Iterate };
std::string to_string(Route r);

struct PressureEstimate {
  double value = 0.0;
  Route route = Route::Eigen;
  int n_level = 1;
  /// m for the eigen route, n for the iterate route.
  int m_or_n = 1;
  /// Eigen route: |L v - theta v|_inf / (theta |v|_inf).
  double residual = 0.0;
  int iterations = 0;

  /// theta = e^P.
  double theta() const;
};

struct EigenOptions {
  double tolerance = 1e-13;
  int max_iterations = 100'000;
  Kernel kernel = Kernel::Parallel;
};

/// Leading eigenvalue and right eigenvector h of L (normalized to max 1).
struct RightEigen {
  PressureEstimate pressure;
  std::vector<double> h;
};

/// Power iteration from the all-ones vector; stops once successive quotients
/// sum(Lv)/sum(v) differ by less than tolerance (relative) and the residual is
/// below 1e-12. Throws ConvergenceError at the iteration cap.
RightEigen right_eigen(const TruncatedOperator& op, const EigenOptions& options = {});
PressureEstimate pressure_eigen(const TruncatedOperator& op, const EigenOptions& options = {});

/// Per-base-point iterates log L^n 1(s) of the untruncated-depth operator on
/// Sigma_N by exhaustive summation over u in {-N..N}^n.
struct IterateSeries {
  std::vector<Itinerary> bases;
  /// log_sums[b][n-1] = log L^n 1(bases[b]).
  std::vector<std::vector<double>> log_sums;
  /// distortion[n-1] = max over base pairs and u of |S_n phi(u s) - S_n phi(u t)|.
  std::vector<double> distortion;
};

/// Throws CapExceeded when (2N+1)^n_max exceeds the state cap.
IterateSeries iterate_series(const ExpMapModel& model, const PotentialSpec& spec, TruncationLevel level,
                             const std::vector<Itinerary>& bases, int n_max, std::size_t cap = state_cap());

/// (1/n) log L^n 1(s) for n = 1..n_max.
std::vector<PressureEstimate> pressure_iterate(const ExpMapModel& model, const PotentialSpec& spec,
                                               TruncationLevel level, const Itinerary& s, int n_max,
                                               std::size_t cap = state_cap());

struct CylinderMeasure {
  TruncationLevel level{1};
  int depth = 1;
  std::vector<double> weights;

  /// Mass of the cylinder [word], |word| <= depth.
  double mass(std::span<const Symbol> word) const;
};

struct ConformalResult {
  CylinderMeasure measure;
  PressureEstimate pressure;
  /// max over depth-m cylinders A = [u x] of |nu(A) - theta^-1 sum_a W(u, x a) nu(x a)|.
  double residual = 0.0;
};

/// Left leading eigenvector of L normalized to mass 1.
ConformalResult conformal_measure(const TruncatedOperator& op, const EigenOptions& options = {});

/// max |nu(u x) - theta^-1 sum_a W(u, x a) nu(x a)| over all states, computed
/// directly from the weights.
double conformality_residual(const TruncatedOperator& op, const CylinderMeasure& nu, double theta);

struct InvariantResult {
  CylinderMeasure measure;
  /// Density h = dmu/dnu, normalized so nu(h) = 1.
  std::vector<double> density;
  /// max over depth-(m-1) words x of |sum_u mu(u x) - sum_a mu(x a)|.
  double invariance_residual = 0.0;
  /// cesaro_tv[M-1] = total variation between mu and (1/M) sum_{n<M} nu o sigma^-n.
  std::vector<double> cesaro_tv;
  double density_min = 0.0;
  double density_max = 0.0;
};

/// mu = h nu with the Cesaro averages of the pullbacks nu o sigma^-n, using
/// nu o sigma^-n([w]) = nu([w]) (theta^-n L^n 1)(w).
InvariantResult invariant_measure(const TruncatedOperator& op, const ConformalResult& conformal, int cesaro_terms = 32,
                                  const EigenOptions& options = {});

double invariance_residual(const CylinderMeasure& mu);

struct GibbsRatio {
  Word prefix;
  Itinerary base;
  /// nu([u* s_0 ... s_{b-1}]) / exp(S_n phi(u* s) - n P).
  double ratio = 0.0;
  /// ratio / R_hat(s).
  double normalized = 0.0;
};

struct GibbsReport {
  double p_used = 0.0;
  int base_depth = 1;
  std::vector<GibbsRatio> ratios;
  /// d_hat[n-1] = max over length-n samples of max(normalized, 1/normalized).
  std::vector<double> d_hat;
  /// R_hat(s) = nu of the base cylinder, keyed by base index.
  std::vector<double> r_hat;
  double envelope = 0.0;
  bool within_envelope = false;
  Verdict verdict = Verdict::Inconclusive;
};

/// Ratios nu(u* [b]) / exp(S_n phi(u* b 0̄) - nP) for base cylinders [b] of
/// depth base_depth and words u* of lengths 1..m-base_depth; every ratio is
/// normalized by R_hat = nu([b]) and compared against [1/envelope, envelope].
/// Enumerates all pairs when there are at most `samples` per length.
GibbsReport gibbs_check(const ExpMapModel& model, const PotentialSpec& spec, const TruncatedOperator& op,
                        const CylinderMeasure& nu, double pressure, double envelope, std::size_t samples = 2000,
                        int base_depth = 1, std::uint64_t seed = 17);

struct TightnessRow {
  int n_level = 0;
  double radius = 0.0;
  double pressure = 0.0;
  /// nu_N of the cylinders whose representative endpoint is outside B(p, R).
  double measured = 0.0;
  /// e^-P sum_k 1.1 exp(sampled sup phi|[k] outside B(p, R)).
  double bound = 0.0;
  bool holds = false;
};

struct TightnessReport {
  std::vector<TightnessRow> rows;
  bool bound_monotone = false;
  bool all_hold = false;
};

TightnessReport tightness_report(const ExpMapModel& model, const PotentialSpec& spec,
                                 const std::vector<int>& n_levels, const std::vector<double>& radii, int depth,
                                 int pool_symbols = 10, std::uint64_t seed = 19, Kernel kernel = Kernel::Parallel);

struct IterateBoundsReport {
  double radius = 0.0;
  double ball_mass = 0.0;
  std::size_t cylinders_in_ball = 0;
  /// Per n = 0..n_max: min and max of theta^-n L^n 1 over cylinders in the ball.
  std::vector<double> min_values;
  std::vector<double> max_values;
  /// Data analog of L_{phi,R}: sup_n max/min on the ball.
  double l_hat = 0.0;
  /// l_hat / nu(B(p, R)).
  double xi_hat = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

IterateBoundsReport normalized_iterate_bounds(const ExpMapModel& model, const TruncatedOperator& op,
                                              const ConformalResult& conformal, double radius, int n_max,
                                              Kernel kernel = Kernel::Parallel);

}  // namespace bouquet
