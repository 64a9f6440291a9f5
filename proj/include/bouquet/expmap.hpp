#pragma once

// Geometry of the hyperbolic exponential map E(z) = lambda * e^z with
// lambda in (0, 1/e).
//
// The absorbing domain is the unit disk and the cut is the ray (-inf, -1].
// The single tract is the half plane Re z > ln(1/lambda); the fundamental
// domain S_k is the strip of that half plane with (2k-1)pi < Im z < (2k+1)pi.
// In the rapid derivative growth condition E has alpha_1 = 0, alpha_2 = 1,
// kappa = 1 and order rho = 1.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "bouquet/shift.hpp"

namespace bouquet {

using Complex = std::complex<double>;

struct ExpMapModel {
  double lambda = 0.0;
  /// Attracting fixed point q in (0,1).
  Complex attracting{};
  /// Repelling fixed point p > 1; endpoint of the hair of 0̄.
  Complex repelling{};
  /// ln(1/lambda).
  double tract_boundary = 0.0;
  double backward_tolerance = 1e-10;
  int max_backward_depth = 10'000;
  /// Endpoint of 0̄ obtained by backward iteration, with the branch count it took.
  Complex zero_endpoint{};
  int zero_endpoint_depth = 0;
  double zero_endpoint_residual = 0.0;

  static constexpr double kAlpha1 = 0.0;
  static constexpr double kAlpha2 = 1.0;
  static constexpr double kKappa = 1.0;
  static constexpr double kOrder = 1.0;

  /// lambda * e^z; equals the derivative.
  Complex evaluate(Complex z) const { return lambda * std::exp(z); }
  /// Base point ln(1/lambda) + 1 for backward iteration.
  Complex base_point() const { return {tract_boundary + 1.0, 0.0}; }
};

/// Solves both real fixed points by safeguarded Newton (starts 0 and 3).
/// Throws DomainError for lambda outside (0, 1/e) and ConvergenceError when
/// Newton does not reach |lambda e^x - x| < 1e-14 in 200 steps.
ExpMapModel build_model(double lambda, double backward_tolerance = 1e-10, int max_backward_depth = 10'000);

/// g_k(w) = ln|w/lambda| + i(Arg(w/lambda) + 2 pi k), the inverse of E on S_k.
Complex inverse_branch(const ExpMapModel& model, Symbol k, Complex w);

/// Index k with z in the closure of S_k, or nullopt when Re z < ln(1/lambda).
std::optional<Symbol> fundamental_domain(const ExpMapModel& model, Complex z);

struct HairPoint {
  Itinerary itinerary;
  Complex point{};
  /// Size of the last backward-iteration step.
  double residual = 0.0;
  /// Number of inverse branches applied.
  int depth_used = 0;
};

/// Endpoint of the hair K_s as the limit of g_{s_0} o ... o g_{s_n}(base point).
///
/// The periodic tail is resolved first as the attracting fixed point of the
/// composed period branch; the preperiod branches are then applied to it.
/// Throws ConvergenceError when the step size has not fallen below the
/// backward tolerance within max_backward_depth branches.
HairPoint endpoint(const ExpMapModel& model, const Itinerary& s);

/// g_{w_0} o ... o g_{w_{n-1}}(z).
Complex pull_back(const ExpMapModel& model, std::span<const Symbol> word, Complex z);

/// Endpoint of the cylinder representative w*0̄, i.e. g_w applied to the cached endpoint of 0̄.
Complex representative_endpoint(const ExpMapModel& model, std::span<const Symbol> word);

/// rho(s,t) = |h_s(0) - h_t(0)|.
double induced_metric(const ExpMapModel& model, const Itinerary& s, const Itinerary& t);

/// |E'(z)|_theta = |E'(z)| |z|^tau / |E(z)|^tau. Equals |z| for tau = 1.
double theta_derivative(const ExpMapModel& model, Complex z, double tau);

struct ShrinkingConstants {
  double c_e = 1.0;
  double lambda_e = 1.0;
  double delta_0 = 0.0;
  /// Goodness of the log-linear fit of the worst contraction ratio per prefix length.
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// A contraction sample rho(u*s,u*t)/rho(s,t) with |u*| = n.
struct ContractionSample {
  Itinerary s;
  Itinerary t;
  Word prefix;
  double base_distance = 0.0;
  double image_distance = 0.0;

  double ratio() const { return image_distance / base_distance; }
};

/// Half the smallest gap between endpoint clusters of adjacent fundamental
/// domains, measured on sampled itineraries of Sigma_N.
double fit_delta0(const ExpMapModel& model, TruncationLevel level, std::size_t samples, std::uint64_t seed);

/// Draws pairs with rho(s,t) < delta_0 and prefixes of lengths 1..8; one in
/// four prefixes is all zeros, the rest uniform.
std::vector<ContractionSample> sample_contractions(const ExpMapModel& model, TruncationLevel level, double delta_0,
                                                   std::size_t samples, std::uint64_t seed);

/// Fits lambda_E > 1 from the worst ratio per prefix length, capped at p (the
/// contraction rate of long zero runs), and C_E as the smallest constant
/// covering every sample, inflated by 5%. Throws
/// ConvergenceError ("fit failure") when no lambda_E > 1 fits.
ShrinkingConstants fit_shrinking_constants(const ExpMapModel& model, TruncationLevel level, std::size_t samples,
                                           std::uint64_t seed = 1);

/// Backward-iterated sample points along a hair; param_index 0 is the endpoint.
struct HairSample {
  Itinerary itinerary;
  int param_index = 0;
  Complex point{};
};

/// Samples `depth` points on the hair of s: the endpoint, then the base points
/// ln(1/lambda)+1 ... ln(1/lambda)+length (shifted into the strip of s_pull)
/// pulled back through s_0..s_{pull-1}.
std::vector<HairSample> sample_hair(const ExpMapModel& model, const Itinerary& s, int depth, int pull = 1,
                                    double length = 20.0);

}  // namespace bouquet
