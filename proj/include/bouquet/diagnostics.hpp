#pragma once

// Audits of the metric space (X, rho): exponential shrinking (B1), mixing
// (B2), chaining (B3), density of the truncated shifts and a compactness
// proxy for Sigma_N.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bouquet/expmap.hpp"
#include "bouquet/potential.hpp"

namespace bouquet {

enum class Axiom { B1, B2, B3, Density, Compactness };
std::string to_string(Axiom a);
Axiom axiom_from_string(const std::string& text);

struct AuditResult {
  Axiom axiom = Axiom::B1;
  int n_level = 0;
  std::size_t samples = 0;
  /// Largest excess over the audited bound; <= 1e-9 means no violation.
  double worst_violation = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string notes;
  /// Per-sample integers: minimal word length (B2), chain length (B3),
  /// truncation depth (density).
  std::vector<int> details;

  nlohmann::json to_json() const;
  static AuditResult from_json(const nlohmann::json& j);
  friend bool operator==(const AuditResult&, const AuditResult&) = default;
};

constexpr double kAuditSlack = 1e-9;

enum class MetricKind { Induced, Natural };

struct B1Options {
  MetricKind metric = MetricKind::Induced;
  /// Natural metric parameter.
  double theta = 0.5;
};

/// Fresh-sample validation of rho(u*s, u*t) <= C_E lambda_E^-n rho(s, t) with
/// the given constants; the violation is relative to the bound. For the
/// natural metric the pairs are unrestricted and the constants are ignored in
/// favour of C_E = 1, lambda_E = 1/theta, where equality must hold.
AuditResult audit_b1(const ExpMapModel& model, TruncationLevel level, const ShrinkingConstants& constants,
                     std::size_t samples, std::uint64_t seed, const B1Options& options = {});

struct B2Options {
  double radius = 5.0;
  int n_cap = 8;
  /// Ball radius around the source; defaults to delta_0 when <= 0.
  double delta = 0.0;
  /// Exhaustive search over words of a length while (2N+1)^n is at most this.
  std::size_t exhaustive_limit = 4096;
};

/// For sampled targets t in B(0̄, R) and sources s, the shortest u* with
/// rho(u* t, s) < delta. Searches all words while affordable, otherwise the
/// prefixes of s. INCONCLUSIVE when some pair needs more than n_cap symbols.
AuditResult audit_b2_mixing(const ExpMapModel& model, TruncationLevel level, const ShrinkingConstants& constants,
                            std::size_t pairs, std::uint64_t seed, const B2Options& options = {});

struct MixingWitness {
  /// Minimal word length, or -1 past n_cap.
  int length = -1;
  /// rho(u* t, s) for the witness (for the source prefix of length n_cap when none).
  double distance = 0.0;
};

MixingWitness mixing_length(const ExpMapModel& model, TruncationLevel level, const Itinerary& source,
                            const Itinerary& target, double delta, int n_cap, std::size_t exhaustive_limit = 4096);

struct B3Options {
  int chain_cap = 8;
  /// Random itineraries per first symbol added to the snapping pool.
  int pool_samples = 400;
};

/// Pairs in a common B_0(s, delta_0) are joined by chains with steps below
/// delta' = min(delta_0, delta_0 / C_E): points placed evenly on the segment
/// between the endpoints are snapped to the nearest pooled endpoint with the
/// same first symbol. INCONCLUSIVE when no chain of length <= chain_cap exists.
AuditResult audit_b3_chaining(const ExpMapModel& model, TruncationLevel level, const ShrinkingConstants& constants,
                              std::size_t samples, std::uint64_t seed, const B3Options& options = {});

/// Truncation depth d with rho(s, s_0..s_{d-1} 0̄) < eps, or -1 past depth_cap.
int density_depth(const ExpMapModel& model, const Itinerary& s, double eps, int depth_cap = 60);

/// Random itineraries of Sigma_{N_max} are approximated to within eps by
/// truncations w 0̄; details holds the depth used per probe.
AuditResult audit_density(const ExpMapModel& model, TruncationLevel n_max, std::size_t probes, std::uint64_t seed,
                          double eps = 1e-3, int depth_cap = 60);

/// Running sup |endpoint| over growing samples of Sigma_N. Proxy only: PASS
/// when the sup grows by less than 1e-6 over the second half, FAIL when some
/// endpoint leaves the tract, INCONCLUSIVE otherwise.
AuditResult audit_compactness(const ExpMapModel& model, TruncationLevel level, std::size_t samples,
                              std::uint64_t seed);

/// sup |endpoint| over the first k samples, k = 1..samples.
std::vector<double> running_endpoint_sup(const ExpMapModel& model, TruncationLevel level, std::size_t samples,
                                         std::uint64_t seed);

}  // namespace bouquet
