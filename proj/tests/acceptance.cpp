// Acceptance run: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--xfail CHECK]...
// Each criterion is made of named checks. The exit status is 0 when every
// failing check was named with --xfail; the printed verdicts are unaffected.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bouquet/diagnostics.hpp"
#include "bouquet/sampling.hpp"
#include "bouquet/thermo.hpp"
#include "cli.hpp"

using namespace bouquet;

namespace {

struct Outcome {
  std::vector<std::string> failed;
  std::string detail;

  void check(bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  }
  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string fmt(double x, int digits = 3) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

const ExpMapModel& model() {
  static const ExpMapModel m = build_model(0.25);
  return m;
}

double max_dev(const std::vector<double>& v, double target) {
  double d = 0;
  for (double x : v) d = std::max(d, std::abs(x - target));
  return d;
}

// ---------------------------------------------------------------------------

Outcome constant_potential() {
  Outcome o;
  const auto op = build_operator(model(), PotentialSpec::constant(0.0), TruncationLevel(1), 4);
  const auto nu = conformal_measure(op);
  const auto mu = invariant_measure(op, nu);
  const double dp = std::abs(nu.pressure.value - std::log(3.0));
  const double dnu = max_dev(nu.measure.weights, 1.0 / 81);
  const double dmu = max_dev(mu.measure.weights, 1.0 / 81);
  o.check(dp < 1e-12, "pressure");
  o.check(dnu < 1e-12, "conformal-uniform");
  o.check(dmu < 1e-12, "invariant-uniform");
  o.note("|P - log 3| = " + fmt(dp) + ", nu dev " + fmt(dnu) + ", mu dev " + fmt(dmu));
  return o;
}

// Dense operator assembled from endpoint() on u w 0̄, independent of build_operator.
Eigen::MatrixXd dense_operator(const PotentialSpec& spec, int depth) {
  const TruncationLevel level(1);
  const auto words = cylinders(level, depth);
  const auto n = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Symbol u = -1; u <= 1; ++u) {
      Word uw{u};
      uw.insert(uw.end(), words[std::size_t(i)].begin(), words[std::size_t(i)].end());
      const double w = std::exp(phi_symbolic(model(), spec, Itinerary::representative(uw)));
      uw.pop_back();
      m(i, static_cast<Eigen::Index>(cylinder_index(uw, level))) += w;
    }
  return m;
}

std::pair<double, Eigen::VectorXd> leading(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best])) best = i;
  return {es.eigenvalues()[best].real(), es.eigenvectors().col(best).real()};
}

// (L^n 1)(w) as an explicit sum over all n-step preimage paths.
double path_sum(const Eigen::MatrixXd& m, Eigen::Index w, int n) {
  if (n == 0) return 1.0;
  double s = 0;
  for (Eigen::Index v = 0; v < m.cols(); ++v)
    if (m(w, v) != 0.0) s += m(w, v) * path_sum(m, v, n - 1);
  return s;
}

Outcome oracle_equivalence() {
  Outcome o;
  const PotentialSpec spec;
  double worst_p = 0, worst_nu = 0, worst_mu = 0, worst_path = 0;
  for (int depth = 1; depth <= 3; ++depth) {
    const auto op = build_operator(model(), spec, TruncationLevel(1), depth);
    const auto nu = conformal_measure(op);
    const auto mu = invariant_measure(op, nu);
    const Eigen::MatrixXd dense = dense_operator(spec, depth);
    const auto [theta, right] = leading(dense);
    Eigen::VectorXd left = leading(dense.transpose()).second;
    left /= left.sum();
    const Eigen::VectorXd h = right / right.dot(left);
    worst_p = std::max(worst_p, std::abs(nu.pressure.value - std::log(theta)));
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
      worst_nu = std::max(worst_nu, std::abs(nu.measure.weights[std::size_t(i)] - left(i)));
      worst_mu = std::max(worst_mu, std::abs(mu.measure.weights[std::size_t(i)] - h(i) * left(i)));
    }
    std::vector<double> g(op.states, 1.0);
    for (int n = 1; n <= 3; ++n) {
      g = bouquet::apply(op, g);
      for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        const double exact = path_sum(dense, i, n);
        worst_path = std::max(worst_path, std::abs(g[std::size_t(i)] - exact) / exact);
      }
    }
  }
  o.check(worst_p < 1e-10, "pressure");
  o.check(worst_nu < 1e-10, "nu");
  o.check(worst_mu < 1e-10, "mu");
  o.check(worst_path < 1e-10, "path-sums");
  o.note("m<=3: |dP| " + fmt(worst_p) + ", |dnu| " + fmt(worst_nu) + ", |dmu| " + fmt(worst_mu) +
         ", L^n1 rel " + fmt(worst_path));
  return o;
}

Outcome monotonicity() {
  Outcome o;
  std::vector<double> p;
  for (int n : {1, 2, 3}) p.push_back(pressure_eigen(build_operator(model(), PotentialSpec(), TruncationLevel(n), 4)).value);
  const double v = std::max({0.0, p[0] - p[1], p[1] - p[2]});
  o.check(v < 1e-12, "nondecreasing");
  o.note("P(1..3, m=4) = " + fmt(p[0], 13) + ", " + fmt(p[1], 13) + ", " + fmt(p[2], 13));
  return o;
}

Outcome base_point_independence() {
  Outcome o;
  ItinerarySampler sampler(TruncationLevel(1), 2024);
  std::vector<Itinerary> bases;
  while (bases.size() < 5) {
    const Itinerary s = sampler.itinerary();
    if (induced_metric(model(), s, Itinerary()) < 5.0) bases.push_back(s);
  }
  const auto series = iterate_series(model(), PotentialSpec(), TruncationLevel(1), bases, 10);
  auto spread = [&](int n) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& row : series.log_sums) {
      lo = std::min(lo, row[std::size_t(n - 1)] / n);
      hi = std::max(hi, row[std::size_t(n - 1)] / n);
    }
    return hi - lo;
  };
  // log L is the largest Birkhoff-sum distortion over the measured n
  double log_l = 0;
  for (double d : series.distortion) log_l = std::max(log_l, d);
  bool under = true;
  for (int n = 1; n <= 10; ++n) under = under && spread(n) <= log_l / n + 1e-12;
  o.check(under, "envelope");
  o.check(spread(10) <= 0.6 * spread(5), "1/n-decay");
  o.note("spread(5) " + fmt(spread(5)) + ", spread(10) " + fmt(spread(10)) + ", log L/10 " + fmt(log_l / 10));
  return o;
}

Outcome conformality() {
  Outcome o;
  const auto op = build_operator(model(), PotentialSpec(), TruncationLevel(1), 6);
  const auto nu = conformal_measure(op);
  const auto mu = invariant_measure(op, nu, 32);
  const double conf = conformality_residual(op, nu.measure, nu.pressure.theta());
  o.check(conf < 1e-10, "conformality");
  o.check(mu.invariance_residual < 1e-10, "invariance");
  o.check(mu.cesaro_tv[31] < 1e-6, "cesaro");
  o.note("N=1 m=6: conformality " + fmt(conf) + ", invariance " + fmt(mu.invariance_residual) + ", Cesaro TV(M=32) " +
         fmt(mu.cesaro_tv[31]));
  return o;
}

Outcome gibbs() {
  Outcome o;
  const PotentialSpec spec;
  const auto op = build_operator(model(), spec, TruncationLevel(1), 6);
  const auto nu = conformal_measure(op);
  const auto c = fit_shrinking_constants(model(), TruncationLevel(1), 2000, 1);
  const auto var = variation_report(model(), spec, c.delta_0, 8, 2000, TruncationLevel(1), 1);
  const double envelope = std::exp(var.w_r / (1 - var.fitted_r));
  const auto g = gibbs_check(model(), spec, op, nu.measure, nu.pressure.value, envelope);
  o.check(g.within_envelope, "envelope");
  const double drift = g.d_hat.size() >= 4 ? std::abs(g.d_hat[3] / g.d_hat[1] - 1) : INFINITY;
  o.check(drift <= 0.2, "d-hat-stable");
  o.note(std::to_string(g.ratios.size()) + " ratios, C' " + fmt(envelope) + ", D_hat(2) " + fmt(g.d_hat[1]) +
         ", D_hat(4) " + fmt(g.d_hat[3]));
  return o;
}

Outcome tightness() {
  Outcome o;
  const auto t = tightness_report(model(), PotentialSpec(), {1, 2, 3}, {5, 10, 20}, 3);
  o.check(t.all_hold, "bound-holds");
  o.check(t.bound_monotone, "bound-monotone");
  double worst = 0;
  for (const auto& r : t.rows) worst = std::max(worst, r.measured / r.bound);
  o.note(std::to_string(t.rows.size()) + " grid points, max measured/bound " + fmt(worst));
  return o;
}

Outcome shrinking() {
  Outcome o;
  const auto c = fit_shrinking_constants(model(), TruncationLevel(1), 1000, 1);
  const auto induced = audit_b1(model(), TruncationLevel(1), c, 1000, 777);
  const auto natural = audit_b1(model(), TruncationLevel(1), c, 1000, 778, {MetricKind::Natural, 0.5});
  o.check(c.lambda_e > 1, "lambda-e");
  o.check(induced.verdict == Verdict::Pass, "induced");
  o.check(natural.verdict == Verdict::Pass && natural.worst_violation == 0.0, "natural");
  o.note("C_E " + fmt(c.c_e) + ", lambda_E " + fmt(c.lambda_e) + ", 1000 fresh pairs worst " +
         fmt(induced.worst_violation) + ", natural " + fmt(natural.worst_violation));
  return o;
}

Outcome endpoints() {
  Outcome o;
  double p = 3.0;  // Newton on 0.25 e^x = x
  for (int i = 0; i < 100; ++i) p -= (0.25 * std::exp(p) - p) / (0.25 * std::exp(p) - 1);
  const double dp = std::abs(endpoint(model(), Itinerary()).point - Complex(p, 0));
  ItinerarySampler sampler(TruncationLevel(3), 99);
  double semi = 0;
  for (int i = 0; i < 100; ++i) {
    const Itinerary s = sampler.itinerary();
    semi = std::max(semi, std::abs(model().evaluate(endpoint(model(), s).point) - endpoint(model(), s.shift()).point));
  }
  o.check(dp < 1e-8, "fixed-point");
  o.check(semi <= 1e-9, "semiconjugacy");
  o.note("|h(0) - p| " + fmt(dp) + ", semiconjugacy " + fmt(semi));
  return o;
}

Outcome weak_holder() {
  Outcome o;
  const auto c = fit_shrinking_constants(model(), TruncationLevel(1), 1000, 1);
  const auto v = variation_report(model(), PotentialSpec(), c.delta_0, 8, 2000, TruncationLevel(1));
  o.check(v.fitted_r < 1, "r");
  o.check(v.r_squared > 0.9, "r-squared");
  o.note("r " + fmt(v.fitted_r) + ", R^2 " + fmt(v.r_squared) + ", C " + fmt(v.fitted_c));
  return o;
}

Outcome negative_controls() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / ("bouquet_accept_" + std::to_string(::getpid()));
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "bouquet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  const int b1 = run({"--out", (root / "b1").string(), "--inject-broken-constants", "audit"});
  const int sum = run({"--out", (root / "sum").string(), "--t", "0", "--c-law", "unit", "summability"});
  std::filesystem::remove_all(root);
  o.check(b1 == cli::kNumerical, "broken-b1");
  o.check(sum == cli::kNumerical, "t0-summability");
  o.note("audit exit " + std::to_string(b1) + ", summability exit " + std::to_string(sum));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> xfail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--xfail" && i + 1 < argc) {
      xfail.insert(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--xfail CHECK]...\n");
      return 1;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constant-potential", constant_potential}, {"oracle-equivalence", oracle_equivalence},
      {"monotonicity-in-N", monotonicity},        {"base-point-independence", base_point_independence},
      {"conformality", conformality},             {"gibbs", gibbs},
      {"tightness", tightness},                   {"exponential-shrinking", shrinking},
      {"endpoints", endpoints},                   {"weak-holder", weak_holder},
      {"negative-controls", negative_controls}};

  int unexpected = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.failed.push_back("exception");
      o.note(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string failed;
    for (const auto& f : o.failed) {
      failed += (failed.empty() ? "" : ",") + f + (xfail.contains(f) ? " (expected)" : "");
      if (!xfail.contains(f)) ++unexpected;
    }
    std::printf("%s %s: %s%s [%.2fs]\n", o.failed.empty() ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                failed.empty() ? "" : (" | failed: " + failed).c_str(), secs);
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
