#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bouquet/error.hpp"
#include "bouquet/expmap.hpp"
#include "bouquet/sampling.hpp"

using namespace bouquet;

namespace {

constexpr double kPi = std::numbers::pi;
// mpmath, 30 digits
constexpr double kQ = 0.357402956181388903;
constexpr double kP = 2.153292364110349649;

const ExpMapModel& model() {
  static const ExpMapModel m = build_model(0.25);
  return m;
}

}  // namespace

TEST_CASE("fixed points at lambda = 1/4") {
  const auto& m = model();
  CHECK(m.attracting.real() == doctest::Approx(kQ).epsilon(1e-14));
  CHECK(m.repelling.real() == doctest::Approx(kP).epsilon(1e-14));
  CHECK(std::abs(0.25 * std::exp(m.repelling.real()) - m.repelling.real()) < 1e-12);
  CHECK(m.tract_boundary == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(std::abs(m.zero_endpoint - Complex(kP, 0)) < 1e-9);
}

TEST_CASE("lambda outside (0, 1/e) is rejected") {
  CHECK_THROWS_AS(build_model(0.0), DomainError);
  CHECK_THROWS_AS(build_model(-0.1), DomainError);
  CHECK_THROWS_AS(build_model(0.37), DomainError);
  CHECK_NOTHROW(build_model(0.1));
  CHECK_NOTHROW(build_model(0.36));
}

TEST_CASE("inverse branches") {
  const auto& m = model();
  const Complex p(kP, 0);
  CHECK(std::abs(inverse_branch(m, 0, p) - p) < 1e-14);
  const Complex g1 = inverse_branch(m, 1, p);
  CHECK(std::abs(g1 - Complex(kP, 2 * kPi)) < 1e-14);
  CHECK(g1.imag() > kPi);
  CHECK(g1.imag() < 3 * kPi);
  CHECK_THROWS_AS(inverse_branch(m, 0, Complex(-2.0, 0.0)), CutError);
  CHECK_THROWS_AS(inverse_branch(m, 0, Complex(0.0, 0.0)), DomainError);
}

TEST_CASE("property: g_k is a right inverse and lands in S_k") {
  const auto& m = model();
  ItinerarySampler sampler(TruncationLevel(5), 3);
  for (int i = 0; i < 2000; ++i) {
    const double r = 1.1 + 30.0 * sampler.uniform();
    const double arg = (2.0 * sampler.uniform() - 1.0) * 0.999 * kPi;
    const Complex w = std::polar(r, arg);
    const Symbol k = sampler.symbol();
    const Complex z = inverse_branch(m, k, w);
    CHECK(std::abs(m.evaluate(z) - w) <= 1e-12 * std::abs(w));
    CHECK(z.imag() > (2 * k - 1) * kPi);
    CHECK(z.imag() < (2 * k + 1) * kPi);
    if (z.real() > m.tract_boundary) CHECK(fundamental_domain(m, z) == k);
  }
}

TEST_CASE("fundamental domains") {
  const auto& m = model();
  CHECK(fundamental_domain(m, Complex(kP, 0)) == 0);
  CHECK(fundamental_domain(m, Complex(kP, 2 * kPi)) == 1);
  CHECK(fundamental_domain(m, Complex(kP, -4 * kPi)) == -2);
  CHECK(!fundamental_domain(m, Complex(1.0, 0.0)));
}

TEST_CASE("endpoint examples") {
  const auto& m = model();
  const HairPoint zero = endpoint(m, Itinerary());
  CHECK(std::abs(zero.point - Complex(kP, 0)) < 1e-10);
  CHECK(zero.depth_used > 0);
  for (Symbol k : {-3, -1, 1, 2, 5}) {
    const Complex z = endpoint(m, Itinerary({k}, {0})).point;
    CHECK(std::abs(z - Complex(kP, 2 * kPi * k)) < 1e-9);
  }
  CHECK(induced_metric(m, Itinerary(), Itinerary({1}, {0})) == doctest::Approx(2 * kPi).epsilon(1e-9));
}

TEST_CASE("endpoint of a periodic point agrees with an independent Newton solve") {
  // period (1): fixed point of g_1, i.e. 0.25 e^z = z with Im z in (pi, 3 pi)
  const auto& m = model();
  Complex z(kP + 1.0, 2.5 * kPi);
  for (int i = 0; i < 4; ++i) z = std::log(4.0 * z) + Complex(0, 2 * kPi);  // rough start
  for (int i = 0; i < 60; ++i) z -= (0.25 * std::exp(z) - z) / (0.25 * std::exp(z) - 1.0);
  const Complex h = endpoint(m, Itinerary({}, {1})).point;
  CHECK(std::abs(0.25 * std::exp(z) - z) < 1e-12);
  CHECK(std::abs(h - z) < 1e-9);
}

TEST_CASE("property: semiconjugacy on Sigma_3") {
  const auto& m = model();
  ItinerarySampler sampler(TruncationLevel(3), 21);
  for (int i = 0; i < 100; ++i) {
    const Itinerary s = sampler.itinerary();
    const HairPoint h = endpoint(m, s);
    CHECK(h.point.real() > m.tract_boundary);
    CHECK(fundamental_domain(m, h.point) == s[0]);
    const Complex image = m.evaluate(h.point);
    CHECK(std::abs(image - endpoint(m, s.shift()).point) <= 10 * m.backward_tolerance);
  }
}

TEST_CASE("representatives agree with endpoint()") {
  const auto& m = model();
  ItinerarySampler sampler(TruncationLevel(2), 22);
  for (int i = 0; i < 200; ++i) {
    const Word w = sampler.word(static_cast<std::size_t>(sampler.uniform_int(1, 5)));
    const Complex a = representative_endpoint(m, w);
    const Complex b = endpoint(m, Itinerary::representative(w)).point;
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("theta derivative") {
  const auto& m = model();
  CHECK(theta_derivative(m, Complex(2, 0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(theta_derivative(m, Complex(3, 4), 1.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(theta_derivative(m, Complex(2, 0), 0.5) == doctest::Approx(1.922115514079558).epsilon(1e-14));
  CHECK_THROWS_AS(theta_derivative(m, Complex(0, 0), 1.0), DomainError);
}

TEST_CASE("property: rapid growth, |E'| = |E| and |E'|_theta = |z| for tau = 1") {
  const auto& m = model();
  ItinerarySampler sampler(TruncationLevel(1), 23);
  for (int i = 0; i < 500; ++i) {
    const Complex z(10.0 * sampler.uniform() - 2.0, 40.0 * sampler.uniform() - 20.0);
    if (std::abs(z) < 1e-3) continue;
    CHECK(theta_derivative(m, z, 1.0) == doctest::Approx(std::abs(z)).epsilon(1e-13));
  }
}

TEST_CASE("shrinking constants") {
  const auto& m = model();
  for (int n : {1, 2}) {
    const ShrinkingConstants c = fit_shrinking_constants(m, TruncationLevel(n), 600, 5);
    CHECK(c.lambda_e > 1.0);
    CHECK(c.c_e > 0.0);
    CHECK(c.delta_0 > 0.0);
    CHECK(c.r_squared > 0.9);
    // fresh samples
    const auto fresh = sample_contractions(m, TruncationLevel(n), c.delta_0, 600, 99);
    for (const auto& s : fresh)
      CHECK(s.image_distance <= c.c_e * std::pow(c.lambda_e, -double(s.prefix.size())) * s.base_distance * (1 + 1e-9));
  }
}

TEST_CASE("hair samples") {
  const auto& m = model();
  const auto hair = sample_hair(m, Itinerary({2}, {0}), 6);
  REQUIRE(hair.size() == 6);
  CHECK(hair[0].param_index == 0);
  CHECK(std::abs(hair[0].point - endpoint(m, Itinerary({2}, {0})).point) < 1e-12);
  for (std::size_t i = 1; i < hair.size(); ++i) {
    CHECK(hair[i].param_index == int(i));
    CHECK(fundamental_domain(m, hair[i].point) == 2);
    CHECK(hair[i].point.real() > hair[i - 1].point.real());
  }
}
