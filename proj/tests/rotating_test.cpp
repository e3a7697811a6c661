#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "gdl/errors.hpp"
#include "gdl/numerics/precision.hpp"
#include "gdl/numerics/quadrature.hpp"
#include "gdl/rotating/rotating_growth.hpp"

using namespace gdl;
using namespace gdl::rotating;
using std::numbers::pi;

namespace {

const RotatingParams kParams{1, 60};

LogPolarPoint at_theta(double th, double phi) { return LogPolarPoint::make(std::exp(th), phi); }

}  // namespace

TEST_CASE("params validation") {
  CHECK_THROWS_AS((RotatingParams{0, 60}.validate()), InvalidParams);
  CHECK_THROWS_AS((RotatingParams{1, 20}.validate()), InvalidParams);
  CHECK(kParams.base_log_r() == doctest::Approx(std::exp(pi)));
}

TEST_CASE("theta examples") {
  CHECK(theta(std::exp(pi)) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(theta(std::exp(2 * pi)) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(theta(10.0) == doctest::Approx(2.302585092994046).epsilon(1e-15));
  ScopedPrecision guard(80);
  const MpReal t = theta(MpReal(10));
  CHECK(static_cast<double>(t) == doctest::Approx(std::log(10.0)).epsilon(1e-16));
  CHECK_THROWS_AS(theta(0.5), DomainError);
}

TEST_CASE("g components examples") {
  const auto c = g_components(LogPolarPoint::make(std::exp(pi), 0.0));
  CHECK(c.g1 == doctest::Approx(1.0));
  CHECK(c.g2 == doctest::Approx(1.0));
  CHECK(c.g3 == doctest::Approx(1.0));

  const double th = pi * 1.3;
  const auto d = g_components(at_theta(th, th / 2));
  CHECK(d.g1 == doctest::Approx(std::cos(th)).epsilon(1e-14));
  CHECK(d.g2 == doctest::Approx(std::cos(th)).epsilon(1e-14));
  CHECK(d.g3 == doctest::Approx(std::cos(th)).epsilon(1e-14));
}

TEST_CASE("pointwise identities on random samples") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double th = pi * (1.0 + u(rng));
    const double phi = 2 * pi * u(rng);
    const auto p = at_theta(th, phi);
    const auto c = g_components(p);
    const double t = theta(p.log_r);
    CHECK(std::abs(c.g3 - (c.g1 + c.g2) / 2) <= 1e-15);
    CHECK(std::abs(c.g1 - c.g2 - 2 * std::sin(t) * std::sin(t - 2 * p.phi)) <= 1e-14);
    if (classify(p, kParams).kind != RegionKind::OnS) CHECK(g(p, kParams) >= c.g3 - 1e-15);
  }
}

TEST_CASE("classification examples") {
  const auto on = classify(LogPolarPoint::make(std::exp(2 * pi), 0.7), kParams);
  CHECK(on.kind == RegionKind::OnS);

  const auto base = classify(LogPolarPoint::make(3.0, 0.0), kParams);
  CHECK(base.kind == RegionKind::BaseDisk);
  CHECK_THROWS_AS(g(LogPolarPoint::make(3.0, 0.0), kParams), OutOfDomain);

  for (int n : {1, 2, 3, 4}) {
    for (double frac : {0.1, 0.5, 0.9}) {
      const double th = pi * (n + frac);
      const auto p1 = classify(at_theta(th, 0.0), kParams);
      CHECK(p1.kind == RegionKind::P1);
      CHECK(p1.annulus_n == n);
      const auto p2 = classify(at_theta(th, th), kParams);
      CHECK(p2.kind == RegionKind::P2);
      // On the rays: g1 >= g2 on l1 and g2 >= g1 on l2.
      const auto c1 = g_components(at_theta(th, 0.0));
      CHECK(g(at_theta(th, 0.0), kParams) == doctest::Approx(c1.g1));
      CHECK(c1.g1 >= c1.g2);
      const auto c2 = g_components(at_theta(th, th));
      CHECK(g(at_theta(th, th), kParams) == doctest::Approx(c2.g2));
      CHECK(c2.g2 >= c2.g1);
    }
  }
  CHECK(to_string(RegionKind::P3) == "P3");
  CHECK(to_string(RegionKind::OnS) == "S");
}

TEST_CASE("branches agree on the boundary curves at high precision") {
  ScopedPrecision guard(80);
  const MpReal pi_mp = mp_pi();
  for (int k = 0; k < 4; ++k) {
    const MpReal th = pi_mp * MpReal(1.37);
    const MpReal phi = th / 2 + pi_mp * k / 2;
    const auto c = g_components(exp(th), phi);
    CHECK(abs(c.g1 - c.g2) < MpReal(1e-50));
    CHECK(abs(c.g1 - c.g3) < MpReal(1e-50));
  }
  for (int n : {1, 2}) {
    const MpReal lr = exp(pi_mp * n);
    const auto c = g_components(lr, MpReal(0.4));
    CHECK(abs(c.g1 - c.g2) < MpReal(1e-50));
    CHECK(abs(c.g1 - c.g3) < MpReal(1e-50));
  }
}

TEST_CASE("g is continuous across sector boundaries") {
  constexpr double eps = 1e-12;
  for (double frac : {0.2, 0.55, 0.8}) {
    const double th = pi * (1 + frac);
    for (int k = 0; k < 4; ++k) {
      const double phi = th / 2 + pi * k / 2;
      const double left = g(at_theta(th, phi - eps), kParams);
      const double right = g(at_theta(th, phi + eps), kParams);
      CHECK(std::abs(left - right) <= 10 * eps);
    }
    // Across the circle theta = 2 pi.
    const double below = g(at_theta(2 * pi - eps, 1.0 + frac), kParams);
    const double above = g(at_theta(2 * pi + eps, 1.0 + frac), kParams);
    CHECK(std::abs(below - above) <= 10 * eps);
  }
}

TEST_CASE("angular mean equals 2 |sin theta|") {
  CHECK(std::abs(angular_mean_g(std::exp(2 * pi), kParams)) <= 1e-10);
  CHECK(angular_mean_g(std::exp(1.5 * pi), kParams) == doctest::Approx(2.0).epsilon(1e-10));
  for (int i = 0; i < 20; ++i) {
    const double th = pi * (1.0 + (i + 0.5) / 20.0);
    CHECK(std::abs(angular_mean_g(std::exp(th), kParams) - 2 * std::abs(std::sin(th))) <= 1e-10);
  }
}

TEST_CASE("angular mean against a fine trapezoid oracle") {
  for (double th : {pi * 1.23, pi * 1.77, pi * 2.4}) {
    constexpr int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += g(at_theta(th, 2 * pi * i / n), kParams);
    const double oracle = sum * 2 * pi / n;
    CHECK(std::abs(angular_mean_g(std::exp(th), kParams) - oracle) <= 1e-7);
  }
}

TEST_CASE("h examples") {
  const double th = pi * 1.4;
  const auto ridge = h(at_theta(th, 0.0), kParams);
  CHECK(ridge.log_abs() == doctest::Approx(2 * std::exp(th) + std::log(pi / 2)).epsilon(1e-15));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto p = at_theta(pi * (1.0 + u(rng)), 2 * pi * u(rng));
    const double L = p.log_r;
    const double gv = g(p, kParams);
    // The bracket is negative where g < -8 / (pi L - 8).
    const double bracket = (pi / 2) * gv + (4 / L) * (1 - gv);
    const auto hv = h(p, kParams);
    CHECK(hv.sign() == (bracket > 0 ? 1 : -1));
    CHECK(hv.log_abs() == doctest::Approx(2 * L + std::log(std::abs(bracket))).epsilon(1e-14));
    CHECK(h(p, kParams) >= h_j(p, 3, kParams));
  }
  CHECK_THROWS_AS(h_j(at_theta(4.0, 0.0), 4, kParams), DomainError);
}

TEST_CASE("subharmonicity probe") {
  const auto p = at_theta(1.5 * pi, 0.0);
  CHECK(subharmonicity_probe(3, p, kParams) >= 0.0);

  // Re z is harmonic: zero deficit up to round-off.
  const MpField affine = [](const MpReal& lr, const MpReal& ph) { return MpReal(exp(lr) * cos(ph) + 3); };
  const auto a = mean_value_deficit(affine, LogPolarPoint::make(1.0, 0.3), 60);
  CHECK(std::abs(a.normalized_deficit) <= a.resolution);

  // -|z|^2: the 8-point mean is -|z|^2 - rho^2 exactly.
  const MpField concave = [](const MpReal& lr, const MpReal&) { return MpReal(-exp(2 * lr)); };
  const auto c = mean_value_deficit(concave, LogPolarPoint::make(1.0, 0.3), 60);
  CHECK(c.normalized_deficit == doctest::Approx(-1.0).epsilon(1e-12));

  const auto survey = subharmonicity_survey(2, 10, 5, 60);
  REQUIRE(survey.K_values.size() == 2);
  CHECK(survey.all_pass[0]);
  CHECK(survey.threshold_K == 1);
}

TEST_CASE("predicted counting") {
  CHECK(predicted_density(std::exp(1.5 * pi), kParams) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  CHECK(predicted_density(std::exp(2 * pi), kParams) <= 1e-15);
  double sup = 0.0;
  for (int i = 0; i <= 20000; ++i) sup = std::max(sup, predicted_density(std::exp(pi * (1 + i / 20000.0)), kParams));
  CHECK(sup >= 1.0 / pi - 1e-6);
  CHECK(sup <= 1.0 / pi + 1e-15);
  CHECK_THROWS_AS(predicted_counting(5.0, kParams), DomainError);
}

TEST_CASE("Jensen increment of the predicted counting function") {
  // 2 pi int_r^{r(1+eps)} n(t) dt / t, scaled by r^2, against (2 eps + eps^2) pi |sin theta|.
  for (double th : {1.3 * pi, 1.5 * pi, 1.8 * pi}) {
    const double lr = std::exp(th);
    const double eps = 1e-3;
    const auto integrand = [&](double u) {
      return std::exp(predicted_counting(lr + u, kParams).log_abs() - 2 * lr);
    };
    const double lhs = 2 * pi * adaptive_quad(integrand, 0.0, std::log1p(eps), 1e-12);
    const double rhs = (2 * eps + eps * eps) * pi * std::abs(std::sin(th));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-3));
  }
}

TEST_CASE("annulus sampling") {
  const auto rows = sample_annulus(kParams, 1, 5, 8);
  CHECK(rows.size() == 40);
  CHECK(rows.front().log_r == doctest::Approx(std::exp(pi)));
  CHECK(rows.back().log_r == doctest::Approx(std::exp(2 * pi)));
  std::ostringstream out;
  write_annulus_csv(out, rows);
  CHECK(out.str().rfind("log_r,phi,region_kind,g\n", 0) == 0);
  CHECK_THROWS_AS(sample_annulus(kParams, 0, 5, 8), DomainError);
}
