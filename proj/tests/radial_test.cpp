#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "gdl/density/density.hpp"
#include "gdl/errors.hpp"
#include "gdl/radial/radial_construction.hpp"

using namespace gdl;
using namespace gdl::radial;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Plain bisection on t log(e / t) - beta over [1, e].
double a_squared_oracle(double beta) {
  double lo = 1.0;
  double hi = std::numbers::e;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::log(std::numbers::e / mid) > beta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Richardson-extrapolated derivative of h_radial in log r, i.e. r h'(r).
double r_dh_dr(double log_r, const RadialMeasure& m) {
  const auto f = [&](double x) { return h_radial(x, m).to_double(); };
  const auto central = [&](double step) { return (f(log_r + step) - f(log_r - step)) / (2 * step); };
  return (4 * central(5e-4) - central(1e-3)) / 3;
}

}  // namespace

TEST_CASE("a^2 solves tau(a^2) = beta") {
  for (double beta : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double a2 = solve_a_squared(beta);
    CHECK(a2 == doctest::Approx(a_squared_oracle(beta)).epsilon(1e-12));
    CHECK(tau(a2) == doctest::Approx(beta).epsilon(1e-12));
  }
  CHECK(solve_a_squared(0.0) == std::numbers::e);
  CHECK(solve_a_squared(0.5) == doctest::Approx(2.155535).epsilon(1e-6));
  // beta -> 1 drives the upper density to 1, beta -> 0 to e.
  double prev = solve_a_squared(0.0);
  for (double beta : {0.2, 0.5, 0.8, 0.99, 0.9999}) {
    const double a2 = solve_a_squared(beta);
    CHECK(a2 < prev);
    prev = a2;
  }
  CHECK(prev < 1.02);
  CHECK_THROWS_AS(solve_a_squared(1.0), InvalidParams);
  CHECK_THROWS_AS(solve_a_squared(-0.1), InvalidParams);
}

TEST_CASE("params and schedule") {
  const auto R = default_schedule();
  REQUIRE(R.size() == 8);
  CHECK(R[0] == 10.0);
  CHECK(R[7] == doctest::Approx(1e15));
  const auto p = Theorem4aParams::make(0.5);
  CHECK(p.delta.value() == doctest::Approx(std::sqrt(p.a_squared / 0.5)));
  CHECK(*p.delta == doctest::Approx(2.0763).epsilon(1e-4));
  CHECK_FALSE(Theorem4aParams::make(0.0).delta.has_value());
  CHECK_THROWS_AS(Theorem4aParams::make(0.5, {10.0, 15.0}), InvalidParams);
  CHECK_THROWS_AS(Theorem4aParams::make(0.5, {100.0, 10.0}), InvalidParams);
  CHECK_THROWS_AS(Theorem4aParams::make(0.5, {}), InvalidParams);
}

TEST_CASE("measure layout") {
  const auto p = Theorem4aParams::make(0.5);
  const auto m = build_measure(p);
  REQUIRE(m.atoms.size() == 8);
  CHECK(m.atoms[0].mass == doctest::Approx(0.5 * (p.a_squared - 0.5) * 10.0));
  CHECK(m.atoms[0].mass == doctest::Approx(8.27).epsilon(1e-3));
  for (std::size_t k = 0; k < p.R.size(); ++k) {
    CHECK(cumulative_moment(std::log(p.R[k]), m) / (p.R[k] * p.R[k]) == doctest::Approx(p.a_squared).epsilon(1e-12));
  }

  const auto z = build_measure(Theorem4aParams::make(0.0));
  for (const auto& s : z.segments) CHECK(s.density == 0.0);
  for (std::size_t k = 0; k < z.atoms.size(); ++k) {
    CHECK(z.atoms[k].mass == doctest::Approx(0.5 * std::numbers::e * default_schedule()[k]));
  }
}

TEST_CASE("potential of a pure background") {
  const RadialMeasure bg{{{-kInf, kInf, 0.3}}, {}};
  for (double r : {0.5, 3.0, 40.0, 1e5}) {
    CHECK(h_radial(std::log(r), bg).to_double() == doctest::Approx(pi * 0.3 * r * r / 2).epsilon(1e-13));
  }
  CHECK(h_radial(-kInf, bg).is_zero());
  CHECK(std::abs(h_radial(-40.0, bg).to_double()) < 1e-30);
  CHECK_THROWS_AS(h_radial(301.0, bg), OutOfRange);
}

TEST_CASE("h' r / (2 pi) equals the cumulative moment integral") {
  const auto p = Theorem4aParams::make(0.5);
  const auto m = build_measure(p);
  for (double r : {5.0, 12.0, 18.0, 200.0, 2000.0, 30000.0}) {
    const double lr = std::log(r);
    // int_0^r s dnu = N(r) / 2, so r h'(r) = pi N(r).
    CHECK(r_dh_dr(lr, m) / (2 * pi) == doctest::Approx(cumulative_moment(lr, m) / 2).epsilon(1e-8));
  }
}

TEST_CASE("H and deficiency") {
  for (double beta : {0.0, 0.5}) {
    const auto p = Theorem4aParams::make(beta);
    const double gap_end = p.delta ? *p.delta : 1.0;
    for (std::size_t k = 0; k + 1 < p.R.size(); ++k) {
      const double between = std::sqrt(gap_end * p.R[k] * p.R[k + 1]);
      if (beta > 0) CHECK(H(between, p) == doctest::Approx(0.0).scale(p.R[k] * p.R[k]));
      const double just_after = p.R[k] * (1 + 1e-12);
      // With beta = 0 nothing is switched off, so earlier atoms stay in N.
      double expected = (p.a_squared - beta) * p.R[k] * p.R[k];
      if (beta == 0.0) {
        for (std::size_t j = 0; j < k; ++j) expected += p.a_squared * p.R[j] * p.R[j];
      }
      CHECK(H(just_after, p) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  // Structured and generic forms agree where the generic one is accurate.
  const auto p = Theorem4aParams::make(0.25);
  const auto m = build_measure(p);
  for (double t : {3.0, 11.0, 25.0, 700.0, 5000.0}) {
    CHECK(moment(t, p) == doctest::Approx(cumulative_moment(std::log(t), m)).epsilon(1e-12));
    const double generic = pi * t * t / 2 - h_radial(std::log(t), m).to_double();
    CHECK(deficiency(t, p) == doctest::Approx(generic).scale(t * t * 1e-12).epsilon(1e-9));
  }
  CHECK(check_H_nonnegative(p).pass);
  CHECK(check_deficiency_convex(p).pass);
}

TEST_CASE("deficiency slope at a R_k tends to zero") {
  const auto p = Theorem4aParams::make(0.5);
  double prev = kInf;
  for (std::size_t k = 1; k <= p.R.size(); ++k) {
    const double s = std::abs(deficiency_slope(p.a() * p.R[k - 1], p));
    CHECK(s <= prev);
    prev = s;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("remainders grow at most logarithmically once R_k is fixed relative to its predecessors") {
  const auto p = Theorem4aParams::make(0.5);
  CHECK(remainder_at(2, p) == doctest::Approx(234.693).epsilon(1e-5));
  CHECK(remainder_at(3, p) == doctest::Approx(2.34717e6).epsilon(1e-5));
  CHECK(remainder_at(1, p) == doctest::Approx(deficiency(p.a() * 10.0, p) * -1).epsilon(1e-9));
  CHECK_THROWS_AS(remainder_at(9, p), DomainError);
}

TEST_CASE("properties report") {
  for (double beta : {0.5, 0.9}) {
    const auto rep = verify_properties(Theorem4aParams::make(beta));
    CHECK(rep.i_structural_pass);
    CHECK(rep.ii_pass);
    CHECK(rep.iii_pass);
    CHECK(rep.iv_pass);
    CHECK(rep.liminf_estimate == doctest::Approx(beta).epsilon(1e-6));
    CHECK(rep.limsup_estimate == doctest::Approx(solve_a_squared(beta)).epsilon(1e-9));
    CHECK(rep.k_values.front() == 3);
    CHECK(rep.k_values.back() == 8);
  }
  const auto zero = verify_properties(Theorem4aParams::make(0.0));
  CHECK(zero.liminf_estimate < 1e-3);
  // e (1 + 100^-2 + 100^-4 + ...) for the ratio-100 schedule.
  CHECK(zero.limsup_estimate == doctest::Approx(std::numbers::e / (1 - 1e-4)).epsilon(1e-9));
}

TEST_CASE("atomization of simple measures") {
  const double R = 3.0;
  const RadialMeasure atom{{}, {{std::log(R), 8.0 / (2 * pi * R)}}};
  const auto ring = atomize(atom, {0.0, 2.0}, 1);
  REQUIRE(ring.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(ring.points()[i].log_r == doctest::Approx(std::log(R)));
  for (std::size_t i = 1; i < 8; ++i) {
    CHECK(ring.points()[i].phi - ring.points()[i - 1].phi == doctest::Approx(pi / 4));
  }

  // beta = 0.4 on 10 < r < r1 with pi beta (r1^2 - 100) = 100.
  const double beta = 0.4;
  const double r1 = std::sqrt(100.0 + 100.0 / (pi * beta));
  const RadialMeasure bg{{{-kInf, kInf, beta}}, {}};
  const auto pts = atomize(bg, {std::log(10.0), std::log(r1)}, 2);
  CHECK(pts.size() == 100);

  const auto big = atomize(bg, {-kInf, std::log(300.0)}, 2);
  const auto rep = density_report(big, {std::log(30.0), std::log(290.0)}, 500);
  CHECK(rep.upper == doctest::Approx(beta).epsilon(0.05));
  CHECK(rep.lower == doctest::Approx(beta).epsilon(0.05));

  CHECK_THROWS_AS(atomize(bg, {0.0, 1e-3}, 1), WindowTooThin);
  CHECK_THROWS_AS(atomize(bg, {1.0, 0.0}, 1), DomainError);
}

TEST_CASE("atomized counting tracks the mass") {
  const auto p = Theorem4aParams::make(0.5);
  const auto m = build_measure(p);
  const double hi = std::log(1200.0);
  const auto set = atomize(m, {-kInf, hi}, 3);
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double lr = std::log(1.5) + (hi - std::log(1.5)) * i / 4000.0;
    worst = std::max(worst, std::abs(counting(set, lr) - pi * cumulative_moment(lr, m)));
    // Just below the radius as well, where atoms are not yet counted.
    const double below = lr - 1e-9;
    worst = std::max(worst, std::abs(counting(set, below) - pi * cumulative_moment(below, m)));
  }
  CHECK(worst <= 2.0);
}

TEST_CASE("atomization is deterministic across thread counts") {
  const auto m = build_measure(Theorem4aParams::make(0.25));
  const std::pair<double, double> w{std::log(5.0), std::log(400.0)};
  const auto a = atomize(m, w, 17, 1);
  const auto b = atomize(m, w, 17, 4);
  REQUIRE(a.size() == b.size());
  CHECK(std::equal(a.points().begin(), a.points().end(), b.points().begin()));
  const auto c = atomize(m, w, 18, 1);
  CHECK_FALSE(std::equal(a.points().begin(), a.points().end(), c.points().begin()));
}

TEST_CASE("measure JSON round trip") {
  const auto m = build_measure(Theorem4aParams::make(0.75));
  const auto j = measure_to_json(m);
  CHECK(j["segments"][0]["log_r_start"].is_null());
  const auto back = measure_from_json(j);
  REQUIRE(back.segments.size() == m.segments.size());
  REQUIRE(back.atoms.size() == m.atoms.size());
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    CHECK(back.segments[i].log_r_start == m.segments[i].log_r_start);
    CHECK(back.segments[i].log_r_end == m.segments[i].log_r_end);
    CHECK(back.segments[i].density == m.segments[i].density);
  }
  CHECK_THROWS_AS(measure_from_json(nlohmann::json{{"segments", 3}}), ParseError);
  auto bad = j;
  bad["atoms"][0]["mass"] = -1.0;
  CHECK_THROWS_AS(measure_from_json(bad), ParseError);
}
