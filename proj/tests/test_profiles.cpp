#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "radmax/maximal.hpp"
#include "radmax/profiles.hpp"

using namespace radmax;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d omega_d int_0^inf f^p s^{d-1} ds by boost tanh-sinh between kinks, as
// an oracle. Infinite tails are cut where e^{-s / length} is negligible.
double oracle_lp(const RadialProfile& f, int d, double p, double tail_cut) {
  const Dimension dim(d);
  auto integrand = [&](double s) {
    const double v = f(s);
    if (v <= 0.0) return 0.0;
    return std::exp(p * std::log(v) + (d - 1) * std::log(s));
  };
  std::vector<double> cuts{0.0};
  for (double k : f.kinks()) cuts.push_back(k);
  const double support = f.support_bound();
  cuts.push_back(std::isfinite(support) ? support : tail_cut);
  boost::math::quadrature::tanh_sinh<double> ts;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) integral += ts.integrate(integrand, cuts[i], cuts[i + 1]);
  }
  return std::pow(dim.unit_sphere_area() * integral, 1.0 / p);
}

}  // namespace

TEST_CASE("construction validates monotonicity and sign") {
  CHECK_NOTHROW(RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0}));
  CHECK_THROWS(RadialProfile::piecewise_constant({0.5, 2.0}, {1.0, 3.0}));
  CHECK_THROWS(RadialProfile::piecewise_constant({2.0, 0.5}, {3.0, 1.0}));
  CHECK_THROWS(RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, -1.0}));
  CHECK_THROWS(RadialProfile::piecewise_constant({0.0, 2.0}, {3.0, 1.0}));
  CHECK_THROWS(RadialProfile::piecewise_constant({1.0}, {1.0, 2.0}));
  CHECK_THROWS(RadialProfile::piecewise_linear({1.0, 2.0}, {0.5, 1.0}));
  CHECK_THROWS(RadialProfile::truncated_power(-0.5));
  CHECK_THROWS(RadialProfile::spike(Dimension(2), 0.0));
}

TEST_CASE("local integrability in the ambient dimension") {
  const auto power = RadialProfile::truncated_power(1.5);
  CHECK_THROWS(power.require_locally_integrable(Dimension(1)));
  CHECK_NOTHROW(power.require_locally_integrable(Dimension(2)));
  CHECK_THROWS(RadialProfile::truncated_power(2.0).require_locally_integrable(Dimension(2)));
}

TEST_CASE("pointwise values are left-continuous and nonincreasing") {
  const auto two = RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0});
  CHECK(two(0.25) == 3.0);
  CHECK(two(0.5) == 3.0);
  CHECK(two.right_limit(0.5) == 1.0);
  CHECK(two(2.0) == 1.0);
  CHECK(two(2.5) == 0.0);
  const auto ind = RadialProfile::ball_indicator();
  CHECK(ind(1.0) == 1.0);
  CHECK(ind.right_limit(1.0) == 0.0);
  const auto psi = RadialProfile::psi();
  CHECK(psi(0.25) == doctest::Approx(0.75));
  CHECK(psi(3.0) == 0.0);

  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  const RadialProfile all[] = {two, ind, psi, RadialProfile::exponential(),
                               RadialProfile::truncated_power(0.7),
                               RadialProfile::piecewise_linear({0.5, 1.0, 3.0}, {2.0, 1.5, 0.0})};
  for (const auto& f : all) {
    for (int n = 0; n < 500; ++n) {
      double s1 = u(eng), s2 = u(eng);
      if (s1 > s2) std::swap(s1, s2);
      if (s1 <= 0.0) continue;
      CHECK(f(s1) >= f(s2));
    }
  }
}

TEST_CASE("lp norms: indicator, psi, closed forms") {
  for (int d = 1; d <= 6; ++d) {
    const Dimension dim(d);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      CHECK(RadialProfile::ball_indicator().lp_norm(dim, p) ==
            doctest::Approx(std::pow(dim.unit_ball_volume(), 1.0 / p)).epsilon(1e-14));
    }
  }
  CHECK(RadialProfile::psi().lp_norm(Dimension(1), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(RadialProfile::psi().lp_norm(Dimension(2), 1.0) == doctest::Approx(pi / 3.0).epsilon(1e-14));
}

TEST_CASE("lp norms of builtins agree with a boost quadrature oracle") {
  const RadialProfile builtins[] = {
      RadialProfile::psi(), RadialProfile::exponential(), RadialProfile::truncated_power(0.4),
      RadialProfile::builtin({BuiltinKind::Psi, 0.0, 2.5, 0.3}),
      RadialProfile::builtin({BuiltinKind::Exponential, 0.0, 0.7, 4.0}),
      RadialProfile::piecewise_linear({0.2, 1.0, 3.0}, {2.0, 1.0, 0.0})};
  for (const auto& f : builtins) {
    for (int d : {1, 2, 3, 5}) {
      for (double p : {1.0, 1.25, 2.0, 3.0}) {
        if (f.origin_exponent() * p >= d) continue;
        CHECK(f.lp_norm(Dimension(d), p) == doctest::Approx(oracle_lp(f, d, p, 400.0)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("divergent lp norm is infinite") {
  CHECK(std::isinf(RadialProfile::truncated_power(0.6).lp_norm(Dimension(1), 2.0)));
  CHECK(std::isfinite(RadialProfile::truncated_power(0.6).lp_norm(Dimension(2), 2.0)));
}

TEST_CASE("level sets") {
  CHECK(RadialProfile::ball_indicator().level_set(0.5).radius == 1.0);
  CHECK_FALSE(RadialProfile::ball_indicator().level_set(0.5).empty);
  CHECK(RadialProfile::ball_indicator().level_set(1.5).empty);
  CHECK(RadialProfile::psi().level_set(0.25).radius == doctest::Approx(0.75).epsilon(1e-15));
  const auto two = RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0});
  CHECK(two.level_set(2.0).radius == 0.5);
  CHECK(two.level_set(1.0).radius == 2.0);
  CHECK(two.level_set(3.0).radius == 0.5);
  CHECK(RadialProfile::exponential().level_set(std::exp(-2.0)).radius == doctest::Approx(2.0));

  const RadialProfile all[] = {two, RadialProfile::psi(), RadialProfile::exponential(),
                               RadialProfile::truncated_power(0.5),
                               RadialProfile::piecewise_linear({0.5, 1.0, 3.0}, {2.0, 1.5, 0.0})};
  for (const auto& f : all) {
    double prev = kInf;
    for (int k = 1; k <= 200; ++k) {
      const double m = 0.02 * k;
      const LevelSet ls = f.level_set(m);
      const double t = ls.empty ? 0.0 : ls.radius;
      CHECK(t <= prev);
      prev = t;
      if (!ls.empty && t > 0.0) CHECK(f(t) >= m * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("layer cake decomposition") {
  const auto one = RadialProfile::ball_indicator();
  CHECK_THROWS(one.layer_cake());
  const auto ind = RadialProfile::piecewise_constant({1.0}, {1.0});
  const auto cake1 = ind.layer_cake();
  REQUIRE(cake1.size() == 1);
  CHECK(cake1[0].height == 1.0);
  CHECK(cake1[0].radius == 1.0);

  const auto two = RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0});
  const auto cake = two.layer_cake();
  REQUIRE(cake.size() == 2);
  CHECK(cake[0].height == 2.0);
  CHECK(cake[0].radius == 0.5);
  CHECK(cake[1].height == 1.0);
  CHECK(cake[1].radius == 2.0);
}

TEST_CASE("layer cake recombination reproduces norms and averages") {
  std::mt19937_64 eng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> breaks, values;
    double b = 0.0;
    for (int k = 0; k < n; ++k) breaks.push_back(b += 0.1 + u(eng));
    double v = 0.0;
    values.resize(n);
    for (int k = n - 1; k >= 0; --k) values[k] = v += 0.05 + u(eng);
    const auto f = RadialProfile::piecewise_constant(breaks, values);
    for (int d = 1; d <= 5; ++d) {
      const Dimension dim(d);
      double sum = 0.0;
      for (const auto& term : f.layer_cake()) sum += term.height * ball_volume(dim, term.radius);
      CHECK(f.lp_norm(dim, 1.0) == doctest::Approx(sum).epsilon(1e-12));
      const RadialFunction g(f, dim);
      for (int k = 0; k < 5; ++k) {
        const double a = 3.0 * u(eng), r = 0.05 + 3.0 * u(eng);
        double direct = 0.0;
        for (const auto& term : f.layer_cake()) direct += term.height * lens_volume(dim, a, term.radius, r);
        direct /= ball_volume(dim, r);
        CHECK(g.layer_cake_average(a, r) == doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("ball mass") {
  const Dimension d3(3);
  const auto two = RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0});
  CHECK(two.ball_mass(d3, 1.0) == doctest::Approx(3.0 * ball_volume(d3, 0.5) + (ball_volume(d3, 1.0) - ball_volume(d3, 0.5))));
  CHECK(two.ball_mass(d3, kInf) == doctest::Approx(two.lp_norm(d3, 1.0)));
  // psi: omega m^d (1 - d m / (d + 1))
  CHECK(RadialProfile::psi().ball_mass(d3, 0.5) ==
        doctest::Approx(d3.unit_ball_volume() * 0.125 * (1.0 - 1.5 / 4.0)).epsilon(1e-14));
  // exponential in d = 1: 2 (1 - e^{-s})
  CHECK(RadialProfile::exponential().ball_mass(Dimension(1), 2.0) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-2.0))).epsilon(1e-14));
}

TEST_CASE("scaling and dilation") {
  const auto f = RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0});
  const auto g = f.dilated(2.0);
  CHECK(g(1.0) == 3.0);
  CHECK(g(3.9) == 1.0);
  const auto h = f.scaled(2.0);
  CHECK(h(0.2) == 6.0);
  const Dimension d2(2);
  CHECK(g.lp_norm(d2, 1.0) == doctest::Approx(4.0 * f.lp_norm(d2, 1.0)));
  const auto spike = RadialProfile::spike(d2, 1e-3);
  CHECK(spike.lp_norm(d2, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const auto psi2 = RadialProfile::psi().dilated(3.0).scaled(0.5);
  CHECK(psi2(1.5) == doctest::Approx(0.25));
}

TEST_CASE("profile text format round trip") {
  const auto f = parse_profile_text(
      "# two steps\n"
      "piecewise-constant\n"
      "0.5 3   # inner\n"
      "\n"
      "2 1\n");
  CHECK(f(0.3) == 3.0);
  CHECK(f(1.0) == 1.0);
  const auto again = parse_profile_text(format_profile(f));
  CHECK(format_profile(again) == format_profile(f));

  const auto b = parse_profile_text("builtin power 0.5\nheight 2\nlength 3\n");
  CHECK(b(3.0) == doctest::Approx(2.0));
  CHECK(b(0.75) == doctest::Approx(4.0));
  CHECK(format_profile(parse_profile_text(format_profile(b))) == format_profile(b));

  const auto pl = parse_profile_text("piecewise-linear\n0 2\n1 1\n3 0\n");
  CHECK(pl(0.5) == doctest::Approx(1.5));
}

TEST_CASE("malformed profile text is rejected") {
  CHECK_THROWS_AS(parse_profile_text(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("# nothing\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("piecewise-cubic\n1 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("piecewise-constant\n1 x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("piecewise-constant\n1 2 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("piecewise-constant\n1 1\n2 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("builtin nope\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_profile_text("builtin psi\nwidth 2\n"), std::invalid_argument);
}

TEST_CASE("builtin names") {
  CHECK(builtin_profile_by_name("psi")(0.5) == doctest::Approx(0.5));
  CHECK(builtin_profile_by_name("exp")(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(builtin_profile_by_name("power:0.5")(0.25) == doctest::Approx(2.0));
  CHECK_THROWS(builtin_profile_by_name("power"));
  CHECK_THROWS(builtin_profile_by_name("power:abc"));
  CHECK_THROWS(builtin_profile_by_name("square"));
}
