#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include "monte_carlo.hpp"
#include "radmax/maximal.hpp"
#include "radmax/verification.hpp"

using namespace radmax;
using std::numbers::pi;

namespace {

// Average of (1 - |x|)_+ over [a - r, a + r] on the line.
double psi_interval_average(double a, double r) {
  auto F = [](double x) {  // antiderivative of (1 - |x|)_+
    if (x <= -1.0) return 0.0;
    if (x <= 0.0) return 0.5 * (1.0 + x) * (1.0 + x);
    if (x <= 1.0) return 1.0 - 0.5 * (1.0 - x) * (1.0 - x);
    return 1.0;
  };
  return (F(a + r) - F(a - r)) / (2.0 * r);
}

// Shell integral with boost's ibeta and tanh-sinh, independent of the
// library's quadrature and incomplete beta.
double oracle_average(const RadialProfile& f, int d, double a, double r) {
  const Dimension dim(d);
  auto frac = [&](double s) {
    const double c = (a * a + s * s - r * r) / (2.0 * a * s);
    if (c >= 1.0) return 0.0;
    if (c <= -1.0) return 1.0;
    const double s2 = 1.0 - c * c;
    const double half = 0.5 * boost::math::ibeta(0.5 * (d - 1), 0.5, s2);
    return c >= 0.0 ? half : 1.0 - half;
  };
  auto integrand = [&](double s) { return f(s) * dim.unit_sphere_area() * std::pow(s, d - 1) * frac(s); };
  double mass = 0.0;
  const double lo = std::abs(a - r);
  if (a < r) mass += f.ball_mass(dim, r - a);
  std::vector<double> cuts{lo};
  for (double k : f.kinks()) {
    if (k > lo && k < a + r) cuts.push_back(k);
  }
  cuts.push_back(a + r);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) mass += ts.integrate(integrand, cuts[i], cuts[i + 1]);
  return mass / ball_volume(dim, r);
}

}  // namespace

TEST_CASE("radial average examples") {
  const auto ind = RadialProfile::ball_indicator();
  for (int d = 1; d <= 6; ++d) {
    for (double R : {1.0, 1.5, 4.0}) {
      CHECK(radial_average(ind, Dimension(d), {0.0, R}) == doctest::Approx(std::pow(R, -d)).epsilon(1e-13));
    }
  }
  CHECK(radial_average(RadialProfile::psi(), Dimension(1), {0.25, 0.75}) ==
        doctest::Approx(7.0 / 12.0).epsilon(1e-13));
  CHECK(radial_average(ind, Dimension(2), {1.0, 1.0}) ==
        doctest::Approx((2.0 * pi / 3.0 - std::sqrt(3.0) / 2.0) / pi).epsilon(1e-13));
  CHECK_THROWS(radial_average(ind, Dimension(2), {1.0, 1.0, BallNorm::Infinity}));
  CHECK_THROWS(radial_average(ind, Dimension(2), {1.0, 0.0}));
}

TEST_CASE("psi interval averages match the closed form") {
  const RadialFunction g(RadialProfile::psi(), Dimension(1));
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 300; ++n) {
    const double a = 2.0 * u(eng), r = 1e-3 + 2.0 * u(eng);
    CHECK(g.average(a, r) == doctest::Approx(psi_interval_average(a, r)).epsilon(1e-11));
  }
}

TEST_CASE("shell quadrature matches an independent oracle") {
  const RadialProfile profiles[] = {
      RadialProfile::psi(), RadialProfile::exponential(), RadialProfile::truncated_power(0.5),
      RadialProfile::piecewise_linear({0.3, 1.0, 2.0}, {1.0, 0.6, 0.0})};
  for (const auto& f : profiles) {
    for (int d : {2, 3, 5}) {
      const RadialFunction g(f, Dimension(d));
      for (double a : {0.2, 0.9, 1.7}) {
        for (double r : {0.05, 0.5, 1.3, 3.0}) {
          CHECK(g.shell_average(a, r) == doctest::Approx(oracle_average(f, d, a, r)).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("layer-cake and shell paths agree on step profiles") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    TrialRng rng(99, trial);
    const auto f = random_step_profile(rng, 1, 8, 1e-2, 1e2);
    const int d = 1 + trial % 6;
    const RadialFunction g(f, Dimension(d));
    const double a = std::pow(10.0, -2.0 + 4.0 * u(eng));
    const double r = std::pow(10.0, -2.0 + 4.0 * u(eng));
    const double lc = g.layer_cake_average(a, r);
    const double sh = g.shell_average(a, r);
    CHECK(sh == doctest::Approx(lc).epsilon(1e-8));
  }
  const RadialFunction bi(RadialProfile::ball_indicator(), Dimension(3));
  const RadialFunction pc(RadialProfile::piecewise_constant({1.0}, {1.0}), Dimension(3));
  CHECK(bi.average(0.7, 0.6) == doctest::Approx(pc.average(0.7, 0.6)).epsilon(1e-11));
  CHECK_THROWS(bi.layer_cake_average(0.7, 0.6));
}

TEST_CASE("centred averages are nonincreasing in the radius") {
  const RadialProfile profiles[] = {RadialProfile::psi(), RadialProfile::exponential(),
                                    RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0}),
                                    RadialProfile::truncated_power(1.2)};
  for (const auto& f : profiles) {
    for (int d : {2, 4}) {
      const RadialFunction g(f, Dimension(d));
      double prev = g.centered_average(1e-4);
      for (int k = 1; k <= 100; ++k) {
        const double R = 1e-4 * std::pow(10.0, 0.06 * k);
        const double v = g.centered_average(R);
        CHECK(v <= prev * (1.0 + 1e-12));
        prev = v;
      }
    }
  }
}

TEST_CASE("lemma comparison") {
  const auto psi = RadialProfile::psi();
  for (double r : {0.1, 0.5, 1.0, 2.0, 7.0}) {
    const auto cmp = lemma_compare(psi, Dimension(1), 1.0, 1.0, r);
    CHECK(cmp.centered == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(cmp.off_center <= cmp.centered + 1e-13);
  }
  const auto flat = RadialProfile::piecewise_constant({100.0}, {2.0});
  const auto eq = lemma_compare(flat, Dimension(3), 1.0, 2.0, 3.0);
  CHECK(eq.centered == doctest::Approx(eq.off_center).epsilon(1e-13));
  CHECK_THROWS(lemma_compare(psi, Dimension(1), 1.0, 0.5, 0.5));
  CHECK_THROWS(lemma_compare(psi, Dimension(1), 0.0, 0.5, 0.5));
  // inside B(0, R) the comparison fails: [-1, 1] versus [-1/2, 1]
  const RadialFunction g(psi, Dimension(1));
  CHECK(g.average(0.25, 0.75) > g.average(0.0, 1.0));
  const double eps = 1e-3;
  CHECK(g.average(0.25 + eps / 2, 0.75 + eps / 2) > g.average(0.0, 1.0));
}

TEST_CASE("maximal function of the unit ball indicator") {
  const auto ind = RadialProfile::ball_indicator();
  for (int d = 1; d <= 5; ++d) {
    const Dimension dim(d);
    for (double a : {0.0, 0.3, 0.9, 1.0 - 1e-9}) {
      CHECK(maximal_value(ind, dim, a).value == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (double a : {1.5, 2.0, 5.0, 40.0}) {
      const auto e = maximal_value(ind, dim, a);
      CHECK(e.value >= std::pow(a + 1.0, -d) * (1.0 - 1e-12));
      CHECK(e.value <= e.envelope * (1.0 + 1e-12));
      CHECK_FALSE(e.argmax_is_limit);
    }
  }
  // In d = 1 the supremum is attained by the smallest covering interval.
  for (double a : {1.0, 1.5, 3.0, 10.0}) {
    CHECK(maximal_value(ind, Dimension(1), a).value == doctest::Approx(1.0 / (1.0 + a)).epsilon(1e-9));
  }
}

TEST_CASE("maximal value invariants") {
  const RadialProfile profiles[] = {RadialProfile::psi(), RadialProfile::exponential(),
                                    RadialProfile::piecewise_constant({0.5, 2.0}, {3.0, 1.0}),
                                    RadialProfile::truncated_power(0.5),
                                    RadialProfile::piecewise_linear({0.5, 1.0, 3.0}, {2.0, 1.5, 0.0})};
  CHECK(maximal_value(RadialProfile::psi(), Dimension(1), 0.0).value == 1.0);
  for (const auto& f : profiles) {
    for (int d : {1, 2, 3}) {
      const RadialFunction g(f, Dimension(d));
      for (double a : {0.1, 0.6, 1.4, 4.0}) {
        const auto e = maximal_value(g, a);
        CHECK(e.value >= f.right_limit(a));
        for (double r : {1e-3, 0.1, 0.5, 1.0, 2.0, 10.0}) CHECK(e.value >= g.average(a, r) * (1.0 - 1e-12));
        CHECK(e.value <= g.l1_norm() * delta_maximal(Dimension(d), a) * (1.0 + 1e-9));
        CHECK(e.candidates > 0);

        // dilation covariance and homogeneity
        const auto dil = maximal_value(f.dilated(2.5), Dimension(d), 2.5 * a);
        CHECK(dil.value == doctest::Approx(e.value).epsilon(1e-9));
        const auto dbl = maximal_value(f.scaled(2.0), Dimension(d), a);
        CHECK(dbl.value == doctest::Approx(2.0 * e.value).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("delta maximal function") {
  CHECK(delta_maximal(Dimension(1), 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(delta_maximal(Dimension(2), 1.0) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  CHECK_THROWS(delta_maximal(Dimension(2), 0.0));
  for (int d = 1; d <= 4; ++d) {
    const Dimension dim(d);
    for (double alpha : {0.1, 1.0, 10.0}) {
      // radius where the delta maximal function drops to alpha
      const double s = std::pow(1.0 / (alpha * dim.unit_ball_volume()), 1.0 / d);
      CHECK(delta_maximal(dim, s) == doctest::Approx(alpha).epsilon(1e-13));
      CHECK(ball_volume(dim, s) == doctest::Approx(1.0 / alpha).epsilon(1e-13));
    }
  }
}

TEST_CASE("distribution measure") {
  const Dimension d1(1);
  const RadialFunction ind(RadialProfile::ball_indicator(), d1);
  // M chi = 1 on [-1, 1] and 1 / (1 + |x|) outside
  CHECK(distribution_measure(ind, 0.5) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(distribution_measure(ind, 0.25) == doctest::Approx(6.0).epsilon(1e-5));
  CHECK(distribution_measure(ind, 1.5) == 0.0);
  CHECK_THROWS(distribution_measure(ind, 0.0));

  // dense direct scan
  DistributionOptions coarse;
  coarse.grid_points = 256;
  const RadialFunction psi(RadialProfile::psi(), Dimension(2));
  const double alpha = 0.05;
  double scan = 0.0;
  const int n = 4000;
  const double smax = std::sqrt(psi.l1_norm() / (alpha * pi));
  for (int i = 0; i < n; ++i) {
    const double s = smax * (i + 0.5) / n;
    if (maximal_value(psi, s).value > alpha) scan += 2.0 * pi * s * smax / n;
  }
  CHECK(distribution_measure(psi, alpha, coarse) == doctest::Approx(scan).epsilon(2e-3));

  for (int d = 1; d <= 3; ++d) {
    const Dimension dim(d);
    const RadialFunction spike(RadialProfile::spike(dim, 1e-3), dim);
    const double m = distribution_measure(spike, 1.0, coarse);
    CHECK(m <= 1.0);
    CHECK(m > 0.99);
  }
}

TEST_CASE("distribution curve matches per-alpha measures") {
  const Dimension d2(2);
  const RadialFunction g(RadialProfile::piecewise_constant({0.2, 1.0, 3.0}, {5.0, 1.0, 0.2}), d2);
  const std::vector<double> alphas{0.01, 0.1, 0.5, 2.0, 6.0};
  const auto curve = distribution_curve(g, alphas);
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double m = distribution_measure(g, alphas[j]);
    CHECK(curve.measures[j] == doctest::Approx(m).epsilon(1e-5));
    CHECK(alphas[j] * curve.measures[j] <= g.l1_norm());
  }
  CHECK(curve.measures.back() == 0.0);
}

TEST_CASE("distribution measure is reproducible across worker counts") {
  const Dimension d3(3);
  const RadialFunction g(RadialProfile::psi(), d3);
  DistributionOptions one, four;
  one.grid_points = four.grid_points = 128;
  four.jobs = 4;
  CHECK(distribution_measure(g, 0.02, one) == distribution_measure(g, 0.02, four));
}

TEST_CASE("l-infinity averages") {
  for (int d = 1; d <= 6; ++d) {
    const auto centred = linf_average_exact(d, Rational(1, 2), Rational(0), Rational(3, 4));
    const auto shifted = linf_average_exact(d, Rational(1, 2), Rational(3, 4), Rational(1, 2));
    const auto box = box_average_geometry(d);
    CHECK(centred == box.centered);
    CHECK(shifted == box.shifted);
  }
  CHECK(linf_average_exact(4, Rational(1, 2), Rational(0), Rational(3, 4)) == Rational(16, 81));
  CHECK(linf_average_exact(3, Rational(2), Rational(0), Rational(2)) == Rational(1));
  const auto ind = RadialProfile::piecewise_constant({0.5}, {1.0});
  CHECK(linf_average(ind, 1, {0.0, 0.75, BallNorm::Infinity}) == doctest::Approx(2.0 / 3.0));
  CHECK(linf_average(RadialProfile::ball_indicator(), 2, {0.0, 1.0, BallNorm::Infinity}) == doctest::Approx(1.0));
  CHECK_THROWS(linf_average(RadialProfile::psi(), 2, {0.0, 1.0, BallNorm::Infinity}));
  CHECK_THROWS(linf_average(RadialProfile::piecewise_constant({0.5, 1.0}, {2.0, 1.0}), 2,
                            {0.0, 1.0, BallNorm::Infinity}));
}

TEST_CASE("restricted planar measure") {
  CHECK(restricted_measure_average({0.0, 1.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(restricted_measure_average({0.0, 1.0}, pi / 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(restricted_measure_average({0.0, 2.5}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const double shifted = restricted_measure_average({1.0, 1.0});
  CHECK(shifted > 1.0 / 3.0);
  const auto mc = testing::mc_restricted_average(1.0, 1.0, 4'000'000, 21);
  CHECK(std::abs(shifted - mc.value) < 4.0 * mc.std_error);
  const double general = restricted_measure_average({0.6, 0.7});
  const auto mc2 = testing::mc_restricted_average(0.6, 0.7, 4'000'000, 22);
  CHECK(std::abs(general - mc2.value) < 4.0 * mc2.std_error);
  CHECK_THROWS(restricted_measure_average({3.0, 1.0}));
}

TEST_CASE("envelope audit counts evaluations") {
  reset_envelope_audit();
  const RadialFunction g(RadialProfile::psi(), Dimension(2));
  for (double a : {0.5, 1.0, 2.0}) (void)maximal_value(g, a);
  const auto audit = envelope_audit();
  CHECK(audit.evaluations == 3);
  CHECK(audit.violations == 0);
  CHECK(audit.worst_ratio <= 1.0);
}
