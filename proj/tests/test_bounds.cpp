#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isl/bounds.hpp"
#include "isl/error.hpp"

using namespace isl;

namespace
{

constexpr double pi = std::numbers::pi;

Coefficients sign_fixture(double x0, double q)
{
  return Coefficients({0.0, 1.0}, Fn1D::constant(1.0), Fn1D::constant(q), Fn1D::sign_step(x0));
}

EpsSelection eps_for(double eps, double threshold)
{
  EpsSelection e;
  e.eps = eps;
  e.threshold = threshold;
  return e;
}

WeightedNorms unit_norms(double q_minus = 0.0, double q_l1 = 0.0)
{
  WeightedNorms n;
  n.p_inv_l1 = 1.0;
  n.q_minus_l1 = q_minus;
  n.q_l1 = q_l1;
  n.w_l1 = 1.0;
  n.w_integral = 0.5;
  return n;
}

}  // namespace

TEST_CASE("constants: examples")
{
  const auto c = sign_fixture(0.5, 0.0);
  const auto bc = compute_constants(c, SelfadjointDomain::dirichlet());
  CHECK(bc.alpha == 0.0);
  CHECK(bc.beta == 0.0);
  CHECK(bc.gamma == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_FALSE(bc.delta.has_value());

  // Hand arithmetic: alpha = 1, beta = sqrt(1 * (1 + 1)) + 1, gamma = sqrt(2 beta + 1).
  const auto b1 = constants_from(1.0, unit_norms());
  CHECK(b1.alpha == 1.0);
  CHECK(b1.beta == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(b1.gamma == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));

  const Coefficients def({0.0, 1.0}, Fn1D::constant(1.0), Fn1D::constant(0.0),
                         Fn1D::constant(1.0));
  CHECK(*compute_constants(def, SelfadjointDomain::dirichlet()).delta ==
        doctest::Approx(4.0).epsilon(1e-13));
  CHECK(*compute_constants(sign_fixture(0.25, 0.0), SelfadjointDomain::dirichlet()).delta ==
        doctest::Approx(6.0).epsilon(1e-12));
  CHECK_THROWS_AS(constants_from(-1.0, unit_norms()), InvalidInput);
}

TEST_CASE("constants: consistency and monotonicity on random inputs")
{
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 50.0), up(0.05, 5.0);
  for (int i = 0; i < 500; i++)
  {
    WeightedNorms n = unit_norms(u(rng));
    n.p_inv_l1 = up(rng);
    const double c1 = u(rng), c2 = c1 + u(rng);
    const auto a = constants_from(c1, n), b = constants_from(c2, n);
    const double g2 = 2.0 * a.beta + 1.0 / n.p_inv_l1;
    CHECK(std::abs(a.gamma * a.gamma - g2) <= 1e-12 * g2);
    CHECK(a.alpha <= b.alpha);
    CHECK(a.beta <= b.beta);
    CHECK(a.gamma <= b.gamma);
    CHECK(*a.delta >= 4.0);
  }
}

TEST_CASE("construct_g_ftp: examples")
{
  const Coefficients def({0.0, 1.0}, Fn1D::constant(1.0), Fn1D::constant(0.0),
                         Fn1D::constant(1.0));
  const auto g0 = construct_g_ftp({}, 1.0, {1}, def);
  REQUIRE(g0.nu);
  CHECK(*g0.nu == 0.125);
  CHECK(g0.g_inf_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g0.g(0.0625) == doctest::Approx(0.5));
  CHECK(g0.g(0.5) == 1.0);
  CHECK(validate_g(g0, def).passed);

  const auto c = sign_fixture(0.5, 0.0);
  const auto g1 = construct_g_ftp({0.5}, 2.0, {-1, 1}, c);
  CHECK(g1.g(0.5) == 0.0);
  CHECK(g1.g(0.25) < 0.0);
  CHECK(g1.g(0.75) > 0.0);
  CHECK(g1.g_prime_l2_norm <= 16.0);
  CHECK(validate_g(g1, c).passed);

  CHECK_THROWS_AS(construct_g_ftp({0.5}, 1.0, {1}, c), InvalidInput);
  CHECK_THROWS_AS(construct_g_ftp({0.5}, 0.0, {1, -1}, c), InvalidInput);
}

TEST_CASE("construct_g_ftp: guarantees on random turning-point sets")
{
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0), ug(0.5, 20.0);
  std::uniform_int_distribution<int> nn(1, 6);
  for (int trial = 0; trial < 40; trial++)
  {
    const int n = nn(rng);
    std::vector<double> tp(static_cast<std::size_t>(n));
    for (auto &x : tp)
    {
      x = 0.02 + 0.96 * u(rng);
    }
    std::sort(tp.begin(), tp.end());
    tp.erase(std::unique(tp.begin(), tp.end()), tp.end());
    std::vector<Fn1D> pieces;
    std::vector<int> signs;
    for (std::size_t k = 0; k <= tp.size(); k++)
    {
      const int s = k % 2 ? -1 : 1;
      signs.push_back(s);
      pieces.push_back(Fn1D::constant(s * (0.5 + u(rng))));
    }
    const Coefficients c({0.0, 1.0}, Fn1D::constant(1.0), Fn1D::constant(0.0),
                         Fn1D::piecewise(tp, pieces));
    const double gamma = ug(rng);
    const auto g = construct_g_ftp(tp, gamma, signs, c);
    const double m = static_cast<double>(tp.size());
    CHECK(validate_g(g, c).passed);
    CHECK(g.g_prime_l2_norm <= 4.0 * gamma * (m + 1.0) * (1.0 + 1e-6));
    CHECK(g.g_inf_norm <= 1.0 + 1e-12);
  }
}

TEST_CASE("lift_g_endpoints: examples")
{
  const Interval iv{0.0, 1.0};
  CHECK(lift_balance_point(Fn1D::constant(1.0), iv) == doctest::Approx(0.5).epsilon(1e-11));
  // 1/sqrt(p) = 2 sqrt(x): (4/3) x0^{3/2} = 2/3.
  const auto p = Fn1D::custom({[](double x) { return 1.0 / (4.0 * x); }, {}, false, "1/(4x)", {}});
  CHECK(lift_balance_point(p, iv) == doctest::Approx(std::pow(2.0, -2.0 / 3.0)).epsilon(1e-10));

  const Coefficients def({0.0, 1.0}, Fn1D::constant(1.0), Fn1D::constant(0.0),
                         Fn1D::constant(1.0));
  const auto g = lift_g_endpoints(Fn1D::constant(1.0), Fn1D::constant(0.0), def);
  CHECK(g.provenance == GProvenance::Lifted);
  CHECK(*g.lift_x0 == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(std::abs(g.g(0.0)) < 1e-14);
  CHECK(std::abs(g.g(1.0)) < 1e-12);
  CHECK(g.g(0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(g.g(0.2) == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(g.g(0.9) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(validate_g(g, def).passed);
}

TEST_CASE("validate_g: examples")
{
  const auto w = Fn1D::scaled_oscillator(1.0, 0.0);
  const Coefficients c({0.0, 1.0 / pi}, Fn1D::constant(1.0), Fn1D::constant(0.0), w);
  const auto gx = Fn1D::scaled_oscillator(1.0, 4.0);
  const auto g = make_admissible_g(gx, gx.derivative(), GProvenance::UserSupplied, c);
  const auto d = validate_g(g, c);
  CHECK(d.passed);
  CHECK(g.g_inf_norm <= 0.003);

  const auto c2 = sign_fixture(0.5, 0.0);
  const auto one = make_admissible_g(Fn1D::constant(1.0), Fn1D::constant(0.0),
                                     GProvenance::UserSupplied, c2);
  const auto d2 = validate_g(one, c2);
  CHECK_FALSE(d2.passed);
  CHECK(d2.violating_fraction == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(d2.messages.size() == 2);
}

TEST_CASE("find_eps: examples")
{
  const Interval iv{0.0, 1.0};
  const SublevelSampler flat([](double) { return 1.0; }, [](double) { return 1.0; }, iv, 1000);
  const auto e1 = find_eps_sampled(flat, 0.5, 1e-6);
  CHECK(e1.eps == 1.0);
  CHECK(e1.measure_at_eps == 0.0);

  const SublevelSampler lin([](double x) { return x; }, [](double) { return 1.0; }, iv, 200000);
  const auto e2 = find_eps_sampled(lin, 0.25, 1e-6);
  CHECK(e2.eps == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(e2.measure_at_eps <= 0.25);
  CHECK(lin.measure(e2.eps * (1.0 + 1e-5)) > 0.25);

  const SublevelSampler neg([](double) { return -1.0; }, [](double) { return 1.0; }, iv, 100);
  CHECK_THROWS_AS(find_eps_sampled(neg, 0.5, 1e-6), Unsatisfiable);

  const auto capped = find_eps_sampled(lin, 2.0, 1e-6);
  CHECK(capped.capped);
  CHECK(capped.eps == lin.sup());
}

TEST_CASE("find_eps: the sin(1/x) fixture admits the hand-derived eps")
{
  const Interval iv{0.0, 1.0 / pi};
  const auto w = Fn1D::scaled_oscillator(1.0, 0.0);
  const Coefficients c(iv, Fn1D::constant(1.0), Fn1D::constant(0.0), w);
  const auto gx = Fn1D::scaled_oscillator(1.0, 4.0);
  const auto g = make_admissible_g(gx, gx.derivative(), GProvenance::UserSupplied, c);
  for (const auto &d :
       {SelfadjointDomain::dirichlet(), SelfadjointDomain::separated(1.0, Dirichlet{})})
  {
    const auto bc = compute_constants(c, d);
    int k0 = 1;
    while (!((k0 + 1) * pi > 4.0 * bc.gamma * bc.gamma))
    {
      k0++;
    }
    const double root = 1.0 / (4.0 * k0 * (k0 + 1) * pi);
    const double eps_hand = root * root;
    const double thr = threshold_general_g(bc);
    const SublevelSampler s([&](double x) { return gx(x) * w(x); }, [](double) { return 1.0; },
                            iv, 200000);
    CHECK(s.measure(eps_hand) <= thr);
    const auto e = find_eps(c, g, thr);
    CHECK(e.eps >= eps_hand);
    CHECK(e.measure_at_eps <= thr);
  }
}

TEST_CASE("find_eps: maximality certificate on piecewise fixtures")
{
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 10; trial++)
  {
    const double x0 = 0.2 + 0.6 * u(rng) / 2.0;
    const auto w = Fn1D::piecewise({x0}, {Fn1D::constant(-u(rng)), Fn1D::constant(u(rng))});
    const Coefficients c({0.0, 1.0}, Fn1D::polynomial({u(rng), 0.3}), Fn1D::constant(-u(rng) * 20),
                         w);
    const auto bc = compute_constants(c, SelfadjointDomain::dirichlet());
    const auto g = construct_g_ftp({x0}, bc.gamma, {-1, 1}, c);
    const double thr = threshold_general_g(bc) * 4.0;
    const auto e = find_eps(c, g, thr);
    const SublevelSampler s([&](double x) { return c.p()(x) * g.g(x) * w(x); },
                            [&](double x) { return 1.0 / c.p()(x); }, c.interval(), 200000);
    CHECK(s.measure(e.eps) <= thr);
    if (!e.capped)
    {
      CHECK(s.measure(e.eps * (1.0 + 1e-5)) > thr);
    }
  }
}

TEST_CASE("bound formulas: hand arithmetic on the quarter-step fixture")
{
  const auto c = sign_fixture(0.25, -50.0);
  const auto bc = compute_constants(c, SelfadjointDomain::dirichlet());
  REQUIRE(bc.delta);
  CHECK(*bc.delta == doctest::Approx(6.0).epsilon(1e-12));
  const double alpha = 50.0, beta = std::sqrt(50.0 * 51.0) + 50.0;
  const double gamma = std::sqrt(2.0 * beta + 1.0);
  CHECK(bc.alpha == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(bc.beta == doctest::Approx(beta).epsilon(1e-12));

  const double eps = 0.5;
  const auto tp = bounds_turning_points(bc, 1, eps_for(eps, threshold_turning_points(bc)), c);
  CHECK(tp.im_bound == doctest::Approx(8.0 / eps * beta * gamma * gamma * 2.0).epsilon(1e-12));
  CHECK(tp.re_bound == doctest::Approx(2.0 / eps *
                                       (4.0 * beta * gamma * gamma * 2.0 + beta * beta +
                                        gamma * gamma * 50.0))
                           .epsilon(1e-12));
  const auto tpi = bounds_turning_points_integral(
      bc, 1, eps_for(eps, threshold_turning_points_integral(bc)), c);
  CHECK(tpi.im_bound == doctest::Approx(8.0 / eps * alpha * alpha * 216.0 * 2.0).epsilon(1e-12));
  CHECK(tpi.re_bound ==
        doctest::Approx(2.0 / eps * alpha * 36.0 * (4.0 * alpha * 6.0 * 2.0 + alpha + 50.0))
            .epsilon(1e-12));

  AdmissibleG g;
  g.g_inf_norm = 0.9;
  g.g_prime_p2_norm = 30.0;
  const auto nz = bounds_nonzero_integral(bc, g, eps_for(eps, threshold_nonzero_integral(bc)));
  CHECK(nz.im_bound ==
        doctest::Approx(2.0 / eps * std::pow(alpha, 1.5) * 36.0 * 30.0).epsilon(1e-12));
  CHECK(nz.re_bound ==
        doctest::Approx(2.0 / eps * alpha * 36.0 * (std::sqrt(alpha) * 30.0 + (alpha + 50.0) * 0.9))
            .epsilon(1e-12));
  CHECK(std::isinf(nz.exceptional_bound));
  const auto gg = bounds_general_g(bc, g, eps_for(eps, threshold_general_g(bc)));
  CHECK(gg.im_bound == doctest::Approx(2.0 / eps * beta * gamma * 30.0).epsilon(1e-12));
  CHECK(gg.re_bound >= gg.im_bound);
  CHECK(gg.exceptional_bound == gg.re_bound);
  CHECK(bound_exceptional(bc, g, eps_for(eps, threshold_general_g(bc))) == gg.re_bound);
}

TEST_CASE("bound formulas: degenerate constants and rejected hypotheses")
{
  const auto c = sign_fixture(0.5, 0.0);
  const auto bc = compute_constants(c, SelfadjointDomain::dirichlet());
  AdmissibleG g;
  g.g_inf_norm = 1.0;
  g.g_prime_p2_norm = 4.0;
  const auto gg = bounds_general_g(bc, g, eps_for(1.0, threshold_general_g(bc)));
  CHECK(gg.im_bound == 0.0);
  CHECK(gg.re_bound == 0.0);
  CHECK(gg.exceptional_bound == 0.0);
  const auto tp = bounds_turning_points(bc, 1, eps_for(1.0, threshold_turning_points(bc)), c);
  CHECK(tp.im_bound == 0.0);
  // int w = 0 disables the delta variants.
  CHECK_THROWS_AS(threshold_nonzero_integral(bc), InvalidInput);
  CHECK_THROWS_AS(bounds_nonzero_integral(bc, g, eps_for(1.0, 1.0)), InvalidInput);
  // Threshold mismatch is caught.
  CHECK_THROWS_AS(bounds_general_g(bc, g, eps_for(1.0, 0.3)), InvalidInput);
  CHECK_THROWS_AS(bounds_general_g(bc, g, eps_for(0.0, threshold_general_g(bc))), InvalidInput);

  const Coefficients pc({0.0, 1.0}, Fn1D::polynomial({1.0, 1.0}), Fn1D::constant(0.0),
                        Fn1D::sign_step(0.5));
  const auto pbc = compute_constants(pc, SelfadjointDomain::dirichlet());
  CHECK_THROWS_AS(bounds_turning_points(pbc, 1, eps_for(1.0, threshold_turning_points(pbc)), pc),
                  InvalidInput);

  // alpha = 0 with int w != 0: nonzero-integral bounds are 0.
  const auto q = sign_fixture(0.25, 0.0);
  const auto qbc = compute_constants(q, SelfadjointDomain::dirichlet());
  CHECK(std::isinf(threshold_nonzero_integral(qbc)));
  const auto z = bounds_nonzero_integral(qbc, g, eps_for(1.0, threshold_nonzero_integral(qbc)));
  CHECK(z.im_bound == 0.0);
  CHECK(z.re_bound == 0.0);

  const Coefficients def({0.0, 1.0}, Fn1D::constant(1.0), Fn1D::constant(-5.0),
                         Fn1D::constant(1.0));
  const auto dbc = compute_constants(def, SelfadjointDomain::dirichlet());
  CHECK_THROWS_AS(bounds_turning_points_integral(
                      dbc, 0, eps_for(1.0, threshold_turning_points_integral(dbc)), def),
                  InvalidInput);
}

TEST_CASE("every bound is homogeneous of degree -1 in eps")
{
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  const auto c = sign_fixture(0.25, -20.0);
  for (int i = 0; i < 100; i++)
  {
    const auto bc = constants_from(u(rng) * 10.0, norms(c));
    AdmissibleG g;
    g.g_inf_norm = u(rng);
    g.g_prime_p2_norm = u(rng) * 10.0;
    const double eps = u(rng);
    auto pair = [&](auto &&fn, double thr)
    {
      const auto a = fn(eps_for(eps, thr)), b = fn(eps_for(2.0 * eps, thr));
      CHECK(b.im_bound * 2.0 == doctest::Approx(a.im_bound).epsilon(1e-14));
      CHECK(b.re_bound * 2.0 == doctest::Approx(a.re_bound).epsilon(1e-14));
    };
    pair([&](const EpsSelection &e) { return bounds_general_g(bc, g, e); },
         threshold_general_g(bc));
    pair([&](const EpsSelection &e) { return bounds_nonzero_integral(bc, g, e); },
         threshold_nonzero_integral(bc));
    pair([&](const EpsSelection &e) { return bounds_turning_points(bc, 1, e, c); },
         threshold_turning_points(bc));
    pair([&](const EpsSelection &e) { return bounds_turning_points_integral(bc, 1, e, c); },
         threshold_turning_points_integral(bc));
  }
}

TEST_CASE("best_bounds: componentwise minimum with winners")
{
  BoundReport a, b;
  a.variant = BoundVariant::GeneralG;
  a.im_bound = 3.0;
  a.re_bound = 10.0;
  a.exceptional_bound = 7.0;
  b.variant = BoundVariant::TurningPoints;
  b.im_bound = 2.0;
  b.re_bound = 12.0;
  b.exceptional_bound = std::numeric_limits<double>::infinity();
  const auto one = best_bounds({a});
  CHECK(one.im_bound == 3.0);
  CHECK(one.re_bound == 10.0);
  const auto r = best_bounds({a, b});
  CHECK(r.variant == BoundVariant::CombinedMin);
  CHECK(r.im_bound == 2.0);
  CHECK(r.re_bound == 10.0);
  CHECK(r.exceptional_bound == 7.0);
  CHECK(r.winners[0] == BoundVariant::TurningPoints);
  CHECK(r.winners[1] == BoundVariant::GeneralG);
  CHECK_THROWS_AS(best_bounds({}), InvalidInput);
}

TEST_CASE("sup_norm finds interior maxima between samples")
{
  const auto f = Fn1D::polynomial({0.0, 1.0, -1.0});  // max 1/4 at 1/2
  CHECK(sup_norm(f, {0.0, 1.0}, 7) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(is_unit_function(Fn1D::constant(1.0), {0.0, 1.0}));
  CHECK_FALSE(is_unit_function(Fn1D::polynomial({1.0, 1e-6}), {0.0, 1.0}));
}
