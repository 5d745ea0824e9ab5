#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/LU>

#include "isl/domains.hpp"
#include "isl/error.hpp"

using namespace isl;

namespace
{

// Independent restatement of the c(D) table.
double table_c(std::optional<double> l, std::optional<double> r)
{
  if (!l && !r)
  {
    return 0.0;
  }
  if (!l)
  {
    return std::fabs(*r);
  }
  if (!r)
  {
    return std::fabs(*l);
  }
  return std::fabs(*l) + std::fabs(*r);
}

double table_c(const Eigen::Matrix2d &R)
{
  if (R(0, 1) == 0.0)
  {
    return std::fabs(R(0, 0)) * std::fabs(R(1, 0));
  }
  return (std::fabs(R(0, 0)) + std::fabs(R(1, 1)) + 2.0) / std::fabs(R(0, 1));
}

EndCondition end(std::optional<double> v)
{
  return v ? EndCondition(*v) : EndCondition(Dirichlet{});
}

Eigen::Matrix2d unit_det(double r11, double r12, double r21)
{
  // Solve r22 from det = 1 (r11 != 0).
  Eigen::Matrix2d R;
  R << r11, r12, r21, (1.0 + r12 * r21) / r11;
  return R;
}

}  // namespace

TEST_CASE("c(D): table examples")
{
  CHECK(c_of_domain(SelfadjointDomain::dirichlet()) == 0.0);
  CHECK(c_of_domain(SelfadjointDomain::separated(2.0, -3.0)) == 5.0);
  Eigen::Matrix2d R;
  R << 1, 1, 0, 1;
  CHECK(c_of_domain(SelfadjointDomain::coupled(0.0, R)) == 4.0);
}

TEST_CASE("c(D) agrees with the table on 1000 random domains")
{
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-10.0, 10.0), ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> kind(0, 5);
  for (int i = 0; i < 1000; i++)
  {
    const int k = kind(rng);
    if (k < 4)
    {
      std::optional<double> l, r;
      if (k == 0 || k == 1)
      {
        l = u(rng);
      }
      if (k == 0 || k == 2)
      {
        r = u(rng);
      }
      CHECK(c_of_domain(SelfadjointDomain::separated(end(l), end(r))) == table_c(l, r));
    }
    else
    {
      double r11 = u(rng);
      if (std::fabs(r11) < 0.1)
      {
        r11 = 1.0;
      }
      const double r12 = k == 4 ? u(rng) : 0.0;
      const auto R = unit_det(r11, r12, u(rng));
      if (std::fabs(R.determinant() - 1.0) > 1e-12)
      {
        continue;
      }
      CHECK(c_of_domain(SelfadjointDomain::coupled(ang(rng), R)) == table_c(R));
      // Invariance under R -> -R.
      Eigen::Matrix2d Rm = -R;
      CHECK(c_of_domain(SelfadjointDomain::coupled(0.0, Rm)) == table_c(R));
    }
  }
}

TEST_CASE("coupled conditions validate det R and phi")
{
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; i++)
  {
    Eigen::Matrix2d R;
    R << u(rng), u(rng), u(rng), u(rng);
    if (std::fabs(R.determinant() - 1.0) > 1e-9)
    {
      CHECK_THROWS_AS(SelfadjointDomain::coupled(0.0, R), InvalidInput);
    }
  }
  CHECK_THROWS_AS(SelfadjointDomain::coupled(-0.1, Eigen::Matrix2d::Identity()), InvalidInput);
  CHECK_THROWS_AS(SelfadjointDomain::coupled(2.0 * std::numbers::pi, Eigen::Matrix2d::Identity()),
                  InvalidInput);
  CHECK_THROWS_AS(SelfadjointDomain::separated(std::numeric_limits<double>::infinity(), 0.0),
                  InvalidInput);
}

TEST_CASE("boundary_form: examples")
{
  CHECK(boundary_form({}) == cplx(0.0));
  BoundaryTrace t;
  t.phi_a = 1.0;
  t.pphi_a = 2.0;
  CHECK(boundary_form(t) == cplx(-2.0));
}

TEST_CASE("check_boundary_estimate: pass and fail")
{
  BoundaryTrace dir;
  dir.pphi_a = 3.0;
  dir.pphi_b = cplx(0.0, 1.0);
  const auto ok = check_boundary_estimate(dir, SelfadjointDomain::dirichlet(), 1e-6);
  CHECK(ok.passed);
  CHECK(ok.form == cplx(0.0));

  BoundaryTrace bad;
  bad.phi_a = 1.0;
  bad.pphi_a = 1e6;
  const auto f = check_boundary_estimate(bad, SelfadjointDomain::separated(1.0, 1.0), 1e-6);
  CHECK_FALSE(f.passed);
  CHECK(f.excess > 0.0);
  CHECK_FALSE(f.failure.empty());

  BoundaryTrace im;
  im.phi_a = 1.0;
  im.pphi_a = cplx(0.0, 1.0);
  const auto g = check_boundary_estimate(im, SelfadjointDomain::separated(1.0, 1.0), 1e-6);
  CHECK_FALSE(g.passed);
  CHECK(g.im_residual == doctest::Approx(1.0));

  // A trace obeying (p phi')(a) = l phi(a), (p phi')(b) = r phi(b).
  BoundaryTrace robin;
  robin.phi_a = cplx(0.3, 0.4);
  robin.pphi_a = 1.0 * robin.phi_a;
  robin.phi_b = cplx(-0.2, 0.1);
  robin.pphi_b = 1.0 * robin.phi_b;
  CHECK(check_boundary_estimate(robin, SelfadjointDomain::separated(1.0, 1.0), 1e-12).passed);
}

TEST_CASE("constrain_discretization: Dirichlet eliminates both ends")
{
  const auto bc = constrain_discretization(SelfadjointDomain::dirichlet(), 10);
  CHECK(bc.prolongation.rows() == 10);
  CHECK(bc.prolongation.cols() == 8);
  CHECK(bc.boundary_stiffness.norm() == 0.0);
}

TEST_CASE("constrain_discretization: Neumann keeps every node, no boundary terms")
{
  const auto bc = constrain_discretization(SelfadjointDomain::separated(0.0, 0.0), 10);
  CHECK(bc.prolongation.cols() == 10);
  CHECK(bc.boundary_stiffness.norm() == 0.0);
}

TEST_CASE("constrain_discretization: Robin terms from integration by parts")
{
  // int -(p f')' conj(g) = int p f' conj(g') + l f(a) conj(g(a)) - r f(b) conj(g(b)).
  const auto bc = constrain_discretization(SelfadjointDomain::separated(-2.0, 3.0), 6);
  const Eigen::MatrixXcd B(bc.boundary_stiffness);
  CHECK(B(0, 0) == cplx(-2.0));
  CHECK(B(5, 5) == cplx(-3.0));
  CHECK((B.cwiseAbs().sum() - 5.0) == doctest::Approx(0.0));
}

TEST_CASE("constrain_discretization: coupled r12 != 0 enters as Hermitian boundary terms")
{
  const double phi = 0.7;
  Eigen::Matrix2d R;
  R << 2.0, 0.5, 1.0, 0.75;
  const auto bc = constrain_discretization(SelfadjointDomain::coupled(phi, R), 5);
  CHECK(bc.prolongation.cols() == 5);
  const Eigen::MatrixXcd B(bc.boundary_stiffness);
  const cplx e(std::cos(phi), std::sin(phi));
  // (p f')(a) = (e^{-i phi} f(b) - r11 f(a)) / r12, (p f')(b) = (r22 f(b) - e^{i phi} f(a)) / r12.
  CHECK(std::abs(B(0, 0) - cplx(-2.0 / 0.5)) < 1e-14);
  CHECK(std::abs(B(4, 4) - cplx(-0.75 / 0.5)) < 1e-14);
  CHECK(std::abs(B(4, 0) - e / 0.5) < 1e-14);
  CHECK(std::abs(B(0, 4) - std::conj(e) / 0.5) < 1e-14);
  CHECK((B - B.adjoint()).norm() < 1e-14);
}

TEST_CASE("constrain_discretization: R = I identifies the endpoint values")
{
  const auto bc = constrain_discretization(
      SelfadjointDomain::coupled(0.0, Eigen::Matrix2d::Identity()), 6);
  CHECK(bc.prolongation.cols() == 5);
  const Eigen::MatrixXcd P(bc.prolongation);
  CHECK(P.row(0) == P.row(5));
  CHECK(bc.boundary_stiffness.norm() == 0.0);

  // r12 = 0 with phi: f(b) = e^{i phi} r11 f(a).
  Eigen::Matrix2d R;
  R << 2.0, 0.0, 3.0, 0.5;
  const double phi = 1.1;
  const auto bc2 = constrain_discretization(SelfadjointDomain::coupled(phi, R), 6);
  const Eigen::MatrixXcd P2(bc2.prolongation);
  const cplx e(std::cos(phi), std::sin(phi));
  CHECK((P2.row(5) - e * 2.0 * P2.row(0)).norm() < 1e-14);
  const Eigen::MatrixXcd B2(bc2.boundary_stiffness);
  CHECK((B2 - B2.adjoint()).norm() < 1e-14);
}

TEST_CASE("domains describe themselves")
{
  CHECK(SelfadjointDomain::dirichlet().describe() == "separated(l=inf, r=inf)");
  CHECK(SelfadjointDomain::dirichlet().real_valued());
  CHECK_FALSE(SelfadjointDomain::coupled(1.0, Eigen::Matrix2d::Identity()).real_valued());
}
