#pragma once

#include <string>
#include <vector>

#include "isl/coeffs.hpp"
#include "isl/domains.hpp"
#include "oracles.hpp"

namespace fixtures
{

struct Fixture
{
  std::string name;
  isl::Coefficients coeffs;
  isl::SelfadjointDomain domain;
};

inline isl::Coefficients unit_p(double q, const isl::Fn1D &w)
{
  return isl::Coefficients({0.0, 1.0}, isl::Fn1D::constant(1.0), isl::Fn1D::constant(q), w);
}

inline Fixture definite()
{
  return {"definite", unit_p(0.0, isl::Fn1D::constant(1.0)), isl::SelfadjointDomain::dirichlet()};
}

inline Fixture sign_step(double x0, double q)
{
  return {"sign_step", unit_p(q, isl::Fn1D::sign_step(x0)), isl::SelfadjointDomain::dirichlet()};
}

inline Fixture robin()
{
  using isl::Fn1D;
  return {"robin",
          isl::Coefficients({0.0, 1.0}, Fn1D::polynomial({1.0, 0.5}),
                            Fn1D::piecewise({0.3}, {Fn1D::constant(-10.0), Fn1D::constant(4.0)}),
                            Fn1D::sign_step(0.6)),
          isl::SelfadjointDomain::separated(-20.0, 20.0)};
}

inline Fixture periodic(double q)
{
  return {"periodic", unit_p(q, isl::Fn1D::sign_step(0.3)),
          isl::SelfadjointDomain::coupled(0.0, Eigen::Matrix2d::Identity())};
}

inline Fixture coupled_complex()
{
  Eigen::Matrix2d R;
  R << 1.0, 1.0, 0.0, 1.0;
  return {"coupled_complex", unit_p(-30.0, isl::Fn1D::sign_step(0.4)),
          isl::SelfadjointDomain::coupled(1.0471975511965976, R)};
}

// Every fixture the boundary-form and Hermiticity properties are checked on.
inline std::vector<Fixture> all()
{
  return {definite(),        sign_step(0.5, 0.0), sign_step(0.5, 5.0), sign_step(0.5, -50.0),
          sign_step(0.25, -50.0), robin(),       periodic(-30.0),     coupled_complex()};
}

// Shooting description of a separated fixture (p, q, w evaluated through the library's
// Fn1D only as plain callables; the integrator is independent).
inline oracle::ShootingProblem shooting(const Fixture &f)
{
  oracle::ShootingProblem sp;
  const auto &c = f.coeffs;
  sp.p = [p = c.p()](double x) { return p(x); };
  sp.q = [q = c.q()](double x) { return q(x); };
  sp.w = [w = c.w()](double x) { return w(x); };
  sp.a = c.interval().a;
  sp.b = c.interval().b;
  for (const auto *fn : {&c.p(), &c.q(), &c.w()})
  {
    const auto br = fn->breakpoints(sp.a, sp.b);
    sp.breaks.insert(sp.breaks.end(), br.begin(), br.end());
  }
  std::sort(sp.breaks.begin(), sp.breaks.end());
  const auto *s = f.domain.as_separated();
  if (const double *l = std::get_if<double>(&s->l))
  {
    sp.l = *l;
  }
  if (const double *r = std::get_if<double>(&s->r))
  {
    sp.r = *r;
  }
  return sp;
}

}  // namespace fixtures
