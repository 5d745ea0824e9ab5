#include "isl/domains.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/LU>

#include "isl/error.hpp"

namespace isl
{

namespace
{

bool is_dirichlet(const EndCondition &e) { return std::holds_alternative<Dirichlet>(e); }

void validate_end(const EndCondition &e, const char *which)
{
  if (const double *v = std::get_if<double>(&e); v && !std::isfinite(*v))
  {
    throw InvalidInput(std::string("Robin coefficient ") + which +
                       " must be finite (use Dirichlet for infinity)");
  }
}

std::string end_string(const EndCondition &e)
{
  if (is_dirichlet(e))
  {
    return "inf";
  }
  std::ostringstream os;
  os << std::get<double>(e);
  return os.str();
}

}  // namespace

SelfadjointDomain SelfadjointDomain::separated(EndCondition l, EndCondition r)
{
  validate_end(l, "l");
  validate_end(r, "r");
  return SelfadjointDomain(Separated{l, r});
}

SelfadjointDomain SelfadjointDomain::coupled(double phi, const Eigen::Matrix2d &R)
{
  if (!std::isfinite(phi) || phi < 0.0 || phi >= 2.0 * std::numbers::pi)
  {
    throw InvalidInput("coupled condition needs phi in [0, 2 pi)");
  }
  if (!R.allFinite())
  {
    throw InvalidInput("coupled condition matrix R must be finite");
  }
  if (std::abs(R.determinant() - 1.0) > 1e-12)
  {
    std::ostringstream os;
    os << "coupled condition needs det R = 1, got " << R.determinant();
    throw InvalidInput(os.str());
  }
  return SelfadjointDomain(Coupled{phi, R});
}

bool SelfadjointDomain::real_valued() const
{
  if (const auto *c = as_coupled())
  {
    return c->phi == 0.0 || c->phi == std::numbers::pi;
  }
  return true;
}

std::string SelfadjointDomain::describe() const
{
  std::ostringstream os;
  if (const auto *s = as_separated())
  {
    os << "separated(l=" << end_string(s->l) << ", r=" << end_string(s->r) << ")";
  }
  else
  {
    const auto &c = *as_coupled();
    os << "coupled(phi=" << c.phi << ", R=[[" << c.R(0, 0) << "," << c.R(0, 1) << "],["
       << c.R(1, 0) << "," << c.R(1, 1) << "]])";
  }
  return os.str();
}

double c_of_domain(const SelfadjointDomain &d)
{
  if (const auto *s = d.as_separated())
  {
    const bool la = is_dirichlet(s->l), rb = is_dirichlet(s->r);
    if (la && rb)
    {
      return 0.0;
    }
    if (la)
    {
      return std::abs(std::get<double>(s->r));
    }
    if (rb)
    {
      return std::abs(std::get<double>(s->l));
    }
    return std::abs(std::get<double>(s->l)) + std::abs(std::get<double>(s->r));
  }
  const auto &R = d.as_coupled()->R;
  if (R(0, 1) != 0.0)
  {
    return (std::abs(R(0, 0)) + std::abs(R(1, 1)) + 2.0) / std::abs(R(0, 1));
  }
  return std::abs(R(0, 0) * R(1, 0));
}

cplx boundary_form(const BoundaryTrace &t)
{
  return t.pphi_b * std::conj(t.phi_b) - t.pphi_a * std::conj(t.phi_a);
}

BoundaryCheck check_boundary_bound(const BoundaryTrace &t, double c_D, double tol)
{
  BoundaryCheck c;
  c.form = boundary_form(t);
  c.tol = tol;
  c.im_residual = std::abs(c.form.imag());
  c.bound = c_D * std::max(std::norm(t.phi_a), std::norm(t.phi_b));
  c.excess = std::abs(c.form) - c.bound;
  c.passed = true;
  std::ostringstream os;
  if (c.im_residual > tol)
  {
    c.passed = false;
    os << "Im(boundary form) = " << c.form.imag() << " exceeds tol " << tol << "; ";
  }
  if (c.excess > tol)
  {
    c.passed = false;
    os << "|boundary form| = " << std::abs(c.form) << " exceeds c(D) max|phi|^2 = " << c.bound
       << " by " << c.excess;
  }
  c.failure = os.str();
  return c;
}

BoundaryCheck check_boundary_estimate(const BoundaryTrace &t, const SelfadjointDomain &d,
                                      double tol)
{
  return check_boundary_bound(t, c_of_domain(d), tol);
}

BoundaryConstraint constrain_discretization(const SelfadjointDomain &d, int node_count)
{
  if (node_count < 3)
  {
    throw InvalidInput("discretization needs at least 3 nodes");
  }
  const int last = node_count - 1;
  std::vector<Eigen::Triplet<cplx>> p_entries, b_entries;
  int reduced = 0;

  if (const auto *s = d.as_separated())
  {
    const bool drop_a = is_dirichlet(s->l), drop_b = is_dirichlet(s->r);
    for (int i = 0; i <= last; i++)
    {
      if ((i == 0 && drop_a) || (i == last && drop_b))
      {
        continue;
      }
      p_entries.emplace_back(i, reduced++, 1.0);
    }
    // (pf')(a) conj(v(a)) - (pf')(b) conj(v(b)) with (pf')(a) = l f(a), (pf')(b) = r f(b).
    if (!drop_a)
    {
      b_entries.emplace_back(0, 0, std::get<double>(s->l));
    }
    if (!drop_b)
    {
      b_entries.emplace_back(last, last, -std::get<double>(s->r));
    }
  }
  else
  {
    const auto &c = *d.as_coupled();
    const double r11 = c.R(0, 0), r12 = c.R(0, 1), r21 = c.R(1, 0), r22 = c.R(1, 1);
    const cplx e = std::polar(1.0, c.phi);
    if (r12 != 0.0)
    {
      // Both fluxes are determined by the end values:
      //   r12 (pf')(a) = e^{-i phi} f(b) - r11 f(a),  r12 (pf')(b) = r22 f(b) - e^{i phi} f(a).
      for (int i = 0; i <= last; i++)
      {
        p_entries.emplace_back(i, reduced++, 1.0);
      }
      b_entries.emplace_back(0, 0, -r11 / r12);
      b_entries.emplace_back(0, last, std::conj(e) / r12);
      b_entries.emplace_back(last, 0, e / r12);
      b_entries.emplace_back(last, last, -r22 / r12);
    }
    else
    {
      // r11 r22 = 1, so f(b) = e^{i phi} r11 f(a) is an essential condition.
      const cplx link = e * r11;
      if (std::abs(link) == 0.0)
      {
        throw InvalidInput("coupled condition has inconsistent constraint rank");
      }
      for (int i = 0; i < last; i++)
      {
        p_entries.emplace_back(i, reduced++, 1.0);
      }
      p_entries.emplace_back(last, 0, link);
      b_entries.emplace_back(0, 0, -r11 * r21);
    }
  }

  BoundaryConstraint bc;
  bc.prolongation.resize(node_count, reduced);
  bc.prolongation.setFromTriplets(p_entries.begin(), p_entries.end());
  bc.boundary_stiffness.resize(node_count, node_count);
  bc.boundary_stiffness.setFromTriplets(b_entries.begin(), b_entries.end());
  if (reduced < 1)
  {
    throw InvalidInput("boundary constraints leave no unknowns");
  }
  return bc;
}

}  // namespace isl
