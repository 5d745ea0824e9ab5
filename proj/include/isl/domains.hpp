#pragma once

#include <complex>
#include <string>
#include <variant>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace isl
{

using cplx = std::complex<double>;

// Symbolic infinity for a separated condition: the Dirichlet condition f = 0.
struct Dirichlet
{
  bool operator==(const Dirichlet &) const = default;
};

// Either Dirichlet or the Robin coefficient l (at a) / r (at b) in (pf') = l f.
using EndCondition = std::variant<Dirichlet, double>;

// (pf')(a) = l f(a), (pf')(b) = r f(b).
struct Separated
{
  EndCondition l;
  EndCondition r;
};

// (f(b), (pf')(b)) = e^{i phi} R (f(a), (pf')(a)) with det R = 1.
struct Coupled
{
  double phi = 0.0;
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
};

class SelfadjointDomain
{
public:
  static SelfadjointDomain separated(EndCondition l, EndCondition r);
  static SelfadjointDomain coupled(double phi, const Eigen::Matrix2d &R);
  static SelfadjointDomain dirichlet() { return separated(Dirichlet{}, Dirichlet{}); }

  const std::variant<Separated, Coupled> &value() const { return value_; }
  const Separated *as_separated() const { return std::get_if<Separated>(&value_); }
  const Coupled *as_coupled() const { return std::get_if<Coupled>(&value_); }

  // True when the discrete pencil is real (separated, or coupled with phi in {0, pi}).
  bool real_valued() const;

  std::string describe() const;

private:
  explicit SelfadjointDomain(std::variant<Separated, Coupled> v) : value_(std::move(v)) {}
  std::variant<Separated, Coupled> value_;
};

// The boundary-condition constant c(D) >= 0.
double c_of_domain(const SelfadjointDomain &d);

// Boundary values phi(a), phi(b), (p phi')(a), (p phi')(b).
struct BoundaryTrace
{
  cplx phi_a{0.0}, phi_b{0.0}, pphi_a{0.0}, pphi_b{0.0};
};

// (p phi')(b) conj(phi(b)) - (p phi')(a) conj(phi(a)).
cplx boundary_form(const BoundaryTrace &t);

struct BoundaryCheck
{
  bool passed = false;
  cplx form{0.0};
  double im_residual = 0.0;  // |Im form|
  double bound = 0.0;        // c(D) max(|phi(a)|^2, |phi(b)|^2)
  double excess = 0.0;       // |form| - bound (negative when satisfied)
  double tol = 0.0;
  std::string failure;
};

// Checks Im(form) = 0 and |form| <= c max(|phi(a)|^2, |phi(b)|^2), both up to tol.
BoundaryCheck check_boundary_bound(const BoundaryTrace &t, double c_D, double tol);
BoundaryCheck check_boundary_estimate(const BoundaryTrace &t, const SelfadjointDomain &d,
                                      double tol);

// How a selfadjoint domain acts on a nodal P1 discretization with node_count nodes
// (node 0 at a, node node_count - 1 at b).
struct BoundaryConstraint
{
  // Full nodal vector = prolongation * reduced unknowns (node_count x reduced size).
  Eigen::SparseMatrix<cplx> prolongation;
  // Boundary terms of the sesquilinear form on the full nodal space.
  Eigen::SparseMatrix<cplx> boundary_stiffness;
};

// Dirichlet ends are eliminated; Robin and coupled conditions with r12 != 0 enter as
// boundary terms; coupled conditions with r12 = 0 identify f(b) = e^{i phi} r11 f(a).
BoundaryConstraint constrain_discretization(const SelfadjointDomain &d, int node_count);

}  // namespace isl
