#pragma once

// Reference computations that share no code with the library's solvers.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle
{

using cplx = std::complex<double>;

// Eigenvalues of K x = lambda M x beyond this are treated as infinite (a numerically
// singular M, e.g. a sign jump on a grid node).
double finite_cutoff(const Eigen::MatrixXcd &K, const Eigen::MatrixXcd &M);

// All roots of det(K - lambda M) by Aberth-Ehrlich iteration, using
// f'/f = -tr((K - lambda M)^{-1} M). Roots beyond finite_cutoff
// are dropped.
std::vector<cplx> determinant_roots(const Eigen::MatrixXcd &K, const Eigen::MatrixXcd &M);

// Shooting for -(p y')' + q y = lambda w y with separated ends. An end is Dirichlet
// when its Robin value is empty; otherwise (p y') = l y at a, (p y') = r y at b.
struct ShootingProblem
{
  std::function<double(double)> p, q, w;
  double a = 0.0, b = 1.0;
  std::vector<double> breaks;  // jumps of the coefficients, integrated across exactly
  std::optional<double> l, r;
  int steps_per_unit = 20000;
};

// Normalised Wronskian of the solutions started at a and at b, taken at the midpoint.
cplx shooting_mismatch(const ShootingProblem &sp, cplx lambda);

// Secant iteration from lambda0; throws when it fails to converge.
cplx shooting_eigenvalue(const ShootingProblem &sp, cplx lambda0);

// Real eigenvalue in [lo, hi] by bracketing; the mismatch must change sign. Boundary-layer
// modes make the mismatch nearly a step function, where secant iteration stalls.
double shooting_real_eigenvalue(const ShootingProblem &sp, double lo, double hi);

// Integral over [1/((k_max+1) pi), 1/pi] by composite Simpson in t = 1/x, one piece per
// interval between consecutive zeros of sin(1/x).
double zero_aligned_simpson(const std::function<double(double)> &f, int k_max, int sub);

// max |f| on [lo, hi]: uniform sampling then golden-section refinement.
double sampled_sup(const std::function<double(double)> &f, double lo, double hi, long samples);

}  // namespace oracle
