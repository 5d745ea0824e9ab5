#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "isl/bounds.hpp"
#include "isl/coeffs.hpp"
#include "isl/domains.hpp"

namespace isl
{

// Integrals over one element [x0, x1] against the P1 shape functions
// N0 = (x1 - x)/h, N1 = (x - x0)/h.
struct ElementMoments
{
  double h = 0.0;
  double p_int = 0.0;            // int p
  double q00 = 0, q01 = 0, q11 = 0;  // int q Ni Nj
  double w00 = 0, w01 = 0, w11 = 0;  // int w Ni Nj
  double r00 = 0, r01 = 0, r11 = 0;  // int (1/p) Ni Nj
};

struct DiscreteProblem
{
  int N = 0;  // element count
  std::vector<double> grid;
  std::vector<double> p_nodes;  // p at the nodes
  std::vector<ElementMoments> elements;
  // Interior form and mass on the full nodal space (N + 1 nodes), no boundary terms.
  Eigen::SparseMatrix<cplx> K_full, M_full;
  BoundaryConstraint constraint;
  // The reduced pencil K x = lambda M x.
  Eigen::SparseMatrix<cplx> K, M;
  bool real_valued = true;
  bool coupled = false;
};

// Uniform grid of N elements with the nearest node moved onto every jump point.
// Throws InvalidInput when two jumps claim the same node.
std::vector<double> build_grid(Interval interval, int N, const std::vector<double> &jumps);

DiscreteProblem discretize(const Coefficients &c, const SelfadjointDomain &d, int N,
                           const Quadrature &quad = Quadrature{});

struct PencilOptions
{
  // Reduced sizes up to this use dense QZ; larger ones shift-invert Arnoldi.
  int dense_limit = 400;
  double window = 1e4;  // Arnoldi returns eigenvalues with |lambda| <= window
  int max_krylov = 900;
  double krylov_tol = 1e-10;
  unsigned seed = 20240611u;
};

struct RawEigenpair
{
  cplx lambda;
  Eigen::VectorXcd x;  // reduced eigenvector
};

struct PencilSolution
{
  std::vector<RawEigenpair> pairs;
  std::string method;  // "qz" or "arnoldi"
  int infinite_count = 0;
  double shift = 0.0;
  int krylov_dim = 0;
  bool converged = true;
};

PencilSolution solve_pencil_dense(const Eigen::MatrixXcd &K, const Eigen::MatrixXcd &M,
                                  bool real_valued);
PencilSolution solve_pencil_arnoldi(const Eigen::SparseMatrix<cplx> &K,
                                    const Eigen::SparseMatrix<cplx> &M, bool real_valued,
                                    int block, const PencilOptions &options);
PencilSolution solve_pencil(const DiscreteProblem &dp, const PencilOptions &options = {});

struct EigenPair
{
  cplx lambda;
  Eigen::VectorXcd phi;    // nodal values, ||phi||_{1/p,2} = 1
  Eigen::VectorXcd slope;  // phi' on each element
  Eigen::VectorXcd flux;   // reconstructed (p phi') at the nodes
  Eigen::VectorXcd dphi;   // flux / p at the nodes
  double residual = 0.0;   // relative pencil residual
  double krein_sign = 0.0; // int w |phi|^2
  double phi_inf = 0.0;    // ||phi||_inf
  double dphi_p2 = 0.0;    // ||phi'||_{p,2}
  double flux_mismatch = 0.0;  // reconstructed vs. assembled flux at b
  BoundaryTrace trace;
};

EigenPair make_eigenpair(const DiscreteProblem &dp, const RawEigenpair &raw);

enum class EigenClass
{
  Real,
  Nonreal,
  Exceptional,
  Spurious,
};

std::string to_string(EigenClass c);

struct ClassifyOptions
{
  double tol_im = 1e-8;
  double mesh_im_factor = 1e-3;  // nonreal threshold grows with mesh disagreement
  double conj_match = 1e-6;
  double tol_zero = 1e-8;        // relative to the spectral scale
  double tol_sign = 1e-8;
  double max_agreement = 0.1;    // worse mesh agreement marks a pair spurious
};

struct SpectrumEntry
{
  EigenPair pair;
  EigenClass cls = EigenClass::Real;
  double mesh_agreement = std::numeric_limits<double>::quiet_NaN();
  int conjugate = -1;  // index of the conjugate partner
  double conjugate_residual = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct Spectrum
{
  int N = 0;
  int coarse_N = 0;  // 0 without a mesh ladder
  std::string method;
  double window = 0.0;
  double h_max = 0.0;
  std::vector<SpectrumEntry> entries;  // sorted by (Re, Im)
  std::shared_ptr<const DiscreteProblem> problem;  // the mesh the entries live on

  std::vector<const SpectrumEntry *> of_class(EigenClass c) const;
};

// Classifies eigenpairs (mesh_agreement may be preset on entries).
Spectrum classify(std::vector<SpectrumEntry> entries, const ClassifyOptions &options = {});

struct SolveOptions
{
  PencilOptions pencil;
  ClassifyOptions classify;
  QuadratureOptions quadrature;
};

// One mesh, window-filtered, classified without mesh agreement.
Spectrum solve_spectrum(const Coefficients &c, const SelfadjointDomain &d, int N,
                        const SolveOptions &options = {});

// Meshes N0 and 2 N0; reports the fine mesh with per-pair agreement.
Spectrum mesh_converge(const Coefficients &c, const SelfadjointDomain &d, int N0,
                       const SolveOptions &options = {});

struct ProbeResult
{
  double x = 0.0;
  double im_lhs = 0.0, im_rhs = 0.0;
  double re_lhs = 0.0, re_rhs = 0.0;
  double scale = 0.0;
  double rel_im = 0.0, rel_re = 0.0;
};

struct IdentityReport
{
  bool passed = false;
  double tol = 0.0;
  double max_rel_im = 0.0;
  double max_rel_re = 0.0;
  std::vector<ProbeResult> probes;
};

// Node indices at the given fractions of the interval (nearest node).
std::vector<int> probe_nodes(const DiscreteProblem &dp, const std::vector<double> &fractions);
std::vector<int> default_probe_nodes(const DiscreteProblem &dp);

// Checks, at grid nodes x,
//   (Im lambda) int_x^b w|phi|^2 = Im((p phi')(x) conj(phi(x)) - (p phi')(b) conj(phi(b)))
//   (Re lambda) int_x^b w|phi|^2 = Re(same) + int_x^b (p|phi'|^2 + q|phi|^2).
IdentityReport residual_identity_check(const EigenPair &ep, const DiscreteProblem &dp,
                                       const std::vector<int> &nodes, double tol = 1e-4);

struct NormCheck
{
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound (1 + mesh_tol) - value
  bool passed = false;
};

struct NormCheckReport
{
  bool passed = true;
  std::vector<NormCheck> checks;
};

// ||phi'||_{p,2} <= beta and ||phi||_inf <= gamma (nonreal or exceptional pairs);
// additionally <= alpha delta and <= sqrt(alpha) delta for nonreal pairs when delta exists.
NormCheckReport eigenfunction_norm_checks(const EigenPair &ep, EigenClass cls,
                                          const BoundConstants &bc, double mesh_tol = 1e-3);

struct BoundCheck
{
  cplx lambda;
  std::string quantity;  // "im", "re", "exceptional"
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound / value (infinite for value 0)
  bool passed = false;
};

struct BoundVerdict
{
  bool passed = true;
  std::vector<BoundCheck> checks;
};

BoundVerdict verify_bounds(const Spectrum &s, const BoundReport &br, double mesh_tol = 1e-3);

// Boundary-form check on one eigenpair, tolerance 1e-6 (1 + |form|) + h^2 |lambda|.
BoundaryCheck boundary_check(const EigenPair &ep, const SelfadjointDomain &d, double h_max);

}  // namespace isl
