#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "isl/eigensolve.hpp"
#include "isl/error.hpp"

namespace isl
{

namespace
{

// An eigenvalue alpha/beta is treated as infinite when beta is this small relative
// to alpha.
constexpr double kInfiniteRatio = 1e-14;

bool is_infinite(cplx alpha, double beta_abs)
{
  return beta_abs == 0.0 || beta_abs < kInfiniteRatio * std::abs(alpha);
}

PencilSolution dense_real(const Eigen::MatrixXd &K, const Eigen::MatrixXd &M)
{
  const lapack_int n = static_cast<lapack_int>(K.rows());
  Eigen::MatrixXd A = K, B = M;
  Eigen::VectorXd ar(n), ai(n), be(n);
  Eigen::MatrixXd vr(n, n);
  double vl_dummy = 0.0;
  const lapack_int info = LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'V', n, A.data(), n, B.data(), n,
                                        ar.data(), ai.data(), be.data(), &vl_dummy, 1,
                                        vr.data(), n);
  if (info != 0)
  {
    std::ostringstream os;
    os << "QZ (dggev) failed with info = " << info << " on a pencil of size " << n
       << "; ||K|| = " << K.norm() << ", ||M|| = " << M.norm();
    throw NumericalError(os.str());
  }
  PencilSolution out;
  out.method = "qz";
  for (lapack_int j = 0; j < n; j++)
  {
    const cplx alpha(ar(j), ai(j));
    if (ai(j) == 0.0)
    {
      if (is_infinite(alpha, std::abs(be(j))))
      {
        out.infinite_count++;
        continue;
      }
      out.pairs.push_back({alpha / be(j), vr.col(j).cast<cplx>()});
      continue;
    }
    // Complex pair j, j + 1 with eigenvectors vr(j) +- i vr(j + 1).
    const cplx alpha2(ar(j + 1), ai(j + 1));
    Eigen::VectorXcd v(n);
    v.real() = vr.col(j);
    v.imag() = vr.col(j + 1);
    if (is_infinite(alpha, std::abs(be(j))))
    {
      out.infinite_count += 2;
    }
    else
    {
      out.pairs.push_back({alpha / be(j), v});
      out.pairs.push_back({alpha2 / be(j + 1), v.conjugate()});
    }
    j++;
  }
  return out;
}

PencilSolution dense_complex(const Eigen::MatrixXcd &K, const Eigen::MatrixXcd &M)
{
  const lapack_int n = static_cast<lapack_int>(K.rows());
  Eigen::MatrixXcd A = K, B = M;
  Eigen::VectorXcd al(n), be(n);
  Eigen::MatrixXcd vr(n, n);
  cplx vl_dummy = 0.0;
  const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'V', n, A.data(), n, B.data(), n,
                                        al.data(), be.data(), &vl_dummy, 1, vr.data(), n);
  if (info != 0)
  {
    std::ostringstream os;
    os << "QZ (zggev) failed with info = " << info << " on a pencil of size " << n
       << "; ||K|| = " << K.norm() << ", ||M|| = " << M.norm();
    throw NumericalError(os.str());
  }
  PencilSolution out;
  out.method = "qz";
  for (lapack_int j = 0; j < n; j++)
  {
    if (is_infinite(al(j), std::abs(be(j))))
    {
      out.infinite_count++;
      continue;
    }
    out.pairs.push_back({al(j) / be(j), vr.col(j)});
  }
  return out;
}

template <class Scalar>
Eigen::SparseMatrix<Scalar> convert(const Eigen::SparseMatrix<cplx> &A)
{
  if constexpr (std::is_same_v<Scalar, double>)
  {
    return A.real();
  }
  else
  {
    return A;
  }
}

template <class Scalar>
struct RitzData
{
  Eigen::VectorXcd theta;
  Eigen::MatrixXcd Y;
};

template <class Scalar>
RitzData<Scalar> ritz(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &Hm)
{
  RitzData<Scalar> r;
  if constexpr (std::is_same_v<Scalar, double>)
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(Hm, true);
    if (es.info() != Eigen::Success)
    {
      throw NumericalError("Arnoldi: Hessenberg eigenproblem failed");
    }
    r.theta = es.eigenvalues();
    r.Y = es.eigenvectors();
  }
  else
  {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hm, true);
    if (es.info() != Eigen::Success)
    {
      throw NumericalError("Arnoldi: Hessenberg eigenproblem failed");
    }
    r.theta = es.eigenvalues();
    r.Y = es.eigenvectors();
  }
  return r;
}

template <class Scalar>
PencilSolution arnoldi(const Eigen::SparseMatrix<cplx> &Kc, const Eigen::SparseMatrix<cplx> &Mc,
                       int block, const PencilOptions &opt)
{
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::SparseMatrix<Scalar> K = convert<Scalar>(Kc), M = convert<Scalar>(Mc);
  const int n = static_cast<int>(K.rows());
  if (block < 1 || n <= block + 1)
  {
    throw InvalidInput("pencil too small for Arnoldi");
  }

  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_vec = [&]()
  {
    Vec v(n);
    for (int i = 0; i < n; i++)
    {
      if constexpr (std::is_same_v<Scalar, double>)
      {
        v(i) = normal(rng);
      }
      else
      {
        const double re = normal(rng);
        v(i) = cplx(re, normal(rng));
      }
    }
    return v;
  };

  // Shift selection: the first candidate with a well-conditioned factorization.
  static constexpr double candidates[] = {-0.6180339887, 0.4142135624, -1.7320508076,
                                          2.2360679775, -3.1415926536, 5.0990195136};
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  double sigma = 0.0;
  bool have_shift = false;
  for (double s : candidates)
  {
    Eigen::SparseMatrix<Scalar> A = K - Scalar(s) * M;
    A.makeCompressed();
    lu.compute(A);
    if (lu.info() != Eigen::Success)
    {
      continue;
    }
    const Vec b = random_vec();
    const Vec x = lu.solve(b);
    const double res = (A * x - b).norm() / b.norm();
    const double growth = x.norm() / b.norm();
    if (std::isfinite(growth) && res < 1e-8 && growth < 1e12)
    {
      sigma = s;
      have_shift = true;
      break;
    }
  }
  if (!have_shift)
  {
    throw NumericalError("Arnoldi: no usable shift (K - sigma M singular for every candidate)");
  }

  const int mmax = std::min(opt.max_krylov, n - block);
  Mat V(n, mmax + block);
  Mat H = Mat::Zero(mmax + block, mmax);
  int basis = 0;
  auto orthonormal_append = [&](Vec w, int k)
  {
    const double before = w.norm();
    for (int pass = 0; pass < 2 && basis > 0; pass++)
    {
      const Vec c = V.leftCols(basis).adjoint() * w;
      w -= V.leftCols(basis) * c;
      if (k >= 0)
      {
        H.col(k).head(basis) += c;
      }
    }
    double nrm = w.norm();
    if (k >= 0)
    {
      H(basis, k) = nrm;
    }
    if (nrm <= 1e-12 * std::max(before, 1e-300))
    {
      // Invariant subspace found: continue with a fresh random direction.
      if (k >= 0)
      {
        H(basis, k) = 0.0;
      }
      w = random_vec();
      for (int pass = 0; pass < 2; pass++)
      {
        w -= V.leftCols(basis) * (V.leftCols(basis).adjoint() * w);
      }
      nrm = w.norm();
    }
    V.col(basis) = w / nrm;
    basis++;
  };
  for (int j = 0; j < block; j++)
  {
    orthonormal_append(random_vec(), -1);
  }

  const double theta_min = 1.0 / (opt.window + std::abs(sigma));
  PencilSolution out;
  out.method = "arnoldi";
  out.shift = sigma;
  out.converged = false;
  int next_check = std::min(mmax, 40);
  int prev_count = -1;
  RitzData<Scalar> last;
  int m = 0;
  std::vector<int> accepted;
  for (int k = 0; k < mmax; k++)
  {
    const Vec w = lu.solve(M * V.col(k));
    orthonormal_append(w, k);
    m = k + 1;
    if (m != next_check && m != mmax)
    {
      continue;
    }
    last = ritz<Scalar>(H.topLeftCorner(m, m));
    const auto tail = H.block(m, 0, block, m);
    double theta_max = 0.0;
    for (int i = 0; i < m; i++)
    {
      theta_max = std::max(theta_max, std::abs(last.theta(i)));
    }
    accepted.clear();
    bool all_converged = true;
    for (int i = 0; i < m; i++)
    {
      if (std::abs(last.theta(i)) < theta_min)
      {
        continue;
      }
      const Eigen::VectorXcd y = last.Y.col(i).normalized();
      const double res = (tail.template cast<cplx>() * y).norm();
      if (res <= opt.krylov_tol * theta_max)
      {
        accepted.push_back(i);
      }
      else
      {
        all_converged = false;
      }
    }
    const int count = static_cast<int>(accepted.size());
    if (all_converged && count == prev_count)
    {
      out.converged = true;
      break;
    }
    prev_count = all_converged ? count : -1;
    next_check = std::min(mmax, m + std::max(20, m / 4));
  }
  out.krylov_dim = m;

  const Eigen::MatrixXcd Vm = V.leftCols(m).template cast<cplx>();
  for (int i : accepted)
  {
    const cplx th = last.theta(i);
    out.pairs.push_back({sigma + 1.0 / th, Vm * last.Y.col(i)});
  }
  return out;
}

}  // namespace

PencilSolution solve_pencil_dense(const Eigen::MatrixXcd &K, const Eigen::MatrixXcd &M,
                                  bool real_valued)
{
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
  {
    throw InvalidInput("pencil matrices must be square and of equal size");
  }
  if (K.rows() == 0)
  {
    throw InvalidInput("empty pencil");
  }
  if (real_valued && K.imag().isZero(0.0) && M.imag().isZero(0.0))
  {
    return dense_real(K.real(), M.real());
  }
  return dense_complex(K, M);
}

PencilSolution solve_pencil_arnoldi(const Eigen::SparseMatrix<cplx> &K,
                                    const Eigen::SparseMatrix<cplx> &M, bool real_valued,
                                    int block, const PencilOptions &options)
{
  if (real_valued)
  {
    return arnoldi<double>(K, M, block, options);
  }
  return arnoldi<cplx>(K, M, block, options);
}

PencilSolution solve_pencil(const DiscreteProblem &dp, const PencilOptions &options)
{
  const int n = static_cast<int>(dp.K.rows());
  if (n <= options.dense_limit)
  {
    return solve_pencil_dense(Eigen::MatrixXcd(dp.K), Eigen::MatrixXcd(dp.M), dp.real_valued);
  }
  // Coupled conditions can produce double eigenvalues; a block of two finds both.
  const int block = dp.coupled ? 2 : 1;
  auto sol = solve_pencil_arnoldi(dp.K, dp.M, dp.real_valued, block, options);
  if (!sol.converged)
  {
    std::ostringstream os;
    os << "Arnoldi did not converge within " << sol.krylov_dim
       << " vectors; raise dense_limit or lower the trust window";
    throw NumericalError(os.str());
  }
  return sol;
}

}  // namespace isl
