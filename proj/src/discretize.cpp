#include <algorithm>
#include <cmath>
#include <sstream>

#include "isl/eigensolve.hpp"
#include "isl/error.hpp"

namespace isl
{

std::vector<double> build_grid(Interval iv, int N, const std::vector<double> &jumps)
{
  if (N < 2)
  {
    throw InvalidInput("discretization needs at least 2 elements");
  }
  const double H = iv.length() / N;
  std::vector<double> x(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; i++)
  {
    x[static_cast<std::size_t>(i)] = iv.a + i * H;
  }
  x.back() = iv.b;
  std::vector<int> used;
  for (double t : jumps)
  {
    if (!(t > iv.a && t < iv.b))
    {
      continue;
    }
    const int i = std::clamp(static_cast<int>(std::lround((t - iv.a) / H)), 1, N - 1);
    if (std::find(used.begin(), used.end(), i) != used.end())
    {
      std::ostringstream os;
      os << "grid too coarse to separate breakpoints near x = " << t << " (N = " << N << ")";
      throw InvalidInput(os.str());
    }
    used.push_back(i);
    x[static_cast<std::size_t>(i)] = t;
  }
  for (std::size_t i = 1; i < x.size(); i++)
  {
    if (!(x[i] > x[i - 1]))
    {
      throw InvalidInput("grid too coarse to separate breakpoints");
    }
  }
  return x;
}

namespace
{

ElementMoments element_moments(const Coefficients &c, double x0, double x1,
                               const Quadrature &quad)
{
  const Fn1D &p = c.p(), &q = c.q(), &w = c.w();
  const double h = x1 - x0;
  auto n0 = [=](double x) { return (x1 - x) / h; };
  auto n1 = [=](double x) { return (x - x0) / h; };
  const auto &opt = quad.options();
  const auto pb = p.panel_breaks(x0, x1, opt);
  const auto qb = q.panel_breaks(x0, x1, opt);
  const auto wb = w.panel_breaks(x0, x1, opt);
  auto inv_p = [&](double x)
  {
    const double v = p(x);
    if (!(v > 0.0))
    {
      throw InvalidInput("p must be positive at quadrature nodes");
    }
    return 1.0 / v;
  };

  ElementMoments m;
  m.h = h;
  m.p_int = quad.integrate([&](double x) { return p(x); }, x0, x1, pb);
  m.q00 = quad.integrate([&](double x) { return q(x) * n0(x) * n0(x); }, x0, x1, qb);
  m.q01 = quad.integrate([&](double x) { return q(x) * n0(x) * n1(x); }, x0, x1, qb);
  m.q11 = quad.integrate([&](double x) { return q(x) * n1(x) * n1(x); }, x0, x1, qb);
  m.w00 = quad.integrate([&](double x) { return w(x) * n0(x) * n0(x); }, x0, x1, wb);
  m.w01 = quad.integrate([&](double x) { return w(x) * n0(x) * n1(x); }, x0, x1, wb);
  m.w11 = quad.integrate([&](double x) { return w(x) * n1(x) * n1(x); }, x0, x1, wb);
  m.r00 = quad.integrate([&](double x) { return inv_p(x) * n0(x) * n0(x); }, x0, x1, pb);
  m.r01 = quad.integrate([&](double x) { return inv_p(x) * n0(x) * n1(x); }, x0, x1, pb);
  m.r11 = quad.integrate([&](double x) { return inv_p(x) * n1(x) * n1(x); }, x0, x1, pb);
  return m;
}

std::vector<double> coefficient_jumps(const Coefficients &c)
{
  const auto [a, b] = c.interval();
  std::vector<double> out;
  for (const Fn1D *f : {&c.p(), &c.q(), &c.w()})
  {
    const auto j = f->jumps(a, b);
    out.insert(out.end(), j.begin(), j.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

DiscreteProblem discretize(const Coefficients &c, const SelfadjointDomain &d, int N,
                           const Quadrature &quad)
{
  DiscreteProblem dp;
  dp.N = N;
  dp.grid = build_grid(c.interval(), N, coefficient_jumps(c));
  dp.elements.reserve(static_cast<std::size_t>(N));
  for (double x : dp.grid)
  {
    dp.p_nodes.push_back(c.p()(x));
  }
  const int nodes = N + 1;
  std::vector<Eigen::Triplet<cplx>> kt, mt;
  kt.reserve(4 * static_cast<std::size_t>(N));
  mt.reserve(4 * static_cast<std::size_t>(N));
  for (int e = 0; e < N; e++)
  {
    const auto m = element_moments(c, dp.grid[static_cast<std::size_t>(e)],
                                   dp.grid[static_cast<std::size_t>(e) + 1], quad);
    const double s = m.p_int / (m.h * m.h);
    kt.emplace_back(e, e, s + m.q00);
    kt.emplace_back(e, e + 1, -s + m.q01);
    kt.emplace_back(e + 1, e, -s + m.q01);
    kt.emplace_back(e + 1, e + 1, s + m.q11);
    mt.emplace_back(e, e, m.w00);
    mt.emplace_back(e, e + 1, m.w01);
    mt.emplace_back(e + 1, e, m.w01);
    mt.emplace_back(e + 1, e + 1, m.w11);
    dp.elements.push_back(m);
  }
  dp.K_full.resize(nodes, nodes);
  dp.K_full.setFromTriplets(kt.begin(), kt.end());
  dp.M_full.resize(nodes, nodes);
  dp.M_full.setFromTriplets(mt.begin(), mt.end());

  dp.constraint = constrain_discretization(d, nodes);
  const auto &P = dp.constraint.prolongation;
  const Eigen::SparseMatrix<cplx> Pt = P.adjoint();
  Eigen::SparseMatrix<cplx> Kb = dp.K_full + dp.constraint.boundary_stiffness;
  dp.K = Pt * Kb * P;
  dp.M = Pt * dp.M_full * P;
  dp.K.makeCompressed();
  dp.M.makeCompressed();
  dp.real_valued = d.real_valued();
  dp.coupled = d.as_coupled() != nullptr;
  return dp;
}

}  // namespace isl
