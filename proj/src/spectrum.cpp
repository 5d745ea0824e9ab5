#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "isl/eigensolve.hpp"
#include "isl/error.hpp"

namespace isl
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::SparseMatrix<cplx> &A)
{
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); k++)
  {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(A, k); it; ++it)
    {
      rows(it.row()) += std::abs(it.value());
    }
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

// Element quadratic form [phi0 phi1] [[m00 m01] [m01 m11]] [phi0 phi1]^H.
double element_form(double m00, double m01, double m11, cplx a, cplx b)
{
  return m00 * std::norm(a) + 2.0 * m01 * std::real(a * std::conj(b)) + m11 * std::norm(b);
}

double max_h(const std::vector<double> &grid)
{
  double h = 0.0;
  for (std::size_t i = 1; i < grid.size(); i++)
  {
    h = std::max(h, grid[i] - grid[i - 1]);
  }
  return h;
}

std::vector<EigenPair> window_pairs(const DiscreteProblem &dp, const PencilSolution &sol,
                                    double window)
{
  std::vector<EigenPair> out;
  for (const auto &raw : sol.pairs)
  {
    if (std::isfinite(std::abs(raw.lambda)) && std::abs(raw.lambda) <= window)
    {
      out.push_back(make_eigenpair(dp, raw));
    }
  }
  return out;
}

}  // namespace

EigenPair make_eigenpair(const DiscreteProblem &dp, const RawEigenpair &raw)
{
  EigenPair ep;
  ep.lambda = raw.lambda;
  const cplx lam = raw.lambda;

  const Eigen::VectorXcd r = dp.K * raw.x - lam * (dp.M * raw.x);
  const double denom =
      (inf_norm(dp.K) + std::abs(lam) * inf_norm(dp.M)) * raw.x.lpNorm<Eigen::Infinity>();
  ep.residual = denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : kInf;

  Eigen::VectorXcd phi = dp.constraint.prolongation * raw.x;
  const int N = dp.N;
  double n2 = 0.0;
  for (int e = 0; e < N; e++)
  {
    const auto &m = dp.elements[static_cast<std::size_t>(e)];
    n2 += element_form(m.r00, m.r01, m.r11, phi(e), phi(e + 1));
  }
  if (!(n2 > 0.0))
  {
    throw NumericalError("eigenvector has zero norm");
  }
  Eigen::Index kmax = 0;
  phi.cwiseAbs().maxCoeff(&kmax);
  const cplx phase = std::conj(phi(kmax)) / std::abs(phi(kmax));
  phi *= phase / std::sqrt(n2);
  phi(kmax) = cplx(phi(kmax).real(), 0.0);
  ep.phi = phi;

  ep.slope.resize(N);
  double kr = 0.0, dp2 = 0.0;
  for (int e = 0; e < N; e++)
  {
    const auto &m = dp.elements[static_cast<std::size_t>(e)];
    ep.slope(e) = (phi(e + 1) - phi(e)) / m.h;
    kr += element_form(m.w00, m.w01, m.w11, phi(e), phi(e + 1));
    dp2 += m.p_int * std::norm(ep.slope(e));
  }
  ep.krein_sign = kr;
  ep.dphi_p2 = std::sqrt(dp2);
  ep.phi_inf = phi.cwiseAbs().maxCoeff();

  // Flux (p phi') from the balance F(x_{k+1}) = F(x_k) + int (q - lambda w) phi over each
  // element, started from the consistent boundary flux at a.
  const Eigen::VectorXcd G = dp.K_full * phi - lam * (dp.M_full * phi);
  ep.flux.resize(N + 1);
  ep.flux(0) = -G(0);
  for (int e = 0; e < N; e++)
  {
    const auto &m = dp.elements[static_cast<std::size_t>(e)];
    const cplx a0 = (m.q00 - lam * m.w00) * phi(e) + (m.q01 - lam * m.w01) * phi(e + 1);
    const cplx a1 = (m.q01 - lam * m.w01) * phi(e) + (m.q11 - lam * m.w11) * phi(e + 1);
    ep.flux(e + 1) = ep.flux(e) + a0 + a1;
  }
  ep.flux_mismatch = std::abs(ep.flux(N) - G(N)) / std::max(1.0, std::abs(G(N)));
  ep.dphi.resize(N + 1);
  for (int k = 0; k <= N; k++)
  {
    ep.dphi(k) = ep.flux(k) / dp.p_nodes[static_cast<std::size_t>(k)];
  }
  ep.trace.phi_a = phi(0);
  ep.trace.phi_b = phi(N);
  ep.trace.pphi_a = ep.flux(0);
  ep.trace.pphi_b = ep.flux(N);
  return ep;
}

std::string to_string(EigenClass c)
{
  switch (c)
  {
  case EigenClass::Real:
    return "real";
  case EigenClass::Nonreal:
    return "nonreal";
  case EigenClass::Exceptional:
    return "exceptional";
  case EigenClass::Spurious:
    return "spurious";
  }
  return "unknown";
}

std::vector<const SpectrumEntry *> Spectrum::of_class(EigenClass c) const
{
  std::vector<const SpectrumEntry *> out;
  for (const auto &e : entries)
  {
    if (e.cls == c)
    {
      out.push_back(&e);
    }
  }
  return out;
}

Spectrum classify(std::vector<SpectrumEntry> entries, const ClassifyOptions &opt)
{
  std::sort(entries.begin(), entries.end(),
            [](const SpectrumEntry &x, const SpectrumEntry &y)
            {
              return std::make_tuple(x.pair.lambda.real(), x.pair.lambda.imag()) <
                     std::make_tuple(y.pair.lambda.real(), y.pair.lambda.imag());
            });
  double scale = 1.0;
  for (const auto &e : entries)
  {
    if (std::isfinite(std::abs(e.pair.lambda)))
    {
      scale = std::max(scale, std::abs(e.pair.lambda));
    }
  }

  for (std::size_t i = 0; i < entries.size(); i++)
  {
    auto &e = entries[i];
    e.conjugate = -1;
    e.conjugate_residual = kNaN;
    if (e.cls == EigenClass::Spurious && !e.note.empty())
    {
      continue;
    }
    const cplx lam = e.pair.lambda;
    if (!std::isfinite(std::abs(lam)))
    {
      e.cls = EigenClass::Spurious;
      e.note = "non-finite eigenvalue";
      continue;
    }
    if (std::isfinite(e.mesh_agreement) && e.mesh_agreement > opt.max_agreement)
    {
      e.cls = EigenClass::Spurious;
      std::ostringstream os;
      os << "mesh agreement " << e.mesh_agreement << " exceeds " << opt.max_agreement;
      e.note = os.str();
      continue;
    }
    double tol = opt.tol_im;
    if (std::isfinite(e.mesh_agreement))
    {
      tol = std::max(tol, opt.mesh_im_factor * e.mesh_agreement);
    }
    if (std::abs(lam.imag()) > tol * (1.0 + std::abs(lam)))
    {
      e.cls = EigenClass::Nonreal;
    }
    else if (std::abs(lam) > opt.tol_zero * scale &&
             lam.real() * e.pair.krein_sign <= opt.tol_sign * std::abs(lam))
    {
      e.cls = EigenClass::Exceptional;
    }
    else
    {
      e.cls = EigenClass::Real;
    }
  }

  // Pair each nonreal eigenvalue in the upper half plane with the nearest conjugate.
  std::vector<bool> taken(entries.size(), false);
  for (std::size_t i = 0; i < entries.size(); i++)
  {
    if (entries[i].cls != EigenClass::Nonreal || entries[i].pair.lambda.imag() <= 0.0)
    {
      continue;
    }
    const cplx target = std::conj(entries[i].pair.lambda);
    int best = -1;
    double best_d = kInf;
    for (std::size_t j = 0; j < entries.size(); j++)
    {
      if (entries[j].cls != EigenClass::Nonreal || taken[j] ||
          entries[j].pair.lambda.imag() >= 0.0)
      {
        continue;
      }
      const double d = std::abs(entries[j].pair.lambda - target);
      if (d < best_d)
      {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_d <= opt.conj_match * (1.0 + std::abs(target)))
    {
      taken[static_cast<std::size_t>(best)] = true;
      taken[i] = true;
      entries[i].conjugate = best;
      entries[static_cast<std::size_t>(best)].conjugate = static_cast<int>(i);
      entries[i].conjugate_residual = best_d;
      entries[static_cast<std::size_t>(best)].conjugate_residual = best_d;
    }
  }
  for (std::size_t i = 0; i < entries.size(); i++)
  {
    if (entries[i].cls == EigenClass::Nonreal && !taken[i])
    {
      entries[i].cls = EigenClass::Spurious;
      entries[i].note = "nonreal eigenvalue without a conjugate partner";
    }
  }

  Spectrum s;
  s.entries = std::move(entries);
  return s;
}

Spectrum solve_spectrum(const Coefficients &c, const SelfadjointDomain &d, int N,
                        const SolveOptions &options)
{
  const Quadrature quad(options.quadrature);
  auto shared = std::make_shared<const DiscreteProblem>(discretize(c, d, N, quad));
  const auto &dp = *shared;
  const auto sol = solve_pencil(dp, options.pencil);
  std::vector<SpectrumEntry> entries;
  for (auto &ep : window_pairs(dp, sol, options.pencil.window))
  {
    SpectrumEntry e;
    e.pair = std::move(ep);
    entries.push_back(std::move(e));
  }
  auto s = classify(std::move(entries), options.classify);
  s.N = N;
  s.method = sol.method;
  s.window = options.pencil.window;
  s.h_max = max_h(dp.grid);
  s.problem = shared;
  return s;
}

Spectrum mesh_converge(const Coefficients &c, const SelfadjointDomain &d, int N0,
                       const SolveOptions &options)
{
  if (N0 < 100)
  {
    throw InvalidInput("mesh_converge needs N0 >= 100");
  }
  const Quadrature quad(options.quadrature);
  const auto coarse_dp = discretize(c, d, N0, quad);
  auto shared = std::make_shared<const DiscreteProblem>(discretize(c, d, 2 * N0, quad));
  const auto &fine_dp = *shared;
  const auto coarse_sol = solve_pencil(coarse_dp, options.pencil);
  const auto fine_sol = solve_pencil(fine_dp, options.pencil);
  std::vector<cplx> coarse;
  for (const auto &p : coarse_sol.pairs)
  {
    if (std::abs(p.lambda) <= options.pencil.window)
    {
      coarse.push_back(p.lambda);
    }
  }
  auto fine = window_pairs(fine_dp, fine_sol, options.pencil.window);

  // Greedy nearest-neighbour matching in the complex plane.
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < coarse.size(); i++)
  {
    for (std::size_t j = 0; j < fine.size(); j++)
    {
      cand.emplace_back(std::abs(coarse[i] - fine[j].lambda), i, j);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> cused(coarse.size(), false), fused(fine.size(), false);
  std::vector<double> agreement(fine.size(), kNaN);
  for (const auto &[dist, i, j] : cand)
  {
    if (cused[i] || fused[j])
    {
      continue;
    }
    cused[i] = fused[j] = true;
    agreement[j] = dist / std::max(1.0, std::abs(fine[j].lambda));
  }

  std::vector<SpectrumEntry> entries;
  for (std::size_t j = 0; j < fine.size(); j++)
  {
    SpectrumEntry e;
    e.pair = std::move(fine[j]);
    e.mesh_agreement = agreement[j];
    if (!fused[j])
    {
      e.cls = EigenClass::Spurious;
      e.note = "no partner on the coarse mesh";
    }
    entries.push_back(std::move(e));
  }
  auto s = classify(std::move(entries), options.classify);
  s.N = 2 * N0;
  s.coarse_N = N0;
  s.method = fine_sol.method;
  s.window = options.pencil.window;
  s.h_max = max_h(fine_dp.grid);
  s.problem = shared;
  return s;
}

std::vector<int> probe_nodes(const DiscreteProblem &dp, const std::vector<double> &fractions)
{
  const double a = dp.grid.front(), L = dp.grid.back() - a;
  std::vector<int> out;
  for (double f : fractions)
  {
    const double x = a + f * L;
    const auto it = std::lower_bound(dp.grid.begin(), dp.grid.end(), x);
    auto k = static_cast<int>(it - dp.grid.begin());
    if (k > 0 && (k > dp.N || std::abs(dp.grid[static_cast<std::size_t>(k) - 1] - x) <
                                  std::abs(dp.grid[static_cast<std::size_t>(k)] - x)))
    {
      k--;
    }
    out.push_back(std::clamp(k, 0, dp.N));
  }
  return out;
}

std::vector<int> default_probe_nodes(const DiscreteProblem &dp)
{
  return probe_nodes(dp, {1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6});
}

IdentityReport residual_identity_check(const EigenPair &ep, const DiscreteProblem &dp,
                                       const std::vector<int> &nodes, double tol)
{
  const int N = dp.N;
  const cplx lam = ep.lambda;
  // Suffix sums over elements e >= k.
  std::vector<double> sw(N + 1, 0.0), sabsw(N + 1, 0.0), sp(N + 1, 0.0), sq(N + 1, 0.0),
      sabsq(N + 1, 0.0);
  for (int e = N - 1; e >= 0; e--)
  {
    const auto &m = dp.elements[static_cast<std::size_t>(e)];
    const cplx a = ep.phi(e), b = ep.phi(e + 1);
    const double wf = element_form(m.w00, m.w01, m.w11, a, b);
    const double qf = element_form(m.q00, m.q01, m.q11, a, b);
    const auto u = static_cast<std::size_t>(e);
    sw[u] = sw[u + 1] + wf;
    sabsw[u] = sabsw[u + 1] + std::abs(wf);
    sp[u] = sp[u + 1] + m.p_int * std::norm(ep.slope(e));
    sq[u] = sq[u + 1] + qf;
    sabsq[u] = sabsq[u + 1] + std::abs(qf);
  }
  const cplx fb = ep.flux(N) * std::conj(ep.phi(N));
  const double global = std::abs(lam) * sabsw[0] + sp[0] + sabsq[0];

  IdentityReport rep;
  rep.tol = tol;
  for (int k : nodes)
  {
    if (k < 0 || k > N)
    {
      throw InvalidInput("probe node out of range");
    }
    const auto u = static_cast<std::size_t>(k);
    ProbeResult pr;
    pr.x = dp.grid[u];
    const cplx B = ep.flux(k) * std::conj(ep.phi(k)) - fb;
    pr.im_lhs = lam.imag() * sw[u];
    pr.im_rhs = B.imag();
    pr.re_lhs = lam.real() * sw[u];
    pr.re_rhs = B.real() + sp[u] + sq[u];
    // Floor: where phi is exponentially small every local term is pure round-off.
    pr.scale = std::abs(lam) * sabsw[u] + std::abs(ep.flux(k)) * std::abs(ep.phi(k)) +
               std::abs(fb) + sp[u] + sabsq[u] + 1e-12 * global;
    const double s = std::max(pr.scale, 1e-300);
    pr.rel_im = std::abs(pr.im_lhs - pr.im_rhs) / s;
    pr.rel_re = std::abs(pr.re_lhs - pr.re_rhs) / s;
    rep.max_rel_im = std::max(rep.max_rel_im, pr.rel_im);
    rep.max_rel_re = std::max(rep.max_rel_re, pr.rel_re);
    rep.probes.push_back(pr);
  }
  rep.passed = rep.max_rel_im <= tol && rep.max_rel_re <= tol;
  return rep;
}

NormCheckReport eigenfunction_norm_checks(const EigenPair &ep, EigenClass cls,
                                          const BoundConstants &bc, double mesh_tol)
{
  if (cls != EigenClass::Nonreal && cls != EigenClass::Exceptional)
  {
    throw InvalidInput("norm estimates apply to nonreal or exceptional eigenpairs only");
  }
  NormCheckReport rep;
  auto add = [&](std::string name, double value, double bound)
  {
    NormCheck c;
    c.name = std::move(name);
    c.value = value;
    c.bound = bound;
    c.slack = bound * (1.0 + mesh_tol) - value;
    c.passed = c.slack >= 0.0;
    rep.passed = rep.passed && c.passed;
    rep.checks.push_back(c);
  };
  add("dphi_p2 <= beta", ep.dphi_p2, bc.beta);
  add("phi_inf <= gamma", ep.phi_inf, bc.gamma);
  if (cls == EigenClass::Nonreal && bc.delta)
  {
    add("dphi_p2 <= alpha delta", ep.dphi_p2, bc.alpha * *bc.delta);
    add("phi_inf <= sqrt(alpha) delta", ep.phi_inf, std::sqrt(bc.alpha) * *bc.delta);
  }
  return rep;
}

BoundVerdict verify_bounds(const Spectrum &s, const BoundReport &br, double mesh_tol)
{
  BoundVerdict v;
  auto add = [&](cplx lam, const char *what, double value, double bound)
  {
    BoundCheck c;
    c.lambda = lam;
    c.quantity = what;
    c.value = value;
    c.bound = bound;
    c.margin = value > 0.0 ? bound / value : kInf;
    c.passed = value <= bound * (1.0 + mesh_tol);
    v.passed = v.passed && c.passed;
    v.checks.push_back(c);
  };
  for (const auto &e : s.entries)
  {
    const cplx lam = e.pair.lambda;
    if (e.cls == EigenClass::Nonreal)
    {
      add(lam, "im", std::abs(lam.imag()), br.im_bound);
      add(lam, "re", std::abs(lam.real()), br.re_bound);
    }
    else if (e.cls == EigenClass::Exceptional)
    {
      add(lam, "exceptional", std::abs(lam), br.exceptional_bound);
    }
  }
  return v;
}

BoundaryCheck boundary_check(const EigenPair &ep, const SelfadjointDomain &d, double h_max)
{
  const double form = std::abs(boundary_form(ep.trace));
  const double tol = 1e-6 * (1.0 + form) + h_max * h_max * std::abs(ep.lambda);
  return check_boundary_estimate(ep.trace, d, tol);
}

}  // namespace isl
