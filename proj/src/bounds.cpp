#include "isl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "isl/error.hpp"

namespace isl
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_eps(const EpsSelection &e)
{
  if (!(e.eps > 0.0) || !std::isfinite(e.eps))
  {
    throw InvalidInput("eps must be positive and finite");
  }
}

void require_threshold(const EpsSelection &e, double expected)
{
  if (std::isinf(expected) && e.threshold == expected)
  {
    return;
  }
  if (!(std::abs(e.threshold - expected) <= 1e-12 * expected))
  {
    std::ostringstream os;
    os << "eps was selected for threshold " << e.threshold << " but this bound needs "
       << expected;
    throw InvalidInput(os.str());
  }
}

void require_unit_p(const Coefficients &c)
{
  if (!is_unit_function(c.p(), c.interval()))
  {
    throw InvalidInput("turning-point bounds need p = 1");
  }
}

BoundReport base_report(BoundVariant v, const BoundConstants &bc, const EpsSelection &e)
{
  BoundReport r;
  r.variant = v;
  r.constants = bc;
  r.eps = e;
  r.winners = {v, v, v};
  r.exceptional_bound = kInf;
  return r;
}

// Cumulative integral of 1/sqrt(p) on a fixed node set, GK15 within a panel.
class InverseSqrtIntegral
{
public:
  InverseSqrtIntegral(const Fn1D &p, Interval iv, const Quadrature &quad, int panels = 1024)
      : p_(p)
  {
    for (int i = 0; i <= panels; i++)
    {
      nodes_.push_back(iv.a + iv.length() * i / panels);
    }
    const auto br = p.breakpoints(iv.a, iv.b);
    nodes_.insert(nodes_.end(), br.begin(), br.end());
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    cumulative_.assign(nodes_.size(), 0.0);
    for (std::size_t i = 1; i < nodes_.size(); i++)
    {
      cumulative_[i] = cumulative_[i - 1] +
                       quad.integrate([&](double x) { return density(x); }, nodes_[i - 1],
                                      nodes_[i]);
    }
  }

  double density(double x) const
  {
    const double pv = p_(x);
    if (!(pv > 0.0))
    {
      throw InvalidInput("p must be positive");
    }
    return 1.0 / std::sqrt(pv);
  }

  // integral from a to x
  double operator()(double x) const
  {
    if (x <= nodes_.front())
    {
      return 0.0;
    }
    if (x >= nodes_.back())
    {
      return cumulative_.back();
    }
    const auto k =
        static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), x) -
                                 nodes_.begin()) -
        1;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const double lo = nodes_[k];
    if (x == lo)
    {
      return cumulative_[k];
    }
    return cumulative_[k] + GK::integrate([&](double t) { return density(t); }, lo, x, 0);
  }

  double total() const { return cumulative_.back(); }

private:
  Fn1D p_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

}  // namespace

BoundConstants constants_from(double c_D, const WeightedNorms &n)
{
  if (!(c_D >= 0.0) || !std::isfinite(c_D))
  {
    throw InvalidInput("c(D) must be finite and nonnegative");
  }
  if (!(n.p_inv_l1 > 0.0))
  {
    throw InvalidInput("||1/p||_1 must be positive");
  }
  BoundConstants bc;
  bc.c_D = c_D;
  bc.norms = n;
  bc.alpha = c_D + n.q_minus_l1;
  const double ip = 1.0 / n.p_inv_l1;
  bc.beta = std::sqrt(bc.alpha * (ip + bc.alpha)) + bc.alpha;
  bc.gamma = std::sqrt(2.0 * bc.beta + ip);
  if (std::abs(n.w_integral) >= 1e-12 * n.w_l1 && n.w_integral != 0.0)
  {
    bc.delta = 2.0 + 2.0 * n.w_l1 / std::abs(n.w_integral);
  }
  return bc;
}

BoundConstants compute_constants(const Coefficients &c, const SelfadjointDomain &d,
                                 const Quadrature &quad)
{
  return constants_from(c_of_domain(d), norms(c, quad));
}

std::string to_string(GProvenance p)
{
  switch (p)
  {
  case GProvenance::ConstructedFtp:
    return "constructed_turning_points";
  case GProvenance::UserSupplied:
    return "user";
  case GProvenance::Lifted:
    return "lifted";
  }
  return "unknown";
}

double sup_norm(const Fn1D &f, Interval iv, long samples)
{
  if (samples < 2)
  {
    samples = 2;
  }
  const double h = iv.length() / static_cast<double>(samples);
  std::vector<std::pair<double, double>> peaks;  // (|f|, x) at sampled local maxima
  double prev2 = -1.0, prev1 = std::abs(f(iv.a));
  peaks.emplace_back(prev1, iv.a);
  for (long i = 1; i <= samples; i++)
  {
    const double x = i == samples ? iv.b : iv.a + static_cast<double>(i) * h;
    const double v = std::abs(f(x));
    if (!std::isfinite(v))
    {
      throw InvalidInput("non-finite function value at x = " + std::to_string(x));
    }
    if (prev1 >= v && prev1 >= prev2)
    {
      peaks.emplace_back(prev1, x - h);
    }
    prev2 = prev1;
    prev1 = v;
  }
  peaks.emplace_back(prev1, iv.b);
  std::sort(peaks.begin(), peaks.end(), std::greater<>());
  double best = peaks.front().first;
  const std::size_t refine = std::min<std::size_t>(peaks.size(), 8);
  for (std::size_t i = 0; i < refine; i++)
  {
    const double lo = std::max(iv.a, peaks[i].second - h);
    const double hi = std::min(iv.b, peaks[i].second + h);
    if (!(lo < hi))
    {
      continue;
    }
    const auto r = boost::math::tools::brent_find_minima(
        [&](double x) { return -std::abs(f(x)); }, lo, hi, 52);
    best = std::max(best, -r.second);
  }
  return best;
}

AdmissibleG make_admissible_g(Fn1D g, Fn1D g_prime, GProvenance provenance,
                              const Coefficients &c, const Quadrature &quad)
{
  const auto iv = c.interval();
  AdmissibleG out;
  out.g_inf_norm = sup_norm(g, iv);
  out.g_prime_p2_norm = weighted_l2_norm(g_prime, c.p(), 1, iv, quad);
  out.g_prime_l2_norm = weighted_l2_norm(g_prime, Fn1D::constant(1.0), 1, iv, quad);
  out.g_a = g(iv.a);
  out.g_b = g(iv.b);
  out.provenance = provenance;
  out.g = std::move(g);
  out.g_prime = std::move(g_prime);
  return out;
}

AdmissibleG construct_g_ftp(const std::vector<double> &turning_points, double gamma,
                            const std::vector<int> &signs, const Coefficients &c,
                            const Quadrature &quad)
{
  const auto iv = c.interval();
  const std::size_t n = turning_points.size();
  if (signs.size() != n + 1)
  {
    throw InvalidInput("need one sign per interval between turning points");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma))
  {
    throw InvalidInput("gamma must be positive");
  }
  std::vector<double> edges{iv.a};
  for (double t : turning_points)
  {
    if (!(t > edges.back()) || !(t < iv.b))
    {
      throw InvalidInput("turning points must be increasing and interior");
    }
    edges.push_back(t);
  }
  edges.push_back(iv.b);
  for (int s : signs)
  {
    if (s != 1 && s != -1)
    {
      throw InvalidInput("interval signs must be +1 or -1");
    }
  }

  const double nu = 1.0 / (8.0 * static_cast<double>(n + 1) * gamma * gamma);
  std::vector<double> breaks(edges.begin() + 1, edges.end() - 1);
  for (std::size_t k = 0; k + 1 < edges.size(); k++)
  {
    if (edges[k + 1] - edges[k] >= 2.0 * nu)
    {
      breaks.push_back(edges[k] + nu);
      breaks.push_back(edges[k + 1] - nu);
    }
  }
  std::sort(breaks.begin(), breaks.end());

  auto locate = [edges](double x)
  {
    auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) -
                                      edges.begin());
    k = std::clamp<std::size_t>(k, 1, edges.size() - 1);
    return k - 1;
  };
  auto value = [edges, signs, nu, locate](double x)
  {
    if (x <= edges.front() || x >= edges.back())
    {
      return 0.0;
    }
    const std::size_t k = locate(x);
    const double l = edges[k], r = edges[k + 1];
    double v;
    if (r - l >= 2.0 * nu)
    {
      v = std::min({1.0, (x - l) / nu, (r - x) / nu});
    }
    else
    {
      v = (x - l) * (r - x) / (2.0 * nu * nu);
    }
    return signs[k] * std::max(0.0, v);
  };
  auto slope = [edges, signs, nu, locate](double x)
  {
    if (x < edges.front() || x > edges.back())
    {
      return 0.0;
    }
    const std::size_t k = locate(x);
    const double l = edges[k], r = edges[k + 1];
    double d;
    if (r - l >= 2.0 * nu)
    {
      d = x < l + nu ? 1.0 / nu : (x > r - nu ? -1.0 / nu : 0.0);
    }
    else
    {
      d = (l + r - 2.0 * x) / (2.0 * nu * nu);
    }
    return signs[k] * d;
  };

  Fn1D gp = Fn1D::custom({slope, breaks, false, "turning-point g'", {}});
  Fn1D g = Fn1D::custom({value, breaks, false, "turning-point g", slope});
  auto out = make_admissible_g(std::move(g), std::move(gp), GProvenance::ConstructedFtp, c, quad);
  out.nu = nu;
  return out;
}

double lift_balance_point(const Fn1D &p, Interval iv, const Quadrature &quad)
{
  const InverseSqrtIntegral I(p, iv, quad);
  const double half = 0.5 * I.total();
  double lo = iv.a, hi = iv.b;
  while (hi - lo > 1e-12 * std::max(1.0, iv.length()))
  {
    const double mid = 0.5 * (lo + hi);
    (I(mid) < half ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

AdmissibleG lift_g_endpoints(const Fn1D &g_tilde, const Fn1D &g_tilde_prime,
                             const Coefficients &c, const Quadrature &quad)
{
  const auto iv = c.interval();
  auto I = std::make_shared<const InverseSqrtIntegral>(c.p(), iv, quad);
  const double x0 = lift_balance_point(c.p(), iv, quad);
  const double ix0 = (*I)(x0);
  auto h = [I, x0, ix0](double x) { return x <= x0 ? (*I)(x) : 2.0 * ix0 - (*I)(x); };
  auto hp = [I, x0](double x) { return (x < x0 ? 1.0 : -1.0) * I->density(x); };

  std::vector<double> breaks = g_tilde.breakpoints(iv.a, iv.b);
  const auto pb = c.p().breakpoints(iv.a, iv.b);
  breaks.insert(breaks.end(), pb.begin(), pb.end());
  breaks.push_back(x0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const bool osc = g_tilde.oscillates_at_zero() || g_tilde_prime.oscillates_at_zero();

  auto gv = [h, gt = g_tilde](double x) { return h(x) * gt(x); };
  auto gd = [h, hp, gt = g_tilde, gtp = g_tilde_prime](double x)
  { return hp(x) * gt(x) + h(x) * gtp(x); };
  Fn1D gp = Fn1D::custom({gd, breaks, osc, "lifted g'", {}});
  Fn1D g = Fn1D::custom({gv, breaks, osc, "lifted g", gd});
  auto out = make_admissible_g(std::move(g), std::move(gp), GProvenance::Lifted, c, quad);
  out.lift_x0 = x0;
  return out;
}

GDiagnostics validate_g(const AdmissibleG &g, const Coefficients &c,
                        const GValidationOptions &options)
{
  const auto iv = c.interval();
  GDiagnostics d;
  d.g_a = g.g(iv.a);
  d.g_b = g.g(iv.b);
  d.g_inf_norm = g.g_inf_norm;
  d.g_prime_p2_norm = g.g_prime_p2_norm;
  d.passed = true;
  const double end_tol = options.endpoint_tol * std::max(1.0, g.g_inf_norm);
  if (std::abs(d.g_a) > end_tol || std::abs(d.g_b) > end_tol)
  {
    d.passed = false;
    std::ostringstream os;
    os << "g does not vanish at the endpoints: g(a) = " << d.g_a << ", g(b) = " << d.g_b;
    d.messages.push_back(os.str());
  }
  const long m = std::max<long>(options.samples, 1);
  const double h = iv.length() / static_cast<double>(m);
  long bad = 0;
  for (long i = 0; i < m; i++)
  {
    const double x = iv.a + (static_cast<double>(i) + 0.5) * h;
    const double gw = g.g(x) * c.w()(x);
    if (!(gw > 0.0))
    {
      bad++;
      if (d.violations.size() < 8)
      {
        d.violations.push_back(x);
      }
    }
  }
  d.violating_fraction = static_cast<double>(bad) / static_cast<double>(m);
  if (d.violating_fraction > options.max_violating_fraction)
  {
    d.passed = false;
    std::ostringstream os;
    os << "g w <= 0 on a sampled fraction " << d.violating_fraction << " of the interval";
    d.messages.push_back(os.str());
  }
  if (!std::isfinite(g.g_inf_norm) || !std::isfinite(g.g_prime_p2_norm))
  {
    d.passed = false;
    d.messages.push_back("g or g' norm is not finite");
  }
  return d;
}

EpsSelection find_eps_sampled(const SublevelSampler &s, double threshold, double resolution)
{
  // An infinite threshold (alpha = 0) is met by every eps.
  if (!(threshold > 0.0))
  {
    throw InvalidInput("eps threshold must be positive");
  }
  if (!(resolution > 0.0))
  {
    throw InvalidInput("eps resolution must be positive");
  }
  EpsSelection e;
  e.threshold = threshold;
  e.search_resolution = resolution;
  e.sup = s.sup();
  e.total_measure = s.total();
  if (!(e.sup > 0.0))
  {
    throw Unsatisfiable("the sublevel function is nowhere positive; no eps exists");
  }
  double lo = 1e-14 * e.sup;
  if (s.measure(lo) > threshold)
  {
    std::ostringstream os;
    os << "measure at eps = " << lo << " is " << s.measure(lo) << " > threshold " << threshold;
    throw Unsatisfiable(os.str());
  }
  if (e.total_measure <= threshold)
  {
    e.capped = true;
    e.eps = e.sup;
  }
  else if (s.measure(e.sup) <= threshold)
  {
    e.eps = e.sup;
  }
  else
  {
    double hi = e.sup;
    while (hi > lo * (1.0 + resolution))
    {
      const double mid = std::sqrt(lo * hi);
      (s.measure(mid) <= threshold ? lo : hi) = mid;
    }
    e.eps = lo;
  }
  e.measure_at_eps = s.measure(e.eps);
  return e;
}

EpsSelection find_eps(const Coefficients &c, const AdmissibleG &g, double threshold,
                      const EpsSearchOptions &options)
{
  const Fn1D &p = c.p(), &w = c.w();
  const Fn1D &gf = g.g;
  const SublevelSampler s([&](double x) { return p(x) * gf(x) * w(x); },
                          [&](double x) { return 1.0 / p(x); }, c.interval(), options.panels);
  auto e = find_eps_sampled(s, threshold, options.resolution);
  e.measured = "pgw/(1/p)";
  return e;
}

EpsSelection find_eps_abs_weight(const Coefficients &c, double threshold,
                                 const EpsSearchOptions &options)
{
  const Fn1D &w = c.w();
  const SublevelSampler s([&](double x) { return std::abs(w(x)); },
                          [](double) { return 1.0; }, c.interval(), options.panels);
  auto e = find_eps_sampled(s, threshold, options.resolution);
  e.measured = "|w|/1";
  return e;
}

std::string to_string(BoundVariant v)
{
  switch (v)
  {
  case BoundVariant::GeneralG:
    return "general_g";
  case BoundVariant::NonzeroIntegral:
    return "nonzero_integral";
  case BoundVariant::TurningPoints:
    return "turning_points";
  case BoundVariant::TurningPointsIntegral:
    return "turning_points_integral";
  case BoundVariant::Exceptional:
    return "exceptional";
  case BoundVariant::CombinedMin:
    return "combined";
  }
  return "unknown";
}

double threshold_general_g(const BoundConstants &bc)
{
  return 1.0 / (2.0 * bc.gamma * bc.gamma);
}

double threshold_nonzero_integral(const BoundConstants &bc)
{
  if (!bc.delta)
  {
    throw InvalidInput("this bound needs int w != 0");
  }
  return 1.0 / (2.0 * bc.alpha * *bc.delta * *bc.delta);
}

double threshold_turning_points(const BoundConstants &bc)
{
  return 1.0 / (4.0 * bc.gamma * bc.gamma);
}

double threshold_turning_points_integral(const BoundConstants &bc)
{
  if (!bc.delta)
  {
    throw InvalidInput("this bound needs int w != 0");
  }
  return 1.0 / (4.0 * bc.alpha * *bc.delta * *bc.delta);
}

BoundReport bounds_general_g(const BoundConstants &bc, const AdmissibleG &g,
                             const EpsSelection &e)
{
  require_positive_eps(e);
  require_threshold(e, threshold_general_g(bc));
  auto r = base_report(BoundVariant::GeneralG, bc, e);
  const double k = 2.0 / e.eps;
  const double bg = bc.beta * bc.gamma * g.g_prime_p2_norm;
  r.im_bound = k * bg;
  r.re_bound =
      k * (bg + (bc.beta * bc.beta + bc.gamma * bc.gamma * bc.norms.q_l1) * g.g_inf_norm);
  r.exceptional_bound = bound_exceptional(bc, g, e);
  r.g_inf_norm = g.g_inf_norm;
  r.g_prime_p2_norm = g.g_prime_p2_norm;
  return r;
}

BoundReport bounds_nonzero_integral(const BoundConstants &bc, const AdmissibleG &g,
                                    const EpsSelection &e)
{
  require_positive_eps(e);
  require_threshold(e, threshold_nonzero_integral(bc));
  auto r = base_report(BoundVariant::NonzeroIntegral, bc, e);
  const double k = 2.0 / e.eps;
  const double a = bc.alpha, d2 = *bc.delta * *bc.delta;
  r.im_bound = k * std::pow(a, 1.5) * d2 * g.g_prime_p2_norm;
  r.re_bound = k * a * d2 *
               (std::sqrt(a) * g.g_prime_p2_norm + (a + bc.norms.q_l1) * g.g_inf_norm);
  r.g_inf_norm = g.g_inf_norm;
  r.g_prime_p2_norm = g.g_prime_p2_norm;
  return r;
}

BoundReport bounds_turning_points(const BoundConstants &bc, int n, const EpsSelection &e,
                                  const Coefficients &c)
{
  require_unit_p(c);
  if (n < 0)
  {
    throw InvalidInput("turning point count must be nonnegative");
  }
  require_positive_eps(e);
  require_threshold(e, threshold_turning_points(bc));
  auto r = base_report(BoundVariant::TurningPoints, bc, e);
  const double np1 = n + 1.0;
  const double bg2 = bc.beta * bc.gamma * bc.gamma;
  r.im_bound = (8.0 / e.eps) * bg2 * np1;
  r.re_bound = (2.0 / e.eps) * (4.0 * bg2 * np1 + bc.beta * bc.beta +
                                bc.gamma * bc.gamma * bc.norms.q_l1);
  r.turning_point_count = n;
  return r;
}

BoundReport bounds_turning_points_integral(const BoundConstants &bc, int n,
                                           const EpsSelection &e, const Coefficients &c)
{
  require_unit_p(c);
  if (!bc.delta)
  {
    throw InvalidInput("this bound needs int w != 0");
  }
  if (!(c.positive_measure() > 0.0 && c.negative_measure() > 0.0) || !(*bc.delta > 4.0))
  {
    throw InvalidInput("this bound needs an indefinite weight");
  }
  if (n < 0)
  {
    throw InvalidInput("turning point count must be nonnegative");
  }
  require_positive_eps(e);
  require_threshold(e, threshold_turning_points_integral(bc));
  auto r = base_report(BoundVariant::TurningPointsIntegral, bc, e);
  const double np1 = n + 1.0;
  const double a = bc.alpha, d = *bc.delta;
  r.im_bound = (8.0 / e.eps) * a * a * d * d * d * np1;
  r.re_bound = (2.0 / e.eps) * a * d * d * (4.0 * a * d * np1 + a + bc.norms.q_l1);
  r.turning_point_count = n;
  return r;
}

double bound_exceptional(const BoundConstants &bc, const AdmissibleG &g, const EpsSelection &e)
{
  require_positive_eps(e);
  require_threshold(e, threshold_general_g(bc));
  return (2.0 / e.eps) *
         (bc.beta * bc.gamma * g.g_prime_p2_norm +
          (bc.beta * bc.beta + bc.gamma * bc.gamma * bc.norms.q_l1) * g.g_inf_norm);
}

BoundReport best_bounds(const std::vector<BoundReport> &reports)
{
  if (reports.empty())
  {
    throw InvalidInput("best_bounds needs at least one report");
  }
  BoundReport r = reports.front();
  r.variant = BoundVariant::CombinedMin;
  r.winners = {reports.front().variant, reports.front().variant, reports.front().variant};
  for (const auto &x : reports)
  {
    if (x.im_bound < r.im_bound)
    {
      r.im_bound = x.im_bound;
      r.winners[0] = x.variant;
    }
    if (x.re_bound < r.re_bound)
    {
      r.re_bound = x.re_bound;
      r.winners[1] = x.variant;
    }
    if (x.exceptional_bound < r.exceptional_bound)
    {
      r.exceptional_bound = x.exceptional_bound;
      r.winners[2] = x.variant;
    }
  }
  return r;
}

bool is_unit_function(const Fn1D &p, Interval iv)
{
  if (const auto *k = p.as<Fn1D::Constant>())
  {
    return k->value == 1.0;
  }
  constexpr int samples = 4096;
  for (int i = 0; i <= samples; i++)
  {
    const double x = iv.a + iv.length() * i / samples;
    if (std::abs(p(x) - 1.0) > 1e-14)
    {
      return false;
    }
  }
  return true;
}

}  // namespace isl
