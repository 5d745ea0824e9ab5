#include "isl/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "isl/error.hpp"

namespace isl
{

namespace
{

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

void require_interval(Interval iv)
{
  if (!std::isfinite(iv.a) || !std::isfinite(iv.b) || !(iv.a < iv.b))
  {
    throw InvalidInput("interval must be bounded with a < b");
  }
}

// Sign of f on (lo, hi) by majority over interior samples; 0 if f vanishes there.
int dominant_sign(const Fn1D &f, double lo, double hi)
{
  constexpr int samples = 9;
  int total = 0;
  for (int i = 0; i < samples; i++)
  {
    const double x = lo + (hi - lo) * (i + 0.5) / samples;
    total += sign_of(f(x));
  }
  return sign_of(static_cast<double>(total));
}

double refine_root(const Fn1D &f, double lo, double hi)
{
  using boost::math::tools::eps_tolerance;
  std::uintmax_t iters = 200;
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0)
  {
    return lo;
  }
  if (fhi == 0.0)
  {
    return hi;
  }
  const auto r = boost::math::tools::toms748_solve([&](double x) { return f(x); }, lo, hi, flo,
                                                   fhi, eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// Sign changes of f located on a uniform sampling grid and refined by bracketing.
void sampled_sign_changes(const Fn1D &f, double lo, double hi, int samples,
                          std::vector<double> &out)
{
  double x_prev = lo, f_prev = f(lo);
  int zero_run = f_prev == 0.0 ? 1 : 0;
  for (int i = 1; i <= samples; i++)
  {
    const double x = lo + (hi - lo) * i / samples;
    const double fx = f(x);
    if (fx == 0.0)
    {
      if (++zero_run >= 2)
      {
        throw InvalidInput("weight vanishes on a subinterval near x = " + std::to_string(x));
      }
    }
    else
    {
      zero_run = 0;
    }
    if (sign_of(f_prev) * sign_of(fx) < 0)
    {
      out.push_back(refine_root(f, x_prev, x));
    }
    else if (fx == 0.0 && i < samples)
    {
      out.push_back(x);
    }
    x_prev = x;
    f_prev = fx;
  }
}

struct Candidates
{
  bool enumerable = true;
  std::vector<double> points;
};

void collect_candidates(const Fn1D &w, double lo, double hi, Candidates &c)
{
  struct Visitor
  {
    const Fn1D &w;
    double lo, hi;
    Candidates &c;

    void operator()(const Fn1D::Constant &k) const
    {
      if (k.value == 0.0)
      {
        throw InvalidInput("weight vanishes identically on a subinterval");
      }
    }
    void operator()(const Fn1D::Polynomial &p) const
    {
      if (std::all_of(p.coeffs.begin(), p.coeffs.end(), [](double v) { return v == 0.0; }))
      {
        throw InvalidInput("weight vanishes identically on a subinterval");
      }
      const int samples = 4096 + 64 * static_cast<int>(p.coeffs.size());
      sampled_sign_changes(w, lo, hi, samples, c.points);
    }
    void operator()(const Fn1D::Piecewise &p) const
    {
      for (std::size_t i = 0; i < p.pieces.size(); i++)
      {
        const double plo = i == 0 ? lo : std::max(lo, p.breaks[i - 1]);
        const double phi = i == p.breaks.size() ? hi : std::min(hi, p.breaks[i]);
        if (plo < phi)
        {
          collect_candidates(p.pieces[i], plo, phi, c);
        }
      }
      for (double x : p.breaks)
      {
        if (x > lo && x < hi)
        {
          c.points.push_back(x);
        }
      }
    }
    void operator()(const Fn1D::ScaledOscillator &s) const
    {
      if (s.scale == 0.0)
      {
        throw InvalidInput("weight vanishes identically on a subinterval");
      }
      if (lo <= 0.0 && hi >= 0.0)
      {
        c.enumerable = false;
        return;
      }
      const double pi = std::acos(-1.0);
      const double alo = std::min(std::abs(lo), std::abs(hi));
      const double ahi = std::max(std::abs(lo), std::abs(hi));
      const double sgn = lo > 0.0 ? 1.0 : -1.0;
      for (double k = std::ceil(1.0 / (pi * ahi)); k <= std::floor(1.0 / (pi * alo)); k += 1.0)
      {
        const double x = sgn / (k * pi);
        if (x > lo && x < hi)
        {
          c.points.push_back(x);
        }
      }
    }
    void operator()(const Fn1D::SignStep &s) const
    {
      if (s.x0 > lo && s.x0 < hi)
      {
        c.points.push_back(s.x0);
      }
    }
    void operator()(const Fn1D::Table &t) const
    {
      std::vector<double> xs{lo};
      for (double x : t.x)
      {
        if (x > lo && x < hi)
        {
          xs.push_back(x);
        }
      }
      xs.push_back(hi);
      for (std::size_t i = 0; i + 1 < xs.size(); i++)
      {
        const double f0 = w(xs[i]), f1 = w(xs[i + 1]);
        if (f0 == 0.0 && f1 == 0.0)
        {
          throw InvalidInput("weight table vanishes on [" + std::to_string(xs[i]) + ", " +
                             std::to_string(xs[i + 1]) + "]");
        }
        if (sign_of(f0) * sign_of(f1) < 0)
        {
          c.points.push_back(xs[i] + (xs[i + 1] - xs[i]) * f0 / (f0 - f1));
        }
        else if (f1 == 0.0 && i + 2 < xs.size())
        {
          c.points.push_back(xs[i + 1]);
        }
      }
    }
    void operator()(const Fn1D::Custom &cu) const
    {
      if (cu.oscillates_at_zero && lo <= 0.0 && hi >= 0.0)
      {
        c.enumerable = false;
        return;
      }
      sampled_sign_changes(w, lo, hi, 16384, c.points);
      for (double x : cu.breaks)
      {
        if (x > lo && x < hi)
        {
          c.points.push_back(x);
        }
      }
    }
  };
  std::visit(Visitor{w, lo, hi, c}, w.kind());
}

}  // namespace

Coefficients::Coefficients(Interval interval, Fn1D p, Fn1D q, Fn1D w, int validation_panels)
    : interval_(interval), p_(std::move(p)), q_(std::move(q)), w_(std::move(w))
{
  require_interval(interval_);
  if (validation_panels < 1)
  {
    throw InvalidInput("validation_panels must be positive");
  }
  const auto &abscissa = GK15::abscissa();
  const auto &weights = GK15::weights();
  const double h = interval_.length() / validation_panels;
  for (int k = 0; k < validation_panels; k++)
  {
    const double mid = interval_.a + (k + 0.5) * h;
    int zeros = 0;
    auto check = [&](double x, double wt)
    {
      const double pv = p_(x), qv = q_(x), wv = w_(x);
      if (!std::isfinite(pv) || !std::isfinite(qv) || !std::isfinite(wv))
      {
        throw InvalidInput("non-finite coefficient value at x = " + std::to_string(x));
      }
      if (!(pv > 0.0))
      {
        throw InvalidInput("p must be positive; p(" + std::to_string(x) +
                           ") = " + std::to_string(pv));
      }
      if (wv > 0.0)
      {
        positive_measure_ += 0.5 * h * wt;
      }
      else if (wv < 0.0)
      {
        negative_measure_ += 0.5 * h * wt;
      }
      else
      {
        zeros++;
      }
    };
    for (std::size_t i = 0; i < abscissa.size(); i++)
    {
      check(mid + 0.5 * h * abscissa[i], weights[i]);
      if (abscissa[i] != 0.0)
      {
        check(mid - 0.5 * h * abscissa[i], weights[i]);
      }
    }
    if (zeros >= 2)
    {
      throw InvalidInput("w vanishes on a set of positive measure near x = " +
                         std::to_string(mid));
    }
  }
  if (positive_measure_ + negative_measure_ <= 0.0)
  {
    throw InvalidInput("w vanishes identically");
  }
}

WeightedNorms norms(const Coefficients &c, const Quadrature &quad)
{
  const auto [a, b] = c.interval();
  const auto &opt = quad.options();
  const auto pb = c.p().panel_breaks(a, b, opt);
  const auto qb = c.q().panel_breaks(a, b, opt);
  const auto wb = c.w().panel_breaks(a, b, opt);
  const Fn1D &p = c.p(), &q = c.q(), &w = c.w();

  WeightedNorms n;
  n.q_minus_l1 = quad.integrate([&](double x) { return std::max(0.0, -q(x)); }, a, b, qb);
  n.q_l1 = quad.integrate([&](double x) { return std::abs(q(x)); }, a, b, qb);
  n.p_inv_l1 = quad.integrate(
      [&](double x)
      {
        const double pv = p(x);
        if (!(pv > 0.0))
        {
          throw InvalidInput("p must be positive at quadrature nodes");
        }
        return 1.0 / pv;
      },
      a, b, pb);
  n.w_l1 = quad.integrate([&](double x) { return std::abs(w(x)); }, a, b, wb);
  n.w_integral = quad.integrate([&](double x) { return w(x); }, a, b, wb);
  return n;
}

double weighted_l2_norm(const Fn1D &f, const Fn1D &weight, int power, Interval interval,
                        const Quadrature &quad)
{
  require_interval(interval);
  if (power != 1 && power != -1)
  {
    throw InvalidInput("weighted_l2_norm power must be +1 or -1");
  }
  const auto breaks =
      merged_panel_breaks({&f, &weight}, interval.a, interval.b, quad.options());
  const double integral = quad.integrate(
      [&](double x)
      {
        const double wv = weight(x);
        const double fv = f(x);
        if (power == -1)
        {
          if (!(wv > 0.0))
          {
            throw InvalidInput("weight must be positive for power -1; weight(" +
                               std::to_string(x) + ") = " + std::to_string(wv));
          }
          return fv * fv / wv;
        }
        return wv * fv * fv;
      },
      interval.a, interval.b, breaks);
  return std::sqrt(std::max(0.0, integral));
}

TurningPoints turning_points(const Fn1D &w, Interval interval)
{
  require_interval(interval);
  Candidates c;
  collect_candidates(w, interval.a, interval.b, c);
  TurningPoints tp;
  if (!c.enumerable)
  {
    tp.enumerable = false;
    return tp;
  }
  auto &pts = c.points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double x, double y)
                        { return std::abs(x - y) <= 1e-14 * interval.length(); }),
            pts.end());

  // Keep only candidates across which the sign actually flips.
  std::vector<double> edges{interval.a};
  edges.insert(edges.end(), pts.begin(), pts.end());
  edges.push_back(interval.b);
  std::vector<int> signs;
  for (std::size_t i = 0; i + 1 < edges.size(); i++)
  {
    const int s = dominant_sign(w, edges[i], edges[i + 1]);
    if (s == 0)
    {
      throw InvalidInput("weight vanishes on [" + std::to_string(edges[i]) + ", " +
                         std::to_string(edges[i + 1]) + "]");
    }
    signs.push_back(s);
  }
  for (std::size_t i = 0; i < pts.size(); i++)
  {
    if (signs[i] != signs[i + 1])
    {
      tp.points.push_back(pts[i]);
    }
  }
  return tp;
}

std::vector<int> interval_signs(const Fn1D &w, Interval interval,
                                const std::vector<double> &points)
{
  std::vector<double> edges{interval.a};
  edges.insert(edges.end(), points.begin(), points.end());
  edges.push_back(interval.b);
  std::vector<int> signs;
  for (std::size_t i = 0; i + 1 < edges.size(); i++)
  {
    const int s = dominant_sign(w, edges[i], edges[i + 1]);
    if (s == 0)
    {
      throw InvalidInput("cannot determine the sign of w on an interval");
    }
    signs.push_back(s);
  }
  return signs;
}

SublevelSampler::SublevelSampler(const std::function<double(double)> &f,
                                 const std::function<double(double)> &weight, Interval interval,
                                 long panels)
{
  require_interval(interval);
  if (panels < 1)
  {
    throw InvalidInput("sublevel sampling needs at least one panel");
  }
  const double h = interval.length() / static_cast<double>(panels);
  const double g = 0.5 / std::sqrt(3.0);  // two-point Gauss offset on a unit panel
  std::vector<std::pair<double, double>> samples(static_cast<std::size_t>(panels));
  for (long i = 0; i < panels; i++)
  {
    const double lo = interval.a + static_cast<double>(i) * h;
    const double mid = lo + 0.5 * h;
    const double v = f(mid);
    const double m = 0.5 * h * (weight(mid - g * h) + weight(mid + g * h));
    if (!std::isfinite(v) || !std::isfinite(m) || m < 0.0)
    {
      throw InvalidInput("invalid sample in sublevel measure near x = " + std::to_string(mid));
    }
    samples[static_cast<std::size_t>(i)] = {v, m};
  }
  std::sort(samples.begin(), samples.end());
  values_.resize(samples.size());
  prefix_.assign(samples.size() + 1, 0.0);
  for (std::size_t i = 0; i < samples.size(); i++)
  {
    values_[i] = samples[i].first;
    prefix_[i + 1] = prefix_[i] + samples[i].second;
  }
}

double SublevelSampler::measure(double eps) const
{
  const auto k = std::lower_bound(values_.begin(), values_.end(), eps) - values_.begin();
  return prefix_[static_cast<std::size_t>(k)];
}

SublevelResult sublevel_measure(const std::function<double(double)> &f,
                                const std::function<double(double)> &weight, Interval interval,
                                double eps, const SublevelOptions &options)
{
  if (!(eps > 0.0))
  {
    throw InvalidInput("sublevel threshold eps must be positive");
  }
  SublevelResult r;
  long panels = options.panels;
  double coarse = SublevelSampler(f, weight, interval, panels).measure(eps);
  for (int d = 0; d <= options.max_doublings; d++)
  {
    const double fine = SublevelSampler(f, weight, interval, 2 * panels).measure(eps);
    r.measure = coarse;
    r.measure_fine = fine;
    r.panels = panels;
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) <= options.agreement_tol * scale || (fine == 0.0 && coarse == 0.0))
    {
      r.converged = true;
      break;
    }
    panels *= 2;
    coarse = fine;
  }
  return r;
}

}  // namespace isl
