#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isl/error.hpp"

namespace isl
{

struct QuadratureOptions
{
  // Absolute error target per unit length of the integration range.
  double abs_tol_per_length = 1e-10;
  int max_depth = 40;
  // Panels are also accepted once the error estimate is below this multiple of the
  // panel's L1 mass (round-off floor).
  double rel_tol = 1e-13;
  // Rule applications allowed per top-level panel; past this, panels are accepted as is.
  long max_panel_rules = 4096;
  // Panels near an oscillatory singularity at x = 0: zeros of sin(1/x) are used as
  // panel boundaries down to |x| = oscillation_floor, then geometric refinement with
  // ratio geometric_ratio until |x| = singular_floor.
  double oscillation_floor = 1e-6;
  double geometric_ratio = 0.5;
  double singular_floor = 1e-9;
};

struct QuadratureStats
{
  long panels = 0;
  long evaluations = 0;
  long unconverged_panels = 0;
  double error_estimate = 0.0;
};

// Composite adaptive Gauss-Kronrod (7/15) quadrature with caller-supplied panel
// boundaries. Every break strictly inside (lo, hi) starts a new panel.
class Quadrature
{
public:
  explicit Quadrature(QuadratureOptions options = {}) : options_(options) {}

  const QuadratureOptions &options() const { return options_; }

  template <class F>
  double integrate(F &&f, double lo, double hi, std::span<const double> breaks = {},
                   QuadratureStats *stats = nullptr) const
  {
    if (!(lo <= hi))
    {
      throw InvalidInput("integration range is reversed: [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    }
    if (lo == hi)
    {
      return 0.0;
    }
    std::vector<double> nodes;
    nodes.reserve(breaks.size() + 2);
    nodes.push_back(lo);
    for (double x : breaks)
    {
      if (x > lo && x < hi)
      {
        nodes.push_back(x);
      }
    }
    nodes.push_back(hi);
    std::sort(nodes.begin() + 1, nodes.end() - 1);
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const double tol_density = options_.abs_tol_per_length;
    double sum = 0.0, comp = 0.0;  // Kahan summation across panels
    for (std::size_t i = 0; i + 1 < nodes.size(); i++)
    {
      const double a = nodes[i], b = nodes[i + 1];
      long budget = options_.max_panel_rules;
      const double v = adaptive(f, a, b, tol_density * (b - a), 0, budget, stats);
      const double y = v - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return sum;
  }

private:
  template <class F>
  double adaptive(F &f, double a, double b, double tol, int depth, long &budget,
                  QuadratureStats *stats) const
  {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto checked = [&](double x)
    {
      const double v = f(x);
      if (!std::isfinite(v))
      {
        throw InvalidInput("non-finite integrand value at x = " + std::to_string(x));
      }
      return v;
    };
    double err = 0.0, l1 = 0.0;
    const double value = GK::integrate(checked, a, b, 0, 0.0, &err, &l1);
    // Boost reports the single-panel error on the reference interval [-1, 1].
    err *= 0.5 * (b - a);
    budget--;
    if (stats)
    {
      stats->evaluations += 15;
    }
    const double mid = 0.5 * (a + b);
    if (err <= tol || err <= options_.rel_tol * l1 || depth >= options_.max_depth || budget <= 0 ||
        !(mid > a && mid < b))
    {
      if (stats)
      {
        stats->panels++;
        stats->error_estimate += err;
        if (err > tol && err > options_.rel_tol * l1)
        {
          stats->unconverged_panels++;
        }
      }
      return value;
    }
    return adaptive(f, a, mid, 0.5 * tol, depth + 1, budget, stats) +
           adaptive(f, mid, b, 0.5 * tol, depth + 1, budget, stats);
  }

  QuadratureOptions options_;
};

// Appends panel boundaries inside (lo, hi) that resolve sin(1/x)-type oscillation
// accumulating at x = 0.
void append_oscillation_breaks(double lo, double hi, const QuadratureOptions &options,
                             std::vector<double> &breaks);

}  // namespace isl
