#include "isl/quadrature.hpp"

#include <numbers>

namespace isl
{

namespace
{

// Breaks for the positive half-line part [lo, hi] with 0 <= lo < hi.
void positive_side_breaks(double lo, double hi, const QuadratureOptions &options,
                          std::vector<double> &breaks)
{
  constexpr double pi = std::numbers::pi;
  const double osc_floor = std::max(options.oscillation_floor, options.singular_floor);

  // Zeros 1/(k pi) of sin(1/x) with osc_floor <= x < hi.
  if (hi > osc_floor)
  {
    const double k_first = std::ceil(1.0 / (pi * hi));
    const double k_last = std::floor(1.0 / (pi * std::max(lo, osc_floor)));
    for (double k = std::max(k_first, 1.0); k <= k_last; k += 1.0)
    {
      const double x = 1.0 / (k * pi);
      if (x > lo && x < hi)
      {
        breaks.push_back(x);
      }
    }
  }

  // Geometric refinement below the last resolved zero.
  double x = std::min(hi, osc_floor);
  while (x > options.singular_floor && x > lo)
  {
    if (x < hi)
    {
      breaks.push_back(x);
    }
    x *= options.geometric_ratio;
  }
  if (options.singular_floor > lo && options.singular_floor < hi)
  {
    breaks.push_back(options.singular_floor);
  }
}

}  // namespace

void append_oscillation_breaks(double lo, double hi, const QuadratureOptions &options,
                               std::vector<double> &breaks)
{
  if (hi > 0.0)
  {
    positive_side_breaks(std::max(lo, 0.0), hi, options, breaks);
  }
  if (lo < 0.0)
  {
    std::vector<double> mirrored;
    positive_side_breaks(std::max(-hi, 0.0), -lo, options, mirrored);
    for (double x : mirrored)
    {
      breaks.push_back(-x);
    }
  }
  if (lo < 0.0 && hi > 0.0)
  {
    breaks.push_back(0.0);
  }
}

}  // namespace isl
