#pragma once

#include <functional>
#include <vector>

#include "isl/fn1d.hpp"
#include "isl/quadrature.hpp"

namespace isl
{

struct Interval
{
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
};

// The coefficient triple of -(p f')' + q f = lambda w f on a bounded interval.
//
// Construction validates the standing assumptions at sample points (Gauss-Kronrod
// nodes of a uniform panel grid): p > 0, w nonzero off a null set of samples, and
// both {w > 0} and {w < 0} of positive estimated measure. These "almost everywhere"
// conditions cannot be decided for black-box functions; a sampled check is all we do.
class Coefficients
{
public:
  Coefficients(Interval interval, Fn1D p, Fn1D q, Fn1D w, int validation_panels = 2000);

  const Interval &interval() const { return interval_; }
  const Fn1D &p() const { return p_; }
  const Fn1D &q() const { return q_; }
  const Fn1D &w() const { return w_; }

  // Estimated Lebesgue measures of {w > 0} and {w < 0}.
  double positive_measure() const { return positive_measure_; }
  double negative_measure() const { return negative_measure_; }

private:
  Interval interval_;
  Fn1D p_, q_, w_;
  double positive_measure_ = 0.0;
  double negative_measure_ = 0.0;
};

struct WeightedNorms
{
  double q_minus_l1 = 0.0;  // || min(0, q) ||_1
  double p_inv_l1 = 0.0;    // || 1/p ||_1
  double q_l1 = 0.0;        // || q ||_1
  double w_l1 = 0.0;        // || w ||_1
  double w_integral = 0.0;  // integral of w
};

WeightedNorms norms(const Coefficients &c, const Quadrature &quad = Quadrature{});

// (integral of weight^power |f|^2)^(1/2) over the interval; power is +1 or -1.
double weighted_l2_norm(const Fn1D &f, const Fn1D &weight, int power, Interval interval,
                        const Quadrature &quad = Quadrature{});

struct TurningPoints
{
  // False when sign changes accumulate (e.g. sin(1/x) at 0) and cannot be listed.
  bool enumerable = true;
  std::vector<double> points;
};

// Interior points where w changes sign. Throws InvalidInput when w vanishes on a
// subinterval.
TurningPoints turning_points(const Fn1D &w, Interval interval);

// Sign of w on each interval between consecutive turning points (n + 1 entries).
std::vector<int> interval_signs(const Fn1D &w, Interval interval,
                                const std::vector<double> &points);

struct SublevelOptions
{
  long panels = 200000;
  // Accept when the measure at panels and 2*panels agree to this relative tolerance.
  double agreement_tol = 1e-4;
  int max_doublings = 3;
};

// Panel-sampled distribution of a function f against a weight: for each of `panels`
// uniform panels, f at the panel midpoint and the weight mass of the panel. Answers
// measure({f < eps}) queries in O(log panels), nondecreasing in eps.
class SublevelSampler
{
public:
  SublevelSampler(const std::function<double(double)> &f,
                  const std::function<double(double)> &weight, Interval interval, long panels);

  double measure(double eps) const;
  double total() const { return prefix_.back(); }
  double sup() const { return values_.back(); }
  double inf() const { return values_.front(); }
  long panels() const { return static_cast<long>(values_.size()); }

private:
  std::vector<double> values_;  // sorted midpoint values
  std::vector<double> prefix_;  // prefix_[i] = mass of the i smallest values
};

struct SublevelResult
{
  double measure = 0.0;
  double measure_fine = 0.0;  // at twice the final panel count
  long panels = 0;
  bool converged = false;
};

// mu_weight({x in [a, b] : f(x) < eps}) with a resolution-doubling agreement check.
SublevelResult sublevel_measure(const std::function<double(double)> &f,
                                const std::function<double(double)> &weight, Interval interval,
                                double eps, const SublevelOptions &options = {});

}  // namespace isl
