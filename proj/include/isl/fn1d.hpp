#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "isl/quadrature.hpp"

namespace isl
{

// A real function of one variable built from a closed set of kinds. Values are shared
// and immutable, so copies are cheap and safe to use from many threads.
class Fn1D
{
public:
  struct Constant
  {
    double value;
  };
  // c0 + c1 x + c2 x^2 + ...
  struct Polynomial
  {
    std::vector<double> coeffs;
  };
  // pieces[i] applies on [breaks[i-1], breaks[i]]; the outer pieces extend to infinity.
  struct Piecewise
  {
    std::vector<double> breaks;
    std::vector<Fn1D> pieces;
  };
  // scale * x^power * sin(1/x); taken as 0 at x = 0.
  struct ScaledOscillator
  {
    double scale;
    double power;
  };
  // sgn(x - x0), with value 0 at x0.
  struct SignStep
  {
    double x0;
  };
  // Linear interpolation, constant extrapolation.
  struct Table
  {
    std::vector<double> x, y;
  };
  // Programmatic function, used for derived quantities (g', lifted g, test fixtures).
  // Not reachable from the config grammar.
  struct Custom
  {
    std::function<double(double)> fn;
    std::vector<double> breaks;
    bool oscillates_at_zero = false;
    std::string label = "custom";
    std::function<double(double)> derivative;
  };

  using Kind =
      std::variant<Constant, Polynomial, Piecewise, ScaledOscillator, SignStep, Table, Custom>;

  Fn1D() : Fn1D(Constant{0.0}) {}

  static Fn1D constant(double value);
  static Fn1D polynomial(std::vector<double> coeffs);
  static Fn1D piecewise(std::vector<double> breaks, std::vector<Fn1D> pieces);
  static Fn1D scaled_oscillator(double scale, double power);
  static Fn1D sign_step(double x0);
  static Fn1D table(std::vector<double> x, std::vector<double> y);
  static Fn1D custom(Custom c);

  double operator()(double x) const;

  const Kind &kind() const { return *kind_; }

  template <class T>
  const T *as() const
  {
    return std::get_if<T>(kind_.get());
  }

  // Kinks and jumps strictly inside (lo, hi), sorted.
  std::vector<double> breakpoints(double lo, double hi) const;

  // Possible jump points strictly inside (lo, hi), sorted: piecewise breaks, sign steps
  // and custom breaks. Table nodes are kinks only and are not included.
  std::vector<double> jumps(double lo, double hi) const;

  // True if some part behaves like sin(1/x) near x = 0.
  bool oscillates_at_zero() const;

  // Quadrature panel boundaries for integrands containing this function.
  std::vector<double> panel_breaks(double lo, double hi, const QuadratureOptions &options) const;

  // Almost-everywhere derivative. Jumps contribute nothing.
  Fn1D derivative() const;

  std::string describe() const;

private:
  explicit Fn1D(Kind k) : kind_(std::make_shared<const Kind>(std::move(k))) {}

  std::shared_ptr<const Kind> kind_;
};

// Panel breaks for an integrand assembled from several functions.
std::vector<double> merged_panel_breaks(std::initializer_list<const Fn1D *> fns, double lo,
                                        double hi, const QuadratureOptions &options);

// Integral of f over [lo, hi] with f's panel structure.
double integrate(const Fn1D &f, double lo, double hi, const Quadrature &quad = Quadrature{},
                 QuadratureStats *stats = nullptr);

}  // namespace isl
