#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "isl/coeffs.hpp"
#include "isl/domains.hpp"
#include "isl/fn1d.hpp"

namespace isl
{

struct BoundConstants
{
  double c_D = 0.0;
  double alpha = 0.0;  // c(D) + ||q_-||_1
  double beta = 0.0;   // sqrt(alpha (1/||1/p||_1 + alpha)) + alpha
  double gamma = 0.0;  // sqrt(2 beta + 1/||1/p||_1)
  // 2 + 2 ||w||_1 / |int w|; absent when int w vanishes (|int w| < 1e-12 ||w||_1).
  std::optional<double> delta;
  WeightedNorms norms;
};

// Pure arithmetic on c(D) and the norms. Exposed separately so that a caller can
// feed a modified c(D) (fault injection in verification runs).
BoundConstants constants_from(double c_D, const WeightedNorms &norms);

BoundConstants compute_constants(const Coefficients &c, const SelfadjointDomain &d,
                                 const Quadrature &quad = Quadrature{});

enum class GProvenance
{
  ConstructedFtp,
  UserSupplied,
  Lifted,
};

std::string to_string(GProvenance p);

struct AdmissibleG
{
  Fn1D g;
  Fn1D g_prime;
  double g_inf_norm = 0.0;       // ||g||_inf
  double g_prime_p2_norm = 0.0;  // ||g'||_{p,2}
  double g_prime_l2_norm = 0.0;  // ||g'||_2 (unweighted)
  double g_a = 0.0, g_b = 0.0;
  GProvenance provenance = GProvenance::UserSupplied;
  std::optional<double> nu;        // ramp width of the turning-point construction
  std::optional<double> lift_x0;   // balance point of the endpoint lifting
};

// Supremum of |f| over the interval: dense sampling plus local maximisation.
double sup_norm(const Fn1D &f, Interval interval, long samples = 200000);

// Wraps a user g (and g'), computing norms against c. No admissibility check.
AdmissibleG make_admissible_g(Fn1D g, Fn1D g_prime, GProvenance provenance,
                              const Coefficients &c, const Quadrature &quad = Quadrature{});

// Trapezoid/parabola construction on the intervals between turning points, with ramp
// width nu = 1/(8 (n+1) gamma^2). Guarantees ||g||_inf <= 1 and ||g'||_2 <= 4 gamma (n+1).
AdmissibleG construct_g_ftp(const std::vector<double> &turning_points, double gamma,
                            const std::vector<int> &signs, const Coefficients &c,
                            const Quadrature &quad = Quadrature{});

// g = h g~ with h(x) = int_a^x sgn(x0 - t) / sqrt(p(t)) dt, where x0 balances the
// integral of 1/sqrt(p) over [a, x0] and [x0, b].
AdmissibleG lift_g_endpoints(const Fn1D &g_tilde, const Fn1D &g_tilde_prime,
                             const Coefficients &c, const Quadrature &quad = Quadrature{});

// The balance point x0 used by lift_g_endpoints (bisection to 1e-12).
double lift_balance_point(const Fn1D &p, Interval interval, const Quadrature &quad = Quadrature{});

struct GDiagnostics
{
  bool passed = false;
  double g_a = 0.0, g_b = 0.0;
  double violating_fraction = 0.0;
  std::vector<double> violations;  // first few sample locations where g w <= 0
  double g_inf_norm = 0.0;
  double g_prime_p2_norm = 0.0;
  std::vector<std::string> messages;
};

struct GValidationOptions
{
  long samples = 200000;
  double endpoint_tol = 1e-12;
  double max_violating_fraction = 1e-6;
};

GDiagnostics validate_g(const AdmissibleG &g, const Coefficients &c,
                        const GValidationOptions &options = {});

struct EpsSearchOptions
{
  long panels = 200000;
  double resolution = 1e-6;  // relative
};

struct EpsSelection
{
  double eps = 0.0;
  double measure_at_eps = 0.0;
  double threshold = 0.0;
  double search_resolution = 0.0;
  double sup = 0.0;          // sampled supremum of the function whose sublevel set is measured
  double total_measure = 0.0;
  // The threshold exceeds the total measure: every eps works; eps is capped at sup.
  bool capped = false;
  std::string measured;  // "pgw/(1/p)" or "|w|/1"
};

// Largest eps with mu_{1/p}({p g w < eps}) <= threshold.
EpsSelection find_eps(const Coefficients &c, const AdmissibleG &g, double threshold,
                      const EpsSearchOptions &options = {});

// Largest eps with mu_1({|w| < eps}) <= threshold (turning-point variants).
EpsSelection find_eps_abs_weight(const Coefficients &c, double threshold,
                                 const EpsSearchOptions &options = {});

// The underlying bisection on any monotone sampled measure.
EpsSelection find_eps_sampled(const SublevelSampler &sampler, double threshold,
                              double resolution);

enum class BoundVariant
{
  GeneralG,               // admissible g, threshold 1/(2 gamma^2)
  NonzeroIntegral,        // admissible g and int w != 0, threshold 1/(2 alpha delta^2)
  TurningPoints,          // p = 1, n turning points, threshold 1/(4 gamma^2)
  TurningPointsIntegral,  // p = 1, n turning points, int w != 0
  Exceptional,
  CombinedMin,
};

std::string to_string(BoundVariant v);

struct BoundReport
{
  double im_bound = 0.0;
  double re_bound = 0.0;
  // +infinity when the variant says nothing about exceptional eigenvalues.
  double exceptional_bound = 0.0;
  BoundVariant variant = BoundVariant::GeneralG;
  BoundConstants constants;
  EpsSelection eps;
  std::optional<double> g_inf_norm;
  std::optional<double> g_prime_p2_norm;
  std::optional<int> turning_point_count;
  // Winning variant for (im, re, exceptional) in a combined report.
  std::array<BoundVariant, 3> winners{BoundVariant::GeneralG, BoundVariant::GeneralG,
                                      BoundVariant::GeneralG};
};

double threshold_general_g(const BoundConstants &bc);                // 1/(2 gamma^2)
double threshold_nonzero_integral(const BoundConstants &bc);         // 1/(2 alpha delta^2)
double threshold_turning_points(const BoundConstants &bc);           // 1/(4 gamma^2)
double threshold_turning_points_integral(const BoundConstants &bc);  // 1/(4 alpha delta^2)

BoundReport bounds_general_g(const BoundConstants &bc, const AdmissibleG &g,
                             const EpsSelection &e);
BoundReport bounds_nonzero_integral(const BoundConstants &bc, const AdmissibleG &g,
                                    const EpsSelection &e);
BoundReport bounds_turning_points(const BoundConstants &bc, int n, const EpsSelection &e,
                                  const Coefficients &c);
BoundReport bounds_turning_points_integral(const BoundConstants &bc, int n,
                                           const EpsSelection &e, const Coefficients &c);
double bound_exceptional(const BoundConstants &bc, const AdmissibleG &g, const EpsSelection &e);

BoundReport best_bounds(const std::vector<BoundReport> &reports);

// True when p is identically 1 at sample points.
bool is_unit_function(const Fn1D &p, Interval interval);

}  // namespace isl
