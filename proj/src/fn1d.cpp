#include "isl/fn1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isl/error.hpp"

namespace isl
{

namespace
{

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const char *what)
{
  if (!std::isfinite(v))
  {
    throw InvalidInput(std::string("non-finite ") + what);
  }
}

void require_increasing(const std::vector<double> &x, const char *what)
{
  for (std::size_t i = 0; i < x.size(); i++)
  {
    require_finite(x[i], what);
    if (i > 0 && !(x[i] > x[i - 1]))
    {
      throw InvalidInput(std::string(what) + " must be strictly increasing");
    }
  }
}

void append_inside(const std::vector<double> &src, double lo, double hi,
                   std::vector<double> &out)
{
  for (double x : src)
  {
    if (x > lo && x < hi)
    {
      out.push_back(x);
    }
  }
}

void sort_unique(std::vector<double> &v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Fn1D Fn1D::constant(double value)
{
  require_finite(value, "constant");
  return Fn1D(Constant{value});
}

Fn1D Fn1D::polynomial(std::vector<double> coeffs)
{
  if (coeffs.empty())
  {
    throw InvalidInput("polynomial needs at least one coefficient");
  }
  for (double c : coeffs)
  {
    require_finite(c, "polynomial coefficient");
  }
  return Fn1D(Polynomial{std::move(coeffs)});
}

Fn1D Fn1D::piecewise(std::vector<double> breaks, std::vector<Fn1D> pieces)
{
  require_increasing(breaks, "piecewise breakpoints");
  if (pieces.size() != breaks.size() + 1)
  {
    throw InvalidInput("piecewise function needs exactly one more piece than breakpoints");
  }
  return Fn1D(Piecewise{std::move(breaks), std::move(pieces)});
}

Fn1D Fn1D::scaled_oscillator(double scale, double power)
{
  require_finite(scale, "oscillator scale");
  require_finite(power, "oscillator power");
  return Fn1D(ScaledOscillator{scale, power});
}

Fn1D Fn1D::sign_step(double x0)
{
  require_finite(x0, "sign step location");
  return Fn1D(SignStep{x0});
}

Fn1D Fn1D::table(std::vector<double> x, std::vector<double> y)
{
  if (x.size() < 2 || x.size() != y.size())
  {
    throw InvalidInput("table needs at least two nodes and matching x/y lengths");
  }
  require_increasing(x, "table abscissae");
  for (double v : y)
  {
    require_finite(v, "table value");
  }
  return Fn1D(Table{std::move(x), std::move(y)});
}

Fn1D Fn1D::custom(Custom c)
{
  if (!c.fn)
  {
    throw InvalidInput("custom function is empty");
  }
  sort_unique(c.breaks);
  return Fn1D(std::move(c));
}

double Fn1D::operator()(double x) const
{
  return std::visit(
      Overloaded{
          [](const Constant &c) { return c.value; },
          [x](const Polynomial &p)
          {
            double v = 0.0;
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it)
            {
              v = v * x + *it;
            }
            return v;
          },
          [x](const Piecewise &p)
          {
            const auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), x);
            return p.pieces[static_cast<std::size_t>(it - p.breaks.begin())](x);
          },
          [x](const ScaledOscillator &s)
          {
            if (x == 0.0)
            {
              return 0.0;
            }
            return s.scale * std::pow(x, s.power) * std::sin(1.0 / x);
          },
          [x](const SignStep &s) { return x > s.x0 ? 1.0 : (x < s.x0 ? -1.0 : 0.0); },
          [x](const Table &t)
          {
            if (x <= t.x.front())
            {
              return t.y.front();
            }
            if (x >= t.x.back())
            {
              return t.y.back();
            }
            const auto i = static_cast<std::size_t>(
                std::upper_bound(t.x.begin(), t.x.end(), x) - t.x.begin());
            const double s = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
            return t.y[i - 1] + s * (t.y[i] - t.y[i - 1]);
          },
          [x](const Custom &c) { return c.fn(x); },
      },
      *kind_);
}

std::vector<double> Fn1D::breakpoints(double lo, double hi) const
{
  std::vector<double> out;
  std::visit(Overloaded{
                 [](const Constant &) {},
                 [](const Polynomial &) {},
                 [&](const Piecewise &p)
                 {
                   append_inside(p.breaks, lo, hi, out);
                   for (std::size_t i = 0; i < p.pieces.size(); i++)
                   {
                     const double plo = i == 0 ? lo : std::max(lo, p.breaks[i - 1]);
                     const double phi = i == p.breaks.size() ? hi : std::min(hi, p.breaks[i]);
                     if (plo < phi)
                     {
                       const auto inner = p.pieces[i].breakpoints(plo, phi);
                       out.insert(out.end(), inner.begin(), inner.end());
                     }
                   }
                 },
                 [](const ScaledOscillator &) {},
                 [&](const SignStep &s) { append_inside({s.x0}, lo, hi, out); },
                 [&](const Table &t) { append_inside(t.x, lo, hi, out); },
                 [&](const Custom &c) { append_inside(c.breaks, lo, hi, out); },
             },
             *kind_);
  sort_unique(out);
  return out;
}

std::vector<double> Fn1D::jumps(double lo, double hi) const
{
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const Piecewise &p)
                 {
                   append_inside(p.breaks, lo, hi, out);
                   for (std::size_t i = 0; i < p.pieces.size(); i++)
                   {
                     const double plo = i == 0 ? lo : std::max(lo, p.breaks[i - 1]);
                     const double phi = i == p.breaks.size() ? hi : std::min(hi, p.breaks[i]);
                     if (plo < phi)
                     {
                       const auto inner = p.pieces[i].jumps(plo, phi);
                       out.insert(out.end(), inner.begin(), inner.end());
                     }
                   }
                 },
                 [&](const SignStep &s) { append_inside({s.x0}, lo, hi, out); },
                 [&](const Custom &c) { append_inside(c.breaks, lo, hi, out); },
                 [](const auto &) {},
             },
             *kind_);
  sort_unique(out);
  return out;
}

bool Fn1D::oscillates_at_zero() const
{
  return std::visit(Overloaded{
                        [](const ScaledOscillator &s) { return s.scale != 0.0; },
                        [](const Piecewise &p)
                        {
                          return std::any_of(p.pieces.begin(), p.pieces.end(),
                                             [](const Fn1D &f) { return f.oscillates_at_zero(); });
                        },
                        [](const Custom &c) { return c.oscillates_at_zero; },
                        [](const auto &) { return false; },
                    },
                    *kind_);
}

std::vector<double> Fn1D::panel_breaks(double lo, double hi,
                                       const QuadratureOptions &options) const
{
  auto out = breakpoints(lo, hi);
  if (oscillates_at_zero())
  {
    append_oscillation_breaks(lo, hi, options, out);
    sort_unique(out);
  }
  return out;
}

Fn1D Fn1D::derivative() const
{
  return std::visit(
      Overloaded{
          [](const Constant &) { return Fn1D::constant(0.0); },
          [](const Polynomial &p)
          {
            if (p.coeffs.size() == 1)
            {
              return Fn1D::constant(0.0);
            }
            std::vector<double> d(p.coeffs.size() - 1);
            for (std::size_t i = 1; i < p.coeffs.size(); i++)
            {
              d[i - 1] = static_cast<double>(i) * p.coeffs[i];
            }
            return Fn1D::polynomial(std::move(d));
          },
          [](const Piecewise &p)
          {
            std::vector<Fn1D> d;
            d.reserve(p.pieces.size());
            for (const auto &f : p.pieces)
            {
              d.push_back(f.derivative());
            }
            return Fn1D::piecewise(p.breaks, std::move(d));
          },
          [](const ScaledOscillator &s)
          {
            // d/dx [c x^k sin(1/x)] = c (k x^(k-1) sin(1/x) - x^(k-2) cos(1/x))
            const double c = s.scale, k = s.power;
            Custom d;
            d.fn = [c, k](double x)
            {
              if (x == 0.0)
              {
                return 0.0;
              }
              return c * (k * std::pow(x, k - 1.0) * std::sin(1.0 / x) -
                          std::pow(x, k - 2.0) * std::cos(1.0 / x));
            };
            d.oscillates_at_zero = c != 0.0;
            std::ostringstream os;
            os << "d/dx[" << c << "*x^" << k << "*sin(1/x)]";
            d.label = os.str();
            return Fn1D::custom(std::move(d));
          },
          [](const SignStep &) { return Fn1D::constant(0.0); },
          [](const Table &t)
          {
            std::vector<double> breaks(t.x.begin() + 1, t.x.end() - 1);
            std::vector<Fn1D> pieces;
            pieces.push_back(Fn1D::constant(0.0));
            for (std::size_t i = 1; i < t.x.size(); i++)
            {
              pieces.push_back(Fn1D::constant((t.y[i] - t.y[i - 1]) / (t.x[i] - t.x[i - 1])));
            }
            pieces.push_back(Fn1D::constant(0.0));
            breaks.insert(breaks.begin(), t.x.front());
            breaks.push_back(t.x.back());
            return Fn1D::piecewise(std::move(breaks), std::move(pieces));
          },
          [](const Custom &c)
          {
            if (!c.derivative)
            {
              throw InvalidInput("no derivative available for " + c.label);
            }
            Custom d;
            d.fn = c.derivative;
            d.breaks = c.breaks;
            d.oscillates_at_zero = c.oscillates_at_zero;
            d.label = "d/dx[" + c.label + "]";
            return Fn1D::custom(std::move(d));
          },
      },
      *kind_);
}

std::string Fn1D::describe() const
{
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Constant &c) { os << c.value; },
                 [&](const Polynomial &p)
                 {
                   os << "poly(";
                   for (std::size_t i = 0; i < p.coeffs.size(); i++)
                   {
                     os << (i ? ", " : "") << p.coeffs[i];
                   }
                   os << ")";
                 },
                 [&](const Piecewise &p)
                 {
                   os << "piecewise[";
                   for (std::size_t i = 0; i < p.pieces.size(); i++)
                   {
                     if (i)
                     {
                       os << " |" << p.breaks[i - 1] << "| ";
                     }
                     os << p.pieces[i].describe();
                   }
                   os << "]";
                 },
                 [&](const ScaledOscillator &s)
                 { os << s.scale << "*x^" << s.power << "*sin(1/x)"; },
                 [&](const SignStep &s) { os << "sgn(x-" << s.x0 << ")"; },
                 [&](const Table &t) { os << "table(" << t.x.size() << " nodes)"; },
                 [&](const Custom &c) { os << c.label; },
             },
             *kind_);
  return os.str();
}

std::vector<double> merged_panel_breaks(std::initializer_list<const Fn1D *> fns, double lo,
                                        double hi, const QuadratureOptions &options)
{
  std::vector<double> out;
  bool oscillating = false;
  for (const Fn1D *f : fns)
  {
    const auto b = f->breakpoints(lo, hi);
    out.insert(out.end(), b.begin(), b.end());
    oscillating = oscillating || f->oscillates_at_zero();
  }
  if (oscillating)
  {
    append_oscillation_breaks(lo, hi, options, out);
  }
  sort_unique(out);
  return out;
}

double integrate(const Fn1D &f, double lo, double hi, const Quadrature &quad,
                 QuadratureStats *stats)
{
  const auto breaks = f.panel_breaks(lo, hi, quad.options());
  return quad.integrate(f, lo, hi, breaks, stats);
}

}  // namespace isl
