#pragma once

#include <functional>
#include <limits>
#include <string>

namespace pinchlab {

// Value and first two derivatives of a scalar function at one abscissa.
struct Jet1D {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// A C^2 scalar function with analytic first and second derivatives on a
// closed domain [lo, hi]. Used for warp factors and the circumferential
// profile sigma(r) of cone charts.
class SmoothFunction1D {
 public:
  using Rule = std::function<Jet1D(double)>;

  // Families with a known closed form; downstream code uses the tag to pick
  // closed-form distances (Cosh) or to recognise the hyperbolic case (Sinh).
  enum class Family { Sinh, Cosh, Custom };

  SmoothFunction1D(std::string name, Rule rule,
                   double lo = -std::numeric_limits<double>::infinity(),
                   double hi = std::numeric_limits<double>::infinity(),
                   Family family = Family::Custom, double rate = 1.0);

  // Throws DomainError outside [lo, hi].
  Jet1D operator()(double x) const;

  double value(double x) const { return (*this)(x).value; }
  double derivative(double x) const { return (*this)(x).d1; }
  double second_derivative(double x) const { return (*this)(x).d2; }

  bool in_domain(double x) const { return x >= lo_ && x <= hi_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  // Argument rate b for the Sinh/Cosh families: f(x) = sinh(b x) or cosh(b x).
  double rate() const { return rate_; }

  // sinh(x)
  static SmoothFunction1D sinh();
  // cosh(b x)
  static SmoothFunction1D cosh(double b = 1.0);

 private:
  std::string name_;
  Rule rule_;
  double lo_;
  double hi_;
  Family family_;
  double rate_;
};

}  // namespace pinchlab
