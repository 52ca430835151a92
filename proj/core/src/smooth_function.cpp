#include "pinchlab/smooth_function.hpp"

#include "pinchlab/types.hpp"

#include <cmath>
#include <sstream>

namespace pinchlab {

SmoothFunction1D::SmoothFunction1D(std::string name, Rule rule, double lo, double hi, Family family,
                                   double rate)
    : name_(std::move(name)), rule_(std::move(rule)), lo_(lo), hi_(hi), family_(family), rate_(rate) {
  if (!rule_) throw std::invalid_argument("SmoothFunction1D: empty evaluation rule");
  if (!(lo_ < hi_)) throw std::invalid_argument("SmoothFunction1D: empty domain");
}

Jet1D SmoothFunction1D::operator()(double x) const {
  if (!in_domain(x)) {
    std::ostringstream msg;
    msg << name_ << ": argument " << x << " outside [" << lo_ << ", " << hi_ << "]";
    throw DomainError(msg.str());
  }
  return rule_(x);
}

SmoothFunction1D SmoothFunction1D::sinh() {
  return SmoothFunction1D(
      "sinh", [](double x) { return Jet1D{std::sinh(x), std::cosh(x), std::sinh(x)}; },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), Family::Sinh,
      1.0);
}

SmoothFunction1D SmoothFunction1D::cosh(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("cosh rate must be positive");
  std::ostringstream name;
  if (b == 1.0) {
    name << "cosh";
  } else {
    name << "cosh(" << b << "*t)";
  }
  return SmoothFunction1D(
      name.str(),
      [b](double x) {
        const double c = std::cosh(b * x);
        return Jet1D{c, b * std::sinh(b * x), b * b * c};
      },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), Family::Cosh,
      b);
}

}  // namespace pinchlab
