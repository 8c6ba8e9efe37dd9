#include "essdyn/response.hpp"

#include <cmath>

#include "essdyn/errors.hpp"

namespace essdyn {

ResponseFunction ResponseFunction::identity() {
  return ResponseFunction(Family::identity, 1.0, std::numeric_limits<double>::infinity());
}

ResponseFunction ResponseFunction::saturating(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvariantError("saturating response needs a finite scale > 0");
  }
  return ResponseFunction(Family::saturating, scale, scale);
}

ResponseFunction ResponseFunction::custom(Scalar1D value, Scalar1D derivative,
                                          Scalar1D antiderivative, double limit_at_infinity) {
  if (!value || !derivative || !antiderivative) {
    throw InvariantError("custom response needs all three of (L, L', H)");
  }
  if (!(limit_at_infinity > 0.0)) {
    throw InvariantError("custom response needs limit_at_infinity in (0, +inf]");
  }
  ResponseFunction f(Family::custom, 1.0, limit_at_infinity);
  f.custom_value_ = std::move(value);
  f.custom_derivative_ = std::move(derivative);
  f.custom_antiderivative_ = std::move(antiderivative);
  return f;
}

double ResponseFunction::value(double x) const {
  switch (family_) {
    case Family::identity:
      return x;
    case Family::saturating:
      return scale_ * x / (1.0 + x);
    case Family::custom:
      return custom_value_(x);
  }
  return 0.0;
}

double ResponseFunction::derivative(double x) const {
  switch (family_) {
    case Family::identity:
      return 1.0;
    case Family::saturating: {
      const double d = 1.0 + x;
      return scale_ / (d * d);
    }
    case Family::custom:
      return custom_derivative_(x);
  }
  return 0.0;
}

double ResponseFunction::antiderivative(double x) const {
  switch (family_) {
    case Family::identity:
      return 0.5 * x * x;
    case Family::saturating:
      // integral of s*t/(1+t) from 0 to x
      return scale_ * (x - std::log1p(x));
    case Family::custom:
      return custom_antiderivative_(x);
  }
  return 0.0;
}

}  // namespace essdyn
