#pragma once

#include <functional>
#include <limits>
#include <string>

namespace essdyn {

/// Competition response L: strictly increasing on the nonnegative axis,
/// together with its derivative, its antiderivative H (normalized so that
/// H(0) = 0), and its limit at +infinity.
///
/// Two closed families are built in:
///   identity     L(x) = x
///   saturating   L(x) = s * x / (1 + x),  s > 0
/// plus an extension point for a user-supplied (L, L', H) triple.  The
/// library never differentiates or integrates symbolically; H must be exact
/// for the Lyapunov value to be faithful.
class ResponseFunction {
 public:
  enum class Family { identity, saturating, custom };

  using Scalar1D = std::function<double(double)>;

  static ResponseFunction identity();
  static ResponseFunction saturating(double scale);

  /// User-supplied triple.  `antiderivative` must satisfy H(0) = 0 and
  /// H' = L; `limit_at_infinity` may be +infinity.  The caller asserts strict
  /// monotonicity; assumption checks sample the derivative on a grid.
  static ResponseFunction custom(Scalar1D value, Scalar1D derivative,
                                 Scalar1D antiderivative, double limit_at_infinity);

  double value(double x) const;
  double derivative(double x) const;
  double antiderivative(double x) const;
  double limit_at_infinity() const { return limit_; }

  Family family() const { return family_; }
  /// Scale s of the saturating family; 1 for identity/custom.
  double scale() const { return scale_; }

 private:
  ResponseFunction(Family family, double scale, double limit)
      : family_(family), scale_(scale), limit_(limit) {}

  Family family_;
  double scale_ = 1.0;
  double limit_ = std::numeric_limits<double>::infinity();
  Scalar1D custom_value_;
  Scalar1D custom_derivative_;
  Scalar1D custom_antiderivative_;
};

}  // namespace essdyn
