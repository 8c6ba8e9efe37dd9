#include "essdyn/lyapunov.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "essdyn/errors.hpp"
#include "validate.hpp"

namespace essdyn {

namespace {

// w_m L(s_m) for each node, the common factor of the gradient and the value.
Eigen::VectorXd weighted_response(const GeneralizedModel& model, const Eigen::VectorXd& s) {
  const Eigen::VectorXd& w = model.measure().weights();
  Eigen::VectorXd out(s.size());
  for (Eigen::Index m = 0; m < s.size(); ++m) {
    out(m) = w(m) * model.response().value(s(m));
  }
  return out;
}

}  // namespace

double lyapunov_value(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  const Eigen::VectorXd s = environment_loads(model, n);
  const Eigen::VectorXd& w = model.measure().weights();
  double acc = 0.0;
  for (Eigen::Index m = 0; m < s.size(); ++m) {
    acc += w(m) * model.response().antiderivative(s(m));
  }
  const double value = acc - model.C().cwiseProduct(model.r()).dot(n);
  if (!std::isfinite(value)) {
    throw EvaluationError("Lyapunov value is not finite");
  }
  return value;
}

Eigen::VectorXd lyapunov_gradient(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  const Eigen::VectorXd s = environment_loads(model, n);
  Eigen::VectorXd grad = model.B() * weighted_response(model, s) - model.C().cwiseProduct(model.r());
  if (!grad.allFinite()) {
    throw EvaluationError("Lyapunov gradient is not finite");
  }
  return grad;
}

Eigen::MatrixXd lyapunov_hessian(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  const Eigen::VectorXd s = environment_loads(model, n);
  const Eigen::VectorXd& w = model.measure().weights();
  Eigen::VectorXd wLp(s.size());
  for (Eigen::Index m = 0; m < s.size(); ++m) {
    wLp(m) = w(m) * model.response().derivative(s(m));
  }
  Eigen::MatrixXd H = model.B() * wLp.asDiagonal() * model.B().transpose();
  if (!H.allFinite()) {
    throw EvaluationError("Lyapunov hessian is not finite");
  }
  return H;
}

double lyapunov_dissipation(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  detail::require_size(n, model.species_count(), "n");
  detail::require_finite(n, "n");
  const Eigen::VectorXd g = growth_rates(model, n);
  const double d = -(model.C().cwiseProduct(n).cwiseProduct(g.cwiseAbs2())).sum();
  if (!std::isfinite(d)) {
    throw EvaluationError("Lyapunov dissipation is not finite");
  }
  return d;
}

LyapunovEvaluation evaluate_lyapunov(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  LyapunovEvaluation out;
  out.value = lyapunov_value(model, n);
  out.gradient = lyapunov_gradient(model, n);
  out.dissipation = lyapunov_dissipation(model, n);
  return out;
}

}  // namespace essdyn
