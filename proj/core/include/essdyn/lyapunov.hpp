#pragma once

#include <Eigen/Core>

#include "essdyn/model.hpp"

namespace essdyn {

/// Value, gradient, and dissipation of the Lyapunov functional at one state.
struct LyapunovEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double dissipation = 0.0;  // always <= 0 on the nonnegative orthant
};

/// F(n) = sum_m w_m H(sum_j B_{j,m} n_j) - sum_i C_i r_i n_i, with H the
/// antiderivative of L normalized by H(0) = 0, so F(0) = 0.
double lyapunov_value(const GeneralizedModel& model, const Eigen::VectorXd& n);

/// dF/dn_i = sum_m w_m B_{i,m} L(load_m) - C_i r_i = -C_i g_i(n).
Eigen::VectorXd lyapunov_gradient(const GeneralizedModel& model, const Eigen::VectorXd& n);

/// d2F/dn_i dn_k = sum_m w_m B_{i,m} B_{k,m} L'(load_m); symmetric positive
/// semidefinite.
Eigen::MatrixXd lyapunov_hessian(const GeneralizedModel& model, const Eigen::VectorXd& n);

/// dF/dt along the flow: -sum_i C_i n_i g_i(n)^2.  Zero exactly at stationary
/// states.
double lyapunov_dissipation(const GeneralizedModel& model, const Eigen::VectorXd& n);

LyapunovEvaluation evaluate_lyapunov(const GeneralizedModel& model, const Eigen::VectorXd& n);

}  // namespace essdyn
