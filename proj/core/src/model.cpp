#include "essdyn/model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "essdyn/errors.hpp"
#include "validate.hpp"

namespace essdyn {

DiscreteMeasure::DiscreteMeasure(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw InvariantError("measure needs at least one node");
  }
  detail::require_nonnegative(weights_, "measure weights");
  if (weights_.maxCoeff() <= 0.0) {
    throw InvariantError("measure weights are all zero");
  }
}

GeneralizedModel::GeneralizedModel(Eigen::VectorXd r, Eigen::MatrixXd K, Eigen::MatrixXd B,
                                   DiscreteMeasure measure, Eigen::VectorXd C,
                                   ResponseFunction response)
    : r_(std::move(r)),
      K_(std::move(K)),
      B_(std::move(B)),
      measure_(std::move(measure)),
      C_(std::move(C)),
      response_(std::move(response)) {
  const Eigen::Index N = r_.size();
  const Eigen::Index M = measure_.node_count();
  if (N == 0) {
    throw InvariantError("model needs at least one species");
  }
  detail::require_finite(r_, "r");
  if (K_.rows() != N || K_.cols() != M) {
    throw DimensionError("K must be N x M = " + std::to_string(N) + " x " + std::to_string(M));
  }
  if (B_.rows() != N || B_.cols() != M) {
    throw DimensionError("B must be N x M = " + std::to_string(N) + " x " + std::to_string(M));
  }
  detail::require_finite(K_, "K");
  detail::require_finite(B_, "B");
  detail::require_size(C_, N, "C");
  for (Eigen::Index i = 0; i < N; ++i) {
    if (!(C_(i) > 0.0) || !std::isfinite(C_(i))) {
      throw InvariantError("C(" + std::to_string(i) + ") must be finite and > 0");
    }
  }
  // Balancing condition B_{i,m} = C_i K_{i,m}, relative tolerance 1e-10.
  const double scale = 1.0 + B_.cwiseAbs().maxCoeff();
  const double residual = (B_ - C_.asDiagonal() * K_).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale) {
    throw InvariantError("kernels violate B = diag(C) K: residual " + std::to_string(residual));
  }
}

LotkaVolterraModel::LotkaVolterraModel(Eigen::VectorXd r, Eigen::MatrixXd b)
    : r_(std::move(r)), b_(std::move(b)) {
  const Eigen::Index N = r_.size();
  if (N == 0) {
    throw InvariantError("model needs at least one species");
  }
  detail::require_finite(r_, "r");
  if (b_.rows() != N || b_.cols() != N) {
    throw DimensionError("b must be N x N = " + std::to_string(N) + " x " + std::to_string(N));
  }
  detail::require_nonnegative(b_, "b");
}

ResourceModel::ResourceModel(Eigen::VectorXd death_rates, Eigen::MatrixXd eta,
                             Eigen::VectorXd supply)
    : d_(std::move(death_rates)), eta_(std::move(eta)), I0_(std::move(supply)) {
  const Eigen::Index N = d_.size();
  const Eigen::Index R = I0_.size();
  if (N == 0 || R == 0) {
    throw InvariantError("resource model needs at least one species and one resource");
  }
  detail::require_finite(d_, "d");
  if (eta_.rows() != R || eta_.cols() != N) {
    throw DimensionError("eta must be R x N = " + std::to_string(R) + " x " + std::to_string(N));
  }
  detail::require_nonnegative(eta_, "eta");
  for (Eigen::Index k = 0; k < R; ++k) {
    if (!(I0_(k) > 0.0) || !std::isfinite(I0_(k))) {
      throw InvariantError("I0(" + std::to_string(k) + ") must be finite and > 0");
    }
  }
}

Eigen::VectorXd environment_loads(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  detail::require_size(n, model.species_count(), "n");
  detail::require_finite(n, "n");
  return model.B().transpose() * n;
}

Eigen::VectorXd growth_rates(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  const Eigen::VectorXd loads = environment_loads(model, n);
  const Eigen::VectorXd& w = model.measure().weights();
  Eigen::VectorXd response(loads.size());
  for (Eigen::Index m = 0; m < loads.size(); ++m) {
    response(m) = w(m) * model.response().value(loads(m));
  }
  return model.r() - model.K() * response;
}

Eigen::VectorXd lv_growth_rates(const LotkaVolterraModel& model, const Eigen::VectorXd& n) {
  detail::require_size(n, model.species_count(), "n");
  detail::require_finite(n, "n");
  return model.r() - model.b() * n;
}

Eigen::VectorXd resource_growth_rates(const ResourceModel& model, const Eigen::VectorXd& n) {
  detail::require_size(n, model.species_count(), "n");
  detail::require_finite(n, "n");
  // intake per resource: I_k = I0_k / (1 + sum_j eta_{kj} n_j)
  const Eigen::VectorXd intake =
      model.I0().array() / (1.0 + (model.eta() * n).array());
  return model.eta().transpose() * intake - model.d();
}

GeneralizedModel resource_to_generalized(const ResourceModel& model) {
  const Eigen::MatrixXd K = model.eta().transpose();  // K_{i,k} = eta_{ki}
  const Eigen::VectorXd r = K * model.I0() - model.d();
  return GeneralizedModel(r, K, K, DiscreteMeasure(model.I0()),
                          Eigen::VectorXd::Ones(model.species_count()),
                          ResponseFunction::saturating(1.0));
}

}  // namespace essdyn
