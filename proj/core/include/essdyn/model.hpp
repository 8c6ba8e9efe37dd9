#pragma once

#include <Eigen/Core>

#include "essdyn/response.hpp"

namespace essdyn {

/// Finite weighted point measure over the environment components.
/// Weights are nonnegative and finite, with at least one strictly positive;
/// zero weights are allowed and inert.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(Eigen::VectorXd weights);

  Eigen::Index node_count() const { return weights_.size(); }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  Eigen::VectorXd weights_;
};

/// Generalized resource-mediated competition model:
///
///   dn_i/dt = [ r_i - sum_m w_m K_{i,m} L(sum_j B_{j,m} n_j) ] n_i
///
/// with N species, M environment nodes, finite kernels K and B (signed
/// entries are allowed: eigenmode rewrites of classical systems produce
/// them), and balancing constants C_i > 0 with B_{i,m} = C_i K_{i,m}
/// (checked at construction to relative tolerance 1e-10).  Immutable after
/// construction; all operations on it are pure and thread-safe.
class GeneralizedModel {
 public:
  GeneralizedModel(Eigen::VectorXd r, Eigen::MatrixXd K, Eigen::MatrixXd B,
                   DiscreteMeasure measure, Eigen::VectorXd C, ResponseFunction response);

  Eigen::Index species_count() const { return r_.size(); }
  Eigen::Index node_count() const { return measure_.node_count(); }

  const Eigen::VectorXd& r() const { return r_; }
  const Eigen::MatrixXd& K() const { return K_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const DiscreteMeasure& measure() const { return measure_; }
  const Eigen::VectorXd& C() const { return C_; }
  const ResponseFunction& response() const { return response_; }

 private:
  Eigen::VectorXd r_;
  Eigen::MatrixXd K_;  // N x M sensitivity kernel
  Eigen::MatrixXd B_;  // N x M contribution kernel
  DiscreteMeasure measure_;
  Eigen::VectorXd C_;
  ResponseFunction response_;
};

/// Classical competitive Lotka-Volterra system
///   dn_i/dt = (r_i - sum_j b_{ij} n_j) n_i,  b entrywise nonnegative.
class LotkaVolterraModel {
 public:
  LotkaVolterraModel(Eigen::VectorXd r, Eigen::MatrixXd b);

  Eigen::Index species_count() const { return r_.size(); }
  const Eigen::VectorXd& r() const { return r_; }
  const Eigen::MatrixXd& b() const { return b_; }

 private:
  Eigen::VectorXd r_;
  Eigen::MatrixXd b_;
};

/// Chemostat-style model with R resources and Holling type II intake:
///   dn_i/dt = (-d_i + sum_k I0_k eta_{ki} / (1 + sum_j eta_{kj} n_j)) n_i.
class ResourceModel {
 public:
  ResourceModel(Eigen::VectorXd death_rates, Eigen::MatrixXd eta, Eigen::VectorXd supply);

  Eigen::Index species_count() const { return d_.size(); }
  Eigen::Index resource_count() const { return I0_.size(); }
  const Eigen::VectorXd& d() const { return d_; }
  const Eigen::MatrixXd& eta() const { return eta_; }  // R x N uptake rates
  const Eigen::VectorXd& I0() const { return I0_; }

 private:
  Eigen::VectorXd d_;
  Eigen::MatrixXd eta_;
  Eigen::VectorXd I0_;
};

/// Per-node population load sum_j B_{j,m} n_j, length M.
Eigen::VectorXd environment_loads(const GeneralizedModel& model, const Eigen::VectorXd& n);

/// Per-capita growth rates g with dn_i/dt = g_i n_i.
Eigen::VectorXd growth_rates(const GeneralizedModel& model, const Eigen::VectorXd& n);

/// g_i = r_i - sum_j b_{ij} n_j.
Eigen::VectorXd lv_growth_rates(const LotkaVolterraModel& model, const Eigen::VectorXd& n);

/// g_i = -d_i + sum_k I0_k eta_{ki} / (1 + sum_j eta_{kj} n_j).
Eigen::VectorXd resource_growth_rates(const ResourceModel& model, const Eigen::VectorXd& n);

/// Exact rewrite of the resource model in generalized form: one node per
/// resource, weights I0, K = B = eta^T, C = 1, saturating response with unit
/// scale, r_i = -d_i + sum_k I0_k eta_{ki}.
GeneralizedModel resource_to_generalized(const ResourceModel& model);

}  // namespace essdyn
