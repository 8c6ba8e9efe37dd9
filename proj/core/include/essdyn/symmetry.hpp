#pragma once

#include <Eigen/Core>

#include "essdyn/model.hpp"

namespace essdyn {

struct PositiveDefiniteness {
  bool positive_definite = false;
  double smallest_eigenvalue = 0.0;
};

/// Eigendecomposition-backed rewrite of a Lotka-Volterra system in
/// generalized form.  m = diag(C) b is symmetric positive definite,
/// m = U diag(lambda) U^T with orthonormal columns U, and the kernels are
/// K_{i,a} = sqrt(lambda_a) U_{i,a} / C_i, B_{j,a} = sqrt(lambda_a) U_{j,a}
/// with unit node weights and identity response.
struct EmbeddingResult {
  GeneralizedModel model;
  Eigen::VectorXd eigenvalues;   // ascending, all > 0
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
  Eigen::MatrixXd m;             // diag(C) b
  Eigen::VectorXd C;
};

/// Finds C > 0 with C_i b_{ij} = C_j b_{ji}, normalized to 1 at the
/// lowest-index species of each interaction component (so C_1 = 1).
/// Propagates ratios along a spanning forest of the graph with an edge
/// wherever b_{ij} b_{ji} > 0, then verifies every edge including the
/// non-tree ones.  Throws NoBalancingError with the witnessing pair on an
/// asymmetric zero pattern or an inconsistent cycle.
Eigen::VectorXd find_balancing_constants(const Eigen::MatrixXd& b);

/// True iff the smallest eigenvalue exceeds 1e-12 * (1 + |largest|).
/// Throws NotSymmetricError unless m is symmetric to 1e-10.
PositiveDefiniteness is_positive_definite(const Eigen::MatrixXd& m);

/// Requires detailed balance of (b, C) to 1e-10 (NotBalancedError) and
/// positive definiteness of diag(C) b (NotPositiveDefiniteError, carrying the
/// offending eigenvalue).
EmbeddingResult embed_lotka_volterra(const LotkaVolterraModel& model, const Eigen::VectorXd& C);

}  // namespace essdyn
