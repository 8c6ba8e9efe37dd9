#include "essdyn/symmetry.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "essdyn/errors.hpp"
#include "validate.hpp"

namespace essdyn {

namespace {

double balance_residual(const Eigen::MatrixXd& b, const Eigen::VectorXd& C, int* wi, int* wj) {
  const Eigen::Index N = b.rows();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const double res = std::abs(C(i) * b(i, j) - C(j) * b(j, i));
      if (res > worst) {
        worst = res;
        if (wi) *wi = static_cast<int>(i);
        if (wj) *wj = static_cast<int>(j);
      }
    }
  }
  return worst;
}

}  // namespace

Eigen::VectorXd find_balancing_constants(const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols() || b.rows() == 0) {
    throw DimensionError("b must be a nonempty square matrix");
  }
  detail::require_nonnegative(b, "b");
  const Eigen::Index N = b.rows();

  // A pair with b_ij > 0 but b_ji = 0 makes C_i b_ij = C_j b_ji impossible.
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      if ((b(i, j) > 0.0) != (b(j, i) > 0.0)) {
        std::ostringstream os;
        os << "asymmetric zero pattern: b(" << i + 1 << "," << j + 1 << ") and b(" << j + 1
           << "," << i + 1 << ") are not both zero or both positive";
        throw NoBalancingError(os.str(), static_cast<int>(i), static_cast<int>(j));
      }
    }
  }

  // Ratio propagation over a BFS spanning forest; each component's
  // lowest-index species is its root with scale 1.
  Eigen::VectorXd C = Eigen::VectorXd::Zero(N);
  std::vector<bool> visited(N, false);
  std::vector<Eigen::Index> queue;
  for (Eigen::Index root = 0; root < N; ++root) {
    if (visited[root]) continue;
    visited[root] = true;
    C(root) = 1.0;
    queue.assign(1, root);
    while (!queue.empty()) {
      const Eigen::Index i = queue.back();
      queue.pop_back();
      for (Eigen::Index j = 0; j < N; ++j) {
        if (visited[j] || !(b(i, j) > 0.0 && b(j, i) > 0.0)) continue;
        visited[j] = true;
        C(j) = C(i) * b(i, j) / b(j, i);
        queue.push_back(j);
      }
    }
  }

  // Cycle consistency over every edge, tree or not.
  int wi = -1;
  int wj = -1;
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  const double residual = balance_residual(b, C, &wi, &wj);
  if (residual > 1e-10 * scale) {
    std::ostringstream os;
    os << "inconsistent cycle through species pair (" << wi + 1 << "," << wj + 1
       << "): residual " << residual;
    throw NoBalancingError(os.str(), wi, wj);
  }
  return C;
}

PositiveDefiniteness is_positive_definite(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("matrix must be nonempty and square");
  }
  detail::require_finite(m, "m");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NotSymmetricError("matrix is not symmetric to 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max_abs = eig.eigenvalues().cwiseAbs().maxCoeff();
  PositiveDefiniteness result;
  result.smallest_eigenvalue = lambda_min;
  result.positive_definite = lambda_min > 1e-12 * (1.0 + lambda_max_abs);
  return result;
}

EmbeddingResult embed_lotka_volterra(const LotkaVolterraModel& model, const Eigen::VectorXd& C) {
  const Eigen::Index N = model.species_count();
  detail::require_size(C, N, "C");
  for (Eigen::Index i = 0; i < N; ++i) {
    if (!(C(i) > 0.0) || !std::isfinite(C(i))) {
      throw InvariantError("C(" + std::to_string(i) + ") must be finite and > 0");
    }
  }
  const double scale = 1.0 + model.b().cwiseAbs().maxCoeff();
  if (balance_residual(model.b(), C, nullptr, nullptr) > 1e-10 * scale) {
    throw NotBalancedError("C does not balance b to tolerance 1e-10");
  }

  Eigen::MatrixXd m = C.asDiagonal() * model.b();
  m = 0.5 * (m + m.transpose().eval());  // kill the sub-tolerance asymmetry

  const PositiveDefiniteness pd = is_positive_definite(m);
  if (!pd.positive_definite) {
    std::ostringstream os;
    os << "diag(C) b has non-positive eigenvalue " << pd.smallest_eigenvalue;
    throw NotPositiveDefiniteError(os.str(), pd.smallest_eigenvalue);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const Eigen::MatrixXd U = eig.eigenvectors();
  const Eigen::VectorXd sqrt_lambda = lambda.cwiseSqrt();

  // One node per eigenmode, unit weights: B_{j,a} = sqrt(l_a) U_{j,a},
  // K_{i,a} = B_{i,a} / C_i, so that sum_a K_{i,a} B(.,a).n reproduces b n.
  const Eigen::MatrixXd B = U * sqrt_lambda.asDiagonal();
  const Eigen::MatrixXd K = C.cwiseInverse().asDiagonal() * B;

  GeneralizedModel generalized(model.r(), K, B, DiscreteMeasure(Eigen::VectorXd::Ones(N)), C,
                               ResponseFunction::identity());
  return EmbeddingResult{std::move(generalized), lambda, U, std::move(m), C};
}

}  // namespace essdyn
