#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "essdyn/assumptions.hpp"
#include "essdyn/model.hpp"

namespace essdyn {

/// The computed equilibrium together with its optimality certificate.
/// `equality_residuals` lists |g_i| for the support species (ascending
/// index); `inequality_margins` lists -g_i for the absent species (must be
/// >= -tol).
struct EssResult {
  enum class Method { active_set_newton, subset_enumeration };

  Eigen::VectorXd n;
  std::vector<int> support;  // 0-based indices with n_i > 0, ascending
  Eigen::VectorXd equality_residuals;
  Eigen::VectorXd inequality_margins;
  double F_value = 0.0;
  int iterations = 0;
  Method method = Method::active_set_newton;
  std::string warning;  // empty unless the degenerate all-nonviable case hit
};

/// One stationary state of the flow restricted to the face spanned by
/// `support`; `invasion_rates` carries (species, g_species) for every absent
/// species.
struct StationaryPoint {
  Eigen::VectorXd n;
  std::vector<int> support;
  bool restricted_jacobian_nonsingular = false;
  std::vector<std::pair<int, double>> invasion_rates;
  bool is_ess = false;
};

struct EssVerification {
  bool is_ess = false;
  double worst_equality_residual = 0.0;   // max |g_i| over the support
  double worst_inequality_excess = 0.0;   // max g_i over absent species
  int failing_species = -1;               // 0-based, -1 when is_ess
};

/// Per-support bookkeeping from an enumeration sweep, consumed by the
/// non-degeneracy heuristic.
struct EnumerationDiagnostics {
  int supports_scanned = 0;
  int supports_solved = 0;        // Newton converged to a real solution
  int singular_jacobians = 0;     // solved but with singular restricted Jacobian
  int first_unsolved_mask = -1;   // bitmask of the first support without a solution
  int first_singular_mask = -1;
  bool complete() const { return supports_solved == supports_scanned; }
  bool all_nonsingular() const { return singular_jacobians == 0; }
};

/// Global minimizer of the convex Lyapunov functional over the nonnegative
/// orthant, by projected Newton with active-set updates.  Requires strict
/// competition and non-extinction (HypothesisViolationError otherwise),
/// except for the degenerate case where no species is viable, which returns
/// the zero state with a warning.  NoConvergenceError carries the best
/// iterate.
EssResult solve_ess(const GeneralizedModel& model, double tol = 1e-10, int max_iter = 100);

/// True iff |g_i(n)| <= tol wherever n_i > 0 and g_i(n) <= tol wherever
/// n_i = 0.
EssVerification verify_ess(const GeneralizedModel& model, const Eigen::VectorXd& n, double tol);

/// Newton-solves the stationarity system on every support of {1..N}
/// (TooManySubsetsError when N > max_species).  Solutions are kept when
/// strictly positive on their support; solves run over the whole face, so a
/// support may converge to a sign-indefinite solution that is only recorded
/// in the diagnostics.
std::vector<StationaryPoint> enumerate_stationary_points(const GeneralizedModel& model,
                                                         double tol = 1e-10,
                                                         int max_species = 12,
                                                         EnumerationDiagnostics* diagnostics = nullptr);

enum class StabilityClass { attracting_ESS, unstable };

struct Classification {
  StabilityClass tag = StabilityClass::unstable;
  int invading_species = -1;  // 0-based witness with positive invasion rate
  double invasion_rate = 0.0;
};

/// attracting_ESS iff the point passes verify_ess; otherwise unstable with
/// the strongest invading species as witness.  NotStationaryError when the
/// support residuals exceed tol.
Classification classify_stationary_point(const GeneralizedModel& model,
                                         const StationaryPoint& point, double tol = 1e-8);

/// EssResult assembled from the unique verified point of an enumeration
/// sweep (method = subset_enumeration).
EssResult ess_from_enumeration(const GeneralizedModel& model, double tol = 1e-10,
                               int max_species = 12);

/// check_assumptions with the non-degeneracy verdict resolved by an
/// enumeration sweep: verified-heuristically only when every support solve
/// converged with a nonsingular restricted Jacobian.
AssumptionReport check_assumptions_with_enumeration(const GeneralizedModel& model,
                                                    double tol = 1e-10, int max_species = 12);

}  // namespace essdyn
