#include "essdyn/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "essdyn/errors.hpp"
#include "essdyn/lyapunov.hpp"
#include "validate.hpp"

namespace essdyn {

namespace {

constexpr double kSupportFloor = 1e-12;  // below this a population counts as absent

// Density scaled against self-regulation, the usual logistic guess.
Eigen::VectorXd initial_guess(const GeneralizedModel& model) {
  const Eigen::Index N = model.species_count();
  const Eigen::VectorXd& w = model.measure().weights();
  const double Lp0 = model.response().derivative(0.0);
  Eigen::VectorXd n(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    double self = 0.0;
    for (Eigen::Index m = 0; m < model.node_count(); ++m) {
      self += w(m) * model.K()(i, m) * model.B()(i, m) * Lp0;
    }
    n(i) = std::clamp(std::max(model.r()(i), 0.0) / (self + 1.0), 1e-6, 1e3);
  }
  return n;
}

// dg/dn = -K diag(w .* L'(s)) B^T, evaluated at n.
Eigen::MatrixXd growth_jacobian(const GeneralizedModel& model, const Eigen::VectorXd& n) {
  const Eigen::VectorXd s = environment_loads(model, n);
  const Eigen::VectorXd& w = model.measure().weights();
  Eigen::VectorXd wLp(s.size());
  for (Eigen::Index m = 0; m < s.size(); ++m) {
    wLp(m) = w(m) * model.response().derivative(s(m));
  }
  return -(model.K() * wLp.asDiagonal() * model.B().transpose());
}

std::string species_list(int mask) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 0; mask >> i; ++i) {
    if (!(mask >> i & 1)) continue;
    os << (first ? "" : ",") << i + 1;
    first = false;
  }
  os << "}";
  return os.str();
}

// Zeroes sub-threshold entries and packages the optimality certificate at the
// resulting state.
EssResult make_result(const GeneralizedModel& model, Eigen::VectorXd n, int iterations,
                      EssResult::Method method, std::string warning) {
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (n(i) <= kSupportFloor) n(i) = 0.0;
  }
  const Eigen::VectorXd g = growth_rates(model, n);

  EssResult result;
  result.n = std::move(n);
  std::vector<double> eq;
  std::vector<double> ineq;
  for (Eigen::Index i = 0; i < result.n.size(); ++i) {
    if (result.n(i) > 0.0) {
      result.support.push_back(static_cast<int>(i));
      eq.push_back(std::abs(g(i)));
    } else {
      ineq.push_back(-g(i));
    }
  }
  result.equality_residuals = Eigen::Map<const Eigen::VectorXd>(eq.data(), eq.size());
  result.inequality_margins = Eigen::Map<const Eigen::VectorXd>(ineq.data(), ineq.size());
  result.F_value = lyapunov_value(model, result.n);
  result.iterations = iterations;
  result.method = method;
  result.warning = std::move(warning);
  return result;
}

// KKT test for the minimum of F over the nonnegative orthant.  grad F =
// -C .* g, so the conditions are checked in both scalings at once; the
// reported certificate (growth rates) then meets the tolerance regardless of
// the size of the balancing constants.
bool kkt_satisfied(const Eigen::VectorXd& n, const Eigen::VectorXd& g, const Eigen::VectorXd& C,
                   double tol) {
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (n(i) > kSupportFloor) {
      if (std::max(std::abs(g(i)), C(i) * std::abs(g(i))) > tol) return false;
    } else {
      if (std::max(g(i), C(i) * g(i)) > tol) return false;
    }
  }
  return true;
}

// Newton on the face where exactly the `support` species live, over the whole
// face (iterates may leave the positive part).  Returns the full-length state
// or nullopt when the solve breaks down.
std::optional<Eigen::VectorXd> solve_on_support(const GeneralizedModel& model,
                                                const std::vector<int>& support, double tol) {
  const Eigen::Index N = model.species_count();
  if (support.empty()) return Eigen::VectorXd::Zero(N);

  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd n = Eigen::VectorXd::Zero(N);
  const Eigen::VectorXd seed = initial_guess(model);
  for (int i : support) n(i) = seed(i);

  auto restricted = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd out(k);
    for (Eigen::Index a = 0; a < k; ++a) out(a) = full(support[a]);
    return out;
  };

  Eigen::VectorXd g = growth_rates(model, n);
  if (!g.allFinite()) return std::nullopt;
  double residual = restricted(g).cwiseAbs().maxCoeff();

  for (int iter = 0; iter < 60; ++iter) {
    if (residual <= tol) return n;

    const Eigen::MatrixXd J_full = growth_jacobian(model, n);
    Eigen::MatrixXd J(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) J(a, b) = J_full(support[a], support[b]);
    }
    if (!J.allFinite()) return std::nullopt;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd d = lu.solve(-restricted(g));

    // Damped step: shrink until the residual drops and stays clear of any
    // response-function pole (non-finite growth rates).
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-6) {
      Eigen::VectorXd trial = n;
      for (Eigen::Index a = 0; a < k; ++a) trial(support[a]) += alpha * d(a);
      if (trial.allFinite()) {
        const Eigen::VectorXd g_trial = growth_rates(model, trial);
        if (g_trial.allFinite()) {
          const double res_trial = restricted(g_trial).cwiseAbs().maxCoeff();
          if (res_trial <= (1.0 - 0.5 * alpha) * residual || res_trial <= tol) {
            n = trial;
            g = g_trial;
            residual = res_trial;
            accepted = true;
            break;
          }
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) return std::nullopt;
  }
  return residual <= tol ? std::optional<Eigen::VectorXd>(n) : std::nullopt;
}

}  // namespace

EssResult solve_ess(const GeneralizedModel& model, double tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw InvariantError("solve_ess requires tol > 0 and max_iter >= 1");
  }
  const AssumptionReport report = check_assumptions(model);

  // Degenerate input: every intrinsic rate non-positive.  The extinct state
  // is the minimizer; report it with a warning instead of rejecting.
  const Eigen::Index N = model.species_count();
  if (model.r().maxCoeff() <= 0.0) {
    return make_result(model, Eigen::VectorXd::Zero(N), 0, EssResult::Method::active_set_newton,
                       "non-extinction fails for every species (all intrinsic rates <= 0); the "
                       "extinct state n = 0 is the minimizer and persistence does not apply");
  }
  if (!report.strict_competition.pass) {
    throw HypothesisViolationError("strict competition fails: " + report.strict_competition.detail,
                                   "strict_competition", report.strict_competition.violating_species);
  }
  if (!report.non_extinction.pass) {
    throw HypothesisViolationError("non-extinction fails: " + report.non_extinction.detail,
                                   "non_extinction", report.non_extinction.violating_species);
  }

  Eigen::VectorXd n = initial_guess(model);
  for (int iter = 0; iter <= max_iter; ++iter) {
    Eigen::VectorXd candidate = n;
    for (Eigen::Index i = 0; i < N; ++i) {
      if (candidate(i) <= kSupportFloor) candidate(i) = 0.0;
    }
    const Eigen::VectorXd g = growth_rates(model, candidate);
    if (kkt_satisfied(candidate, g, model.C(), tol)) {
      return make_result(model, candidate, iter, EssResult::Method::active_set_newton, "");
    }
    if (iter == max_iter) break;

    // Newton direction on the free variables; bound-pinned coordinates with an
    // outward-pointing gradient stay put this round.
    const Eigen::VectorXd grad = lyapunov_gradient(model, n);
    std::vector<Eigen::Index> free_set;
    for (Eigen::Index i = 0; i < N; ++i) {
      if (!(n(i) <= kSupportFloor && grad(i) > 0.0)) free_set.push_back(i);
    }
    const Eigen::Index k = static_cast<Eigen::Index>(free_set.size());
    Eigen::VectorXd d = Eigen::VectorXd::Zero(N);
    if (k > 0) {
      const Eigen::MatrixXd H = lyapunov_hessian(model, n);
      Eigen::MatrixXd H_ff(k, k);
      Eigen::VectorXd grad_f(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        grad_f(a) = grad(free_set[a]);
        for (Eigen::Index b = 0; b < k; ++b) H_ff(a, b) = H(free_set[a], free_set[b]);
      }
      H_ff.diagonal().array() += 1e-12;
      const Eigen::VectorXd d_f = Eigen::LDLT<Eigen::MatrixXd>(H_ff).solve(-grad_f);
      if (!d_f.allFinite()) {
        throw NoConvergenceError("Newton system produced a non-finite direction", n, iter);
      }
      for (Eigen::Index a = 0; a < k; ++a) d(free_set[a]) = d_f(a);
      const double dmax = d.cwiseAbs().maxCoeff();
      if (dmax > 1e6) d *= 1e6 / dmax;
    }

    // Projected backtracking with an Armijo test on the realized displacement.
    const double F0 = lyapunov_value(model, n);
    double alpha = 1.0;
    bool moved = false;
    while (alpha >= 1e-12) {
      const Eigen::VectorXd trial = (n + alpha * d).cwiseMax(0.0);
      const double F_trial = lyapunov_value(model, trial);
      const double decrease = grad.dot(trial - n);
      if (F_trial <= F0 + 1e-4 * decrease && decrease < 0.0) {
        n = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) {
      throw NoConvergenceError("line search stalled before reaching the optimality tolerance", n,
                               iter);
    }
  }
  throw NoConvergenceError("projected Newton did not meet the optimality tolerance", n, max_iter);
}

EssVerification verify_ess(const GeneralizedModel& model, const Eigen::VectorXd& n, double tol) {
  detail::require_size(n, model.species_count(), "n");
  detail::require_finite(n, "n");
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (n(i) < 0.0) {
      throw InvariantError("candidate state is negative for species " + std::to_string(i + 1));
    }
  }
  const Eigen::VectorXd g = growth_rates(model, n);

  EssVerification v;
  double worst_eq = 0.0;
  double worst_ineq = -std::numeric_limits<double>::infinity();
  int eq_witness = -1;
  int ineq_witness = -1;
  bool any_absent = false;
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (n(i) > 0.0) {
      if (std::abs(g(i)) >= worst_eq) {
        worst_eq = std::abs(g(i));
        eq_witness = static_cast<int>(i);
      }
    } else {
      any_absent = true;
      if (g(i) > worst_ineq) {
        worst_ineq = g(i);
        ineq_witness = static_cast<int>(i);
      }
    }
  }
  v.worst_equality_residual = worst_eq;
  v.worst_inequality_excess = any_absent ? worst_ineq : 0.0;
  v.is_ess = worst_eq <= tol && v.worst_inequality_excess <= tol;
  if (!v.is_ess) {
    v.failing_species = worst_eq > tol ? eq_witness : ineq_witness;
  }
  return v;
}

std::vector<StationaryPoint> enumerate_stationary_points(const GeneralizedModel& model, double tol,
                                                         int max_species,
                                                         EnumerationDiagnostics* diagnostics) {
  const Eigen::Index N = model.species_count();
  if (N > max_species) {
    throw TooManySubsetsError("enumeration over " + std::to_string(N) +
                              " species exceeds the limit of " + std::to_string(max_species));
  }

  EnumerationDiagnostics local;
  EnumerationDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = EnumerationDiagnostics{};

  std::vector<StationaryPoint> points;
  for (int mask = 0; mask < (1 << N); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < N; ++i) {
      if (mask >> i & 1) support.push_back(i);
    }
    ++diag.supports_scanned;

    const std::optional<Eigen::VectorXd> solution = solve_on_support(model, support, tol);
    if (!solution) {
      if (diag.first_unsolved_mask < 0) diag.first_unsolved_mask = mask;
      continue;
    }
    ++diag.supports_solved;

    bool nonsingular = true;
    if (!support.empty()) {
      const Eigen::MatrixXd J_full = growth_jacobian(model, *solution);
      const Eigen::Index k = static_cast<Eigen::Index>(support.size());
      Eigen::MatrixXd J(k, k);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) J(a, b) = J_full(support[a], support[b]);
      }
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
      const double sigma_max = svd.singularValues().maxCoeff();
      nonsingular = svd.singularValues().minCoeff() > 1e-10 * std::max(1.0, sigma_max);
    }
    if (!nonsingular) {
      ++diag.singular_jacobians;
      if (diag.first_singular_mask < 0) diag.first_singular_mask = mask;
    }

    bool positive = true;
    for (int i : support) {
      if (!((*solution)(i) > tol)) positive = false;
    }
    if (!positive) continue;

    StationaryPoint point;
    point.n = *solution;
    point.support = support;
    point.restricted_jacobian_nonsingular = nonsingular;
    const Eigen::VectorXd g = growth_rates(model, point.n);
    bool invadable = false;
    for (int j = 0; j < N; ++j) {
      if (mask >> j & 1) continue;
      point.invasion_rates.emplace_back(j, g(j));
      if (g(j) > tol) invadable = true;
    }
    point.is_ess = !invadable;
    points.push_back(std::move(point));
  }
  return points;
}

Classification classify_stationary_point(const GeneralizedModel& model,
                                         const StationaryPoint& point, double tol) {
  detail::require_size(point.n, model.species_count(), "point.n");
  detail::require_finite(point.n, "point.n");
  const Eigen::VectorXd g = growth_rates(model, point.n);

  for (int i : point.support) {
    if (std::abs(g(i)) > tol) {
      throw NotStationaryError("growth rate of species " + std::to_string(i + 1) +
                               " is " + std::to_string(g(i)) + ", not stationary at tolerance " +
                               std::to_string(tol));
    }
  }

  std::vector<bool> present(model.species_count(), false);
  for (int i : point.support) present[i] = true;

  Classification c;
  for (Eigen::Index j = 0; j < model.species_count(); ++j) {
    if (present[j]) continue;
    if (g(j) > tol && g(j) > c.invasion_rate) {
      c.tag = StabilityClass::unstable;
      c.invading_species = static_cast<int>(j);
      c.invasion_rate = g(j);
    }
  }
  if (c.invading_species < 0) {
    c.tag = StabilityClass::attracting_ESS;
    c.invasion_rate = 0.0;
  }
  return c;
}

EssResult ess_from_enumeration(const GeneralizedModel& model, double tol, int max_species) {
  EnumerationDiagnostics diag;
  const std::vector<StationaryPoint> points =
      enumerate_stationary_points(model, tol, max_species, &diag);

  std::vector<const StationaryPoint*> verified;
  for (const StationaryPoint& p : points) {
    if (p.is_ess) verified.push_back(&p);
  }
  if (verified.empty()) {
    throw NoConvergenceError("no enumerated support carries an uninvadable stationary state",
                             Eigen::VectorXd::Zero(model.species_count()), diag.supports_scanned);
  }

  const StationaryPoint* best = verified.front();
  std::string warning;
  if (verified.size() > 1) {
    double best_F = lyapunov_value(model, best->n);
    for (const StationaryPoint* p : verified) {
      const double F = lyapunov_value(model, p->n);
      if (F < best_F) {
        best = p;
        best_F = F;
      }
    }
    warning = "multiple uninvadable stationary states found (non-degeneracy is suspect); "
              "reporting the lowest Lyapunov value";
  }
  return make_result(model, best->n, diag.supports_scanned, EssResult::Method::subset_enumeration,
                     std::move(warning));
}

AssumptionReport check_assumptions_with_enumeration(const GeneralizedModel& model, double tol,
                                                    int max_species) {
  AssumptionReport report = check_assumptions(model);
  try {
    EnumerationDiagnostics diag;
    enumerate_stationary_points(model, tol, max_species, &diag);
    if (diag.complete() && diag.all_nonsingular()) {
      report.non_degeneracy.verdict = NonDegeneracyCheck::Verdict::verified_heuristically;
      std::ostringstream os;
      os << "all " << diag.supports_scanned
         << " supports admit a stationary state with nonsingular restricted Jacobian";
      report.non_degeneracy.explanation = os.str();
    } else if (!diag.complete()) {
      report.non_degeneracy.explanation =
          "no stationary state found on support " + species_list(diag.first_unsolved_mask) +
          "; uniqueness per support could not be corroborated";
    } else {
      report.non_degeneracy.explanation =
          "singular restricted Jacobian on support " + species_list(diag.first_singular_mask) +
          "; the stationary state there may not be isolated";
    }
  } catch (const TooManySubsetsError& e) {
    report.non_degeneracy.explanation = std::string("enumeration skipped: ") + e.what();
  }
  return report;
}

}  // namespace essdyn
