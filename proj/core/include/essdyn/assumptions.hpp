#pragma once

#include <string>

#include "essdyn/model.hpp"

namespace essdyn {

/// Verdict for one of the quantitative hypotheses.  The margin is positive
/// exactly when the hypothesis holds; for per-species conditions it is the
/// minimum over species and `violating_species` is the argmin (0-based,
/// -1 when every species passes).
struct HypothesisCheck {
  bool pass = false;
  bool evaluated = true;
  int violating_species = -1;
  double margin = 0.0;
  std::string detail;
};

/// Uniqueness-per-support has no general decision procedure; it is only ever
/// reported as verified-heuristically after a stationary-point enumeration
/// found, for every support, a solution with nonsingular restricted Jacobian.
struct NonDegeneracyCheck {
  enum class Verdict { verified_heuristically, unverified };
  Verdict verdict = Verdict::unverified;
  std::string explanation;
};

struct AssumptionReport {
  HypothesisCheck strict_competition;  // L increasing, r_i < (integral K_i) L(inf)
  HypothesisCheck symmetry;            // B = diag(C) K residual
  HypothesisCheck non_extinction;      // r_i > (integral K_i) L(0), strict
  NonDegeneracyCheck non_degeneracy;

  /// True when the three quantitative hypotheses all hold.
  bool hypotheses_pass() const {
    return strict_competition.pass && symmetry.pass && non_extinction.pass;
  }
};

/// Checks strict competition, symmetry, and non-extinction on the instance.
/// Non-degeneracy is reported unverified here; the equilibrium module offers
/// an enumeration-backed refinement.  Failures are report entries, never
/// exceptions.
AssumptionReport check_assumptions(const GeneralizedModel& model);

}  // namespace essdyn
