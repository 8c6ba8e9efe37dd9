#include "essdyn/assumptions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace essdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool derivative_positive_on_grid(const ResponseFunction& response) {
  // Built-in families are strictly increasing by construction; a custom
  // triple is probed on a log-spaced grid of the nonnegative axis.
  if (response.family() != ResponseFunction::Family::custom) {
    return true;
  }
  if (!(response.derivative(0.0) > 0.0)) {
    return false;
  }
  for (double x = 1e-6; x <= 1e6; x *= 10.0) {
    if (!(response.derivative(x) > 0.0)) {
      return false;
    }
  }
  return true;
}

}  // namespace

AssumptionReport check_assumptions(const GeneralizedModel& model) {
  AssumptionReport report;
  const Eigen::Index N = model.species_count();
  const Eigen::VectorXd& r = model.r();
  const Eigen::VectorXd kernel_mass = model.K() * model.measure().weights();
  const double L_inf = model.response().limit_at_infinity();
  const double L_0 = model.response().value(0.0);

  // Strict competition: L increasing and r_i below the saturated intake bound.
  {
    HypothesisCheck& c = report.strict_competition;
    if (!derivative_positive_on_grid(model.response())) {
      c.pass = false;
      c.margin = -kInf;
      c.detail = "response derivative is not positive on the sampled grid";
    } else {
      c.pass = true;
      c.margin = kInf;
      // Self-competition (K diag(w) B^T)_{ii}; basis-independent, unlike the
      // raw kernel mass, whose sign flips with eigenmode orientation.
      const Eigen::VectorXd self_mass =
          (model.K().cwiseProduct(model.B()) * model.measure().weights());
      for (Eigen::Index i = 0; i < N; ++i) {
        const bool unbounded_competition = kernel_mass(i) > 0.0 || self_mass(i) > 0.0;
        const double bound =
            std::isinf(L_inf) ? (unbounded_competition ? kInf : 0.0) : kernel_mass(i) * L_inf;
        const double margin = bound - r(i);
        if (margin < c.margin) {
          c.margin = margin;
          c.violating_species = margin > 0.0 ? -1 : static_cast<int>(i);
        }
      }
      c.pass = c.margin > 0.0;
      if (!c.pass) {
        std::ostringstream os;
        os << "species " << c.violating_species + 1
           << " can grow past the saturated competition bound (margin " << c.margin << ")";
        c.detail = os.str();
      }
    }
  }

  // Symmetry: B = diag(C) K, already enforced at construction; report the slack.
  {
    HypothesisCheck& c = report.symmetry;
    const double scale = 1.0 + model.B().cwiseAbs().maxCoeff();
    const double residual =
        (model.B() - model.C().asDiagonal() * model.K()).cwiseAbs().maxCoeff();
    c.pass = residual <= 1e-10 * scale;
    c.margin = 1e-10 * scale - residual;
    std::ostringstream os;
    os << "max |B - diag(C) K| = " << residual;
    c.detail = os.str();
  }

  // Non-extinction: r_i strictly above the zero-population intake.
  {
    HypothesisCheck& c = report.non_extinction;
    c.margin = kInf;
    for (Eigen::Index i = 0; i < N; ++i) {
      const double margin = r(i) - kernel_mass(i) * L_0;
      if (margin < c.margin) {
        c.margin = margin;
        c.violating_species = margin > 0.0 ? -1 : static_cast<int>(i);
      }
    }
    c.pass = c.margin > 0.0;
    if (!c.pass) {
      std::ostringstream os;
      os << "species " << c.violating_species + 1 << " cannot invade the empty state (margin "
         << c.margin << ")";
      c.detail = os.str();
    }
  }

  report.non_degeneracy.verdict = NonDegeneracyCheck::Verdict::unverified;
  report.non_degeneracy.explanation =
      "uniqueness per support not assessed; run the enumeration-backed check";
  return report;
}

}  // namespace essdyn
