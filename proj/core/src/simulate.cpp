#include "essdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "essdyn/errors.hpp"
#include "essdyn/lyapunov.hpp"
#include "validate.hpp"

namespace essdyn {

namespace {

constexpr double kExtinctThreshold = 1e-300;  // below this a start density is not representable

// Dormand-Prince 5(4) tableau.  Stage 7 is the FSAL evaluation at the
// fifth-order solution; e = b5 - b4 weights the error estimate.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;

void validate_options(const SimOptions& opts) {
  if (!(opts.t_end > 0.0) || !std::isfinite(opts.t_end)) {
    throw InvariantError("t_end must be finite and > 0");
  }
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) {
    throw InvariantError("rel_tol and abs_tol must be > 0");
  }
  if (opts.max_steps < 1) throw InvariantError("max_steps must be >= 1");
  if (opts.record_stride < 1) throw InvariantError("record_stride must be >= 1");
  if (!(opts.convergence_window > 0.0) || !(opts.convergence_tol > 0.0)) {
    throw InvariantError("convergence_window and convergence_tol must be > 0");
  }
}

}  // namespace

Trajectory simulate(const GeneralizedModel& model, const Eigen::VectorXd& n0,
                    const SimOptions& opts) {
  validate_options(opts);
  const Eigen::Index N = model.species_count();
  detail::require_size(n0, N, "n0");
  detail::require_finite(n0, "n0");

  Trajectory traj;
  std::vector<Eigen::Index> active;
  Eigen::VectorXd n_start = Eigen::VectorXd::Zero(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    if (n0(i) < 0.0) {
      throw InvariantError("n0(" + std::to_string(i) + ") is negative");
    }
    if (n0(i) >= kExtinctThreshold) {
      active.push_back(i);
      n_start(i) = n0(i);
    } else if (n0(i) > 0.0) {
      std::ostringstream os;
      os << "species " << i + 1 << " starts below the representable density threshold "
         << kExtinctThreshold << " and is treated as extinct";
      traj.warnings.push_back(os.str());
    }
  }

  auto record = [&](double t, const Eigen::VectorXd& n) {
    traj.times.push_back(t);
    traj.states.push_back(n);
    traj.F_values.push_back(lyapunov_value(model, n));
    traj.dissipation.push_back(lyapunov_dissipation(model, n));
  };

  // With nothing alive the state is constant; no integration to do.
  if (active.empty()) {
    record(0.0, n_start);
    record(opts.t_end, n_start);
    traj.terminated_by =
        opts.t_end >= opts.convergence_window ? Termination::converged : Termination::t_end;
    return traj;
  }

  const Eigen::Index A = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd u(A);
  for (Eigen::Index a = 0; a < A; ++a) u(a) = std::log(n_start(active[a]));

  // State map and vector field in log coordinates: u_a = ln n_{active[a]},
  // du_a/dt = g_{active[a]}(n).  Extinct species stay at zero inside n.
  auto to_densities = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(N);
    for (Eigen::Index a = 0; a < A; ++a) n(active[a]) = std::exp(v(a));
    return n;
  };
  auto rhs = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) -> bool {
    const Eigen::VectorXd n = to_densities(v);
    if (!n.allFinite()) return false;
    const Eigen::VectorXd g = growth_rates(model, n);
    if (!g.allFinite()) return false;
    out.resize(A);
    for (Eigen::Index a = 0; a < A; ++a) out(a) = g(active[a]);
    return true;
  };

  Eigen::VectorXd k1(A), k2(A), k3(A), k4(A), k5(A), k6(A), k7(A);
  if (!rhs(u, k1)) {
    throw NonFiniteStateError("growth rates are not finite at the initial state", 0.0);
  }
  record(0.0, n_start);

  // Starting step size: compare the state scale against the derivative scale,
  // then correct with one explicit Euler probe.
  double h;
  {
    auto scaled_norm = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& ref) {
      double acc = 0.0;
      for (Eigen::Index a = 0; a < A; ++a) {
        const double sc = opts.abs_tol + opts.rel_tol * std::abs(ref(a));
        acc += (v(a) / sc) * (v(a) / sc);
      }
      return std::sqrt(acc / static_cast<double>(A));
    };
    const double d0 = scaled_norm(u, u);
    const double d1 = scaled_norm(k1, u);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, opts.t_end);
    Eigen::VectorXd f1(A);
    double d2 = 0.0;
    if (rhs(u + h0 * k1, f1)) {
      d2 = scaled_norm(f1 - k1, u) / h0;
    }
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, opts.t_end});
  }

  double t = 0.0;
  double err_prev = 1e-4;
  double facmax = 5.0;
  long attempts = 0;
  int since_record = 0;

  // Trailing window of accepted states for the stationarity test.
  std::deque<std::pair<double, Eigen::VectorXd>> window;
  double stationary_since = std::numeric_limits<double>::quiet_NaN();

  Eigen::VectorXd n_current = to_densities(u);
  traj.terminated_by = Termination::t_end;

  while (t < opts.t_end) {
    if (attempts >= opts.max_steps) {
      traj.terminated_by = Termination::max_steps;
      traj.warnings.push_back("step budget exhausted at t = " + std::to_string(t));
      break;
    }
    h = std::min(h, opts.t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw StepUnderflowError("step size underflow at t = " + std::to_string(t), t, n_current);
    }

    ++attempts;
    bool finite = true;
    double err = std::numeric_limits<double>::infinity();
    Eigen::VectorXd u_new;
    finite = rhs(u + h * (kA21 * k1), k2) &&
             rhs(u + h * (kA31 * k1 + kA32 * k2), k3) &&
             rhs(u + h * (kA41 * k1 + kA42 * k2 + kA43 * k3), k4) &&
             rhs(u + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4), k5) &&
             rhs(u + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5), k6);
    if (finite) {
      u_new = u + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      finite = u_new.allFinite() && rhs(u_new, k7);
    }
    if (finite) {
      const Eigen::VectorXd e =
          h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
      double acc = 0.0;
      for (Eigen::Index a = 0; a < A; ++a) {
        const double sc =
            opts.abs_tol + opts.rel_tol * std::max(std::abs(u(a)), std::abs(u_new(a)));
        acc += (e(a) / sc) * (e(a) / sc);
      }
      err = std::sqrt(acc / static_cast<double>(A));
    }

    if (finite && err <= 1.0) {
      t += h;
      u = std::move(u_new);
      k1 = k7;  // first-same-as-last
      ++traj.steps_accepted;
      n_current = to_densities(u);

      if (++since_record >= opts.record_stride) {
        record(t, n_current);
        since_record = 0;
      }

      // Stationarity: per-species flux |g_i n_i| and displacement against the
      // whole trailing window small, sustained for a full window length.
      double flux = 0.0;
      for (Eigen::Index a = 0; a < A; ++a) {
        flux = std::max(flux, std::abs(k1(a)) * n_current(active[a]));
      }
      window.emplace_back(t, n_current);
      while (!window.empty() && window.front().first < t - opts.convergence_window) {
        window.pop_front();
      }
      double displacement = 0.0;
      for (const auto& past : window) {
        displacement = std::max(displacement, (n_current - past.second).cwiseAbs().maxCoeff());
      }
      if (flux < opts.convergence_tol && displacement < opts.convergence_tol) {
        if (std::isnan(stationary_since)) stationary_since = t;
        if (t - stationary_since >= opts.convergence_window) {
          traj.terminated_by = Termination::converged;
          break;
        }
      } else {
        stationary_since = std::numeric_limits<double>::quiet_NaN();
      }

      const double factor =
          0.9 * std::pow(err > 0.0 ? err : 1e-16, -0.14) * std::pow(err_prev, 0.08);
      h *= std::clamp(factor, 0.2, facmax);
      err_prev = std::max(err, 1e-4);
      facmax = 5.0;
    } else {
      ++traj.steps_rejected;
      const double factor =
          finite ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.2;
      h *= factor;
      facmax = 1.0;
    }
  }

  if (traj.times.back() < t) {
    record(t, n_current);
  }
  return traj;
}

MonotoneReport check_lyapunov_monotone(const Trajectory& traj, double slack) {
  MonotoneReport report;
  double max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < traj.F_values.size(); ++k) {
    const double increase = traj.F_values[k + 1] - traj.F_values[k];
    const double excess = increase - slack * (1.0 + std::abs(traj.F_values[k]));
    if (excess > max_excess) {
      max_excess = excess;
      report.worst_index = k + 1;  // the record that rose above the bound
      report.worst_increase = increase;
    }
  }
  report.pass = !(max_excess > 0.0);
  report.worst_excess = std::max(max_excess, 0.0);
  return report;
}

ConvergenceCheck detect_convergence(const Trajectory& traj, const Eigen::VectorXd& target,
                                    double tol) {
  if (traj.states.empty()) throw InvariantError("trajectory has no recorded states");
  detail::require_size(target, traj.states.back().size(), "target");
  detail::require_finite(target, "target");
  ConvergenceCheck check;
  check.error_norm = (traj.terminal_state() - target).cwiseAbs().maxCoeff();
  check.converged = check.error_norm <= tol;
  return check;
}

}  // namespace essdyn
