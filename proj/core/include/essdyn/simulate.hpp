#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "essdyn/model.hpp"

namespace essdyn {

struct SimOptions {
  double t_end = 100.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  long max_steps = 1000000;
  int record_stride = 1;            // record every k-th accepted step
  double convergence_window = 10.0; // duration over which stationarity is tested
  double convergence_tol = 1e-9;
};

enum class Termination { t_end, converged, max_steps };

/// Recorded solution of one run.  States are entrywise nonnegative, times
/// strictly increasing, and F non-increasing up to integrator tolerance.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> F_values;
  std::vector<double> dissipation;
  Termination terminated_by = Termination::t_end;
  long steps_accepted = 0;
  long steps_rejected = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  const Eigen::VectorXd& terminal_state() const { return states.back(); }
};

/// Integrates the model with a Dormand-Prince 5(4) embedded pair and PI step
/// control, in log coordinates u_i = ln n_i for the species that start
/// positive; species starting at zero are held at zero exactly, so the faces
/// of the orthant are invariant by construction.  Stops early (converged)
/// when the flux max_i |g_i n_i| and the displacement against every state of
/// the trailing window stay below convergence_tol for a full window.
Trajectory simulate(const GeneralizedModel& model, const Eigen::VectorXd& n0,
                    const SimOptions& opts);

struct MonotoneReport {
  bool pass = true;
  std::size_t worst_index = 0;    // record rising the most above its predecessor's bound
  double worst_increase = 0.0;    // F[worst_index] - F[worst_index - 1]
  double worst_excess = 0.0;      // amount by which the slack bound is exceeded
};

/// Passes iff F[k+1] <= F[k] + slack*(1+|F[k]|) for every consecutive pair.
MonotoneReport check_lyapunov_monotone(const Trajectory& traj, double slack = 1e-9);

struct ConvergenceCheck {
  bool converged = false;
  double error_norm = 0.0;  // infinity norm of terminal state minus target
};

ConvergenceCheck detect_convergence(const Trajectory& traj, const Eigen::VectorXd& target,
                                    double tol);

}  // namespace essdyn
