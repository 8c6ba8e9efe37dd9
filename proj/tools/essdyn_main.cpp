// Command line front end: model files in, JSON reports and CSV trajectories
// out.  Exit codes: 0 success, 1 hypothesis or solver failure, 2 bad input.

#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "essdyn/equilibrium.hpp"
#include "essdyn/errors.hpp"
#include "essdyn/io.hpp"
#include "essdyn/simulate.hpp"
#include "essdyn/symmetry.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw essdyn::ParseError("cannot open output file '" + path + "'");
  out << text << "\n";
}

// Every subcommand works on the generalized form; classical systems are
// rewritten through their detailed-balance embedding, chemostat systems
// through their exact node-per-resource form.
essdyn::GeneralizedModel generalize(const essdyn::AnyModel& any) {
  if (const auto* lv = std::get_if<essdyn::LotkaVolterraModel>(&any)) {
    const Eigen::VectorXd C = essdyn::find_balancing_constants(lv->b());
    return essdyn::embed_lotka_volterra(*lv, C).model;
  }
  if (const auto* rm = std::get_if<essdyn::ResourceModel>(&any)) {
    return essdyn::resource_to_generalized(*rm);
  }
  return std::get<essdyn::GeneralizedModel>(any);
}

int run_check(const std::string& model_path, const std::string& out_path, double tol,
              bool enumerate, int max_species) {
  const essdyn::AnyModel any = essdyn::load_model_file(model_path);

  essdyn::AssumptionReport report;
  bool embedded = true;
  try {
    const essdyn::GeneralizedModel model = generalize(any);
    report = enumerate ? essdyn::check_assumptions_with_enumeration(model, tol, max_species)
                       : essdyn::check_assumptions(model);
  } catch (const essdyn::NoBalancingError& e) {
    embedded = false;
    report.symmetry.pass = false;
    report.symmetry.violating_species = e.species_i;
    report.symmetry.detail = e.what();
  } catch (const essdyn::NotPositiveDefiniteError& e) {
    embedded = false;
    report.symmetry.pass = false;
    report.symmetry.margin = e.offending_eigenvalue;
    report.symmetry.detail = e.what();
  }
  if (!embedded) {
    for (essdyn::HypothesisCheck* check : {&report.strict_competition, &report.non_extinction}) {
      check->pass = false;
      check->evaluated = false;
      check->detail = "not evaluated: the system has no symmetric form";
    }
    report.non_degeneracy.explanation = "not evaluated: the system has no symmetric form";
  }

  emit(essdyn::report_to_json(report), out_path);
  return report.hypotheses_pass() ? kExitSuccess : kExitFailure;
}

int run_ess(const std::string& model_path, const std::string& out_path, double tol, int max_iter,
            bool enumerate, int max_species) {
  const essdyn::GeneralizedModel model = generalize(essdyn::load_model_file(model_path));
  const essdyn::EssResult result = enumerate
                                       ? essdyn::ess_from_enumeration(model, tol, max_species)
                                       : essdyn::solve_ess(model, tol, max_iter);
  if (!result.warning.empty()) std::cerr << "warning: " << result.warning << "\n";
  emit(essdyn::ess_result_to_json(result), out_path);
  return kExitSuccess;
}

int run_simulate(const std::string& model_path, const std::string& out_path,
                 const std::vector<double>& n0_values, const essdyn::SimOptions& opts) {
  const essdyn::GeneralizedModel model = generalize(essdyn::load_model_file(model_path));
  const Eigen::VectorXd n0 =
      Eigen::Map<const Eigen::VectorXd>(n0_values.data(), static_cast<Eigen::Index>(n0_values.size()));

  const essdyn::Trajectory traj = essdyn::simulate(model, n0, opts);
  for (const std::string& w : traj.warnings) std::cerr << "warning: " << w << "\n";

  if (out_path.empty()) {
    // CSV on stdout for piping; the summary goes to stderr so it cannot
    // corrupt the data stream.
    essdyn::write_trajectory_csv(std::cout, traj);
    std::cerr << essdyn::trajectory_summary_to_json(model, traj, "") << "\n";
  } else {
    std::ofstream csv(out_path);
    if (!csv) throw essdyn::ParseError("cannot open output file '" + out_path + "'");
    essdyn::write_trajectory_csv(csv, traj);
    std::cout << essdyn::trajectory_summary_to_json(model, traj, out_path) << "\n";
  }
  return traj.terminated_by == essdyn::Termination::max_steps ? kExitFailure : kExitSuccess;
}

int run_embed(const std::string& model_path, const std::string& out_path) {
  const essdyn::AnyModel any = essdyn::load_model_file(model_path);
  const auto* lv = std::get_if<essdyn::LotkaVolterraModel>(&any);
  if (!lv) {
    throw essdyn::ParseError("embed requires a model of kind 'lotka_volterra'");
  }
  const Eigen::VectorXd C = essdyn::find_balancing_constants(lv->b());
  emit(essdyn::embedding_to_json(essdyn::embed_lotka_volterra(*lv, C)), out_path);
  return kExitSuccess;
}

int run_enumerate(const std::string& model_path, const std::string& out_path, double tol,
                  int max_species) {
  const essdyn::GeneralizedModel model = generalize(essdyn::load_model_file(model_path));
  const std::vector<essdyn::StationaryPoint> points =
      essdyn::enumerate_stationary_points(model, tol, max_species);
  emit(essdyn::stationary_points_to_json(model, points), out_path);
  return kExitSuccess;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const essdyn::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const essdyn::InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const essdyn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"competitive population dynamics: hypothesis checks, stable states, trajectories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "essdyn 0.1.0");

  long seed = 0;  // reserved for future stochastic features; accepted everywhere
  app.add_option("--seed", seed, "random seed (reserved, currently unused)");

  std::string model_path;
  std::string out_path;
  double tol = 1e-10;
  int max_iter = 100;
  int max_species = 12;
  bool enumerate = false;
  std::vector<double> n0_values;
  essdyn::SimOptions opts;

  CLI::App* check = app.add_subcommand("check", "evaluate the theorem hypotheses on a model");
  check->add_option("--model", model_path, "model JSON file")->required();
  check->add_option("--out", out_path, "write the report here instead of stdout");
  check->add_option("--tol", tol, "stationarity tolerance for the enumeration sweep");
  check->add_flag("--enumerate", enumerate,
                  "back the non-degeneracy verdict with a stationary-point enumeration");
  check->add_option("--max-species", max_species, "enumeration size limit");

  CLI::App* ess = app.add_subcommand("ess", "compute the evolutionarily stable state");
  ess->add_option("--model", model_path, "model JSON file")->required();
  ess->add_option("--out", out_path, "write the result here instead of stdout");
  ess->add_option("--tol", tol, "optimality tolerance");
  ess->add_option("--max-iter", max_iter, "projected Newton iteration limit");
  ess->add_flag("--enumerate", enumerate, "solve by subset enumeration instead of projected Newton");
  ess->add_option("--max-species", max_species, "enumeration size limit");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the dynamics from a start state");
  simulate->add_option("--model", model_path, "model JSON file")->required();
  simulate->add_option("--n0", n0_values, "initial densities, comma separated")
      ->required()
      ->delimiter(',');
  simulate->add_option("--out", out_path, "write the trajectory CSV here (summary then on stdout)");
  simulate->add_option("--t-end", opts.t_end, "integration horizon");
  simulate->add_option("--rel-tol", opts.rel_tol, "relative step error tolerance");
  simulate->add_option("--abs-tol", opts.abs_tol, "absolute step error tolerance");
  simulate->add_option("--max-steps", opts.max_steps, "step attempt budget");
  simulate->add_option("--record-stride", opts.record_stride, "record every k-th accepted step");
  simulate->add_option("--convergence-window", opts.convergence_window,
                       "duration over which stationarity must hold");
  simulate->add_option("--convergence-tol", opts.convergence_tol,
                       "flux and displacement threshold for early stopping");

  CLI::App* embed = app.add_subcommand("embed", "symmetrize a classical system");
  embed->add_option("--model", model_path, "model JSON file (kind lotka_volterra)")->required();
  embed->add_option("--out", out_path, "write the embedding here instead of stdout");

  CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "list all stationary states by support");
  enumerate_cmd->add_option("--model", model_path, "model JSON file")->required();
  enumerate_cmd->add_option("--out", out_path, "write the list here instead of stdout");
  enumerate_cmd->add_option("--tol", tol, "stationarity tolerance");
  enumerate_cmd->add_option("--max-species", max_species, "enumeration size limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitBadInput;
  }

  if (*check) {
    return guarded([&] { return run_check(model_path, out_path, tol, enumerate, max_species); });
  }
  if (*ess) {
    return guarded(
        [&] { return run_ess(model_path, out_path, tol, max_iter, enumerate, max_species); });
  }
  if (*simulate) {
    return guarded([&] { return run_simulate(model_path, out_path, n0_values, opts); });
  }
  if (*embed) {
    return guarded([&] { return run_embed(model_path, out_path); });
  }
  if (*enumerate_cmd) {
    return guarded([&] { return run_enumerate(model_path, out_path, tol, max_species); });
  }
  return kExitBadInput;
}
