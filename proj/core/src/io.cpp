#include "essdyn/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "essdyn/errors.hpp"

namespace essdyn {

namespace {

using ojson = nlohmann::ordered_json;

const ojson& field(const ojson& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

double as_number(const ojson& j, const char* name) {
  if (!j.is_number()) throw ParseError(std::string("field '") + name + "' must be a number");
  return j.get<double>();
}

Eigen::VectorXd as_vector(const ojson& j, const char* name) {
  if (!j.is_array()) throw ParseError(std::string("field '") + name + "' must be an array");
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw ParseError(std::string("field '") + name + "' must contain only numbers");
    }
    v(i++) = x.get<double>();
  }
  return v;
}

Eigen::MatrixXd as_matrix(const ojson& j, const char* name) {
  if (!j.is_array()) {
    throw ParseError(std::string("field '") + name + "' must be an array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw ParseError(std::string("field '") + name + "' must be an array of rows");
    }
    if (r == 0) {
      m.resize(rows, static_cast<Eigen::Index>(row.size()));
    } else if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw ParseError(std::string("field '") + name + "' has rows of unequal length");
    }
    Eigen::Index c = 0;
    for (const auto& x : row) {
      if (!x.is_number()) {
        throw ParseError(std::string("field '") + name + "' must contain only numbers");
      }
      m(r, c++) = x.get<double>();
    }
    ++r;
  }
  return m;
}

ojson vector_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson matrix_json(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ResponseFunction parse_response(const ojson& j) {
  if (!j.is_object()) throw ParseError("field 'response' must be an object");
  const ojson& fam = field(j, "family");
  if (!fam.is_string()) throw ParseError("field 'response.family' must be a string");
  const std::string family = fam.get<std::string>();
  if (family == "identity") return ResponseFunction::identity();
  if (family == "saturating") {
    return ResponseFunction::saturating(as_number(field(j, "scale"), "response.scale"));
  }
  throw ParseError("unknown response family '" + family + "'");
}

ojson response_json(const ResponseFunction& response) {
  switch (response.family()) {
    case ResponseFunction::Family::identity:
      return ojson{{"family", "identity"}};
    case ResponseFunction::Family::saturating:
      return ojson{{"family", "saturating"}, {"scale", response.scale()}};
    case ResponseFunction::Family::custom:
      break;
  }
  throw InvariantError("custom response functions cannot be serialized");
}

ojson generalized_json(const GeneralizedModel& model) {
  return ojson{{"kind", "generalized"},
               {"r", vector_json(model.r())},
               {"K", matrix_json(model.K())},
               {"B", matrix_json(model.B())},
               {"weights", vector_json(model.measure().weights())},
               {"C", vector_json(model.C())},
               {"response", response_json(model.response())}};
}

ojson hypothesis_json(const HypothesisCheck& check) {
  ojson j{{"pass", check.pass},
          {"evaluated", check.evaluated},
          {"margin", check.margin},
          {"detail", check.detail}};
  if (check.violating_species >= 0) {
    j["violating_species"] = check.violating_species + 1;
  } else {
    j["violating_species"] = nullptr;
  }
  return j;
}

ojson support_json(const std::vector<int>& support) {
  ojson a = ojson::array();
  for (int i : support) a.push_back(i + 1);
  return a;
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::t_end: return "t_end";
    case Termination::converged: return "converged";
    case Termination::max_steps: return "max_steps";
  }
  return "t_end";
}

}  // namespace

AnyModel parse_model_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("model document must be a JSON object");
  const ojson& kind_field = field(j, "kind");
  if (!kind_field.is_string()) throw ParseError("field 'kind' must be a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "lotka_volterra") {
    return LotkaVolterraModel(as_vector(field(j, "r"), "r"), as_matrix(field(j, "b"), "b"));
  }
  if (kind == "resource") {
    return ResourceModel(as_vector(field(j, "death_rates"), "death_rates"),
                         as_matrix(field(j, "eta"), "eta"),
                         as_vector(field(j, "supply"), "supply"));
  }
  if (kind == "generalized") {
    return GeneralizedModel(as_vector(field(j, "r"), "r"), as_matrix(field(j, "K"), "K"),
                            as_matrix(field(j, "B"), "B"),
                            DiscreteMeasure(as_vector(field(j, "weights"), "weights")),
                            as_vector(field(j, "C"), "C"), parse_response(field(j, "response")));
  }
  throw ParseError("unknown model kind '" + kind + "'");
}

AnyModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_json(buffer.str());
}

std::string model_to_json(const GeneralizedModel& model) { return generalized_json(model).dump(2); }

std::string model_to_json(const LotkaVolterraModel& model) {
  return ojson{{"kind", "lotka_volterra"}, {"r", vector_json(model.r())},
               {"b", matrix_json(model.b())}}
      .dump(2);
}

std::string model_to_json(const ResourceModel& model) {
  return ojson{{"kind", "resource"},
               {"death_rates", vector_json(model.d())},
               {"eta", matrix_json(model.eta())},
               {"supply", vector_json(model.I0())}}
      .dump(2);
}

std::string report_to_json(const AssumptionReport& report) {
  const char* verdict =
      report.non_degeneracy.verdict == NonDegeneracyCheck::Verdict::verified_heuristically
          ? "verified_heuristically"
          : "unverified";
  return ojson{{"strict_competition", hypothesis_json(report.strict_competition)},
               {"symmetry", hypothesis_json(report.symmetry)},
               {"non_extinction", hypothesis_json(report.non_extinction)},
               {"non_degeneracy",
                ojson{{"verdict", verdict}, {"explanation", report.non_degeneracy.explanation}}},
               {"hypotheses_pass", report.hypotheses_pass()}}
      .dump(2);
}

std::string ess_result_to_json(const EssResult& result) {
  return ojson{{"n", vector_json(result.n)},
               {"support", support_json(result.support)},
               {"equality_residuals", vector_json(result.equality_residuals)},
               {"inequality_margins", vector_json(result.inequality_margins)},
               {"F_value", result.F_value},
               {"iterations", result.iterations},
               {"method", result.method == EssResult::Method::active_set_newton
                              ? "active_set_newton"
                              : "subset_enumeration"},
               {"warning", result.warning}}
      .dump(2);
}

std::string embedding_to_json(const EmbeddingResult& embedding) {
  return ojson{{"C", vector_json(embedding.C)},
               {"m", matrix_json(embedding.m)},
               {"eigenvalues", vector_json(embedding.eigenvalues)},
               {"eigenvectors", matrix_json(embedding.eigenvectors)},
               {"model", generalized_json(embedding.model)}}
      .dump(2);
}

std::string stationary_points_to_json(const GeneralizedModel& model,
                                      const std::vector<StationaryPoint>& points) {
  ojson list = ojson::array();
  for (const StationaryPoint& p : points) {
    ojson invasions = ojson::array();
    for (const auto& [species, rate] : p.invasion_rates) {
      invasions.push_back(ojson{{"species", species + 1}, {"rate", rate}});
    }
    const Classification c = classify_stationary_point(model, p);
    ojson cls{{"tag", c.tag == StabilityClass::attracting_ESS ? "attracting_ESS" : "unstable"}};
    if (c.invading_species >= 0) {
      cls["invading_species"] = c.invading_species + 1;
      cls["invasion_rate"] = c.invasion_rate;
    } else {
      cls["invading_species"] = nullptr;
      cls["invasion_rate"] = 0.0;
    }
    list.push_back(ojson{{"n", vector_json(p.n)},
                         {"support", support_json(p.support)},
                         {"restricted_jacobian_nonsingular", p.restricted_jacobian_nonsingular},
                         {"invasion_rates", std::move(invasions)},
                         {"is_ess", p.is_ess},
                         {"classification", std::move(cls)}});
  }
  return ojson{{"count", points.size()}, {"points", std::move(list)}}.dump(2);
}

std::string trajectory_summary_to_json(const GeneralizedModel& model, const Trajectory& traj,
                                       const std::string& csv_path) {
  if (traj.states.empty()) throw InvariantError("trajectory has no recorded states");
  const MonotoneReport monotone = check_lyapunov_monotone(traj);
  ojson j{{"terminated_by", termination_name(traj.terminated_by)},
          {"t_final", traj.times.back()},
          {"records", traj.size()},
          {"steps_accepted", traj.steps_accepted},
          {"steps_rejected", traj.steps_rejected},
          {"terminal_state", vector_json(traj.terminal_state())},
          {"terminal_growth_rates", vector_json(growth_rates(model, traj.terminal_state()))},
          {"F_final", traj.F_values.back()},
          {"dissipation_final", traj.dissipation.back()},
          {"lyapunov_monotone",
           ojson{{"pass", monotone.pass},
                 {"worst_increase", monotone.worst_increase},
                 {"worst_excess", monotone.worst_excess}}},
          {"warnings", traj.warnings}};
  if (csv_path.empty()) {
    j["csv_path"] = nullptr;
  } else {
    j["csv_path"] = csv_path;
  }
  return j.dump(2);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.states.empty()) throw InvariantError("trajectory has no recorded states");
  const Eigen::Index N = traj.states.front().size();
  out << "t";
  for (Eigen::Index i = 1; i <= N; ++i) out << ",n_" << i;
  out << ",F,dFdt\n";

  char buf[40];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    put(traj.times[k]);
    for (Eigen::Index i = 0; i < N; ++i) {
      out << ',';
      put(traj.states[k](i));
    }
    out << ',';
    put(traj.F_values[k]);
    out << ',';
    put(traj.dissipation[k]);
    out << '\n';
  }
}

}  // namespace essdyn
