#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "essdyn/assumptions.hpp"
#include "essdyn/equilibrium.hpp"
#include "essdyn/model.hpp"
#include "essdyn/simulate.hpp"
#include "essdyn/symmetry.hpp"

namespace essdyn {

using AnyModel = std::variant<LotkaVolterraModel, ResourceModel, GeneralizedModel>;

/// Parses a model document {"kind": "lotka_volterra"|"resource"|"generalized", ...}.
/// Matrices are row-major arrays of arrays; the response function is
/// {"family":"identity"} or {"family":"saturating","scale":s}.  Throws
/// ParseError on malformed documents and InvariantError on invalid field
/// values.  Species indices in all emitted documents are 1-based, matching
/// the n_1..n_N trajectory columns.
AnyModel parse_model_json(const std::string& text);
AnyModel load_model_file(const std::string& path);

std::string model_to_json(const GeneralizedModel& model);
std::string model_to_json(const LotkaVolterraModel& model);
std::string model_to_json(const ResourceModel& model);

std::string report_to_json(const AssumptionReport& report);
std::string ess_result_to_json(const EssResult& result);
std::string embedding_to_json(const EmbeddingResult& embedding);

/// One entry per stationary point, including its stability classification.
std::string stationary_points_to_json(const GeneralizedModel& model,
                                      const std::vector<StationaryPoint>& points);

std::string trajectory_summary_to_json(const GeneralizedModel& model, const Trajectory& traj,
                                       const std::string& csv_path);

/// Header `t,n_1,...,n_N,F,dFdt`; values with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace essdyn
