#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "essdyn/equilibrium.hpp"
#include "essdyn/errors.hpp"
#include "essdyn/io.hpp"
#include "essdyn/model.hpp"
#include "essdyn/symmetry.hpp"
#include "test_support.hpp"

using namespace essdyn;
namespace ts = testsupport;
using nlohmann::json;

namespace {

const std::string kCli = ESSDYN_CLI_PATH;

std::string workdir() {
  static const std::string dir = [] {
    const auto path = std::filesystem::temp_directory_path() / "essdyn_cli_tests";
    std::filesystem::create_directories(path);
    return path.string();
  }();
  return dir;
}

std::string model_file(const std::string& name, const std::string& content) {
  const std::string path = workdir() + "/" + name;
  ts::write_file(path, content);
  return name;  // relative to the workdir the CLI runs in
}

ts::CliResult cli(const std::string& args) { return ts::run_cli(kCli, args, workdir()); }

const std::string kSymmetricLv =
    R"({"kind":"lotka_volterra","r":[1.0,1.0],"b":[[2.0,1.0],[1.0,2.0]]})";
const std::string kBoundaryLv =
    R"({"kind":"lotka_volterra","r":[1.0,0.5],"b":[[1.0,0.9],[0.9,1.0]]})";
const std::string kResource =
    R"({"kind":"resource","death_rates":[0.2],"eta":[[1.0]],"supply":[1.0]})";

template <typename A, typename B>
bool exact_equal(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.rows() == 0 || (a - b).cwiseAbs().maxCoeff() == 0.0);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

TEST_CASE("version and help") {
  CHECK(cli("--version").exit_code == 0);
  CHECK(cli("--version").out.find("essdyn") != std::string::npos);
  CHECK(cli("--help").exit_code == 0);
}

TEST_CASE("argument errors exit with the usage code") {
  CHECK(cli("").exit_code == 2);              // a subcommand is required
  CHECK(cli("check").exit_code == 2);         // --model is required
  CHECK(cli("frobnicate").exit_code == 2);    // unknown subcommand
  CHECK(cli("simulate --model x.json").exit_code == 2);  // --n0 is required
}

TEST_CASE("unreadable and malformed model files exit with the usage code") {
  CHECK(cli("check --model missing.json").exit_code == 2);
  const std::string garbage = model_file("garbage.json", "{not json");
  auto res = cli("check --model " + garbage);
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("invalid JSON") != std::string::npos);
  const std::string badkind = model_file("badkind.json", R"({"kind":"predator"})");
  CHECK(cli("check --model " + badkind).exit_code == 2);
  const std::string neg =
      model_file("neg.json", R"({"kind":"lotka_volterra","r":[1.0,1.0],"b":[[1.0,-0.5],[0.5,1.0]]})");
  res = cli("simulate --model " + neg + " --n0 0.5,0.5");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("b(1,2)") != std::string::npos);
}

TEST_CASE("check reports hypotheses and exits accordingly") {
  const std::string f = model_file("sym.json", kSymmetricLv);
  auto res = cli("check --model " + f);
  CHECK(res.exit_code == 0);
  const json report = json::parse(res.out);
  CHECK(report.at("hypotheses_pass").get<bool>());
  CHECK(report.at("symmetry").at("pass").get<bool>());
  CHECK(report.at("non_extinction").at("margin").get<double>() == 1.0);
  CHECK(report.at("non_degeneracy").at("verdict").get<std::string>() == "unverified");

  res = cli("check --enumerate --model " + f);
  CHECK(res.exit_code == 0);
  CHECK(json::parse(res.out).at("non_degeneracy").at("verdict").get<std::string>() ==
        "verified_heuristically");

  const std::string nobal =
      model_file("nobal.json", R"({"kind":"lotka_volterra","r":[1.0,1.0],"b":[[1.0,1.0],[0.0,1.0]]})");
  res = cli("check --model " + nobal);
  CHECK(res.exit_code == 1);
  const json failed = json::parse(res.out);
  CHECK_FALSE(failed.at("hypotheses_pass").get<bool>());
  CHECK_FALSE(failed.at("symmetry").at("pass").get<bool>());
  CHECK(failed.at("symmetry").at("violating_species").get<int>() == 1);
}

TEST_CASE("ess solves the model behind the file") {
  const std::string f = model_file("sym2.json", kSymmetricLv);
  auto res = cli("ess --model " + f);
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out.at("n").size() == 2);
  CHECK(out.at("n")[0].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-10));
  CHECK(out.at("support") == json::array({1, 2}));
  CHECK(out.at("method").get<std::string>() == "active_set_newton");
  CHECK(out.at("F_value").get<double>() == doctest::Approx(-1.0 / 3).epsilon(1e-10));

  // the CLI must agree bitwise with an in-process solve of the same file
  const auto model = std::get<LotkaVolterraModel>(load_model_file(workdir() + "/sym2.json"));
  const EssResult direct = solve_ess(ts::embed_auto(model).model);
  CHECK(out.at("n")[0].get<double>() == direct.n(0));
  CHECK(out.at("n")[1].get<double>() == direct.n(1));

  // subset enumeration backend reaches the same state
  res = cli("ess --enumerate --model " + f);
  REQUIRE(res.exit_code == 0);
  const json via_enum = json::parse(res.out);
  CHECK(via_enum.at("method").get<std::string>() == "subset_enumeration");
  CHECK(via_enum.at("n")[0].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-8));
}

TEST_CASE("ess propagates hypothesis violations as failures") {
  const std::string f = model_file(
      "nonviable.json", R"({"kind":"lotka_volterra","r":[1.0,-0.5],"b":[[2.0,1.0],[1.0,2.0]]})");
  auto res = cli("ess --model " + f);
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("non-extinction fails") != std::string::npos);
}

TEST_CASE("embed emits the symmetric form") {
  const std::string f = model_file("sym3.json", kSymmetricLv);
  auto res = cli("embed --model " + f);
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out.at("C") == json::array({1.0, 1.0}));
  CHECK(out.at("eigenvalues")[0].get<double>() == doctest::Approx(1.0));
  CHECK(out.at("eigenvalues")[1].get<double>() == doctest::Approx(3.0));
  CHECK(out.at("model").at("kind").get<std::string>() == "generalized");

  // embedding something that is not a classical system is a usage error
  const std::string r = model_file("res.json", kResource);
  CHECK(cli("embed --model " + r).exit_code == 2);
}

TEST_CASE("embed output feeds back into every other subcommand") {
  const std::string f = model_file("sym4.json", kSymmetricLv);
  REQUIRE(cli("embed --model " + f + " --out general.json").exit_code == 0);
  // the --out document is the embedding; extract its model field for reuse,
  // preserving key order so the document comparison below is byte-exact
  const auto emb = nlohmann::ordered_json::parse(ts::slurp(workdir() + "/general.json"));
  ts::write_file(workdir() + "/gmodel.json", emb.at("model").dump(2));

  CHECK(cli("check --model gmodel.json").exit_code == 0);
  auto res = cli("ess --model gmodel.json");
  REQUIRE(res.exit_code == 0);
  CHECK(json::parse(res.out).at("n")[0].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-10));

  // parse -> serialize is the identity on the emitted document
  const auto loaded = std::get<GeneralizedModel>(load_model_file(workdir() + "/gmodel.json"));
  CHECK(model_to_json(loaded) == emb.at("model").dump(2));
}

TEST_CASE("enumerate lists classified stationary points") {
  const std::string f = model_file("sym5.json", kSymmetricLv);
  auto res = cli("enumerate --model " + f);
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.out);
  CHECK(out.at("count").get<int>() == 4);
  int ess_count = 0;
  for (const auto& p : out.at("points")) {
    const std::string tag = p.at("classification").at("tag").get<std::string>();
    CHECK((tag == "attracting_ESS" || tag == "unstable"));
    if (p.at("is_ess").get<bool>()) {
      ++ess_count;
      CHECK(p.at("support") == json::array({1, 2}));
    }
  }
  CHECK(ess_count == 1);
}

TEST_CASE("simulate writes a well-formed trajectory table") {
  const std::string f = model_file("sym6.json", kSymmetricLv);
  auto res = cli("simulate --model " + f + " --n0 0.9,0.8 --t-end 200 --out traj.csv");
  REQUIRE(res.exit_code == 0);

  const json summary = json::parse(res.out);
  CHECK(summary.at("terminated_by").get<std::string>() == "converged");
  CHECK(summary.at("csv_path").get<std::string>() == "traj.csv");
  CHECK(summary.at("lyapunov_monotone").at("pass").get<bool>());
  CHECK(summary.at("terminal_state")[0].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-5));
  CHECK(summary.at("F_final").get<double>() == doctest::Approx(-1.0 / 3).epsilon(1e-5));

  const std::vector<std::string> lines = split(ts::slurp(workdir() + "/traj.csv"), '\n');
  REQUIRE(lines.size() > 3);
  CHECK(lines[0] == "t,n_1,n_2,F,dFdt");
  double prev_t = -1.0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto cells = split(lines[k], ',');
    REQUIRE(cells.size() == 5);  // N + 3 columns
    const double t = std::stod(cells[0]);
    CHECK(t > prev_t);
    prev_t = t;
  }
}

TEST_CASE("simulate without an output file streams the table to stdout") {
  const std::string f = model_file("sym7.json", kSymmetricLv);
  auto res = cli("simulate --model " + f + " --n0 0.5,0.5 --t-end 20");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.rfind("t,n_1,n_2,F,dFdt", 0) == 0);
  const json summary = json::parse(res.err);  // summary moves to stderr
  CHECK(summary.at("csv_path").is_null());
  CHECK(summary.at("records").get<int>() > 3);
}

TEST_CASE("simulate reports an exhausted step budget as a failure") {
  const std::string f = model_file("sym8.json", kSymmetricLv);
  auto res = cli("simulate --model " + f + " --n0 0.9,0.8 --t-end 1000 --max-steps 5 --out t.csv");
  CHECK(res.exit_code == 1);
  CHECK(json::parse(res.out).at("terminated_by").get<std::string>() == "max_steps");
}

TEST_CASE("the resource form works end to end") {
  const std::string f = model_file("res2.json", kResource);
  auto res = cli("check --model " + f);
  CHECK(res.exit_code == 0);
  res = cli("ess --model " + f);
  REQUIRE(res.exit_code == 0);
  // stationary load s solves 0.8 = s/(1+s) twice over: n = s = 4
  CHECK(json::parse(res.out).at("n")[0].get<double>() == doctest::Approx(4.0).epsilon(1e-8));
  res = cli("simulate --model " + f + " --n0 0.1 --t-end 200 --out r.csv");
  CHECK(res.exit_code == 0);
  CHECK(json::parse(res.out).at("terminal_state")[0].get<double>() ==
        doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("a global seed option is accepted for reproducibility") {
  const std::string f = model_file("sym9.json", kSymmetricLv);
  CHECK(cli("--seed 7 ess --model " + f).exit_code == 0);
}

TEST_CASE("serialization round-trips numbers exactly") {
  ts::Rng rng(31415);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lv = ts::random_spd_lv(rng, 2 + trial % 4);
    const GeneralizedModel gm = ts::embed_auto(lv).model;

    const std::string once = model_to_json(gm);
    const auto back = std::get<GeneralizedModel>(parse_model_json(once));
    CHECK(model_to_json(back) == once);
    CHECK(exact_equal(back.r(), gm.r()));
    CHECK(exact_equal(back.K(), gm.K()));
    CHECK(exact_equal(back.B(), gm.B()));
    CHECK(exact_equal(back.C(), gm.C()));
    CHECK(exact_equal(back.measure().weights(), gm.measure().weights()));

    const std::string lv_doc = model_to_json(lv);
    const auto lv_back = std::get<LotkaVolterraModel>(parse_model_json(lv_doc));
    CHECK(exact_equal(lv_back.r(), lv.r()));
    CHECK(exact_equal(lv_back.b(), lv.b()));
    CHECK(model_to_json(lv_back) == lv_doc);
  }
  ts::Rng rng2(27182);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rm = ts::random_resource(rng2, 1 + trial % 4, 1 + trial % 3);
    const std::string doc = model_to_json(rm);
    const auto back = std::get<ResourceModel>(parse_model_json(doc));
    CHECK(exact_equal(back.d(), rm.d()));
    CHECK(exact_equal(back.eta(), rm.eta()));
    CHECK(exact_equal(back.I0(), rm.I0()));
    CHECK(model_to_json(back) == doc);
  }
}

TEST_CASE("parse errors carry usable messages") {
  CHECK_THROWS_AS(parse_model_json(R"({"kind":"lotka_volterra","r":[1.0]})"), ParseError);
  CHECK_THROWS_AS(parse_model_json(R"({"r":[1.0],"b":[[1.0]]})"), ParseError);
  // well-formed JSON with mismatched shapes fails model validation instead
  CHECK_THROWS_AS(parse_model_json(R"({"kind":"lotka_volterra","r":[1.0],"b":[[1.0],[2.0]]})"),
                  InvariantError);
  CHECK_THROWS_AS(parse_model_json(R"({"kind":"lotka_volterra","r":[1.0],"b":[[1.0,2.0],[3.0]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_model_json("[1,2,3]"), ParseError);
  const std::string bad_response =
      R"({"kind":"generalized","r":[1.0],"K":[[1.0]],"B":[[1.0]],"weights":[1.0],"C":[1.0],)"
      R"("response":{"family":"cubic"}})";
  CHECK_THROWS_AS(parse_model_json(bad_response), ParseError);
}
