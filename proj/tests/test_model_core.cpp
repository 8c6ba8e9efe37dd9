#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "essdyn/errors.hpp"
#include "essdyn/model.hpp"
#include "essdyn/response.hpp"
#include "test_support.hpp"

using namespace essdyn;
namespace ts = testsupport;

TEST_CASE("discrete measure validates weights") {
  Eigen::VectorXd ok(3);
  ok << 1.0, 0.0, 2.0;  // zero weights are inert but legal
  CHECK(DiscreteMeasure(ok).node_count() == 3);

  Eigen::VectorXd neg(2);
  neg << 1.0, -0.5;
  CHECK_THROWS_AS(DiscreteMeasure{neg}, InvariantError);

  CHECK_THROWS_AS(DiscreteMeasure(Eigen::VectorXd::Zero(3)), InvariantError);
  CHECK_THROWS_AS(DiscreteMeasure(Eigen::VectorXd{}), InvariantError);
}

TEST_CASE("generalized model construction enforces the kernel relation") {
  Eigen::VectorXd r(2);
  r << 1.0, 1.0;
  Eigen::MatrixXd K(2, 2), B(2, 2);
  K << 1.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd C(2);
  C << 1.0, 2.0;
  B = C.asDiagonal() * K;
  const DiscreteMeasure measure(Eigen::VectorXd::Ones(2));

  CHECK_NOTHROW(GeneralizedModel(r, K, B, measure, C, ResponseFunction::identity()));

  Eigen::MatrixXd B_bad = B;
  B_bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(GeneralizedModel(r, K, B_bad, measure, C, ResponseFunction::identity()),
                  InvariantError);

  Eigen::VectorXd C_bad(2);
  C_bad << 1.0, 0.0;
  CHECK_THROWS_AS(GeneralizedModel(r, K, B, measure, C_bad, ResponseFunction::identity()),
                  InvariantError);

  CHECK_THROWS_AS(GeneralizedModel(r, K.topRows(1), B, measure, C, ResponseFunction::identity()),
                  DimensionError);

  Eigen::VectorXd r_bad(2);
  r_bad << 1.0, std::nan("");
  CHECK_THROWS_AS(GeneralizedModel(r_bad, K, B, measure, C, ResponseFunction::identity()),
                  InvariantError);
}

TEST_CASE("classical model rejects negative interactions") {
  Eigen::VectorXd r(2);
  r << 1.0, 1.0;
  Eigen::MatrixXd b(2, 2);
  b << 1.0, -0.1, 0.0, 1.0;
  CHECK_THROWS_AS(LotkaVolterraModel(r, b), InvariantError);
  CHECK_THROWS_AS(LotkaVolterraModel(r, Eigen::MatrixXd::Ones(2, 3)), DimensionError);
}

TEST_CASE("resource model validates fields") {
  Eigen::VectorXd d(1), I0(1);
  d << 0.2;
  I0 << 1.0;
  Eigen::MatrixXd eta(1, 1);
  eta << 1.0;
  CHECK_NOTHROW(ResourceModel(d, eta, I0));

  Eigen::VectorXd I0_bad(1);
  I0_bad << 0.0;
  CHECK_THROWS_AS(ResourceModel(d, eta, I0_bad), InvariantError);

  Eigen::MatrixXd eta_bad(1, 1);
  eta_bad << -0.5;
  CHECK_THROWS_AS(ResourceModel(d, eta_bad, I0), InvariantError);
  CHECK_THROWS_AS(ResourceModel(d, Eigen::MatrixXd::Ones(1, 3), I0), DimensionError);
}

TEST_CASE("response families evaluate consistently") {
  const ResponseFunction id = ResponseFunction::identity();
  CHECK(id.value(3.0) == 3.0);
  CHECK(id.derivative(3.0) == 1.0);
  CHECK(id.antiderivative(0.0) == 0.0);
  CHECK(id.antiderivative(2.0) == doctest::Approx(2.0));
  CHECK(std::isinf(id.limit_at_infinity()));

  const ResponseFunction sat = ResponseFunction::saturating(2.0);
  CHECK(sat.value(1.0) == doctest::Approx(1.0));  // 2 * 1/(1+1)
  CHECK(sat.derivative(0.0) == doctest::Approx(2.0));
  CHECK(sat.antiderivative(0.0) == 0.0);
  CHECK(sat.limit_at_infinity() == doctest::Approx(2.0));
  CHECK_THROWS_AS(ResponseFunction::saturating(0.0), InvariantError);
  CHECK_THROWS_AS(ResponseFunction::saturating(-1.0), InvariantError);

  // derivative and antiderivative agree with finite differences of value
  for (double x : {0.0, 0.3, 1.7, 9.0}) {
    const double h = 1e-6;
    const double fd_deriv = (sat.value(x + h) - sat.value(x - h)) / (2 * h);
    CHECK(sat.derivative(x) == doctest::Approx(fd_deriv).epsilon(1e-6));
    const double fd_value = (sat.antiderivative(x + h) - sat.antiderivative(x - h)) / (2 * h);
    CHECK(sat.value(x) == doctest::Approx(fd_value).epsilon(1e-6));
  }

  const ResponseFunction custom = ResponseFunction::custom(
      [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
      [](double x) { return x * x; }, std::numeric_limits<double>::infinity());
  CHECK(custom.value(1.5) == 3.0);
  CHECK(custom.family() == ResponseFunction::Family::custom);
  CHECK_THROWS_AS(
      ResponseFunction::custom(nullptr, [](double) { return 2.0; }, [](double x) { return x * x; },
                               1.0),
      InvariantError);
}

TEST_CASE("growth rates match hand values on the symmetric pair") {
  const GeneralizedModel model = ts::symmetric_pair_model();

  Eigen::VectorXd n(2);
  n << 1.0 / 3, 1.0 / 3;
  Eigen::VectorXd g = growth_rates(model, n);
  CHECK(std::abs(g(0)) < 1e-12);
  CHECK(std::abs(g(1)) < 1e-12);

  n << 1.0, 1.0;
  g = growth_rates(model, n);
  CHECK(g(0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(g(1) == doctest::Approx(-2.0).epsilon(1e-12));

  g = growth_rates(model, Eigen::VectorXd::Zero(2));
  CHECK(g(0) == doctest::Approx(1.0));
  CHECK(g(1) == doctest::Approx(1.0));

  CHECK_THROWS_AS(growth_rates(model, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("environment loads reproduce the interaction sums") {
  ts::Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lv = ts::random_balanced_lv(rng, 1 + trial % 5);
    const EmbeddingResult emb = ts::embed_auto(lv);
    const Eigen::VectorXd n = ts::random_vector(rng, lv.species_count(), 0.0, 2.0);
    const Eigen::VectorXd s = environment_loads(emb.model, n);
    CHECK(s.size() == emb.model.node_count());
    // sum_a w_a K_{i,a} s_a equals (b n)_i, the displayed kernel identity
    const Eigen::VectorXd lhs = emb.model.K() * emb.model.measure().weights().cwiseProduct(s);
    const Eigen::VectorXd rhs = lv.b() * n;
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      CHECK(ts::close_rel(lhs(i), rhs(i), 1e-12));
    }
  }
}

TEST_CASE("embedded growth rates equal the classical ones") {
  ts::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index N = 1 + trial % 6;
    const auto lv = trial % 2 == 0 ? ts::random_spd_lv(rng, N) : ts::random_balanced_lv(rng, N);
    const EmbeddingResult emb = ts::embed_auto(lv);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd n = ts::random_vector(rng, N, 0.0, 3.0);
      const Eigen::VectorXd ge = growth_rates(emb.model, n);
      const Eigen::VectorXd gc = lv_growth_rates(lv, n);
      for (Eigen::Index i = 0; i < N; ++i) CHECK(ts::close_rel(ge(i), gc(i), 1e-12));
    }
  }
}

TEST_CASE("chemostat rewrite is exact") {
  SUBCASE("single species hand values") {
    Eigen::VectorXd d(1), I0(1);
    d << 0.2;
    I0 << 1.0;
    Eigen::MatrixXd eta(1, 1);
    eta << 1.0;
    const ResourceModel rm(d, eta, I0);
    const GeneralizedModel gm = resource_to_generalized(rm);

    CHECK(gm.r()(0) == doctest::Approx(0.8));
    CHECK(gm.K()(0, 0) == 1.0);
    CHECK(gm.B()(0, 0) == 1.0);
    CHECK(gm.measure().weights()(0) == 1.0);
    CHECK(gm.response().family() == ResponseFunction::Family::saturating);

    Eigen::VectorXd n(1);
    n << 1.0;
    CHECK(resource_growth_rates(rm, n)(0) == doctest::Approx(0.3));
    CHECK(growth_rates(gm, n)(0) == doctest::Approx(0.3));
    n << 0.0;
    CHECK(resource_growth_rates(rm, n)(0) == doctest::Approx(0.8));
    CHECK(growth_rates(gm, n)(0) == doctest::Approx(0.8));
  }

  SUBCASE("random instances") {
    ts::Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
      const auto rm = ts::random_resource(rng, 1 + trial % 6, 1 + trial % 4);
      const GeneralizedModel gm = resource_to_generalized(rm);
      for (int k = 0; k < 100; ++k) {
        const Eigen::VectorXd n = ts::random_vector(rng, rm.species_count(), 0.0, 3.0);
        const Eigen::VectorXd gr = resource_growth_rates(rm, n);
        const Eigen::VectorXd gg = growth_rates(gm, n);
        for (Eigen::Index i = 0; i < n.size(); ++i) CHECK(ts::close_rel(gg(i), gr(i), 1e-12));
      }
    }
  }
}

TEST_CASE("identity response makes growth rates affine") {
  ts::Rng rng(5150);
  const GeneralizedModel model = ts::embed_auto(ts::random_spd_lv(rng, 4)).model;
  const Eigen::VectorXd g0 = growth_rates(model, Eigen::VectorXd::Zero(4));
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd x = ts::random_vector(rng, 4, 0.0, 2.0);
    const Eigen::VectorXd y = ts::random_vector(rng, 4, 0.0, 2.0);
    const Eigen::VectorXd lhs = growth_rates(model, x + y) - g0;
    const Eigen::VectorXd rhs = (growth_rates(model, x) - g0) + (growth_rates(model, y) - g0);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(ts::close_rel(lhs(i), rhs(i), 1e-12));
  }
}
