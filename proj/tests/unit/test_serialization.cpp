#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace recon;
using nlohmann::json;
using testing::max_abs;

namespace {

std::vector<FittedModel> every_kind() {
  std::vector<FittedModel> models;
  const Dataset d = simulate(TestFunctionId::model_iii, 60, 2, 0.1, 1);
  const KernelSpec spec = KernelSpec::gaussian(VectorXd::LinSpaced(2, 5.0, 15.0));
  const KnotSet knots(d.x.topRows(12));
  const VarianceParams vp{1.0, 0.05};
  models.push_back(fit_gprr(d.x, d.y, knots, spec, RegressionBasis::linear, LambdaPolicy::gcv()));
  models.push_back(fit_gprr(d.x, d.y, KnotSet(d.x), spec, RegressionBasis::constant, LambdaPolicy::fixed(1e-3)));
  models.push_back(fit_krr(d.x, d.y, spec, 1e-3));
  models.push_back(fit_krr(d.x, d.y, KernelSpec::matern(1.5, 0.4), LambdaPolicy::gcv()));
  models.push_back(fit_gpr(d.x, d.y, spec, RegressionBasis::linear, LambdaPolicy::gcv()));
  models.push_back(fit_nystrom(d.x, d.y, knots, spec, RegressionBasis::linear, LambdaPolicy::gcv()));
  models.push_back(fit_spgp(d.x, d.y, knots, spec, vp));
  models.push_back(fit_empirical_bayes(d.x, d.y, knots, spec, vp));

  Rng rng(mix_seed(2));
  VectorXd y(40);
  for (Index i = 0; i < 40; ++i) y(i) = std::sin(6.0 * i / 39.0) + 0.1 * rng.normal();
  models.push_back(fdp_model(fit_fdp(y, LambdaPolicy::gcv())));
  models.push_back(fdp_model(fit_fdp(y, LambdaPolicy::fixed(1e-4), SplineBoundary::natural)));
  const VectorXd cheb = chebyshev_knots(7);
  models.push_back(fit_replication(replication_design(cheb, 2), testing::random_vector(14, 3), InterpolatorKind::lagrange));
  models.push_back(fit_replication(replication_design(equispaced_knots(7), 2), testing::random_vector(14, 4),
                                   InterpolatorKind::spline, SplineBoundary::natural));
  return models;
}

MatrixXd probe_points(Index d) { return uniform_points(200, d, 77); }

}  // namespace

TEST_CASE("model round trip is prediction-identical") {
  const auto dir = std::filesystem::temp_directory_path() / "reconstruct_test_serialization";
  std::filesystem::create_directories(dir);
  int k = 0;
  for (const FittedModel& m : every_kind()) {
    CAPTURE(to_string(m.method));
    CAPTURE(to_string(m.interpolator));
    const MatrixXd xt = probe_points(m.knots.dimension());
    const VectorXd before = predict(m, xt);

    const FittedModel back = model_from_json(json::parse(dump_json(model_to_json(m))));
    CHECK(max_abs(predict(back, xt) - before) <= 1e-12 * (1.0 + max_abs(before)));
    CHECK(back.method == m.method);
    CHECK(back.interpolator == m.interpolator);
    CHECK(back.g_kind == m.g_kind);
    CHECK(back.boundary == m.boundary);
    CHECK(back.lambda == m.lambda);
    CHECK(max_abs(back.gamma_hat - m.gamma_hat) == 0.0);
    CHECK(back.kernel == m.kernel);
    CHECK((std::isnan(m.diagnostics.gcv) ? std::isnan(back.diagnostics.gcv) : back.diagnostics.gcv == m.diagnostics.gcv));

    const auto path = dir / ("model" + std::to_string(k++) + ".json");
    save_model(path, m);
    CHECK(max_abs(predict(load_model(path), xt) - before) <= 1e-12 * (1.0 + max_abs(before)));
    CHECK(dump_json(model_to_json(load_model(path))) == dump_json(model_to_json(m)));
  }
}

TEST_CASE("kernel JSON") {
  const json g = kernel_to_json(KernelSpec::gaussian(VectorXd::LinSpaced(3, 1.0, 3.0)));
  CHECK(g.at("family") == "gaussian");
  CHECK(g.at("theta") == json::array({1.0, 2.0, 3.0}));
  const json m = kernel_to_json(KernelSpec::matern(0.5, 1.0));
  CHECK(m == json::parse(R"({"family":"matern","nu":0.5,"phi":1.0})"));
  CHECK(kernel_from_json(m) == KernelSpec::matern(0.5, 1.0));
  CHECK(kernel_from_json(g) == KernelSpec::gaussian(VectorXd::LinSpaced(3, 1.0, 3.0)));
  try {
    kernel_from_json(json::parse(R"({"family":"cauchy"})"));
    FAIL("expected BadSchema");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadSchema);
  }
}

TEST_CASE("enum names") {
  for (MethodTag t : {MethodTag::gprr, MethodTag::krr, MethodTag::fdp, MethodTag::replication, MethodTag::gpr,
                      MethodTag::nystrom, MethodTag::spgp, MethodTag::eb}) {
    CHECK(parse_method_tag(to_string(t)) == t);
  }
  for (RegressionBasis g : {RegressionBasis::none, RegressionBasis::constant, RegressionBasis::linear}) {
    CHECK(parse_regression_basis(to_string(g)) == g);
  }
  CHECK(to_string(SplineBoundary::not_a_knot) == "not-a-knot");
  CHECK(parse_spline_boundary("natural") == SplineBoundary::natural);
  CHECK_THROWS_AS(parse_interpolator_kind("rbf"), Error);
}

TEST_CASE("malformed model documents") {
  const Dataset d = simulate(TestFunctionId::model_i, 30, 2, 0.1, 5);
  const json good = model_to_json(fit_gprr(d.x, d.y, KnotSet(d.x.topRows(8)), KernelSpec::gaussian(2, 12.5),
                                           RegressionBasis::linear, LambdaPolicy::none()));
  const auto expect_bad = [](const json& j) {
    try {
      model_from_json(j);
      FAIL("expected BadSchema");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadSchema);
    }
  };
  json missing = good;
  missing.erase("gamma_hat");
  expect_bad(missing);
  json short_gamma = good;
  short_gamma["gamma_hat"].erase(0);
  expect_bad(short_gamma);
  json bad_beta = good;
  bad_beta["beta"] = json::array({1.0});
  expect_bad(bad_beta);
  json bad_kind = good;
  bad_kind["interpolator"] = "rbf";
  expect_bad(bad_kind);
  json no_kernel = good;
  no_kernel["kernel"] = nullptr;
  expect_bad(no_kernel);
  json outside = good;
  outside["knots"][0][0] = 1.5;
  expect_bad(outside);
  expect_bad(json::parse("[1, 2, 3]"));

  const auto path = std::filesystem::temp_directory_path() / "reconstruct_test_serialization_bad.json";
  {
    std::ofstream(path) << "{ not json";
  }
  try {
    load_model(path);
    FAIL("expected BadSchema");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadSchema);
  }
}

TEST_CASE("report JSON layout") {
  BenchmarkReport r;
  r.experiment = "table1";
  r.seed = 4;
  RunRecord ok;
  ok.method = "gprr";
  ok.value = 0.5;
  RunRecord failed;
  failed.method = "krr";
  failed.repetition = 1;
  failed.failed = true;
  failed.error = "SingularSystem: x";
  RunRecord nested;
  nested.method = "spgp";
  nested.inner = 2;
  nested.sigma = 0.1;
  nested.value = 1.0;
  r.per_run = {ok, failed, nested};
  r.summary = summarize(r.per_run);
  const json j = report_to_json(r);
  CHECK(j.at("experiment") == "table1");
  CHECK(j.at("seed") == 4);
  CHECK_FALSE(j.at("per_run")[0].contains("inner"));
  CHECK_FALSE(j.at("per_run")[0].contains("sigma"));
  CHECK_FALSE(j.at("per_run")[0].contains("failed"));
  CHECK(j.at("per_run")[1].at("failed") == true);
  CHECK(j.at("per_run")[1].at("error") == "SingularSystem: x");
  CHECK(j.at("per_run")[2].at("inner") == 2);
  CHECK(j.at("summary").contains("spgp@0.10"));
  CHECK(j.at("summary").at("krr").at("failures") == 1);
  CHECK_FALSE(j.contains("timings"));
  CHECK(dump_json(j).back() == '\n');
}
