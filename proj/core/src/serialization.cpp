#include "reconstruct/serialization.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "reconstruct/error.hpp"

namespace recon {

namespace {

using json = nlohmann::json;

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<KernelFamily, 2> kFamilies{{{KernelFamily::gaussian, "gaussian"}, {KernelFamily::matern, "matern"}}};
constexpr NameTable<InterpolatorKind, 4> kKinds{{{InterpolatorKind::lagrange, "lagrange"},
                                                 {InterpolatorKind::spline, "spline"},
                                                 {InterpolatorKind::kernel, "kernel"},
                                                 {InterpolatorKind::gp, "gp"}}};
constexpr NameTable<MethodTag, 8> kMethods{{{MethodTag::gprr, "gprr"},
                                            {MethodTag::krr, "krr"},
                                            {MethodTag::fdp, "fdp"},
                                            {MethodTag::replication, "replication"},
                                            {MethodTag::gpr, "gpr"},
                                            {MethodTag::nystrom, "nystrom"},
                                            {MethodTag::spgp, "spgp"},
                                            {MethodTag::eb, "eb"}}};
constexpr NameTable<RegressionBasis, 3> kBases{
    {{RegressionBasis::none, "none"}, {RegressionBasis::constant, "constant"}, {RegressionBasis::linear, "linear"}}};
constexpr NameTable<SplineBoundary, 2> kBoundaries{
    {{SplineBoundary::not_a_knot, "not-a-knot"}, {SplineBoundary::natural, "natural"}}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
E value_of(const NameTable<E, N>& table, std::string_view s, const char* what) {
  for (const auto& [v, name] : table) {
    if (name == s) return v;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

json vec(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

VectorXd read_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

MatrixXd read_rows(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::BadSchema, "knots must be a non-empty array of rows");
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const std::size_t d = rows.front().size();
  MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d || d == 0) throw Error(ErrorCode::BadSchema, "knot rows differ in length");
    for (std::size_t k = 0; k < d; ++k) out(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  }
  return out;
}

json run_to_json(const RunRecord& r) {
  json j{{"method", r.method}, {"repetition", r.repetition}};
  if (r.inner >= 0) j["inner"] = r.inner;
  if (!std::isnan(r.sigma)) j["sigma"] = r.sigma;
  j["seed"] = r.seed;
  j["value"] = number_or_null(r.value);
  if (r.failed) {
    j["failed"] = true;
    j["error"] = r.error;
  }
  return j;
}

}  // namespace

std::string_view to_string(KernelFamily f) { return name_of(kFamilies, f); }
std::string_view to_string(InterpolatorKind k) { return name_of(kKinds, k); }
std::string_view to_string(MethodTag m) { return name_of(kMethods, m); }
std::string_view to_string(RegressionBasis g) { return name_of(kBases, g); }
std::string_view to_string(SplineBoundary b) { return name_of(kBoundaries, b); }

KernelFamily parse_kernel_family(std::string_view s) { return value_of(kFamilies, s, "kernel family"); }
InterpolatorKind parse_interpolator_kind(std::string_view s) { return value_of(kKinds, s, "interpolator"); }
MethodTag parse_method_tag(std::string_view s) { return value_of(kMethods, s, "method"); }
RegressionBasis parse_regression_basis(std::string_view s) { return value_of(kBases, s, "regression basis"); }
SplineBoundary parse_spline_boundary(std::string_view s) { return value_of(kBoundaries, s, "spline boundary"); }

json kernel_to_json(const KernelSpec& spec) {
  if (spec.family() == KernelFamily::gaussian) return {{"family", "gaussian"}, {"theta", vec(spec.theta())}};
  return {{"family", "matern"}, {"nu", spec.nu()}, {"phi", spec.phi()}};
}

KernelSpec kernel_from_json(const json& j) {
  try {
    switch (parse_kernel_family(j.at("family").get<std::string>())) {
      case KernelFamily::gaussian: return KernelSpec::gaussian(read_vec(j.at("theta")));
      case KernelFamily::matern: return KernelSpec::matern(j.at("nu").get<double>(), j.at("phi").get<double>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSchema, std::string("kernel: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadSchema) throw;
    throw Error(ErrorCode::BadSchema, std::string("kernel: ") + e.what());
  }
  throw Error(ErrorCode::BadSchema, "kernel: unknown family");
}

json model_to_json(const FittedModel& m) {
  json knots = json::array();
  for (Index i = 0; i < m.knots.size(); ++i) knots.push_back(vec(m.knots.points().row(i).transpose()));
  json j;
  j["interpolator"] = to_string(m.interpolator);
  j["method"] = to_string(m.method);
  j["knots"] = std::move(knots);
  j["gamma_hat"] = vec(m.gamma_hat);
  j["lambda"] = m.lambda;
  j["kernel"] = m.kernel ? kernel_to_json(*m.kernel) : json(nullptr);
  j["g_kind"] = to_string(m.g_kind);
  j["boundary"] = to_string(m.boundary);
  j["beta"] = vec(m.beta);
  j["weights"] = vec(m.weights);
  j["diagnostics"] = {{"gcv", number_or_null(m.diagnostics.gcv)},
                      {"jitter", m.diagnostics.jitter},
                      {"iterations", m.diagnostics.iterations}};
  return j;
}

FittedModel model_from_json(const json& j) {
  try {
    const json& diag = j.at("diagnostics");
    FittedModel m{
        .interpolator = parse_interpolator_kind(j.at("interpolator").get<std::string>()),
        .method = parse_method_tag(j.at("method").get<std::string>()),
        .knots = KnotSet(read_rows(j.at("knots"))),
        .gamma_hat = read_vec(j.at("gamma_hat")),
        .lambda = j.at("lambda").get<double>(),
        .kernel = j.at("kernel").is_null() ? std::nullopt : std::optional<KernelSpec>(kernel_from_json(j.at("kernel"))),
        .g_kind = parse_regression_basis(j.at("g_kind").get<std::string>()),
        .boundary = parse_spline_boundary(j.value("boundary", std::string("not-a-knot"))),
        .beta = read_vec(j.at("beta")),
        .weights = read_vec(j.at("weights")),
        .diagnostics = {.gcv = number_or_nan(diag.at("gcv")),
                        .jitter = diag.at("jitter").get<double>(),
                        .iterations = diag.at("iterations").get<int>()},
    };
    if (m.gamma_hat.size() != m.knots.size()) throw Error(ErrorCode::BadSchema, "gamma_hat length differs from knot count");
    const bool kernel_based = m.interpolator == InterpolatorKind::kernel || m.interpolator == InterpolatorKind::gp;
    if (kernel_based) {
      if (!m.kernel) throw Error(ErrorCode::BadSchema, "kernel model without a kernel spec");
      if (m.weights.size() != m.knots.size()) throw Error(ErrorCode::BadSchema, "weights length differs from knot count");
      if (m.beta.size() != regression_size(m.g_kind, m.knots.dimension())) {
        throw Error(ErrorCode::BadSchema, "beta length does not match g_kind");
      }
    } else if (m.knots.dimension() != 1) {
      throw Error(ErrorCode::BadSchema, "1-D interpolator with multi-dimensional knots");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadSchema, std::string("model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadSchema) throw;
    throw Error(ErrorCode::BadSchema, std::string("model: ") + e.what());
  }
}

json report_to_json(const BenchmarkReport& r) {
  json j;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  json runs = json::array();
  for (const auto& run : r.per_run) runs.push_back(run_to_json(run));
  j["per_run"] = std::move(runs);
  json summary = json::object();
  for (const auto& [key, s] : r.summary) {
    summary[key] = {{"mmse", number_or_null(s.mmse)}, {"mstd", number_or_null(s.mstd)},
                    {"mean_mse", number_or_null(s.mean_mse)}, {"sd", number_or_null(s.sd)},
                    {"runs", s.runs}, {"failures", s.failures}};
  }
  j["summary"] = std::move(summary);
  j["knots"] = r.knots;
  j["details"] = r.details;
  if (r.timings) j["timings"] = *r.timings;
  j["seed"] = r.seed;
  return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << dump_json(j);
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadSchema, path.string() + ": " + e.what());
  }
}

}  // namespace recon
