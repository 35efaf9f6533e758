#include "reconstruct/test_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "reconstruct/error.hpp"

namespace recon {

TestFunctionId parse_test_function(std::string_view name) {
  if (name == "f1d") return TestFunctionId::f1d;
  if (name == "I") return TestFunctionId::model_i;
  if (name == "II") return TestFunctionId::model_ii;
  if (name == "III") return TestFunctionId::model_iii;
  if (name == "borehole") return TestFunctionId::borehole;
  throw Error(ErrorCode::UnknownFunction, "unknown test function '" + std::string(name) + "'");
}

std::string_view to_string(TestFunctionId id) {
  switch (id) {
    case TestFunctionId::f1d: return "f1d";
    case TestFunctionId::model_i: return "I";
    case TestFunctionId::model_ii: return "II";
    case TestFunctionId::model_iii: return "III";
    case TestFunctionId::borehole: return "borehole";
  }
  return "?";
}

Index required_dimension(TestFunctionId id) {
  switch (id) {
    case TestFunctionId::f1d: return 1;
    case TestFunctionId::borehole: return 8;
    default: return 0;
  }
}

VectorXd borehole_inputs(const Eigen::Ref<const VectorXd>& x) {
  if (x.size() != 8) throw Error(ErrorCode::DimensionMismatch, "borehole takes 8 inputs");
  VectorXd p(8);
  for (Index i = 0; i < 8; ++i) {
    const auto k = static_cast<std::size_t>(i);
    p[i] = kBoreholeLower[k] + x[i] * (kBoreholeUpper[k] - kBoreholeLower[k]);
  }
  return p;
}

double borehole_physical(const Eigen::Ref<const VectorXd>& p) {
  if (p.size() != 8) throw Error(ErrorCode::DimensionMismatch, "borehole takes 8 inputs");
  const double rw = p[0], r = p[1], tu = p[2], hu = p[3], tl = p[4], hl = p[5], l = p[6], kw = p[7];
  const double log_ratio = std::log(r / rw);
  return 2.0 * std::numbers::pi * tu * (hu - hl) /
         (log_ratio * (1.0 + 2.0 * l * tu / (log_ratio * rw * rw * kw) + tu / tl));
}

double test_function(TestFunctionId id, const Eigen::Ref<const VectorXd>& x, bool ackley_standard) {
  const Index d = x.size();
  const Index need = required_dimension(id);
  if (d == 0 || (need != 0 && d != need)) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(to_string(id)) + " cannot take " + std::to_string(d) + " inputs");
  }
  constexpr double pi = std::numbers::pi;
  switch (id) {
    case TestFunctionId::f1d: return std::exp(-1.4 * x[0]) * std::cos(3.5 * pi * x[0]);
    case TestFunctionId::model_i: {
      double s = 0.0;
      for (Index j = 0; j < d; ++j) s += static_cast<double>(j + 1) * x[j] * x[j];
      return s;
    }
    case TestFunctionId::model_ii: {
      const double dd = static_cast<double>(d);
      const double second = ackley_standard ? (2.0 * pi * x.array()).cos().sum() / dd : 2.0 * pi * x.sum() / dd;
      return -20.0 * std::exp(-0.2 * std::sqrt(x.squaredNorm() / dd)) - std::exp(second) + 20.0 + std::numbers::e;
    }
    case TestFunctionId::model_iii: return -x.sum() * std::exp(-x.squaredNorm());
    case TestFunctionId::borehole: return borehole_physical(borehole_inputs(x));
  }
  return 0.0;
}

}  // namespace recon
