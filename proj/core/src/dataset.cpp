#include "reconstruct/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "reconstruct/error.hpp"
#include "reconstruct/random.hpp"

namespace recon {

MatrixXd uniform_points(Index n, Index d, std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  MatrixXd x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = rng.uniform();
  }
  return x;
}

VectorXd evaluate_function(TestFunctionId fn, const MatrixXd& x, bool ackley_standard) {
  VectorXd f(x.rows());
  for (Index i = 0; i < x.rows(); ++i) f[i] = test_function(fn, x.row(i).transpose(), ackley_standard);
  return f;
}

Dataset simulate(TestFunctionId fn, Index n, Index d, double sigma, std::uint64_t seed, bool ackley_standard) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");
  if (n < 1 || d < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and d >= 1");
  const Index need = required_dimension(fn);
  if (need != 0 && need != d) throw Error(ErrorCode::DimensionMismatch, "function dimension differs from d");

  // Inputs first, then the noise, from one stream.
  Rng rng(mix_seed(seed));
  Dataset ds;
  ds.x.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) ds.x(i, j) = rng.uniform();
  }
  ds.truth = evaluate_function(fn, ds.x, ackley_standard);
  ds.y = ds.truth;
  if (sigma > 0.0) {
    for (Index i = 0; i < n; ++i) ds.y[i] += sigma * rng.normal();
  }
  for (Index j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  ds.source_rows = n;
  return ds;
}

double mean_squared_error(const VectorXd& prediction, const VectorXd& truth) {
  if (prediction.size() != truth.size()) throw Error(ErrorCode::DimensionMismatch, "prediction and truth differ in length");
  if (truth.size() == 0) throw Error(ErrorCode::InvalidArgument, "no test points");
  return (prediction - truth).squaredNorm() / static_cast<double>(truth.size());
}

double evaluate(const FittedModel& model, const MatrixXd& x_test, const VectorXd& truth) {
  return mean_squared_error(predict(model, x_test), truth);
}

double mise_1d(const std::function<double(double)>& estimate, const std::function<double(double)>& truth,
               Index grid) {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "MISE grid needs at least two points");
  const double h = 1.0 / static_cast<double>(grid - 1);
  double sum = 0.0;
  for (Index i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) * h;
    const double e = estimate(x) - truth(x);
    sum += (i == 0 || i == grid - 1 ? 0.5 : 1.0) * e * e;
  }
  return sum * h;
}

double mise_1d(const FittedModel& model, const std::function<double(double)>& truth, Index grid) {
  if (model.knots.dimension() != 1) throw Error(ErrorCode::DimensionMismatch, "MISE needs a 1-D model");
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "MISE grid needs at least two points");
  MatrixXd x(grid, 1);
  for (Index i = 0; i < grid; ++i) x(i, 0) = static_cast<double>(i) / static_cast<double>(grid - 1);
  const VectorXd fhat = predict(model, x);
  Index k = 0;
  return mise_1d([&](double) { return fhat[k++]; }, truth, grid);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "row " << row << " column " << col + 1 << ": '" << cell << "' is not a finite number";
    throw Error(ErrorCode::BadSchema, msg.str());
  }
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::BadSchema, path.string() + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split_line(line);
  const std::size_t cols = table.header.size();
  if (cols == 0) throw Error(ErrorCode::BadSchema, "missing header row");

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_line(line);
    if (cells.size() != cols) {
      std::ostringstream msg;
      msg << "row " << rows + 1 << " has " << cells.size() << " columns, header has " << cols;
      throw Error(ErrorCode::BadSchema, msg.str());
    }
    for (std::size_t c = 0; c < cols; ++c) values.push_back(parse_number(cells[c], rows + 1, c));
    ++rows;
  }
  table.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Index>(rows), static_cast<Index>(cols));
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n' << std::setprecision(17);
  for (Index i = 0; i < table.values.rows(); ++i) {
    for (Index j = 0; j < table.values.cols(); ++j) out << (j ? "," : "") << table.values(i, j);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  const Index cols = t.values.cols();
  if (cols < 2) throw Error(ErrorCode::BadSchema, "need at least one input column and a response column");
  if (t.values.rows() == 0) throw Error(ErrorCode::BadSchema, "no data rows");
  Dataset ds;
  ds.x = t.values.leftCols(cols - 1);
  ds.y = t.values.col(cols - 1);
  ds.feature_names.assign(t.header.begin(), t.header.end() - 1);
  ds.response_name = t.header.back();
  ds.source_rows = t.values.rows();
  return ds;
}

void save_dataset_csv(const std::filesystem::path& path, const MatrixXd& x, const VectorXd& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "X rows and y length differ");
  CsvTable t;
  for (Index j = 0; j < x.cols(); ++j) t.header.push_back("x" + std::to_string(j + 1));
  t.header.emplace_back("y");
  t.values.resize(x.rows(), x.cols() + 1);
  t.values << x, y;
  write_csv(path, t);
}

Dataset load_ccpp(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  if (t.values.cols() != 5) {
    throw Error(ErrorCode::BadSchema, "CCPP file needs 5 columns AT,V,AP,RH,PE, got " + std::to_string(t.values.cols()));
  }
  const Index rows = t.values.rows();
  Dataset ds;
  ds.source_rows = rows;
  if (rows != kCcppRows) {
    ds.warnings.push_back("BadRowCount: expected " + std::to_string(kCcppRows) + " rows, found " + std::to_string(rows));
  }
  const Index train = std::min(rows, kCcppTrainRows);
  if (train < 2) throw Error(ErrorCode::BadSchema, "CCPP file has too few rows");
  const MatrixXd features = t.values.leftCols(4);
  const VectorXd response = t.values.col(4);
  const Eigen::RowVectorXd lo = features.topRows(train).colwise().minCoeff();
  const Eigen::RowVectorXd hi = features.topRows(train).colwise().maxCoeff();
  if (((hi - lo).array() <= 0.0).any()) throw Error(ErrorCode::DegenerateData, "a CCPP feature is constant on the training rows");
  const Eigen::RowVectorXd span = hi - lo;
  auto scale = [&](const MatrixXd& f) {
    MatrixXd s = f.rowwise() - lo;
    s.array().rowwise() /= span.array();
    return s;
  };
  ds.x = scale(features.topRows(train));
  // Exact endpoints even when (x - lo)/(hi - lo) rounds.
  for (Index j = 0; j < 4; ++j) {
    for (Index i = 0; i < train; ++i) {
      if (features(i, j) == lo[j]) ds.x(i, j) = 0.0;
      if (features(i, j) == hi[j]) ds.x(i, j) = 1.0;
    }
  }
  ds.y = response.head(train);
  ds.x_test = scale(features.bottomRows(rows - train));
  ds.y_test = response.tail(rows - train);
  ds.feature_names.assign(t.header.begin(), t.header.begin() + 4);
  ds.response_name = t.header[4];
  return ds;
}

}  // namespace recon
